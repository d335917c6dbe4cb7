#include "taglife/episodes.hpp"

#include <algorithm>
#include <iostream>
#include <unordered_map>
#include <unordered_set>

#include "taglife/errors.hpp"
#include "taglife/text.hpp"

namespace taglife {

void EpisodeConfig::validate() const {
  if (episode_id.empty()) throw UsageError("episode_id must be nonempty");
  if (peak_duration_min <= 0) throw UsageError("peak_duration must be positive");
  if (lookback_hours <= 0) throw UsageError("lookback must be positive");
  if (tracking_hours * 60 < peak_duration_min)
    throw UsageError("tracking window must cover the peak window");
  if (min_users < 1) throw UsageError("min_users must be >= 1");
}

std::vector<std::string> find_novel(const EventStream& stream, const EpisodeConfig& config) {
  config.validate();
  // Coverage must begin within the first minute of the lookback interval.
  if (stream.empty() || stream.events.front().timestamp >= config.lookback_start() + 60)
    throw DataError("episode '" + config.episode_id +
                    "': stream does not cover the lookback interval");

  // First occurrence per tag over the whole stream, plus lookback presence.
  std::unordered_map<std::string, std::int64_t> first_seen;
  std::unordered_set<std::string> in_lookback;
  for (const TweetEvent& ev : stream.events) {
    for (const std::string& tag : ev.hashtags) {
      first_seen.emplace(tag, ev.timestamp);
      if (ev.timestamp >= config.lookback_start() && ev.timestamp < config.event_start)
        in_lookback.insert(tag);
    }
  }

  std::vector<std::string> novel;
  for (const auto& [tag, ts] : first_seen) {
    if (ts >= config.event_start && ts < config.peak_end() && !in_lookback.count(tag))
      novel.push_back(tag);
  }
  std::sort(novel.begin(), novel.end());
  return novel;
}

std::size_t tracked_user_count(const EventStream& stream, const EpisodeConfig& config,
                               const std::string& tag) {
  std::unordered_set<std::string> users;
  for (const TweetEvent& ev : stream.events) {
    if (ev.timestamp < config.event_start) continue;
    if (ev.timestamp >= config.tracking_end()) break;
    if (ev.has_tag(tag)) users.insert(ev.user_id);
  }
  return users.size();
}

std::vector<std::string> filter_pop(const EventStream& stream, const EpisodeConfig& config,
                                    const std::vector<std::string>& novel) {
  std::unordered_map<std::string, std::unordered_set<std::string>> users;
  const std::unordered_set<std::string> wanted(novel.begin(), novel.end());
  for (const TweetEvent& ev : stream.events) {
    if (ev.timestamp < config.event_start) continue;
    if (ev.timestamp >= config.tracking_end()) break;
    for (const std::string& tag : ev.hashtags)
      if (wanted.count(tag)) users[tag].insert(ev.user_id);
  }
  std::vector<std::string> pop;
  for (const std::string& tag : novel) {
    auto it = users.find(tag);
    if (it != users.end() && it->second.size() >= static_cast<std::size_t>(config.min_users))
      pop.push_back(tag);
  }
  return pop;
}

std::vector<std::string> filter_relevant(const EventStream& stream, const EpisodeConfig& config,
                                         const std::vector<std::string>& pop,
                                         const std::vector<std::string>& keywords) {
  if (keywords.empty()) {
    std::cerr << "warning: empty keyword list, keeping all " << pop.size()
              << " pop hashtags\n";
    return pop;
  }
  std::unordered_set<std::string> matched;
  const std::unordered_set<std::string> wanted(pop.begin(), pop.end());
  auto matches = [&](const std::string& s) {
    for (const std::string& kw : keywords)
      if (icontains(s, kw)) return true;
    return false;
  };
  for (const std::string& tag : pop)
    if (matches(tag)) matched.insert(tag);
  for (const TweetEvent& ev : stream.events) {
    if (ev.timestamp < config.event_start) continue;
    if (ev.timestamp >= config.tracking_end()) break;
    if (!matches(ev.text)) continue;
    for (const std::string& tag : ev.hashtags)
      if (wanted.count(tag)) matched.insert(tag);
  }
  std::vector<std::string> relevant;
  for (const std::string& tag : pop)
    if (matched.count(tag)) relevant.push_back(tag);
  return relevant;
}

HashtagEpisode build_episode(const EventStream& stream, const EpisodeConfig& config,
                             const std::string& tag) {
  HashtagEpisode ep;
  ep.tag = tag;
  ep.episode_id = config.episode_id;
  ep.event_start = config.event_start;
  ep.tracking_minutes = config.tracking_minutes();
  for (const TweetEvent& ev : stream.events) {
    if (ev.timestamp < config.event_start) continue;
    if (ev.timestamp >= config.tracking_end()) break;
    if (ev.has_tag(tag)) ep.events.push_back(ev);
  }
  if (ep.events.empty())
    throw DataError("tag '" + tag + "' absent from tracking window of episode '" +
                    config.episode_id + "'");
  ep.t0 = ep.events.front().timestamp;
  return ep;
}

}  // namespace taglife
