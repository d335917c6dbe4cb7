#include "taglife/vibrancy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "taglife/errors.hpp"

namespace taglife {

namespace {

bool audience_order(const AudienceUser& a, const AudienceUser& b) {
  if (a.follower_count != b.follower_count) return a.follower_count > b.follower_count;
  return a.user_id < b.user_id;
}

double top_slice_mean(const std::vector<AudienceUser>& sorted, double quantile) {
  const std::size_t n = sorted.size();
  const std::size_t take =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((1.0 - quantile) * n)));
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += static_cast<double>(sorted[i].follower_count);
  return sum / static_cast<double>(take);
}

}  // namespace

double expected_audience(std::vector<AudienceUser> users, double quantile) {
  if (users.empty()) throw DataError("expected_audience: empty user set");
  if (!(quantile > 0.0 && quantile < 1.0))
    throw UsageError("expected_audience: quantile must lie in (0,1)");
  std::sort(users.begin(), users.end(), audience_order);
  return top_slice_mean(users, quantile);
}

std::vector<VibrancyFrame> frame_series(const HashtagEpisode& episode) {
  const int first = episode.t0_minute();
  const int last = episode.tracking_minutes - 1;
  std::vector<VibrancyFrame> frames;
  frames.reserve(static_cast<std::size_t>(last - first + 1));

  std::unordered_set<std::string> sources;       // distinct retweeted originals
  std::unordered_set<std::string> seen_users;
  std::vector<AudienceUser> audience;            // sorted by audience_order

  std::size_t next = 0;
  double follow_peak = 0.0;  // the expected LARGEST audience so far
  for (int minute = first; minute <= last; ++minute) {
    VibrancyFrame f;
    f.minute = minute;
    const std::int64_t minute_end = episode.event_start + 60LL * (minute + 1);
    while (next < episode.events.size() && episode.events[next].timestamp < minute_end) {
      const TweetEvent& ev = episode.events[next];
      ++f.y;
      if (ev.is_retweet()) {
        ++f.rt;
        sources.insert(*ev.retweet_of);
      } else if (ev.is_reply()) {
        ++f.rp;
      }
      if (seen_users.insert(ev.user_id).second) {
        AudienceUser u{ev.user_id, ev.follower_count};
        audience.insert(std::upper_bound(audience.begin(), audience.end(), u, audience_order),
                        std::move(u));
      }
      ++next;
    }
    f.src_alpha = static_cast<std::int64_t>(sources.size());
    if (!audience.empty()) follow_peak = std::max(follow_peak, top_slice_mean(audience, 0.9));
    f.follow_alpha = follow_peak;
    frames.push_back(f);
  }
  return frames;
}

std::vector<EnvFrame> env_series(const HashtagEpisode& episode, const EventStream& stream) {
  const int first = episode.t0_minute();
  const int last = episode.tracking_minutes - 1;
  std::vector<EnvFrame> frames;
  frames.reserve(static_cast<std::size_t>(last - first + 1));

  std::unordered_set<std::string> env_sources;
  const std::int64_t window_start = episode.event_start;
  const std::int64_t window_end = episode.event_start + 60LL * episode.tracking_minutes;

  // Accumulate sources appearing before the first frame so src_env_alpha
  // counts everything since the tracking window opened.
  std::size_t next = 0;
  while (next < stream.events.size() && stream.events[next].timestamp < window_start) ++next;
  const std::int64_t first_minute_start = episode.event_start + 60LL * first;
  while (next < stream.events.size() && stream.events[next].timestamp < first_minute_start) {
    const TweetEvent& ev = stream.events[next];
    if (ev.is_retweet() && !ev.has_tag(episode.tag)) env_sources.insert(*ev.retweet_of);
    ++next;
  }

  for (int minute = first; minute <= last; ++minute) {
    EnvFrame f;
    f.minute = minute;
    const std::int64_t minute_end = episode.event_start + 60LL * (minute + 1);
    while (next < stream.events.size() && stream.events[next].timestamp < minute_end &&
           stream.events[next].timestamp < window_end) {
      const TweetEvent& ev = stream.events[next];
      if (!ev.has_tag(episode.tag)) {
        if (ev.is_retweet()) {
          ++f.rt_env;
          env_sources.insert(*ev.retweet_of);
        } else if (ev.is_reply()) {
          ++f.rp_env;
        }
      }
      ++next;
    }
    f.src_env_alpha = static_cast<std::int64_t>(env_sources.size());
    frames.push_back(f);
  }
  return frames;
}

AggregateVibrancy aggregate_at(const std::vector<VibrancyFrame>& frames, int cut_minute) {
  if (frames.empty()) throw DataError("aggregate_at: empty frame series");
  if (cut_minute < frames.front().minute || cut_minute > frames.back().minute)
    throw DataError("aggregate_at: cut minute " + std::to_string(cut_minute) +
                    " outside frame range");
  AggregateVibrancy agg;
  for (const VibrancyFrame& f : frames) {
    if (f.minute > cut_minute) break;
    agg.rt_alpha += static_cast<double>(f.rt);
    agg.rp_alpha += static_cast<double>(f.rp);
    if (f.minute == cut_minute) {
      agg.src_alpha = static_cast<double>(f.src_alpha);
      agg.follow_alpha = f.follow_alpha;
    }
  }
  return agg;
}

}  // namespace taglife
