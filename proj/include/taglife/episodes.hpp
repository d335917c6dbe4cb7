#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taglife/events.hpp"

namespace taglife {

struct EpisodeConfig {
  std::string episode_id;
  std::int64_t event_start = 0;   // epoch seconds
  int peak_duration_min = 120;    // peak window length, minutes
  int lookback_hours = 96;
  int tracking_hours = 77;
  int min_users = 100;
  std::vector<std::string> keywords;

  std::int64_t peak_end() const { return event_start + 60LL * peak_duration_min; }
  std::int64_t lookback_start() const { return event_start - 3600LL * lookback_hours; }
  std::int64_t tracking_end() const { return event_start + 3600LL * tracking_hours; }
  int tracking_minutes() const { return tracking_hours * 60; }
  void validate() const;
};

/// One novel hashtag's tracked event subset within an episode window.
struct HashtagEpisode {
  std::string tag;
  std::string episode_id;
  std::int64_t event_start = 0;  // copied from config, minute origin
  std::int64_t t0 = 0;           // timestamp of first tracked event
  int tracking_minutes = 0;
  std::vector<TweetEvent> events;

  int t0_minute() const {
    return static_cast<int>((t0 - event_start) / 60);
  }
};

/// Tags whose first stream occurrence lies in the peak window and which
/// never occur in the lookback interval.
std::vector<std::string> find_novel(const EventStream& stream, const EpisodeConfig& config);

/// Keep tags mentioned by >= min_users distinct users within the tracking window.
std::vector<std::string> filter_pop(const EventStream& stream, const EpisodeConfig& config,
                                    const std::vector<std::string>& novel);

/// Keep a tag iff some tracked tweet carrying it matches a keyword
/// (case-insensitive substring) or the tag itself contains a keyword.
/// Empty keyword list keeps everything (warning to stderr).
std::vector<std::string> filter_relevant(const EventStream& stream, const EpisodeConfig& config,
                                         const std::vector<std::string>& pop,
                                         const std::vector<std::string>& keywords);

HashtagEpisode build_episode(const EventStream& stream, const EpisodeConfig& config,
                             const std::string& tag);

/// Distinct users mentioning the tag in the tracking window.
std::size_t tracked_user_count(const EventStream& stream, const EpisodeConfig& config,
                               const std::string& tag);

}  // namespace taglife
