#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taglife/episodes.hpp"

namespace taglife {

/// Per-minute conversational-vibrancy features for one hashtag episode.
/// Minute indices count from the episode's event_start; the series runs
/// from the onset minute to the end of the tracking window.
struct VibrancyFrame {
  int minute = 0;
  std::int64_t y = 0;             // new tweets carrying the tag this minute
  std::int64_t rt = 0;            // retweets carrying the tag this minute
  std::int64_t rp = 0;            // replies carrying the tag this minute
  std::int64_t src_alpha = 0;     // cumulative distinct retweeted originals
  double follow_alpha = 0.0;      // expected largest audience size so far
};

struct EnvFrame {
  int minute = 0;
  std::int64_t rt_env = 0;        // retweets NOT carrying the tag this minute
  std::int64_t rp_env = 0;        // replies NOT carrying the tag this minute
  std::int64_t src_env_alpha = 0; // cumulative distinct non-tag retweeted originals
};

struct AggregateVibrancy {
  double rt_alpha = 0.0;
  double rp_alpha = 0.0;
  double src_alpha = 0.0;
  double follow_alpha = 0.0;
};

struct AudienceUser {
  std::string user_id;
  std::int64_t follower_count = 0;
};

/// Mean follower_count over the ceil((1-quantile)*n) users with the
/// largest counts, descending follower order with user_id tiebreak.
double expected_audience(std::vector<AudienceUser> users, double quantile = 0.9);

std::vector<VibrancyFrame> frame_series(const HashtagEpisode& episode);

std::vector<EnvFrame> env_series(const HashtagEpisode& episode, const EventStream& stream);

AggregateVibrancy aggregate_at(const std::vector<VibrancyFrame>& frames, int cut_minute);

}  // namespace taglife
