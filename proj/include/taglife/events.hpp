#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace taglife {

/// One timestamped message. Hashtags are stored normalized (lowercase,
/// '#'-stripped, sorted, deduplicated). An event is a retweet iff
/// retweet_of is set; a reply iff reply_to is set and it is not a
/// retweet (retweet wins when the input carries both).
struct TweetEvent {
  std::string event_id;
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
  std::string user_id;
  std::int64_t follower_count = 0;
  std::string text;
  std::vector<std::string> hashtags;
  std::optional<std::string> retweet_of;
  std::optional<std::string> reply_to;

  bool is_retweet() const { return retweet_of.has_value(); }
  bool is_reply() const { return !retweet_of.has_value() && reply_to.has_value(); }
  bool has_tag(const std::string& tag) const;
};

/// Events ordered by (timestamp, event_id); immutable once built, safe to
/// share across threads.
struct EventStream {
  std::vector<TweetEvent> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
};

struct StreamStats {
  std::size_t event_count = 0;
  std::size_t unique_users = 0;
  std::int64_t t_min = 0;
  std::int64_t t_max = 0;
  std::size_t retweet_count = 0;
  std::size_t reply_count = 0;
};

enum class StreamFormat { Jsonl, Csv };

/// Every maximal '#'[A-Za-z0-9_]+ token, lowercased and '#'-stripped;
/// result sorted and deduplicated.
std::vector<std::string> extract_hashtags(const std::string& text);

/// Normalize an explicit tag list the same way extract_hashtags would.
std::vector<std::string> normalize_hashtags(std::vector<std::string> tags);

/// Accepts integer epoch-seconds or an RFC-3339 string.
std::int64_t parse_timestamp(const std::string& s, std::size_t line_no);

EventStream parse_events(std::istream& in, StreamFormat format);
EventStream load_events(const std::string& path, StreamFormat format);

void serialize_events(const EventStream& stream, std::ostream& out);

/// Counts plus integrity checks: throws DataError on duplicate event_ids
/// or a retweet_of referencing an event with a later timestamp.
StreamStats validate_stream(const EventStream& stream);

}  // namespace taglife
