#include "taglife/events.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "taglife/errors.hpp"
#include "taglife/text.hpp"

namespace taglife {

namespace {

bool is_tag_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string line_msg(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

}  // namespace

bool TweetEvent::has_tag(const std::string& tag) const {
  return std::binary_search(hashtags.begin(), hashtags.end(), tag);
}

std::vector<std::string> extract_hashtags(const std::string& text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_tag_char(text[j])) ++j;
    if (j > i + 1) out.push_back(to_lower(text.substr(i + 1, j - i - 1)));
    i = j - 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> normalize_hashtags(std::vector<std::string> tags) {
  std::vector<std::string> out;
  for (std::string& t : tags) {
    std::size_t start = (!t.empty() && t[0] == '#') ? 1 : 0;
    std::string norm = to_lower(t.substr(start));
    if (!norm.empty()) out.push_back(std::move(norm));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int64_t parse_timestamp(const std::string& s, std::size_t line_no) {
  if (s.empty()) throw DataError(line_msg(line_no, "field timestamp: empty"));
  // Plain integer epoch-seconds.
  if (s.find_first_not_of("-0123456789") == std::string::npos) {
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      throw DataError(line_msg(line_no, "field timestamp: unparsable '" + s + "'"));
    }
  }
  // RFC-3339: YYYY-MM-DDThh:mm:ss[.frac](Z|+hh:mm|-hh:mm)
  int y, mo, d, h, mi, se;
  int n = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%n", &y, &mo, &d, &h, &mi, &se, &n) != 6 &&
      std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%d%n", &y, &mo, &d, &h, &mi, &se, &n) != 6)
    throw DataError(line_msg(line_no, "field timestamp: unparsable '" + s + "'"));
  std::size_t pos = static_cast<std::size_t>(n);
  if (pos < s.size() && s[pos] == '.') {  // ignore fractional seconds
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  std::int64_t offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      int oh = 0, om = 0;
      if (std::sscanf(s.c_str() + pos + 1, "%d:%d", &oh, &om) != 2)
        throw DataError(line_msg(line_no, "field timestamp: bad offset in '" + s + "'"));
      offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
      pos = s.size();
    }
  }
  if (pos != s.size())
    throw DataError(line_msg(line_no, "field timestamp: trailing characters in '" + s + "'"));
  return days_from_civil(y, mo, d) * 86400LL + h * 3600LL + mi * 60LL + se - offset;
}

namespace {

void finalize_event(TweetEvent& ev, std::size_t line_no) {
  if (ev.event_id.empty())
    throw DataError(line_msg(line_no, "field event_id: empty"));
  if (ev.follower_count < 0)
    throw DataError(line_msg(line_no, "field follower_count: negative"));
  if (ev.retweet_of && *ev.retweet_of == ev.event_id)
    throw DataError(line_msg(line_no, "field retweet_of: self-reference"));
  if (ev.reply_to && *ev.reply_to == ev.event_id)
    throw DataError(line_msg(line_no, "field reply_to: self-reference"));
  if (ev.retweet_of) ev.reply_to.reset();  // retweet wins
  if (ev.hashtags.empty())
    ev.hashtags = extract_hashtags(ev.text);
  else
    ev.hashtags = normalize_hashtags(std::move(ev.hashtags));
}

TweetEvent parse_json_event(const std::string& line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const std::exception& e) {
    throw DataError(line_msg(line_no, std::string("malformed JSON: ") + e.what()));
  }
  TweetEvent ev;
  try {
    ev.event_id = j.at("event_id").get<std::string>();
    if (j.at("timestamp").is_number_integer())
      ev.timestamp = j["timestamp"].get<std::int64_t>();
    else
      ev.timestamp = parse_timestamp(j["timestamp"].get<std::string>(), line_no);
    ev.user_id = j.at("user_id").get<std::string>();
    ev.follower_count = j.value("follower_count", std::int64_t{0});
    ev.text = j.value("text", std::string());
    if (j.contains("hashtags") && !j["hashtags"].is_null())
      ev.hashtags = j["hashtags"].get<std::vector<std::string>>();
    if (j.contains("retweet_of") && !j["retweet_of"].is_null())
      ev.retweet_of = j["retweet_of"].get<std::string>();
    if (j.contains("reply_to") && !j["reply_to"].is_null())
      ev.reply_to = j["reply_to"].get<std::string>();
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(line_msg(line_no, std::string("bad field: ") + e.what()));
  }
  finalize_event(ev, line_no);
  return ev;
}

}  // namespace

EventStream parse_events(std::istream& in, StreamFormat format) {
  EventStream stream;
  std::string line;
  std::size_t line_no = 0;

  std::unordered_map<std::string, std::size_t> col;
  if (format == StreamFormat::Csv) {
    if (!std::getline(in, line)) throw DataError("empty CSV input: missing header");
    ++line_no;
    auto fields = split_csv_line(line);
    for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
    for (const char* req : {"event_id", "timestamp", "user_id", "follower_count"})
      if (!col.count(req))
        throw DataError(std::string("CSV header missing required column '") + req + "'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (format == StreamFormat::Jsonl) {
      stream.events.push_back(parse_json_event(line, line_no));
    } else {
      auto fields = split_csv_line(line);
      auto get = [&](const char* name) -> std::string {
        auto it = col.find(name);
        if (it == col.end() || it->second >= fields.size()) return {};
        return fields[it->second];
      };
      TweetEvent ev;
      ev.event_id = get("event_id");
      ev.timestamp = parse_timestamp(get("timestamp"), line_no);
      ev.user_id = get("user_id");
      const std::string fc = get("follower_count");
      try {
        ev.follower_count = std::stoll(fc);
      } catch (const std::exception&) {
        throw DataError(line_msg(line_no, "field follower_count: unparsable '" + fc + "'"));
      }
      ev.text = get("text");
      const std::string tags = get("hashtags");
      if (!tags.empty()) {
        std::size_t pos = 0;
        while (pos <= tags.size()) {
          std::size_t semi = tags.find(';', pos);
          if (semi == std::string::npos) semi = tags.size();
          if (semi > pos) ev.hashtags.push_back(tags.substr(pos, semi - pos));
          pos = semi + 1;
        }
      }
      const std::string rt = get("retweet_of");
      if (!rt.empty()) ev.retweet_of = rt;
      const std::string rp = get("reply_to");
      if (!rp.empty()) ev.reply_to = rp;
      finalize_event(ev, line_no);
      stream.events.push_back(std::move(ev));
    }
  }

  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const TweetEvent& a, const TweetEvent& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.event_id < b.event_id;
                   });
  return stream;
}

EventStream load_events(const std::string& path, StreamFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  return parse_events(in, format);
}

void serialize_events(const EventStream& stream, std::ostream& out) {
  for (const TweetEvent& ev : stream.events) {
    nlohmann::json j;
    j["event_id"] = ev.event_id;
    j["timestamp"] = ev.timestamp;
    j["user_id"] = ev.user_id;
    j["follower_count"] = ev.follower_count;
    j["text"] = ev.text;
    j["hashtags"] = ev.hashtags;
    if (ev.retweet_of) j["retweet_of"] = *ev.retweet_of;
    if (ev.reply_to) j["reply_to"] = *ev.reply_to;
    out << j.dump() << '\n';
  }
}

StreamStats validate_stream(const EventStream& stream) {
  StreamStats stats;
  stats.event_count = stream.events.size();
  if (stream.events.empty()) return stats;

  stats.t_min = stream.events.front().timestamp;
  stats.t_max = stream.events.back().timestamp;

  std::unordered_set<std::string> users;
  std::unordered_map<std::string, std::int64_t> id_to_ts;
  id_to_ts.reserve(stream.events.size());
  for (const TweetEvent& ev : stream.events) {
    users.insert(ev.user_id);
    if (!id_to_ts.emplace(ev.event_id, ev.timestamp).second)
      throw DataError("duplicate event_id '" + ev.event_id + "'");
    if (ev.is_retweet()) ++stats.retweet_count;
    if (ev.is_reply()) ++stats.reply_count;
  }
  for (const TweetEvent& ev : stream.events) {
    if (!ev.retweet_of) continue;
    auto it = id_to_ts.find(*ev.retweet_of);
    if (it != id_to_ts.end() && it->second > ev.timestamp)
      throw DataError("event '" + ev.event_id + "' retweets '" + *ev.retweet_of +
                      "' which has a later timestamp");
  }
  stats.unique_users = users.size();
  return stats;
}

}  // namespace taglife
