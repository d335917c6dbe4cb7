#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "taglife/errors.hpp"
#include "taglife/events.hpp"

using namespace taglife;

TEST_CASE("extract_hashtags finds and normalizes tokens") {
  CHECK(extract_hashtags("Cut PBS? Noooooooooooi #SaveBigBird") ==
        std::vector<std::string>{"savebigbird"});
  CHECK(extract_hashtags("").empty());
  CHECK(extract_hashtags("#BigBird #bigbird wtf #Debates!") ==
        std::vector<std::string>{"bigbird", "debates"});
  CHECK(extract_hashtags("no tags here #").empty());
  CHECK(extract_hashtags("#a_1#b") == std::vector<std::string>{"a_1", "b"});
}

TEST_CASE("extract_hashtags output is idempotent and normalized") {
  const auto tags = extract_hashtags("#Alpha #BETA_2 #alpha mid#text");
  std::string rendered;
  for (const auto& t : tags) {
    CHECK(t.find('#') == std::string::npos);
    for (char c : t) CHECK_FALSE((c >= 'A' && c <= 'Z'));
    rendered += "#" + t + " ";
  }
  CHECK(extract_hashtags(rendered) == tags);
}

TEST_CASE("parse_events derives hashtags from text when field absent") {
  std::istringstream in(R"({"event_id":"e1","timestamp":100,"user_id":"u1","text":"a #x"})"
                        "\n");
  const EventStream s = parse_events(in, StreamFormat::Jsonl);
  REQUIRE(s.size() == 1);
  CHECK(s.events[0].hashtags == std::vector<std::string>{"x"});
}

TEST_CASE("parse_events rejects negative follower_count with line number") {
  std::istringstream in(
      R"({"event_id":"e1","timestamp":100,"user_id":"u1","follower_count":-1,"text":""})"
      "\n");
  CHECK_THROWS_AS(parse_events(in, StreamFormat::Jsonl), DataError);
  std::istringstream in2(
      "{\"event_id\":\"e1\",\"timestamp\":1,\"user_id\":\"u\",\"text\":\"\"}\n"
      "{\"event_id\":\"e2\",\"timestamp\":2,\"user_id\":\"u\",\"follower_count\":-3,\"text\":\"\"}\n");
  try {
    parse_events(in2, StreamFormat::Jsonl);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse_events sorts shuffled timestamps ascending") {
  std::istringstream in(
      R"({"event_id":"e3","timestamp":300,"user_id":"u","text":""})"
      "\n"
      R"({"event_id":"e1","timestamp":100,"user_id":"u","text":""})"
      "\n"
      R"({"event_id":"e2","timestamp":200,"user_id":"u","text":""})"
      "\n");
  const EventStream s = parse_events(in, StreamFormat::Jsonl);
  REQUIRE(s.size() == 3);
  CHECK(s.events[0].event_id == "e1");
  CHECK(s.events[1].event_id == "e2");
  CHECK(s.events[2].event_id == "e3");
}

TEST_CASE("parse_timestamp accepts epoch seconds and RFC-3339") {
  CHECK(parse_timestamp("100", 1) == 100);
  CHECK(parse_timestamp("1970-01-01T00:00:00Z", 1) == 0);
  CHECK(parse_timestamp("2012-10-04T01:00:00Z", 1) == 1349312400);
  CHECK_THROWS_AS(parse_timestamp("not-a-time", 1), DataError);
}

TEST_CASE("CSV input with semicolon-joined hashtags parses") {
  std::istringstream in(
      "event_id,timestamp,user_id,follower_count,text,hashtags,retweet_of,reply_to\n"
      "e1,100,u1,5,hello,a;b,,\n"
      "e2,160,u2,0,RT hello,a,e1,\n");
  const EventStream s = parse_events(in, StreamFormat::Csv);
  REQUIRE(s.size() == 2);
  CHECK(s.events[0].hashtags == std::vector<std::string>{"a", "b"});
  CHECK(s.events[1].is_retweet());
  CHECK(*s.events[1].retweet_of == "e1");
}

TEST_CASE("serialize then parse is the identity") {
  std::istringstream in(
      R"({"event_id":"e1","timestamp":100,"user_id":"u1","follower_count":7,"text":"hi #A","hashtags":["A"],"reply_to":"u9"})"
      "\n"
      R"({"event_id":"e2","timestamp":160,"user_id":"u2","text":"RT hi","retweet_of":"e1"})"
      "\n");
  const EventStream a = parse_events(in, StreamFormat::Jsonl);
  std::ostringstream out;
  serialize_events(a, out);
  std::istringstream back(out.str());
  const EventStream b = parse_events(back, StreamFormat::Jsonl);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.events[i].event_id == b.events[i].event_id);
    CHECK(a.events[i].timestamp == b.events[i].timestamp);
    CHECK(a.events[i].user_id == b.events[i].user_id);
    CHECK(a.events[i].follower_count == b.events[i].follower_count);
    CHECK(a.events[i].text == b.events[i].text);
    CHECK(a.events[i].hashtags == b.events[i].hashtags);
    CHECK(a.events[i].retweet_of == b.events[i].retweet_of);
    CHECK(a.events[i].reply_to == b.events[i].reply_to);
  }
}

TEST_CASE("retweet wins when both retweet_of and reply_to present") {
  TweetEvent ev;
  ev.retweet_of = "e0";
  ev.reply_to = "u0";
  CHECK(ev.is_retweet());
  CHECK_FALSE(ev.is_reply());
}

TEST_CASE("validate_stream counts and integrity checks") {
  CHECK(validate_stream(EventStream{}).event_count == 0);
  CHECK(validate_stream(EventStream{}).unique_users == 0);

  EventStream s;
  TweetEvent a;
  a.event_id = "e1";
  a.timestamp = 10;
  a.user_id = "u1";
  TweetEvent b;
  b.event_id = "e2";
  b.timestamp = 20;
  b.user_id = "u2";
  b.retweet_of = "e1";
  s.events = {a, b};
  const StreamStats stats = validate_stream(s);
  CHECK(stats.event_count == 2);
  CHECK(stats.unique_users == 2);
  CHECK(stats.retweet_count == 1);
  CHECK(stats.reply_count == 0);
  CHECK(stats.t_min == 10);
  CHECK(stats.t_max == 20);

  EventStream dup = s;
  dup.events[1].event_id = "e1";
  dup.events[1].retweet_of.reset();
  CHECK_THROWS_AS(validate_stream(dup), DataError);

  EventStream dangling = s;
  dangling.events[0].retweet_of = "e2";  // references a later timestamp
  CHECK_THROWS_AS(validate_stream(dangling), DataError);
}
