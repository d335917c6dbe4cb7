#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "taglife/errors.hpp"
#include "taglife/vibrancy.hpp"

using namespace taglife;

namespace {

int g_id = 0;

TweetEvent ev(std::int64_t ts, const std::string& user, std::vector<std::string> tags,
              std::int64_t followers = 0) {
  TweetEvent e;
  e.event_id = "e" + std::to_string(g_id++);
  e.timestamp = ts;
  e.user_id = user;
  e.follower_count = followers;
  e.hashtags = std::move(tags);
  std::sort(e.hashtags.begin(), e.hashtags.end());
  return e;
}

HashtagEpisode make_episode(std::vector<TweetEvent> events, int tracking_minutes = 30) {
  HashtagEpisode epi;
  epi.tag = "x";
  epi.episode_id = "ep";
  epi.event_start = 0;
  epi.tracking_minutes = tracking_minutes;
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  epi.events = std::move(events);
  epi.t0 = epi.events.front().timestamp;
  return epi;
}

}  // namespace

TEST_CASE("one original retweeted three times in minute 5") {
  TweetEvent orig = ev(5 * 60 + 1, "u0", {"x"});
  std::vector<TweetEvent> events = {orig};
  for (int i = 0; i < 3; ++i) {
    TweetEvent rt = ev(5 * 60 + 10 + i, "u" + std::to_string(i + 1), {"x"});
    rt.retweet_of = orig.event_id;
    events.push_back(rt);
  }
  const auto frames = frame_series(make_episode(std::move(events)));
  REQUIRE_FALSE(frames.empty());
  CHECK(frames.front().minute == 5);
  CHECK(frames.front().rt == 3);
  CHECK(frames.front().y == 4);
  CHECK(frames.front().src_alpha == 1);
}

TEST_CASE("quiet minutes carry cumulative fields forward") {
  TweetEvent orig = ev(60, "u0", {"x"}, 50);
  TweetEvent rt = ev(2 * 60, "u1", {"x"}, 10);
  rt.retweet_of = orig.event_id;
  const auto frames = frame_series(make_episode({orig, rt}, 6));
  REQUIRE(frames.size() == 5);  // minutes 1..5
  CHECK(frames[0].minute == 1);
  CHECK(frames[2].y == 0);
  CHECK(frames[2].rt == 0);
  CHECK(frames[2].rp == 0);
  CHECK(frames[2].src_alpha == 1);
  CHECK(frames[2].follow_alpha == frames[1].follow_alpha);
  CHECK(frames.back().src_alpha == 1);
}

TEST_CASE("expected_audience nearest-rank top decile") {
  std::vector<AudienceUser> ten;
  for (int i = 1; i <= 10; ++i) ten.push_back({"u" + std::to_string(i), i});
  CHECK(expected_audience(ten) == doctest::Approx(10.0));
  CHECK(expected_audience({{"solo", 100}}) == doctest::Approx(100.0));
  CHECK_THROWS_AS(expected_audience({}), DataError);
}

TEST_CASE("expected_audience matches a full-sort oracle on 1000 users") {
  std::mt19937_64 rng(42);
  std::lognormal_distribution<double> dist(4.0, 2.0);
  std::vector<AudienceUser> users;
  for (int i = 0; i < 1000; ++i)
    users.push_back({"u" + std::to_string(i), static_cast<std::int64_t>(dist(rng))});

  std::vector<std::int64_t> sorted;
  for (const auto& u : users) sorted.push_back(u.follower_count);
  std::sort(sorted.rbegin(), sorted.rend());
  double mean = 0.0;
  for (int i = 0; i < 100; ++i) mean += static_cast<double>(sorted[static_cast<std::size_t>(i)]);
  mean /= 100.0;
  CHECK(expected_audience(users) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("expected_audience permutation invariant and monotone at the top") {
  std::vector<AudienceUser> users = {{"a", 10}, {"b", 500}, {"c", 20}, {"d", 7}};
  std::vector<AudienceUser> shuffled = {users[2], users[0], users[3], users[1]};
  CHECK(expected_audience(users) == expected_audience(shuffled));
  const double before = expected_audience(users);
  users.push_back({"e", 10'000});  // exceeds the current maximum
  CHECK(expected_audience(users) >= before);
}

TEST_CASE("env_series counts the complement of the tag") {
  std::vector<TweetEvent> tagged, other;
  TweetEvent orig_tag = ev(30, "u0", {"x"});
  TweetEvent orig_env = ev(31, "w0", {});
  tagged.push_back(orig_tag);
  // Minute 1: 3 tagged retweets, 4 untagged retweets.
  for (int i = 0; i < 3; ++i) {
    TweetEvent rt = ev(60 + i, "u" + std::to_string(i + 1), {"x"});
    rt.retweet_of = orig_tag.event_id;
    tagged.push_back(rt);
  }
  for (int i = 0; i < 4; ++i) {
    TweetEvent rt = ev(60 + 10 + i, "w" + std::to_string(i + 1), {});
    rt.retweet_of = orig_env.event_id;
    other.push_back(rt);
  }
  EventStream stream;
  stream.events.push_back(orig_env);
  for (auto& e : tagged) stream.events.push_back(e);
  for (auto& e : other) stream.events.push_back(e);
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

  const HashtagEpisode epi = make_episode(tagged, 3);
  const auto frames = frame_series(epi);
  const auto env = env_series(epi, stream);
  REQUIRE(frames.size() == env.size());
  REQUIRE(frames.size() == 3);  // minutes 0..2
  CHECK(frames[1].rt == 3);
  CHECK(env[1].rt_env == 4);
  CHECK(env[1].src_env_alpha == 1);

  // Stream with only the tag's events: env identically zero.
  EventStream own;
  own.events = epi.events;
  for (const EnvFrame& f : env_series(epi, own)) {
    CHECK(f.rt_env == 0);
    CHECK(f.rp_env == 0);
    CHECK(f.src_env_alpha == 0);
  }
}

TEST_CASE("aggregate_at sums flows and reads levels at the cut") {
  // rt per-minute {2,0,5} on minutes 0..2.
  std::vector<TweetEvent> events;
  TweetEvent orig = ev(0, "u0", {"x"}, 77);
  events.push_back(orig);
  auto add_rts = [&](int minute, int count) {
    for (int i = 0; i < count; ++i) {
      TweetEvent rt = ev(minute * 60 + 5 + i, "r" + std::to_string(g_id), {"x"});
      rt.retweet_of = orig.event_id;
      events.push_back(rt);
    }
  };
  add_rts(0, 1);  // orig + 1 retweet = rt 2? rt counts retweets only
  add_rts(0, 1);
  add_rts(2, 5);
  const auto frames = frame_series(make_episode(events, 3));
  REQUIRE(frames.size() == 3);
  CHECK(frames[0].rt == 2);
  CHECK(frames[1].rt == 0);
  CHECK(frames[2].rt == 5);
  const AggregateVibrancy agg = aggregate_at(frames, 2);
  CHECK(agg.rt_alpha == doctest::Approx(7.0));
  CHECK_THROWS_AS(aggregate_at(frames, 3), DataError);
  CHECK_THROWS_AS(aggregate_at(frames, -1), DataError);
}

TEST_CASE("aggregate at onset of a single plain tweet") {
  const auto frames = frame_series(make_episode({ev(4 * 60, "u0", {"x"}, 123)}, 6));
  const AggregateVibrancy agg = aggregate_at(frames, 4);
  CHECK(agg.rt_alpha == 0.0);
  CHECK(agg.rp_alpha == 0.0);
  CHECK(agg.src_alpha == 0.0);
  CHECK(agg.follow_alpha == doctest::Approx(123.0));
}

TEST_CASE("src_alpha equals brute-force recount on random input") {
  std::mt19937_64 rng(7);
  std::vector<TweetEvent> events;
  std::vector<std::string> originals;
  for (int i = 0; i < 400; ++i) {
    const int minute = static_cast<int>(rng() % 40);
    TweetEvent e = ev(minute * 60 + static_cast<int>(rng() % 60), "u" + std::to_string(rng() % 50),
                      {"x"}, static_cast<std::int64_t>(rng() % 1000));
    if (!originals.empty() && rng() % 3 == 0)
      e.retweet_of = originals[rng() % originals.size()];
    else
      originals.push_back(e.event_id);
    events.push_back(std::move(e));
  }
  const HashtagEpisode epi = make_episode(events, 45);
  const auto frames = frame_series(epi);
  for (const VibrancyFrame& f : frames) {
    std::set<std::string> sources;
    for (const TweetEvent& e : epi.events) {
      const int minute = static_cast<int>((e.timestamp - epi.event_start) / 60);
      if (minute <= f.minute && e.retweet_of) sources.insert(*e.retweet_of);
    }
    CHECK(f.src_alpha == static_cast<std::int64_t>(sources.size()));
  }
  // follow_alpha and src_alpha nondecreasing.
  for (std::size_t i = 1; i < frames.size(); ++i) {
    CHECK(frames[i].src_alpha >= frames[i - 1].src_alpha);
    CHECK(frames[i].follow_alpha >= frames[i - 1].follow_alpha);
  }
}
