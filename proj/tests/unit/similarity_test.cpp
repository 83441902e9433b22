#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include "synworld/error.hpp"
#include "synworld/similarity.hpp"
#include "test_support.hpp"

using namespace synworld;
using synworld::testing::scenario;

namespace {

// Independent reference: character-level cleanup, then word windows.
double reference_jaccard(const std::string& a, const std::string& b) {
  auto windows = [](const std::string& text) {
    std::string clean;
    for (unsigned char c : text) {
      if (std::ispunct(c)) continue;
      clean += static_cast<char>(std::tolower(c));
    }
    std::istringstream in(clean);
    std::vector<std::string> words{std::istream_iterator<std::string>(in), {}};
    std::vector<std::string> out;
    if (words.empty()) return out;
    if (words.size() < 3) {
      std::string all;
      for (const auto& w : words) all += (all.empty() ? "" : " ") + w;
      out.push_back(all);
      return out;
    }
    for (std::size_t i = 0; i + 3 <= words.size(); ++i) out.push_back(words[i] + " " + words[i + 1] + " " + words[i + 2]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  auto x = windows(a), y = windows(b);
  if (x.empty() && y.empty()) return 1.0;
  if (x.empty() || y.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& s : x) common += std::binary_search(y.begin(), y.end(), s) ? 1 : 0;
  return static_cast<double>(common) / static_cast<double>(x.size() + y.size() - common);
}

}  // namespace

TEST(Normalize, LowercasesAndDropsPunctuation) {
  EXPECT_EQ(normalize_tokens("Don't  STOP, now!"), (std::vector<std::string>{"dont", "stop", "now"}));
  EXPECT_TRUE(normalize_tokens(" ?! ").empty());
}

TEST(Shingles, WindowsOfThree) {
  auto s = shingles({"a", "b", "c", "d"});
  EXPECT_EQ(s, (std::set<std::string>{"a b c", "b c d"}));
  EXPECT_EQ(shingles({"a", "b"}), (std::set<std::string>{"a b"}));
  EXPECT_TRUE(shingles({}).empty());
}

TEST(ShingleJaccard, HandEnumeratedPair) {
  // 5 shingles each, 2 shared ("book a flight", "a flight to"): 2 / 8.
  auto a = scenario("a", "Book a flight", "to Paris tomorrow morning.");
  auto b = scenario("b", "book a flight", "to Rome tomorrow morning");
  EXPECT_DOUBLE_EQ(similarity(a, b), 0.25);
  EXPECT_DOUBLE_EQ(similarity(a, a), 1.0);
}

TEST(ShingleJaccard, EmptyTextConventions) {
  auto empty = scenario("e", "", "");
  auto word = scenario("w", "hello", "");
  EXPECT_DOUBLE_EQ(similarity(empty, empty), 1.0);
  EXPECT_DOUBLE_EQ(similarity(empty, word), 0.0);
}

TEST(ShingleJaccard, MatchesReferenceOnRandomTexts) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> vocab{"alpha", "beta", "Gamma,", "delta", "eps", "zeta!", "eta"};
  auto text = [&] {
    std::string t;
    std::size_t n = rng() % 9;
    for (std::size_t i = 0; i < n; ++i) t += vocab[rng() % vocab.size()] + " ";
    return t;
  };
  for (int i = 0; i < 500; ++i) {
    auto a = scenario("a", text(), text());
    auto b = scenario("b", text(), text());
    double s = similarity(a, b);
    EXPECT_DOUBLE_EQ(s, reference_jaccard(scenario_text(a), scenario_text(b)));
    EXPECT_DOUBLE_EQ(s, similarity(b, a));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(EmbeddingCosine, ClampsToUnitInterval) {
  EmbeddingCosine metric([](const std::string& text) {
    return text.find("neg") != std::string::npos ? std::vector<double>{-1.0, 0.0} : std::vector<double>{1.0, 0.0};
  });
  EXPECT_DOUBLE_EQ(metric(scenario("a", "x", "y"), scenario("b", "x", "z")), 1.0);
  EXPECT_DOUBLE_EQ(metric(scenario("a", "x", "y"), scenario("b", "neg", "z")), 0.0);
}

TEST(Dedup, GreedyInInputOrder) {
  auto a = scenario("a", "book a flight", "to paris tomorrow morning");
  auto a2 = scenario("a2", "book a flight", "to paris tomorrow morning please");
  auto c = scenario("c", "water the garden", "before the heat arrives");
  auto r = dedup_filter({a, a2, c}, {}, 0.6);
  ASSERT_EQ(r.accepted.size(), 2u);
  EXPECT_EQ(r.accepted[0].scenario_id, "a");
  EXPECT_EQ(r.accepted[1].scenario_id, "c");
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].scenario.scenario_id, "a2");
  EXPECT_EQ(r.rejected[0].closest_id, "a");
  EXPECT_GT(r.rejected[0].max_similarity, 0.6);
}

TEST(Dedup, ComparesAgainstExistingPool) {
  auto a = scenario("a", "book a flight", "to paris tomorrow morning");
  auto r = dedup_filter({a}, {a}, 0.6);
  EXPECT_TRUE(r.accepted.empty());
  EXPECT_EQ(r.rejected.size(), 1u);
}

TEST(Dedup, ThresholdIsInclusive) {
  auto a = scenario("a", "book a flight", "to Paris tomorrow morning");
  auto b = scenario("b", "book a flight", "to Rome tomorrow morning");
  EXPECT_EQ(dedup_filter({a, b}, {}, 0.25).accepted.size(), 2u);
  EXPECT_EQ(dedup_filter({a, b}, {}, 0.24).accepted.size(), 1u);
}

TEST(Dedup, RejectsBadThreshold) {
  EXPECT_THROW(dedup_filter({}, {}, 0.0), ArgumentError);
  EXPECT_THROW(dedup_filter({}, {}, 1.5), ArgumentError);
}
