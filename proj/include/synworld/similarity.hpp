#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "synworld/types.hpp"

namespace synworld {

/// Lowercases ASCII letters, deletes ASCII punctuation and splits on whitespace.
std::vector<std::string> normalize_tokens(std::string_view text);

/// Consecutive `width`-token windows joined by single spaces. A non-empty
/// token list shorter than `width` yields one shingle holding all tokens.
std::set<std::string> shingles(const std::vector<std::string>& tokens, std::size_t width = 3);

/// Text compared by the dedup stage: background, a space, then goal.
std::string scenario_text(const Scenario& s);

class SimilarityMetric {
 public:
  virtual ~SimilarityMetric() = default;
  /// Symmetric score in [0,1].
  virtual double operator()(const Scenario& a, const Scenario& b) const = 0;
};

/// Jaccard overlap of 3-token shingles. Two empty texts score 1, one empty
/// text scores 0.
class ShingleJaccard final : public SimilarityMetric {
 public:
  explicit ShingleJaccard(std::size_t width = 3) : width_(width) {}
  double operator()(const Scenario& a, const Scenario& b) const override;

 private:
  std::size_t width_;
};

/// Cosine similarity over an embedding function, clamped to [0,1].
class EmbeddingCosine final : public SimilarityMetric {
 public:
  using Embedder = std::function<std::vector<double>(const std::string&)>;
  explicit EmbeddingCosine(Embedder embed) : embed_(std::move(embed)) {}
  double operator()(const Scenario& a, const Scenario& b) const override;

 private:
  Embedder embed_;
};

double similarity(const Scenario& a, const Scenario& b);

struct Rejection {
  Scenario scenario;
  /// Highest similarity against the pool at the time of rejection.
  double max_similarity = 0.0;
  /// scenario_id of the pool member that achieved it.
  std::string closest_id;
};

struct DedupResult {
  std::vector<Scenario> accepted;
  std::vector<Rejection> rejected;
};

/// Greedy first-come filter: each candidate, in input order, is accepted iff
/// its maximum similarity to `accepted` plus previously accepted candidates
/// is <= `threshold`. Throws ArgumentError for threshold outside (0,1].
DedupResult dedup_filter(const std::vector<Scenario>& candidates,
                         const std::vector<Scenario>& accepted, double threshold,
                         const SimilarityMetric& metric = ShingleJaccard{});

}  // namespace synworld
