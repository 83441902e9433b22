#include "synworld/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "synworld/error.hpp"

namespace synworld {

std::vector<std::string> normalize_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (std::ispunct(c)) {
      continue;
    } else {
      current += static_cast<char>(std::tolower(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::set<std::string> shingles(const std::vector<std::string>& tokens, std::size_t width) {
  std::set<std::string> out;
  if (tokens.empty() || width == 0) return out;
  auto join = [&](std::size_t from, std::size_t count) {
    std::string s = tokens[from];
    for (std::size_t i = 1; i < count; ++i) s += ' ' + tokens[from + i];
    return s;
  };
  if (tokens.size() < width) {
    out.insert(join(0, tokens.size()));
    return out;
  }
  for (std::size_t i = 0; i + width <= tokens.size(); ++i) out.insert(join(i, width));
  return out;
}

std::string scenario_text(const Scenario& s) { return s.background + " " + s.goal; }

double ShingleJaccard::operator()(const Scenario& a, const Scenario& b) const {
  auto sa = shingles(normalize_tokens(scenario_text(a)), width_);
  auto sb = shingles(normalize_tokens(scenario_text(b)), width_);
  if (sa.empty() && sb.empty()) return 1.0;
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& s : sa) common += sb.count(s);
  std::size_t uni = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double EmbeddingCosine::operator()(const Scenario& a, const Scenario& b) const {
  auto va = embed_(scenario_text(a));
  auto vb = embed_(scenario_text(b));
  if (va.size() != vb.size()) throw ArgumentError("embedding dimensions differ");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double similarity(const Scenario& a, const Scenario& b) { return ShingleJaccard{}(a, b); }

DedupResult dedup_filter(const std::vector<Scenario>& candidates,
                         const std::vector<Scenario>& accepted, double threshold,
                         const SimilarityMetric& metric) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ArgumentError("similarity threshold must lie in (0, 1]");
  DedupResult result;
  // Pool holds pointers into result.accepted; no reallocation allowed.
  result.accepted.reserve(candidates.size());
  std::vector<const Scenario*> pool;
  pool.reserve(accepted.size() + candidates.size());
  for (const auto& s : accepted) pool.push_back(&s);

  for (const auto& candidate : candidates) {
    double best = -1.0;
    const Scenario* closest = nullptr;
    for (const Scenario* other : pool) {
      double sim = metric(candidate, *other);
      if (sim > best) {
        best = sim;
        closest = other;
      }
    }
    if (closest != nullptr && best > threshold) {
      result.rejected.push_back({candidate, best, closest->scenario_id});
    } else {
      result.accepted.push_back(candidate);
      pool.push_back(&result.accepted.back());
    }
  }
  return result;
}

}  // namespace synworld
