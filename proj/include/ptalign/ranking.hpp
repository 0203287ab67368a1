#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptalign/alphabet.hpp"
#include "ptalign/knn.hpp"
#include "ptalign/unfolder.hpp"

namespace ptalign {

// Unit-cost edit distance over activity symbols (not characters).
std::size_t levenshtein(const Trace& a, const Trace& b);

// s = 1 / (d / c + 1).
double similarity(std::size_t distance, unsigned c);

// P(trace) * similarity(levenshtein(query, trace), c).
double golden_rank(const Trace& query, const ModelTrace& candidate, unsigned c);

// Maps (p, s) to a point at distance 1/(ps) from the origin.
std::array<double, 2> t_transform(double p, double s);

struct RankedAlignment {
  ModelTrace model_trace;
  std::size_t distance = 0;
  double similarity = 0.0;
  double score = 0.0;
  std::array<double, 2> transformed{};
  // Approximate rankings only: embedding distance or kernel value.
  std::optional<double> embedding_value;
};

struct Ranking {
  std::vector<RankedAlignment> entries;
  // Set when fewer than k traces were available.
  bool truncated = false;
};

bool trace_less(const Trace& a, const Trace& b);

// Fills distance/similarity/score/transformed for one candidate.
RankedAlignment align_one(const Trace& query, const ModelTrace& candidate, unsigned c);

// Top-k by golden rank, retrieved as the k points nearest to the origin
// among the t-transformed (p, s) pairs. The point set and index are built
// per query.
Ranking optimal_topk(const std::vector<ModelTrace>& traces, const Trace& query, std::size_t k,
                     unsigned c, IndexKind index_kind);

// Spearman's rho of two value vectors (average ranks for ties).
double spearman(std::span<const double> a, std::span<const double> b);
// Spearman's rho of two rankings over the same trace set, using positions.
double spearman(const Ranking& a, const Ranking& b);

}  // namespace ptalign
