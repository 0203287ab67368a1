#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ptalign/alphabet.hpp"
#include "ptalign/knn.hpp"
#include "ptalign/ranking.hpp"
#include "ptalign/transition_graph.hpp"
#include "ptalign/unfolder.hpp"

namespace ptalign {

enum class EpsStrategy { kEps1 = 1, kEps2 = 2 };
enum class NuStrategy { kNu1 = 1, kNu2 = 2 };

struct EmbeddingConfig {
  double lambda = 0.07;
  double t_f = 0.0001;
  EpsStrategy eps = EpsStrategy::kEps1;
  NuStrategy nu = NuStrategy::kNu1;
  // Overrides each graph's own horizon (|trace| for projections) when set.
  std::optional<std::size_t> horizon;
};

// Dense vector over A (nu block) followed by A x A (eps block), in the
// alphabet's lexicographic order.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::size_t alphabet_size);

  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t dimension() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> nu_block() { return {values_.data(), alphabet_size_}; }
  std::span<const double> nu_block() const { return {values_.data(), alphabet_size_}; }
  std::span<double> eps_block() { return {values_.data() + alphabet_size_, values_.size() - alphabet_size_}; }
  std::span<const double> eps_block() const {
    return {values_.data() + alphabet_size_, values_.size() - alphabet_size_};
  }

  double nu(std::size_t a) const { return values_[a]; }
  double eps(std::size_t a, std::size_t b) const {
    return values_[alphabet_size_ + a * alphabet_size_ + b];
  }

 private:
  std::size_t alphabet_size_ = 0;
  std::vector<double> values_;
};

// 2-gram decay embedding of a plain string over A x A: component (a, b)
// accumulates lambda^l per occurrence of a followed by b at distance l.
std::vector<double> string_embedding(const Trace& trace, double lambda, const Alphabet& alphabet);

// eps^1 / eps^2 over A x A for the graph, summing i = 1..horizon.
std::vector<double> sub_embedding_eps(const WeightedTransitionGraph& g, const EmbeddingConfig& cfg,
                                      const Alphabet& alphabet);
// nu^1 (label frequency over the graph's traces, summing to 1) or nu^2 (zero).
std::vector<double> sub_embedding_nu(const WeightedTransitionGraph& g, const EmbeddingConfig& cfg,
                                     const Alphabet& alphabet);

// Number of strictly positive entries summed over R, R^2, ..., R^horizon.
// Used as the exponent of t_f.
std::size_t edge_exponent(const LabelledGraph& g, std::size_t horizon);

EmbeddingVector tg_embedding(const WeightedTransitionGraph& g, const EmbeddingConfig& cfg,
                             const Alphabet& alphabet);

// Inner product of stored vectors; the omega and t_f factors are already
// folded in, so this is the TG kernel.
double kernel(const EmbeddingVector& a, const EmbeddingVector& b);
// sqrt(k(a,a) - 2 k(a,b) + k(b,b)).
double kernel_distance(const EmbeddingVector& a, const EmbeddingVector& b);

// Embedding of a log trace, encoded as a linear graph with omega = 1.
EmbeddingVector embed_log_trace(const Trace& trace, const EmbeddingConfig& cfg,
                                const Alphabet& alphabet);

// Model-side table: one projection embedding per model trace, indexed once.
class EmbeddingTable {
 public:
  EmbeddingTable(const TransitionGraph& tg, std::vector<ModelTrace> traces, EmbeddingConfig cfg,
                 std::shared_ptr<const Alphabet> alphabet, IndexKind index_kind,
                 std::size_t silence_bound = 3);

  const std::vector<ModelTrace>& traces() const { return traces_; }
  const std::vector<EmbeddingVector>& vectors() const { return vectors_; }
  const EmbeddingConfig& config() const { return cfg_; }
  const Alphabet& alphabet() const { return *alphabet_; }
  const KnnIndex& index() const { return *index_; }

 private:
  std::vector<ModelTrace> traces_;
  std::vector<EmbeddingVector> vectors_;
  EmbeddingConfig cfg_;
  std::shared_ptr<const Alphabet> alphabet_;
  std::unique_ptr<KnnIndex> index_;
};

enum class ApproxMode { kDistance, kKernel };

// Distance mode: k nearest stored vectors to the query embedding, by
// ascending Euclidean distance. Kernel mode: linear scan by descending
// kernel. Ties are broken lexicographically by trace.
Ranking approx_topk(const EmbeddingTable& table, const Trace& query, std::size_t k, unsigned c,
                    ApproxMode mode = ApproxMode::kDistance);

}  // namespace ptalign
