#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ptalign/embedding.hpp"
#include "ptalign/knn.hpp"
#include "ptalign/net.hpp"
#include "ptalign/transition_graph.hpp"
#include "ptalign/unfolder.hpp"

namespace ptalign {

struct BenchOptions {
  std::size_t k = 20;
  unsigned c = 5;
  // lambda, t_f and horizon are shared; the eps/nu fields are ignored and
  // every combination is benchmarked.
  EmbeddingConfig embedding;
  std::vector<IndexKind> indexes{IndexKind::kKd, IndexKind::kVp};
  std::size_t silence_bound = 3;
};

// One query under one strategy and index. prepare_us is the per-query
// indexing time (optimal: aligning every trace and building the index) or
// the trace embedding time (approximate); total_us = prepare_us + search_us.
struct QueryRecord {
  std::size_t query;
  std::size_t length;
  std::string strategy;
  IndexKind index;
  double spearman;
  double prepare_us;
  double search_us;
  double total_us;
};

struct BenchRow {
  std::size_t length;
  std::string strategy;
  IndexKind index;
  std::size_t queries;
  double mean_spearman;
  double mean_prepare_us;
  double mean_search_us;
  double mean_total_us;
};

struct BenchmarkReport {
  std::vector<QueryRecord> records;
  // Averages per exact query length x strategy x index.
  std::vector<BenchRow> rows;

  // Averages over all queries for one strategy and index.
  BenchRow overall(const std::string& strategy, IndexKind index) const;
};

// Strategy names: "optimal" and "e1n1", "e1n2", "e2n1", "e2n2".
std::vector<std::string> bench_strategies();

// Spearman of each approximate strategy is taken between the kernel values
// and the golden scores over the whole trace set; "optimal" is compared with
// itself.
BenchmarkReport run_benchmark(const TransitionGraph& tg, const std::vector<ModelTrace>& traces,
                              const std::vector<Trace>& queries, const BenchOptions& options);

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report);

struct SyntheticNetShape {
  std::size_t stages = 4;
  std::size_t width = 6;
  std::size_t activities = 10;
  // Chance that a stage gets a silent skip transition, or else a silent
  // redo transition back to its input place. Skips and redos never form a
  // silent cycle and silent runs stay shorter than three steps.
  double skip_probability = 0.25;
  double redo_probability = 0.0;
};

// Sequence of exclusive choices: stage j moves a token from p_j to p_{j+1}
// through one of `width` distinct activities with random weights.
StochasticWorkflowNet synthetic_workflow_net(const SyntheticNetShape& shape, std::uint64_t seed);

// Random walks through the graph, each followed by up to `max_edits`
// random insert/delete/substitute edits over the graph's activities.
std::vector<Trace> sample_queries(const TransitionGraph& tg, std::size_t count,
                                  std::size_t max_edits, std::uint64_t seed);

}  // namespace ptalign
