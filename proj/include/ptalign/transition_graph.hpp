#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptalign/alphabet.hpp"
#include "ptalign/net.hpp"

namespace ptalign {

struct Arc {
  std::size_t to;
  double probability;
};

// Node-labelled probabilistic graph: one label per node (the L map) and a
// sparse transition matrix R stored as sorted successor rows.
class LabelledGraph {
 public:
  LabelledGraph() = default;
  LabelledGraph(std::vector<Label> labels, std::vector<std::vector<Arc>> rows);

  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }
  const Label& label(std::size_t node) const { return labels_[node]; }
  const std::vector<Arc>& successors(std::size_t node) const { return rows_[node]; }
  const std::vector<std::vector<Arc>>& rows() const { return rows_; }
  // R[from][to], 0 when absent.
  double probability(std::size_t from, std::size_t to) const;
  // |R > 0|.
  std::size_t positive_entries() const;
  // Sorted distinct activities carried by non-tau nodes.
  std::vector<Activity> activities() const;

 private:
  std::vector<Label> labels_;
  std::vector<std::vector<Arc>> rows_;
};

// TG = (L, R) with a start node s (no predecessors) and end node t (no
// successors). Every non-empty row of R should sum to one; see
// rows_stochastic().
class TransitionGraph : public LabelledGraph {
 public:
  TransitionGraph() = default;
  TransitionGraph(std::vector<Label> labels, std::vector<std::vector<Arc>> rows,
                  std::size_t start, std::size_t end);

  std::size_t start() const { return start_; }
  std::size_t end() const { return end_; }

 private:
  std::size_t start_ = 0;
  std::size_t end_ = 0;
};

bool rows_stochastic(const LabelledGraph& g, double tolerance = 1e-9);

// Restriction of a TG to the runs of one model trace, paired with the
// tau-endpoint mass omega. Nodes may have several entry/exit points; the
// horizon is the path length l used by the power series (|trace|).
class WeightedTransitionGraph : public LabelledGraph {
 public:
  WeightedTransitionGraph(LabelledGraph graph, std::vector<std::size_t> starts,
                          std::vector<std::size_t> ends, double omega, std::size_t horizon);

  const std::vector<std::size_t>& starts() const { return starts_; }
  const std::vector<std::size_t>& ends() const { return ends_; }
  double omega() const { return omega_; }
  std::size_t horizon() const { return horizon_; }

 private:
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> ends_;
  double omega_;
  std::size_t horizon_;
};

// Moves labels from reachability edges onto nodes: one node per edge, a
// fresh tau start before the root's edges and a fresh tau end after edges
// entering M_f. Throws ModelAssumptionError when M_f is unreachable.
TransitionGraph tg_from_reachability(const ReachabilityGraph& rg);

// Eliminates interior tau nodes one by one, summing tau-path products into
// direct edges. Start and end are kept. Throws ModelAssumptionError naming
// the cycle if interior tau nodes form a cycle.
TransitionGraph tau_closure(const TransitionGraph& tg);

// Longest chain of consecutive tau nodes on any path, or nullopt when tau
// nodes form a cycle.
std::optional<std::size_t> longest_tau_chain(const LabelledGraph& g);
bool has_cycle(const LabelledGraph& g);

// Calls visit(i, source, row) with row = e_source R^i (dense) for every
// node and i = 1..max_power. A source stops once its row becomes zero.
void for_each_power_row(
    const LabelledGraph& g, std::size_t max_power,
    const std::function<void(std::size_t, std::size_t, std::span<const double>)>& visit);

// Dense |Sigma| x |Sigma| matrix indexed by a label list (activities in
// lexicographic order, tau last when present).
struct LabelMatrix {
  std::vector<Label> labels;
  std::vector<double> values;  // row-major

  std::size_t index(const Label& l) const;
  double at(const Label& from, const Label& to) const;
};

// [Lambda^n]_{ab} = [L R^n L^T]_{ab} / [L L^T]_{aa}: probability of reaching
// a b-labelled node in exactly n steps from a uniformly chosen a-labelled one.
LabelMatrix lambda_power(const LabelledGraph& g, std::size_t n);

// Chain sigma_1 -> ... -> sigma_n with unit probabilities, no tau added.
TransitionGraph linear_tg(const Trace& trace);

// Behaviour-equivalent reconstruction of the running example:
// s:tau -> A:a (0.8) | C:c (0.2); A -> A (0.5) | e (0.5);
// C -> A (0.7) | B:b (0.3); B -> e (1.0).
TransitionGraph example_fixture_tg();

// Restricts tg (tau-closed first if needed) to the nodes and edges used by
// the runs of `trace`, drops tau nodes, renormalises rows over retained
// successors and computes omega (noisy-or over runs of the initial and
// final tau edge probabilities). Throws PreconditionError if `trace` is
// not a model trace.
WeightedTransitionGraph project(const TransitionGraph& tg, const Trace& trace,
                                std::size_t silence_bound = 3);

// Log traces: linear graph with omega = 1 and horizon |trace|.
WeightedTransitionGraph weighted_linear(const Trace& trace);

// Wraps a whole TG (start/end kept) with a caller-chosen omega and horizon.
WeightedTransitionGraph weighted_whole(const TransitionGraph& tg, double omega,
                                       std::size_t horizon);

}  // namespace ptalign
