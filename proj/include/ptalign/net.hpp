#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ptalign/alphabet.hpp"

namespace ptalign {

using PlaceIndex = std::uint32_t;
using TransitionIndex = std::uint32_t;

struct Place {
  std::string id;
};

struct Transition {
  std::string id;
  Label label;
  double weight = 1.0;
  std::vector<PlaceIndex> inputs;   // sorted, one entry per arc
  std::vector<PlaceIndex> outputs;  // sorted, one entry per arc
};

// A marking is the multiset of marked places, kept as a sorted vector of
// place indices (one entry per token) so it can be hashed and compared.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::vector<PlaceIndex> tokens);

  const std::vector<PlaceIndex>& tokens() const { return tokens_; }
  std::size_t token_count(PlaceIndex place) const;
  std::size_t max_tokens() const;
  bool empty() const { return tokens_.empty(); }

  bool operator==(const Marking&) const = default;
  auto operator<=>(const Marking&) const = default;

 private:
  std::vector<PlaceIndex> tokens_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept;
};

// Stochastic workflow net: places, labelled weighted transitions, flow
// arcs, a source place and a sink place. Immutable once built.
class StochasticWorkflowNet {
 public:
  class Builder;

  const std::vector<Place>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  PlaceIndex initial_place() const { return initial_; }
  PlaceIndex final_place() const { return final_; }

  Marking initial_marking() const { return Marking({initial_}); }
  Marking final_marking() const { return Marking({final_}); }

  PlaceIndex place_index(std::string_view id) const;
  TransitionIndex transition_index(std::string_view id) const;
  Marking marking(const std::vector<std::string>& place_ids) const;

  // Copy with every weight replaced; weights.size() must match.
  StochasticWorkflowNet with_weights(std::vector<double> weights) const;

 private:
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  PlaceIndex initial_ = 0;
  PlaceIndex final_ = 0;
};

// Validating builder. build() rejects non-positive weights, dangling arcs
// and nets that lack a unique source/sink place.
class StochasticWorkflowNet::Builder {
 public:
  Builder& place(std::string id);
  Builder& transition(std::string id, Label label, double weight = 1.0);
  // Either place->transition or transition->place; resolved by id at build().
  Builder& arc(std::string source, std::string target);

  StochasticWorkflowNet build() const;

 private:
  std::vector<std::string> places_;
  std::vector<std::tuple<std::string, Label, double>> transitions_;
  std::vector<std::pair<std::string, std::string>> arcs_;
};

std::vector<TransitionIndex> enabled(const StochasticWorkflowNet& net, const Marking& m);
Marking fire(const StochasticWorkflowNet& net, const Marking& m, TransitionIndex t);
// W(t) / sum of W over the transitions enabled in m.
double transition_probability(const StochasticWorkflowNet& net, const Marking& m,
                              TransitionIndex t);

struct ReachabilityEdge {
  std::size_t source;  // marking index
  TransitionIndex transition;
  std::size_t target;  // marking index
};

// Reachability graph of (N, M_i). Edge probabilities are derived from the
// weights held by the graph, so swapping an estimator only needs
// reweighted(), not a new exploration.
class ReachabilityGraph {
 public:
  ReachabilityGraph(std::vector<Marking> markings, std::vector<ReachabilityEdge> edges,
                    std::vector<Label> labels, std::vector<double> weights,
                    std::size_t final_index);

  const std::vector<Marking>& markings() const { return markings_; }
  const std::vector<ReachabilityEdge>& edges() const { return edges_; }
  std::size_t root() const { return 0; }
  // Index of M_f, or markings().size() when M_f is unreachable.
  std::size_t final_marking() const { return final_; }
  const Label& label(const ReachabilityEdge& e) const { return labels_[e.transition]; }
  double probability(std::size_t edge_index) const { return probabilities_[edge_index]; }
  // Edge indices leaving a marking.
  const std::vector<std::size_t>& outgoing(std::size_t marking) const { return outgoing_[marking]; }

  ReachabilityGraph reweighted(std::vector<double> weights) const;

 private:
  std::vector<Marking> markings_;
  std::vector<ReachabilityEdge> edges_;
  std::vector<Label> labels_;
  std::vector<double> weights_;
  std::size_t final_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::vector<double> probabilities_;
};

struct ReachabilityOptions {
  std::size_t node_budget = 1'000'000;
  // Explore k-bounded nets too; safety is then left to check_safe.
  bool allow_unsafe = false;
};

ReachabilityGraph reachability_graph(const StochasticWorkflowNet& net,
                                     const ReachabilityOptions& options = {});

bool check_safe(const ReachabilityGraph& rg);
// True iff no path of the graph has more than `bound` consecutive tau edges
// (in particular there is no tau-only cycle).
bool check_bounded_silence(const ReachabilityGraph& rg, std::size_t bound);

// Firing-weight estimators. Only Constant ships; others plug in here.
class WeightEstimator {
 public:
  virtual ~WeightEstimator() = default;
  virtual std::string name() const = 0;
  virtual StochasticWorkflowNet estimate(const StochasticWorkflowNet& net) const = 0;
};

// Every enabled transition is equiprobable: all weights set to 1.
class ConstantEstimator final : public WeightEstimator {
 public:
  std::string name() const override { return "constant"; }
  StochasticWorkflowNet estimate(const StochasticWorkflowNet& net) const override;
};

StochasticWorkflowNet estimate_weights_constant(const StochasticWorkflowNet& net);

}  // namespace ptalign
