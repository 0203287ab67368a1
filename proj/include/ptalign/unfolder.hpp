#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ptalign/alphabet.hpp"
#include "ptalign/transition_graph.hpp"

namespace ptalign {

// A model trace and its probability (sum over all runs yielding it).
struct ModelTrace {
  Trace labels;
  double probability = 0.0;
};

struct UnfoldOptions {
  // Minimum trace probability; 0 keeps every trace up to max_length.
  double rho = 1e-5;
  // Maximum number of visible labels; nullopt means unbounded (needs rho > 0
  // on cyclic graphs).
  std::optional<std::size_t> max_length;
};

// Every non-empty model trace with probability >= rho and length <=
// max_length, with exact probabilities. Output is sorted by descending
// probability, ties broken lexicographically.
std::vector<ModelTrace> unfold(const TransitionGraph& tg, const UnfoldOptions& options);

// Exact probability of `trace` (0 for non-model traces).
double trace_probability(const TransitionGraph& tg, const Trace& trace);

struct Run {
  std::vector<std::size_t> nodes;
  double probability = 1.0;
};

// Explicit runs (start..end node sequences) whose tau-stripped labels equal
// `trace`. Throws ModelAssumptionError if a chain of more than
// silence_bound consecutive tau nodes is met during the search.
std::vector<Run> runs_of(const TransitionGraph& tg, const Trace& trace,
                         std::size_t silence_bound = 3);

}  // namespace ptalign
