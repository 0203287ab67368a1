#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ptalign/embedding.hpp"
#include "ptalign/knn.hpp"
#include "ptalign/net.hpp"
#include "ptalign/transition_graph.hpp"
#include "ptalign/unfolder.hpp"

namespace ptalign {

enum class ModelFormat { kPnml, kTg };
enum class EstimatorKind { kAsGiven, kConstant };

struct SessionConfig {
  std::string model_path;
  ModelFormat format = ModelFormat::kTg;
  double rho = 1e-5;
  std::optional<std::size_t> n_max;
  unsigned c = 5;
  std::size_t k = 20;
  EmbeddingConfig embedding;
  IndexKind index = IndexKind::kKd;
  std::size_t silence_bound = 3;
  EstimatorKind estimator = EstimatorKind::kAsGiven;
  bool allow_unsafe = false;
  std::size_t node_budget = 1'000'000;

  UnfoldOptions unfold_options() const { return {rho, n_max}; }
};

ModelFormat parse_model_format(const std::string& text);
EstimatorKind parse_estimator(const std::string& text);

// Net -> (estimator) -> reachability graph -> safety and silence checks ->
// transition graph -> tau-closure. Assumption violations throw
// ModelAssumptionError.
TransitionGraph model_from_net(const StochasticWorkflowNet& net, const SessionConfig& config);
// Silence check then tau-closure.
TransitionGraph model_from_tg(const TransitionGraph& tg, const SessionConfig& config);
// Reads config.model_path in config.format.
TransitionGraph load_model(const SessionConfig& config);

// Activity universe: the model's activities plus every activity in `logs`.
std::shared_ptr<const Alphabet> session_alphabet(const TransitionGraph& tg,
                                                 const std::vector<Trace>& logs);

}  // namespace ptalign
