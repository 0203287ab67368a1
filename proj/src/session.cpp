#include "ptalign/session.hpp"

#include "ptalign/errors.hpp"
#include "ptalign/io.hpp"

namespace ptalign {

ModelFormat parse_model_format(const std::string& text) {
  if (text == "pnml") return ModelFormat::kPnml;
  if (text == "tg") return ModelFormat::kTg;
  throw PreconditionError("unknown model format '" + text + "'");
}

EstimatorKind parse_estimator(const std::string& text) {
  if (text == "asgiven") return EstimatorKind::kAsGiven;
  if (text == "constant") return EstimatorKind::kConstant;
  throw PreconditionError("unknown estimator '" + text + "'");
}

TransitionGraph model_from_net(const StochasticWorkflowNet& net, const SessionConfig& config) {
  const StochasticWorkflowNet weighted =
      config.estimator == EstimatorKind::kConstant ? ConstantEstimator().estimate(net) : net;
  const ReachabilityGraph rg =
      reachability_graph(weighted, {config.node_budget, config.allow_unsafe});
  if (!config.allow_unsafe && !check_safe(rg)) throw ModelAssumptionError("net is not safe");
  if (!check_bounded_silence(rg, config.silence_bound)) {
    throw ModelAssumptionError("net does not have silence bounded by " +
                               std::to_string(config.silence_bound));
  }
  return tau_closure(tg_from_reachability(rg));
}

TransitionGraph model_from_tg(const TransitionGraph& tg, const SessionConfig& config) {
  auto chain = longest_tau_chain(tg);
  if (!chain || *chain > config.silence_bound) {
    throw ModelAssumptionError("transition graph does not have silence bounded by " +
                               std::to_string(config.silence_bound));
  }
  return tau_closure(tg);
}

TransitionGraph load_model(const SessionConfig& config) {
  const std::string text = read_file(config.model_path);
  if (config.format == ModelFormat::kPnml) return model_from_net(parse_pnml(text), config);
  return model_from_tg(parse_tg(text), config);
}

std::shared_ptr<const Alphabet> session_alphabet(const TransitionGraph& tg,
                                                 const std::vector<Trace>& logs) {
  std::vector<Activity> names = tg.activities();
  for (const auto& t : logs) names.insert(names.end(), t.begin(), t.end());
  return std::make_shared<const Alphabet>(std::move(names));
}

}  // namespace ptalign
