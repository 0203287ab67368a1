#include "ptalign/net.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "ptalign/errors.hpp"

namespace ptalign {

Marking::Marking(std::vector<PlaceIndex> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
}

std::size_t Marking::token_count(PlaceIndex place) const {
  auto [lo, hi] = std::equal_range(tokens_.begin(), tokens_.end(), place);
  return static_cast<std::size_t>(hi - lo);
}

std::size_t Marking::max_tokens() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < tokens_.size();) {
    std::size_t j = i;
    while (j < tokens_.size() && tokens_[j] == tokens_[i]) ++j;
    best = std::max(best, j - i);
    i = j;
  }
  return best;
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (PlaceIndex p : m.tokens()) {
    h ^= p + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

PlaceIndex StochasticWorkflowNet::place_index(std::string_view id) const {
  for (PlaceIndex i = 0; i < places_.size(); ++i) {
    if (places_[i].id == id) return i;
  }
  throw StructuralError("unknown place '" + std::string(id) + "'");
}

TransitionIndex StochasticWorkflowNet::transition_index(std::string_view id) const {
  for (TransitionIndex i = 0; i < transitions_.size(); ++i) {
    if (transitions_[i].id == id) return i;
  }
  throw StructuralError("unknown transition '" + std::string(id) + "'");
}

Marking StochasticWorkflowNet::marking(const std::vector<std::string>& place_ids) const {
  std::vector<PlaceIndex> tokens;
  tokens.reserve(place_ids.size());
  for (const auto& id : place_ids) tokens.push_back(place_index(id));
  return Marking(std::move(tokens));
}

StochasticWorkflowNet StochasticWorkflowNet::with_weights(std::vector<double> weights) const {
  if (weights.size() != transitions_.size()) {
    throw PreconditionError("weight vector size does not match transition count");
  }
  StochasticWorkflowNet copy = *this;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw StructuralError("weight of transition '" + copy.transitions_[i].id + "' must be > 0");
    }
    copy.transitions_[i].weight = weights[i];
  }
  return copy;
}

StochasticWorkflowNet::Builder& StochasticWorkflowNet::Builder::place(std::string id) {
  places_.push_back(std::move(id));
  return *this;
}

StochasticWorkflowNet::Builder& StochasticWorkflowNet::Builder::transition(std::string id,
                                                                           Label label,
                                                                           double weight) {
  transitions_.emplace_back(std::move(id), std::move(label), weight);
  return *this;
}

StochasticWorkflowNet::Builder& StochasticWorkflowNet::Builder::arc(std::string source,
                                                                    std::string target) {
  arcs_.emplace_back(std::move(source), std::move(target));
  return *this;
}

StochasticWorkflowNet StochasticWorkflowNet::Builder::build() const {
  StochasticWorkflowNet net;
  std::unordered_map<std::string, PlaceIndex> place_ids;
  std::unordered_map<std::string, TransitionIndex> transition_ids;
  for (const auto& id : places_) {
    if (!place_ids.emplace(id, static_cast<PlaceIndex>(net.places_.size())).second) {
      throw StructuralError("duplicate place id '" + id + "'");
    }
    net.places_.push_back(Place{id});
  }
  for (const auto& [id, label, weight] : transitions_) {
    if (place_ids.count(id) ||
        !transition_ids.emplace(id, static_cast<TransitionIndex>(net.transitions_.size())).second) {
      throw StructuralError("duplicate node id '" + id + "'");
    }
    if (!(weight > 0.0)) {
      throw StructuralError("weight of transition '" + id + "' must be > 0");
    }
    net.transitions_.push_back(Transition{id, label, weight, {}, {}});
  }

  std::vector<std::size_t> in_degree(net.places_.size(), 0);
  std::vector<std::size_t> out_degree(net.places_.size(), 0);
  for (const auto& [src, dst] : arcs_) {
    auto sp = place_ids.find(src);
    auto st = transition_ids.find(src);
    auto dp = place_ids.find(dst);
    auto dt = transition_ids.find(dst);
    if (sp != place_ids.end() && dt != transition_ids.end()) {
      net.transitions_[dt->second].inputs.push_back(sp->second);
      ++out_degree[sp->second];
    } else if (st != transition_ids.end() && dp != place_ids.end()) {
      net.transitions_[st->second].outputs.push_back(dp->second);
      ++in_degree[dp->second];
    } else {
      throw StructuralError("arc " + src + " -> " + dst +
                            " must connect a place and a transition");
    }
  }
  for (auto& t : net.transitions_) {
    std::sort(t.inputs.begin(), t.inputs.end());
    std::sort(t.outputs.begin(), t.outputs.end());
  }

  std::vector<PlaceIndex> sources, sinks;
  for (PlaceIndex p = 0; p < net.places_.size(); ++p) {
    if (in_degree[p] == 0) sources.push_back(p);
    if (out_degree[p] == 0) sinks.push_back(p);
  }
  if (sources.size() != 1) {
    throw StructuralError("workflow net needs exactly one source place, found " +
                          std::to_string(sources.size()));
  }
  if (sinks.size() != 1) {
    throw StructuralError("workflow net needs exactly one sink place, found " +
                          std::to_string(sinks.size()));
  }
  if (sources[0] == sinks[0]) throw StructuralError("source and sink place coincide");
  net.initial_ = sources[0];
  net.final_ = sinks[0];
  return net;
}

namespace {

void check_marking(const StochasticWorkflowNet& net, const Marking& m) {
  for (PlaceIndex p : m.tokens()) {
    if (p >= net.places().size()) {
      throw StructuralError("marking refers to unknown place index " + std::to_string(p));
    }
  }
}

bool is_enabled(const Transition& t, const Marking& m) {
  // inputs is sorted; a place listed twice needs two tokens.
  for (std::size_t i = 0; i < t.inputs.size();) {
    std::size_t j = i;
    while (j < t.inputs.size() && t.inputs[j] == t.inputs[i]) ++j;
    if (m.token_count(t.inputs[i]) < j - i) return false;
    i = j;
  }
  return true;
}

}  // namespace

std::vector<TransitionIndex> enabled(const StochasticWorkflowNet& net, const Marking& m) {
  check_marking(net, m);
  std::vector<TransitionIndex> out;
  if (m.empty()) return out;
  for (TransitionIndex t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    if (!tr.inputs.empty() && is_enabled(tr, m)) out.push_back(t);
  }
  return out;
}

Marking fire(const StochasticWorkflowNet& net, const Marking& m, TransitionIndex t) {
  check_marking(net, m);
  if (t >= net.transitions().size()) {
    throw PreconditionError("unknown transition index " + std::to_string(t));
  }
  const auto& tr = net.transitions()[t];
  if (tr.inputs.empty() || !is_enabled(tr, m)) {
    throw PreconditionError("transition '" + tr.id + "' is not enabled");
  }
  std::vector<PlaceIndex> tokens = m.tokens();
  for (PlaceIndex p : tr.inputs) {
    tokens.erase(std::find(tokens.begin(), tokens.end(), p));
  }
  tokens.insert(tokens.end(), tr.outputs.begin(), tr.outputs.end());
  return Marking(std::move(tokens));
}

double transition_probability(const StochasticWorkflowNet& net, const Marking& m,
                              TransitionIndex t) {
  auto en = enabled(net, m);
  if (std::find(en.begin(), en.end(), t) == en.end()) {
    throw PreconditionError("transition is not enabled in the given marking");
  }
  double total = 0.0;
  for (TransitionIndex u : en) total += net.transitions()[u].weight;
  return net.transitions()[t].weight / total;
}

ReachabilityGraph::ReachabilityGraph(std::vector<Marking> markings,
                                     std::vector<ReachabilityEdge> edges,
                                     std::vector<Label> labels, std::vector<double> weights,
                                     std::size_t final_index)
    : markings_(std::move(markings)),
      edges_(std::move(edges)),
      labels_(std::move(labels)),
      weights_(std::move(weights)),
      final_(final_index),
      outgoing_(markings_.size()),
      probabilities_(edges_.size(), 0.0) {
  for (std::size_t e = 0; e < edges_.size(); ++e) outgoing_[edges_[e].source].push_back(e);
  for (const auto& out : outgoing_) {
    double total = 0.0;
    for (std::size_t e : out) total += weights_[edges_[e].transition];
    for (std::size_t e : out) probabilities_[e] = weights_[edges_[e].transition] / total;
  }
}

ReachabilityGraph ReachabilityGraph::reweighted(std::vector<double> weights) const {
  if (weights.size() != weights_.size()) {
    throw PreconditionError("weight vector size does not match transition count");
  }
  return ReachabilityGraph(markings_, edges_, labels_, std::move(weights), final_);
}

ReachabilityGraph reachability_graph(const StochasticWorkflowNet& net,
                                     const ReachabilityOptions& options) {
  std::vector<Marking> markings{net.initial_marking()};
  std::unordered_map<Marking, std::size_t, MarkingHash> seen{{markings[0], 0}};
  std::vector<ReachabilityEdge> edges;
  std::deque<std::size_t> queue{0};

  while (!queue.empty()) {
    std::size_t current = queue.front();
    queue.pop_front();
    for (TransitionIndex t : enabled(net, markings[current])) {
      Marking next = fire(net, markings[current], t);
      if (!options.allow_unsafe && next.max_tokens() > 1) {
        throw ModelAssumptionError("net is not safe: firing '" + net.transitions()[t].id +
                                   "' puts two tokens on a place");
      }
      auto [it, inserted] = seen.emplace(next, markings.size());
      if (inserted) {
        if (markings.size() >= options.node_budget) {
          throw ModelAssumptionError("reachability graph exceeds the node budget of " +
                                     std::to_string(options.node_budget) +
                                     " markings (unbounded or too large)");
        }
        markings.push_back(std::move(next));
        queue.push_back(it->second);
      }
      edges.push_back({current, t, it->second});
    }
  }

  std::vector<Label> labels;
  std::vector<double> weights;
  for (const auto& t : net.transitions()) {
    labels.push_back(t.label);
    weights.push_back(t.weight);
  }
  auto fin = seen.find(net.final_marking());
  std::size_t final_index = fin == seen.end() ? markings.size() : fin->second;
  return ReachabilityGraph(std::move(markings), std::move(edges), std::move(labels),
                           std::move(weights), final_index);
}

bool check_safe(const ReachabilityGraph& rg) {
  return std::all_of(rg.markings().begin(), rg.markings().end(),
                     [](const Marking& m) { return m.max_tokens() <= 1; });
}

bool check_bounded_silence(const ReachabilityGraph& rg, std::size_t bound) {
  // Longest path over tau edges only, on the tau subgraph. A cycle makes it
  // unbounded. Iterative DFS with colouring; longest[m] = max tau edges
  // starting at marking m.
  const std::size_t n = rg.markings().size();
  enum : char { kWhite, kGrey, kBlack };
  std::vector<char> colour(n, kWhite);
  std::vector<std::size_t> longest(n, 0);
  auto tau_successors = [&](std::size_t m) {
    std::vector<std::size_t> out;
    for (std::size_t e : rg.outgoing(m)) {
      if (rg.label(rg.edges()[e]).is_tau()) out.push_back(rg.edges()[e].target);
    }
    return out;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root] != kWhite) continue;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack;
    stack.emplace_back(root, tau_successors(root));
    colour[root] = kGrey;
    while (!stack.empty()) {
      auto& [node, pending] = stack.back();
      if (pending.empty()) {
        std::size_t best = 0;
        for (std::size_t s : tau_successors(node)) best = std::max(best, longest[s] + 1);
        longest[node] = best;
        colour[node] = kBlack;
        stack.pop_back();
        continue;
      }
      std::size_t next = pending.back();
      pending.pop_back();
      if (colour[next] == kGrey) return false;
      if (colour[next] == kWhite) {
        colour[next] = kGrey;
        stack.emplace_back(next, tau_successors(next));
      }
    }
    if (longest[root] > bound) return false;
  }
  return std::all_of(longest.begin(), longest.end(), [&](std::size_t l) { return l <= bound; });
}

StochasticWorkflowNet ConstantEstimator::estimate(const StochasticWorkflowNet& net) const {
  return net.with_weights(std::vector<double>(net.transitions().size(), 1.0));
}

StochasticWorkflowNet estimate_weights_constant(const StochasticWorkflowNet& net) {
  return ConstantEstimator().estimate(net);
}

}  // namespace ptalign
