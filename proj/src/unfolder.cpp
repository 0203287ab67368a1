#include "ptalign/unfolder.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "ptalign/errors.hpp"
#include "ptalign/ranking.hpp"

namespace ptalign {

namespace {

constexpr std::size_t kExpansionBudget = 20'000'000;

// Forward tables. After a visible node v has been entered, reach[v] lists
// the next visible nodes u (through zero or more interior tau nodes) with
// the summed probability, and stop[v] is the probability of finishing.
// Index n stands for the virtual point before the start node.
class Forward {
 public:
  explicit Forward(const TransitionGraph& tg) : tg_(tg) {
    if (!longest_tau_chain(tg)) {
      throw ModelAssumptionError("tau nodes form a cycle: silence is unbounded");
    }
    const std::size_t n = tg.size();
    reach_.resize(n + 1);
    stop_.assign(n + 1, 0.0);
    done_.assign(n, false);
    for (std::size_t v = 0; v < n; ++v) resolve(v);
    if (tg.label(tg.start()).is_tau()) {
      reach_[n] = reach_[tg.start()];
      stop_[n] = stop_[tg.start()];
    } else {
      reach_[n] = {{tg.start(), 1.0}};
    }
  }

  using Mass = std::map<std::size_t, double>;

  Mass initial() const { return {{tg_.size(), 1.0}}; }

  double finish(const Mass& m) const {
    double p = 0.0;
    for (const auto& [v, w] : m) p += w * stop_[v];
    return p;
  }

  // Successor masses grouped by emitted activity.
  std::map<Activity, Mass> expand(const Mass& m) const {
    std::map<Activity, Mass> next;
    for (const auto& [v, w] : m) {
      for (const auto& [u, p] : reach_[v]) next[tg_.label(u).activity()][u] += w * p;
    }
    return next;
  }

  Mass advance(const Mass& m, const Activity& a) const {
    Mass next;
    for (const auto& [v, w] : m) {
      for (const auto& [u, p] : reach_[v]) {
        if (tg_.label(u).activity() == a) next[u] += w * p;
      }
    }
    return next;
  }

 private:
  // Fills reach/stop for v by following tau successors (acyclic).
  void resolve(std::size_t v) {
    if (done_[v]) return;
    std::map<std::size_t, double> reach;
    double stop = v == tg_.end() ? 1.0 : 0.0;
    for (const Arc& a : tg_.successors(v)) {
      const std::size_t w = a.to;
      if (!tg_.label(w).is_tau()) {
        reach[w] += a.probability;
      } else if (w == tg_.end()) {
        stop += a.probability;
      } else {
        resolve(w);
        for (const auto& [u, p] : reach_[w]) reach[u] += a.probability * p;
        stop += a.probability * stop_[w];
      }
    }
    reach_[v].assign(reach.begin(), reach.end());
    stop_[v] = stop;
    done_[v] = true;
  }

  const TransitionGraph& tg_;
  std::vector<std::vector<std::pair<std::size_t, double>>> reach_;
  std::vector<double> stop_;
  std::vector<bool> done_;
};

double total(const Forward::Mass& m) {
  double t = 0.0;
  for (const auto& [v, w] : m) t += w;
  return t;
}

}  // namespace

std::vector<ModelTrace> unfold(const TransitionGraph& tg, const UnfoldOptions& options) {
  if (!(options.rho >= 0.0 && options.rho <= 1.0)) throw PreconditionError("rho must lie in [0, 1]");
  if (options.rho == 0.0 && !options.max_length && has_cycle(tg)) {
    throw PreconditionError("infinite unfolding; require rho > 0 or finite n_max");
  }
  const Forward forward(tg);

  struct Item {
    double bound;
    Trace prefix;
    Forward::Mass mass;
  };
  auto worse = [](const Item& a, const Item& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return trace_less(b.prefix, a.prefix);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(worse)> frontier(worse);
  frontier.push({1.0, {}, forward.initial()});

  std::vector<ModelTrace> out;
  std::size_t expansions = 0;
  while (!frontier.empty()) {
    Item item = frontier.top();
    frontier.pop();
    if (!item.prefix.empty()) {
      double p = forward.finish(item.mass);
      if (p > 0.0 && p >= options.rho) out.push_back({item.prefix, p});
    }
    if (options.max_length && item.prefix.size() >= *options.max_length) continue;
    if (++expansions > kExpansionBudget) {
      throw ModelAssumptionError("unfolding exceeded its expansion budget; raise rho");
    }
    for (auto& [activity, mass] : forward.expand(item.mass)) {
      double bound = total(mass);
      if (bound <= 0.0 || bound < options.rho) continue;
      Trace prefix = item.prefix;
      prefix.push_back(activity);
      frontier.push({bound, std::move(prefix), std::move(mass)});
    }
  }
  std::sort(out.begin(), out.end(), [](const ModelTrace& a, const ModelTrace& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return trace_less(a.labels, b.labels);
  });
  return out;
}

double trace_probability(const TransitionGraph& tg, const Trace& trace) {
  const Forward forward(tg);
  Forward::Mass mass = forward.initial();
  for (const auto& a : trace) {
    mass = forward.advance(mass, a);
    if (mass.empty()) return 0.0;
  }
  return forward.finish(mass);
}

std::vector<Run> runs_of(const TransitionGraph& tg, const Trace& trace,
                         std::size_t silence_bound) {
  std::vector<Run> runs;
  struct Frame {
    std::size_t node;
    std::size_t matched;
    std::size_t silent;
    std::size_t depth;  // index into path
    double probability;
  };
  std::vector<std::size_t> path;
  std::vector<Frame> stack;

  auto enter = [&](std::size_t node, std::size_t matched, std::size_t silent, double p,
                   std::size_t depth) {
    const Label& l = tg.label(node);
    if (l.is_tau()) {
      if (silent + 1 > silence_bound) {
        std::string chain;
        for (std::size_t i = depth - std::min(depth, silent); i < depth; ++i) {
          chain += std::to_string(path[i]) + " -> ";
        }
        throw ModelAssumptionError("more than " + std::to_string(silence_bound) +
                                   " consecutive tau nodes: " + chain + std::to_string(node));
      }
      stack.push_back({node, matched, silent + 1, depth, p});
    } else if (matched < trace.size() && l.activity() == trace[matched]) {
      stack.push_back({node, matched + 1, 0, depth, p});
    }
  };

  enter(tg.start(), 0, 0, 1.0, 0);
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    path.resize(f.depth);
    path.push_back(f.node);
    if (f.node == tg.end()) {
      if (f.matched == trace.size()) runs.push_back({path, f.probability});
      continue;
    }
    const auto& row = tg.successors(f.node);
    for (auto it = row.rbegin(); it != row.rend(); ++it) {
      enter(it->to, f.matched, f.silent, f.probability * it->probability, f.depth + 1);
    }
  }
  return runs;
}

}  // namespace ptalign
