#include "ptalign/transition_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ptalign/errors.hpp"
#include "ptalign/unfolder.hpp"

namespace ptalign {

LabelledGraph::LabelledGraph(std::vector<Label> labels, std::vector<std::vector<Arc>> rows)
    : labels_(std::move(labels)), rows_(std::move(rows)) {
  if (rows_.size() != labels_.size()) {
    throw StructuralError("transition matrix and label map disagree on node count");
  }
  for (auto& row : rows_) {
    std::sort(row.begin(), row.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].to >= labels_.size()) throw StructuralError("edge to unknown node");
      if (i && row[i].to == row[i - 1].to) throw StructuralError("duplicate edge");
      if (!(row[i].probability > 0.0) || row[i].probability > 1.0 + 1e-9) {
        throw StructuralError("edge probability must lie in (0, 1]");
      }
    }
  }
}

double LabelledGraph::probability(std::size_t from, std::size_t to) const {
  const auto& row = rows_[from];
  auto it = std::lower_bound(row.begin(), row.end(), to,
                             [](const Arc& a, std::size_t t) { return a.to < t; });
  return it != row.end() && it->to == to ? it->probability : 0.0;
}

std::size_t LabelledGraph::positive_entries() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += row.size();
  return n;
}

std::vector<Activity> LabelledGraph::activities() const {
  std::set<Activity> seen;
  for (const auto& l : labels_) {
    if (!l.is_tau()) seen.insert(l.activity());
  }
  return {seen.begin(), seen.end()};
}

TransitionGraph::TransitionGraph(std::vector<Label> labels, std::vector<std::vector<Arc>> rows,
                                 std::size_t start, std::size_t end)
    : LabelledGraph(std::move(labels), std::move(rows)), start_(start), end_(end) {
  if (size() == 0) throw StructuralError("transition graph has no nodes");
  if (start_ >= size() || end_ >= size()) throw StructuralError("start/end node out of range");
  if (!successors(end_).empty()) throw StructuralError("end node must have no successors");
  for (std::size_t u = 0; u < size(); ++u) {
    for (const Arc& a : successors(u)) {
      if (a.to == start_) throw StructuralError("start node must have no predecessors");
    }
  }
}

bool rows_stochastic(const LabelledGraph& g, double tolerance) {
  for (const auto& row : g.rows()) {
    if (row.empty()) continue;
    double sum = 0.0;
    for (const Arc& a : row) sum += a.probability;
    if (std::abs(sum - 1.0) > tolerance) return false;
  }
  return true;
}

WeightedTransitionGraph::WeightedTransitionGraph(LabelledGraph graph,
                                                 std::vector<std::size_t> starts,
                                                 std::vector<std::size_t> ends, double omega,
                                                 std::size_t horizon)
    : LabelledGraph(std::move(graph)),
      starts_(std::move(starts)),
      ends_(std::move(ends)),
      omega_(omega),
      horizon_(horizon) {
  if (!(omega_ > 0.0 && omega_ <= 1.0)) throw PreconditionError("omega must lie in (0, 1]");
  if (horizon_ == 0) throw PreconditionError("horizon must be positive");
  for (std::size_t s : starts_) {
    if (s >= size()) throw StructuralError("start node out of range");
  }
  for (std::size_t e : ends_) {
    if (e >= size()) throw StructuralError("end node out of range");
  }
}

TransitionGraph tg_from_reachability(const ReachabilityGraph& rg) {
  const auto& edges = rg.edges();
  if (rg.final_marking() >= rg.markings().size()) {
    throw ModelAssumptionError("no accepting run: the final marking is unreachable");
  }
  const std::size_t start = 0;
  const std::size_t end = edges.size() + 1;
  std::vector<Label> labels;
  labels.reserve(edges.size() + 2);
  labels.push_back(Label::tau());
  for (const auto& e : edges) labels.push_back(rg.label(e));
  labels.push_back(Label::tau());

  std::vector<std::vector<Arc>> rows(labels.size());
  for (std::size_t e : rg.outgoing(rg.root())) rows[start].push_back({e + 1, rg.probability(e)});
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::size_t target = edges[e].target;
    for (std::size_t next : rg.outgoing(target)) rows[e + 1].push_back({next + 1, rg.probability(next)});
    if (target == rg.final_marking()) rows[e + 1].push_back({end, 1.0});
  }
  return TransitionGraph(std::move(labels), std::move(rows), start, end);
}

namespace {

bool interior_tau(const TransitionGraph& tg, std::size_t v) {
  return tg.label(v).is_tau() && v != tg.start() && v != tg.end();
}

// Returns the nodes of some cycle in the subgraph induced by `keep`, or an
// empty vector when that subgraph is acyclic.
std::vector<std::size_t> find_cycle(const LabelledGraph& g, const std::vector<bool>& keep) {
  const std::size_t n = g.size();
  std::vector<char> colour(n, 0);
  std::vector<std::size_t> parent(n, n);
  for (std::size_t root = 0; root < n; ++root) {
    if (!keep[root] || colour[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      const auto& row = g.successors(v);
      if (pos == row.size()) {
        colour[v] = 2;
        stack.pop_back();
        continue;
      }
      std::size_t w = row[pos++].to;
      if (!keep[w]) continue;
      if (colour[w] == 1) {
        std::vector<std::size_t> cycle{w};
        for (std::size_t x = v; x != w; x = parent[x]) cycle.push_back(x);
        std::reverse(cycle.begin() + 1, cycle.end());
        return cycle;
      }
      if (colour[w] == 0) {
        colour[w] = 1;
        parent[w] = v;
        stack.emplace_back(w, 0);
      }
    }
  }
  return {};
}

}  // namespace

bool has_cycle(const LabelledGraph& g) {
  return !find_cycle(g, std::vector<bool>(g.size(), true)).empty();
}

std::optional<std::size_t> longest_tau_chain(const LabelledGraph& g) {
  std::vector<bool> tau(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) tau[v] = g.label(v).is_tau();
  if (!find_cycle(g, tau).empty()) return std::nullopt;
  // chain[v] = longest run of tau nodes starting at v, memoised over the
  // acyclic tau subgraph.
  std::vector<std::size_t> chain(g.size(), 0);
  std::vector<bool> done(g.size(), false);
  std::size_t best = 0;
  for (std::size_t root = 0; root < g.size(); ++root) {
    if (!tau[root] || done[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      const auto& row = g.successors(v);
      if (pos < row.size()) {
        std::size_t w = row[pos++].to;
        if (tau[w] && !done[w]) stack.emplace_back(w, 0);
        continue;
      }
      std::size_t len = 1;
      for (const Arc& a : row) {
        if (tau[a.to]) len = std::max(len, chain[a.to] + 1);
      }
      chain[v] = len;
      done[v] = true;
      best = std::max(best, len);
      stack.pop_back();
    }
  }
  return best;
}

TransitionGraph tau_closure(const TransitionGraph& tg) {
  const std::size_t n = tg.size();
  std::vector<bool> interior(n);
  for (std::size_t v = 0; v < n; ++v) interior[v] = interior_tau(tg, v);
  if (auto cycle = find_cycle(tg, interior); !cycle.empty()) {
    std::string names;
    for (std::size_t v : cycle) names += (names.empty() ? "" : " -> ") + std::to_string(v);
    throw ModelAssumptionError("tau-only cycle through nodes " + names + " -> " +
                               std::to_string(cycle.front()));
  }

  std::vector<std::map<std::size_t, double>> out(n);
  std::vector<std::set<std::size_t>> in(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (const Arc& a : tg.successors(u)) {
      out[u][a.to] = a.probability;
      in[a.to].insert(u);
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!interior[x]) continue;
    for (std::size_t u : in[x]) {
      double pu = out[u].at(x);
      out[u].erase(x);
      for (const auto& [w, pw] : out[x]) {
        out[u][w] += pu * pw;
        in[w].insert(u);
      }
    }
    for (const auto& [w, pw] : out[x]) in[w].erase(x);
    out[x].clear();
    in[x].clear();
  }

  std::vector<std::size_t> remap(n, n);
  std::vector<Label> labels;
  for (std::size_t v = 0; v < n; ++v) {
    if (interior[v]) continue;
    remap[v] = labels.size();
    labels.push_back(tg.label(v));
  }
  std::vector<std::vector<Arc>> rows(labels.size());
  for (std::size_t v = 0; v < n; ++v) {
    if (interior[v]) continue;
    for (const auto& [w, p] : out[v]) rows[remap[v]].push_back({remap[w], std::min(p, 1.0)});
  }
  return TransitionGraph(std::move(labels), std::move(rows), remap[tg.start()], remap[tg.end()]);
}

void for_each_power_row(
    const LabelledGraph& g, std::size_t max_power,
    const std::function<void(std::size_t, std::size_t, std::span<const double>)>& visit) {
  const std::size_t n = g.size();
  std::vector<double> row(n), next(n);
  for (std::size_t source = 0; source < n; ++source) {
    std::fill(row.begin(), row.end(), 0.0);
    row[source] = 1.0;
    for (std::size_t i = 1; i <= max_power; ++i) {
      std::fill(next.begin(), next.end(), 0.0);
      bool any = false;
      for (std::size_t u = 0; u < n; ++u) {
        if (row[u] == 0.0) continue;
        for (const Arc& a : g.successors(u)) {
          next[a.to] += row[u] * a.probability;
          any = true;
        }
      }
      if (!any) break;
      row.swap(next);
      visit(i, source, row);
    }
  }
}

std::size_t LabelMatrix::index(const Label& l) const {
  auto it = std::find(labels.begin(), labels.end(), l);
  return it == labels.end() ? labels.size() : static_cast<std::size_t>(it - labels.begin());
}

double LabelMatrix::at(const Label& from, const Label& to) const {
  std::size_t i = index(from), j = index(to);
  if (i == labels.size() || j == labels.size()) return 0.0;
  return values[i * labels.size() + j];
}

LabelMatrix lambda_power(const LabelledGraph& g, std::size_t n) {
  if (n == 0) throw PreconditionError("lambda_power needs n >= 1");
  LabelMatrix m;
  bool has_tau = false;
  for (const auto& a : g.activities()) m.labels.push_back(Label::task(a));
  for (const auto& l : g.labels()) has_tau |= l.is_tau();
  if (has_tau) m.labels.push_back(Label::tau());
  const std::size_t k = m.labels.size();
  m.values.assign(k * k, 0.0);

  std::vector<std::size_t> label_of(g.size());
  std::vector<double> count(k, 0.0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    label_of[v] = m.index(g.label(v));
    count[label_of[v]] += 1.0;
  }
  for_each_power_row(g, n, [&](std::size_t i, std::size_t source, std::span<const double> row) {
    if (i != n) return;
    for (std::size_t w = 0; w < row.size(); ++w) {
      if (row[w] != 0.0) m.values[label_of[source] * k + label_of[w]] += row[w];
    }
  });
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) m.values[a * k + b] /= count[a];
  }
  return m;
}

TransitionGraph linear_tg(const Trace& trace) {
  if (trace.empty()) throw PreconditionError("cannot encode the empty trace");
  std::vector<Label> labels;
  std::vector<std::vector<Arc>> rows(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    labels.push_back(Label::task(trace[i]));
    if (i + 1 < trace.size()) rows[i].push_back({i + 1, 1.0});
  }
  return TransitionGraph(std::move(labels), std::move(rows), 0, trace.size() - 1);
}

TransitionGraph example_fixture_tg() {
  // s=0, A=1, C=2, B=3, e=4
  std::vector<Label> labels{Label::tau(), Label::task("a"), Label::task("c"), Label::task("b"),
                            Label::tau()};
  std::vector<std::vector<Arc>> rows{
      {{1, 0.8}, {2, 0.2}},
      {{1, 0.5}, {4, 0.5}},
      {{1, 0.7}, {3, 0.3}},
      {{4, 1.0}},
      {},
  };
  return TransitionGraph(std::move(labels), std::move(rows), 0, 4);
}

WeightedTransitionGraph project(const TransitionGraph& tg, const Trace& trace,
                                std::size_t silence_bound) {
  if (trace.empty()) throw PreconditionError("cannot project onto the empty trace");
  bool closed = true;
  for (std::size_t v = 0; v < tg.size(); ++v) closed &= !interior_tau(tg, v);
  const TransitionGraph graph = closed ? tg : tau_closure(tg);

  const auto runs = runs_of(graph, trace, silence_bound);
  if (runs.empty()) {
    throw PreconditionError("'" + join_trace(trace) + "' is not a model trace of the graph");
  }

  std::set<std::size_t> nodes;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::set<std::size_t> starts, ends;
  double miss = 1.0;
  for (const Run& run : runs) {
    std::vector<std::size_t> visible;
    for (std::size_t v : run.nodes) {
      if (!graph.label(v).is_tau()) visible.push_back(v);
    }
    nodes.insert(visible.begin(), visible.end());
    for (std::size_t i = 1; i < visible.size(); ++i) edges.emplace(visible[i - 1], visible[i]);
    starts.insert(visible.front());
    ends.insert(visible.back());

    const auto& r = run.nodes;
    const std::size_t last = r.size() - 1;
    double head = graph.label(r.front()).is_tau() && last >= 1 ? graph.probability(r[0], r[1]) : 1.0;
    double tail = graph.label(r.back()).is_tau() && last >= 1
                      ? graph.probability(r[last - 1], r[last])
                      : 1.0;
    miss *= 1.0 - head * tail;
  }

  std::map<std::size_t, std::size_t> remap;
  std::vector<Label> labels;
  for (std::size_t v : nodes) {
    remap[v] = labels.size();
    labels.push_back(graph.label(v));
  }
  std::vector<std::vector<Arc>> rows(labels.size());
  for (const auto& [u, w] : edges) rows[remap[u]].push_back({remap[w], graph.probability(u, w)});
  for (auto& row : rows) {
    double total = 0.0;
    for (const Arc& a : row) total += a.probability;
    for (Arc& a : row) a.probability /= total;
  }
  std::vector<std::size_t> start_nodes, end_nodes;
  for (std::size_t s : starts) start_nodes.push_back(remap[s]);
  for (std::size_t e : ends) end_nodes.push_back(remap[e]);
  return WeightedTransitionGraph(LabelledGraph(std::move(labels), std::move(rows)),
                                 std::move(start_nodes), std::move(end_nodes), 1.0 - miss,
                                 trace.size());
}

WeightedTransitionGraph weighted_linear(const Trace& trace) {
  TransitionGraph tg = linear_tg(trace);
  return WeightedTransitionGraph(static_cast<const LabelledGraph&>(tg), {tg.start()}, {tg.end()},
                                 1.0, trace.size());
}

WeightedTransitionGraph weighted_whole(const TransitionGraph& tg, double omega,
                                       std::size_t horizon) {
  return WeightedTransitionGraph(static_cast<const LabelledGraph&>(tg), {tg.start()}, {tg.end()},
                                 omega, horizon);
}

}  // namespace ptalign
