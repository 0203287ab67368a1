#include "ptalign/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ptalign/errors.hpp"

namespace ptalign {

namespace {

// Neumaier-compensated accumulator; the lambda^i terms span many orders of
// magnitude.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::size_t activity_index(const Alphabet& alphabet, const Activity& a) {
  auto idx = alphabet.index_of(a);
  if (!idx) throw PreconditionError("activity '" + a + "' is not in the alphabet");
  return *idx;
}

// Alphabet index per node, or npos for tau nodes.
std::vector<std::size_t> node_activities(const LabelledGraph& g, const Alphabet& alphabet) {
  std::vector<std::size_t> out(g.size(), std::string::npos);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!g.label(v).is_tau()) out[v] = activity_index(alphabet, g.label(v).activity());
  }
  return out;
}

// M_i[a][b] = [L R^i L^T]_{ab} over A x A, for i = 1..horizon.
std::vector<std::vector<double>> label_path_mass(const LabelledGraph& g, std::size_t horizon,
                                                 const Alphabet& alphabet) {
  const std::size_t na = alphabet.size();
  const auto act = node_activities(g, alphabet);
  std::vector<std::vector<double>> mass(horizon, std::vector<double>(na * na, 0.0));
  for_each_power_row(g, horizon, [&](std::size_t i, std::size_t source, std::span<const double> row) {
    if (act[source] == std::string::npos) return;
    auto& m = mass[i - 1];
    for (std::size_t w = 0; w < row.size(); ++w) {
      if (row[w] != 0.0 && act[w] != std::string::npos) m[act[source] * na + act[w]] += row[w];
    }
  });
  return mass;
}

double l2(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x * x);
  return std::sqrt(s.value());
}

std::set<Trace> bounded_traces(const WeightedTransitionGraph& g, std::size_t max_length) {
  if (!longest_tau_chain(g)) throw ModelAssumptionError("tau nodes form a cycle");
  std::vector<bool> is_end(g.size(), false);
  for (std::size_t e : g.ends()) is_end[e] = true;
  std::set<Trace> traces;
  Trace labels;
  // Depth-first over paths; tau nodes do not count towards the length.
  auto visit = [&](auto&& self, std::size_t v) -> void {
    const bool visible = !g.label(v).is_tau();
    if (visible) {
      if (labels.size() == max_length) return;
      labels.push_back(g.label(v).activity());
    }
    if (is_end[v] && !labels.empty()) traces.insert(labels);
    for (const Arc& a : g.successors(v)) self(self, a.to);
    if (visible) labels.pop_back();
  };
  for (std::size_t s : g.starts()) visit(visit, s);
  return traces;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::size_t alphabet_size)
    : alphabet_size_(alphabet_size), values_(alphabet_size + alphabet_size * alphabet_size, 0.0) {}

std::vector<double> string_embedding(const Trace& trace, double lambda, const Alphabet& alphabet) {
  const std::size_t na = alphabet.size();
  std::vector<double> out(na * na, 0.0);
  if (trace.empty()) return out;
  const TransitionGraph g = linear_tg(trace);
  const auto mass = label_path_mass(g, trace.size(), alphabet);
  std::vector<CompensatedSum> acc(na * na);
  double weight = 1.0;
  for (const auto& m : mass) {
    weight *= lambda;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] != 0.0) acc[j].add(weight * m[j]);
    }
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = acc[j].value();
  return out;
}

std::vector<double> sub_embedding_eps(const WeightedTransitionGraph& g, const EmbeddingConfig& cfg,
                                      const Alphabet& alphabet) {
  const std::size_t horizon = cfg.horizon.value_or(g.horizon());
  if (horizon == 0) throw PreconditionError("horizon must be positive");
  const std::size_t na = alphabet.size();
  const auto mass = label_path_mass(g, horizon, alphabet);

  std::vector<double> count(na, 0.0);
  for (std::size_t a : node_activities(g, alphabet)) {
    if (a != std::string::npos) count[a] += 1.0;
  }
  std::vector<CompensatedSum> acc(na * na);
  double weight = 1.0;
  for (const auto& m : mass) {
    weight *= cfg.lambda;
    if (cfg.eps == EpsStrategy::kEps1) {
      CompensatedSum total;
      for (double x : m) total.add(x);
      if (total.value() == 0.0) continue;
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] != 0.0) acc[j].add(weight * m[j] / total.value());
      }
    } else {
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] != 0.0) acc[j].add(weight * m[j] / count[j / na]);
      }
    }
  }
  std::vector<double> out(na * na);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = acc[j].value();
  return out;
}

std::vector<double> sub_embedding_nu(const WeightedTransitionGraph& g, const EmbeddingConfig& cfg,
                                     const Alphabet& alphabet) {
  std::vector<double> out(alphabet.size(), 0.0);
  if (cfg.nu == NuStrategy::kNu2) return out;
  const std::size_t horizon = cfg.horizon.value_or(g.horizon());
  std::vector<CompensatedSum> acc(alphabet.size());
  for (const Trace& t : bounded_traces(g, horizon)) {
    const double share = 1.0 / static_cast<double>(t.size());
    for (const auto& a : t) acc[activity_index(alphabet, a)].add(share);
  }
  CompensatedSum total;
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = acc[a].value();
    total.add(out[a]);
  }
  if (total.value() > 0.0) {
    for (double& x : out) x /= total.value();
  }
  return out;
}

std::size_t edge_exponent(const LabelledGraph& g, std::size_t horizon) {
  std::size_t count = 0;
  for_each_power_row(g, horizon, [&](std::size_t, std::size_t, std::span<const double> row) {
    for (double x : row) count += x > 0.0;
  });
  return count;
}

EmbeddingVector tg_embedding(const WeightedTransitionGraph& g, const EmbeddingConfig& cfg,
                             const Alphabet& alphabet) {
  if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) throw PreconditionError("lambda must lie in (0, 1]");
  if (!(cfg.t_f >= 0.0 && cfg.t_f <= 1.0)) throw PreconditionError("t_f must lie in [0, 1]");
  const std::size_t horizon = cfg.horizon.value_or(g.horizon());
  const auto eps = sub_embedding_eps(g, cfg, alphabet);
  const auto nu = sub_embedding_nu(g, cfg, alphabet);
  const double scale = std::pow(cfg.t_f, static_cast<double>(edge_exponent(g, horizon)));

  EmbeddingVector out(alphabet.size());
  const double eps_norm = l2(eps);
  const double nu_norm = l2(nu);
  auto eps_block = out.eps_block();
  auto nu_block = out.nu_block();
  if (eps_norm > 0.0) {
    for (std::size_t j = 0; j < eps.size(); ++j) eps_block[j] = g.omega() * (eps[j] / eps_norm) * scale;
  }
  if (nu_norm > 0.0) {
    for (std::size_t a = 0; a < nu.size(); ++a) nu_block[a] = (nu[a] / nu_norm) * scale;
  }
  return out;
}

double kernel(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) throw PreconditionError("embedding dimension mismatch");
  CompensatedSum s;
  const auto x = a.values();
  const auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) s.add(x[i] * y[i]);
  return s.value();
}

double kernel_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  const double d2 = kernel(a, a) - 2.0 * kernel(a, b) + kernel(b, b);
  return std::sqrt(std::max(0.0, d2));
}

EmbeddingVector embed_log_trace(const Trace& trace, const EmbeddingConfig& cfg,
                                const Alphabet& alphabet) {
  return tg_embedding(weighted_linear(trace), cfg, alphabet);
}

EmbeddingTable::EmbeddingTable(const TransitionGraph& tg, std::vector<ModelTrace> traces,
                               EmbeddingConfig cfg, std::shared_ptr<const Alphabet> alphabet,
                               IndexKind index_kind, std::size_t silence_bound)
    : traces_(std::move(traces)), cfg_(cfg), alphabet_(std::move(alphabet)) {
  if (traces_.empty()) throw PreconditionError("empty model trace set");
  std::sort(traces_.begin(), traces_.end(),
            [](const ModelTrace& a, const ModelTrace& b) { return trace_less(a.labels, b.labels); });
  const TransitionGraph closed = tau_closure(tg);
  std::vector<Point> points;
  points.reserve(traces_.size());
  vectors_.reserve(traces_.size());
  for (std::size_t id = 0; id < traces_.size(); ++id) {
    vectors_.push_back(tg_embedding(project(closed, traces_[id].labels, silence_bound), cfg_, *alphabet_));
    const auto v = vectors_.back().values();
    points.push_back({id, {v.begin(), v.end()}});
  }
  index_ = std::make_unique<KnnIndex>(std::move(points), index_kind);
}

Ranking approx_topk(const EmbeddingTable& table, const Trace& query, std::size_t k, unsigned c,
                    ApproxMode mode) {
  if (k == 0) throw PreconditionError("k must be positive");
  const EmbeddingVector q = embed_log_trace(query, table.config(), table.alphabet());
  const auto& traces = table.traces();
  Ranking ranking;
  ranking.truncated = k > traces.size();
  const std::size_t take = std::min(k, traces.size());

  if (mode == ApproxMode::kDistance) {
    for (const Neighbor& nb : table.index().query(q.values(), take)) {
      RankedAlignment r = align_one(query, traces[nb.id], c);
      r.embedding_value = nb.distance;
      ranking.entries.push_back(std::move(r));
    }
    return ranking;
  }

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(traces.size());
  for (std::size_t id = 0; id < traces.size(); ++id) scored.emplace_back(kernel(q, table.vectors()[id]), id);
  // Ids are in lexicographic trace order, so the id tie-break is lexicographic.
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; i < take; ++i) {
    RankedAlignment r = align_one(query, traces[scored[i].second], c);
    r.embedding_value = scored[i].first;
    ranking.entries.push_back(std::move(r));
  }
  return ranking;
}

}  // namespace ptalign
