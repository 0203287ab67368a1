#include "ptalign/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptalign/errors.hpp"

namespace ptalign {

std::size_t levenshtein(const Trace& a, const Trace& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  std::vector<std::size_t> costs(b.size() + 1);
  std::iota(costs.begin(), costs.end(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t corner = costs[0];
    costs[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t upper = costs[j + 1];
      if (a[i] == b[j]) {
        costs[j + 1] = corner;
      } else {
        costs[j + 1] = std::min({upper, corner, costs[j]}) + 1;
      }
      corner = upper;
    }
  }
  return costs[b.size()];
}

double similarity(std::size_t distance, unsigned c) {
  if (c == 0) throw PreconditionError("c must be a positive integer");
  return 1.0 / (static_cast<double>(distance) / c + 1.0);
}

double golden_rank(const Trace& query, const ModelTrace& candidate, unsigned c) {
  return candidate.probability * similarity(levenshtein(query, candidate.labels), c);
}

std::array<double, 2> t_transform(double p, double s) {
  if (!(p > 0.0 && p <= 1.0) || !(s > 0.0 && s <= 1.0)) {
    throw PreconditionError("t_transform needs p, s in (0, 1]");
  }
  const double r = std::hypot(p, s);
  return {1.0 / (s * r), 1.0 / (p * r)};
}

bool trace_less(const Trace& a, const Trace& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

RankedAlignment align_one(const Trace& query, const ModelTrace& candidate, unsigned c) {
  RankedAlignment r;
  r.model_trace = candidate;
  r.distance = levenshtein(query, candidate.labels);
  r.similarity = similarity(r.distance, c);
  r.score = candidate.probability * r.similarity;
  r.transformed = t_transform(candidate.probability, r.similarity);
  return r;
}

Ranking optimal_topk(const std::vector<ModelTrace>& traces, const Trace& query, std::size_t k,
                     unsigned c, IndexKind index_kind) {
  if (traces.empty()) throw PreconditionError("no model traces to rank");
  if (k == 0) throw PreconditionError("k must be positive");

  // Ids follow lexicographic trace order so the index's id tie-break is
  // the ranking's tie-break.
  std::vector<std::size_t> order(traces.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return trace_less(traces[a].labels, traces[b].labels);
  });

  std::vector<RankedAlignment> aligned;
  std::vector<Point> points;
  aligned.reserve(traces.size());
  points.reserve(traces.size());
  for (std::size_t id = 0; id < order.size(); ++id) {
    aligned.push_back(align_one(query, traces[order[id]], c));
    const auto& t = aligned.back().transformed;
    points.push_back({id, {t[0], t[1]}});
  }
  const KnnIndex index(std::move(points), index_kind);
  const std::array<double, 2> origin{0.0, 0.0};

  Ranking ranking;
  ranking.truncated = k > traces.size();
  for (const Neighbor& nb : index.query(origin, std::min(k, traces.size()))) {
    ranking.entries.push_back(aligned[nb.id]);
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedAlignment& a, const RankedAlignment& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return trace_less(a.model_trace.labels, b.model_trace.labels);
                   });
  return ranking;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + j - 1)) / 2.0 + 1.0;
    for (std::size_t m = i; m < j; ++m) ranks[order[m]] = avg;
    i = j;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("spearman needs equally sized inputs");
  if (a.size() < 2) throw PreconditionError("spearman needs at least two items");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  // A constant ranking carries no order information.
  if (va == 0.0 || vb == 0.0) return (va == vb) ? 1.0 : 0.0;
  return cov / std::sqrt(va * vb);
}

double spearman(const Ranking& a, const Ranking& b) {
  if (a.entries.size() != b.entries.size()) {
    throw PreconditionError("rankings cover different trace sets");
  }
  std::vector<std::pair<Trace, std::size_t>> pos_b;
  for (std::size_t i = 0; i < b.entries.size(); ++i) pos_b.emplace_back(b.entries[i].model_trace.labels, i);
  std::sort(pos_b.begin(), pos_b.end(),
            [](const auto& x, const auto& y) { return trace_less(x.first, y.first); });
  std::vector<double> ra, rb;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const Trace& t = a.entries[i].model_trace.labels;
    auto it = std::lower_bound(pos_b.begin(), pos_b.end(), t,
                               [](const auto& x, const Trace& y) { return trace_less(x.first, y); });
    if (it == pos_b.end() || it->first != t) {
      throw PreconditionError("rankings cover different trace sets");
    }
    ra.push_back(static_cast<double>(i));
    rb.push_back(static_cast<double>(it->second));
  }
  return spearman(ra, rb);
}

}  // namespace ptalign
