#include "ptalign/bench.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "ptalign/errors.hpp"
#include "ptalign/io.hpp"
#include "ptalign/ranking.hpp"

namespace ptalign {

namespace {

using Clock = std::chrono::steady_clock;

double micros(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::micro>(to - from).count();
}

struct Strategy {
  std::string name;
  EpsStrategy eps;
  NuStrategy nu;
};

const std::vector<Strategy>& approx_strategies() {
  static const std::vector<Strategy> all{
      {"e1n1", EpsStrategy::kEps1, NuStrategy::kNu1},
      {"e1n2", EpsStrategy::kEps1, NuStrategy::kNu2},
      {"e2n1", EpsStrategy::kEps2, NuStrategy::kNu1},
      {"e2n2", EpsStrategy::kEps2, NuStrategy::kNu2},
  };
  return all;
}

}  // namespace

std::vector<std::string> bench_strategies() {
  std::vector<std::string> out{"optimal"};
  for (const auto& s : approx_strategies()) out.push_back(s.name);
  return out;
}

BenchRow BenchmarkReport::overall(const std::string& strategy, IndexKind index) const {
  BenchRow row{0, strategy, index, 0, 0.0, 0.0, 0.0, 0.0};
  for (const auto& r : records) {
    if (r.strategy != strategy || r.index != index) continue;
    ++row.queries;
    row.mean_spearman += r.spearman;
    row.mean_prepare_us += r.prepare_us;
    row.mean_search_us += r.search_us;
    row.mean_total_us += r.total_us;
  }
  if (row.queries) {
    const double n = static_cast<double>(row.queries);
    row.mean_spearman /= n;
    row.mean_prepare_us /= n;
    row.mean_search_us /= n;
    row.mean_total_us /= n;
  }
  return row;
}

BenchmarkReport run_benchmark(const TransitionGraph& tg, const std::vector<ModelTrace>& traces,
                              const std::vector<Trace>& queries, const BenchOptions& options) {
  if (traces.size() < 2) throw PreconditionError("benchmark needs at least two model traces");
  std::vector<Trace> all_labels;
  for (const auto& t : traces) all_labels.push_back(t.labels);
  all_labels.insert(all_labels.end(), queries.begin(), queries.end());
  std::vector<Activity> names;
  for (const auto& t : all_labels) names.insert(names.end(), t.begin(), t.end());
  const auto alphabet = std::make_shared<const Alphabet>(std::move(names));

  // Tables are built once per model; their cost is not charged to queries.
  struct Table {
    const Strategy* strategy;
    IndexKind index;
    std::unique_ptr<EmbeddingTable> table;
  };
  std::vector<Table> tables;
  for (const auto& s : approx_strategies()) {
    EmbeddingConfig cfg = options.embedding;
    cfg.eps = s.eps;
    cfg.nu = s.nu;
    for (IndexKind index : options.indexes) {
      tables.push_back({&s, index,
                        std::make_unique<EmbeddingTable>(tg, traces, cfg, alphabet, index,
                                                         options.silence_bound)});
    }
  }
  // EmbeddingTable sorts its traces; golden scores follow the same order.
  const auto& sorted = tables.front().table->traces();

  BenchmarkReport report;
  const std::size_t k = std::min(options.k, sorted.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const Trace& query = queries[qi];
    std::vector<double> golden;
    golden.reserve(sorted.size());
    for (const auto& t : sorted) golden.push_back(golden_rank(query, t, options.c));

    for (IndexKind index : options.indexes) {
      auto t0 = Clock::now();
      std::vector<Point> points;
      points.reserve(sorted.size());
      for (std::size_t id = 0; id < sorted.size(); ++id) {
        const RankedAlignment r = align_one(query, sorted[id], options.c);
        points.push_back({id, {r.transformed[0], r.transformed[1]}});
      }
      const KnnIndex idx(std::move(points), index);
      auto t1 = Clock::now();
      const std::array<double, 2> origin{0.0, 0.0};
      auto found = idx.query(origin, k);
      auto t2 = Clock::now();
      (void)found;
      report.records.push_back({qi, query.size(), "optimal", index, spearman(golden, golden),
                                micros(t0, t1), micros(t1, t2), micros(t0, t1) + micros(t1, t2)});
    }

    for (const auto& entry : tables) {
      const EmbeddingTable& table = *entry.table;
      auto t0 = Clock::now();
      const EmbeddingVector q = embed_log_trace(query, table.config(), table.alphabet());
      auto t1 = Clock::now();
      auto found = table.index().query(q.values(), k);
      auto t2 = Clock::now();
      (void)found;
      std::vector<double> kernels;
      kernels.reserve(sorted.size());
      for (const auto& v : table.vectors()) kernels.push_back(kernel(q, v));
      report.records.push_back({qi, query.size(), entry.strategy->name, entry.index,
                                spearman(kernels, golden), micros(t0, t1), micros(t1, t2),
                                micros(t0, t1) + micros(t1, t2)});
    }
  }

  std::map<std::tuple<std::size_t, std::string, IndexKind>, std::vector<const QueryRecord*>> groups;
  for (const auto& r : report.records) groups[{r.length, r.strategy, r.index}].push_back(&r);
  for (const auto& [key, recs] : groups) {
    BenchRow row{std::get<0>(key), std::get<1>(key), std::get<2>(key), recs.size(), 0, 0, 0, 0};
    for (const auto* r : recs) {
      row.mean_spearman += r->spearman;
      row.mean_prepare_us += r->prepare_us;
      row.mean_search_us += r->search_us;
      row.mean_total_us += r->total_us;
    }
    const double n = static_cast<double>(recs.size());
    row.mean_spearman /= n;
    row.mean_prepare_us /= n;
    row.mean_search_us /= n;
    row.mean_total_us /= n;
    report.rows.push_back(row);
  }
  return report;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "length,strategy,index,queries,mean_spearman,mean_prepare_us,mean_search_us,mean_total_us\n";
  for (const auto& r : report.rows) {
    out << r.length << "," << r.strategy << "," << to_string(r.index) << "," << r.queries << ","
        << format_number(r.mean_spearman) << "," << format_number(r.mean_prepare_us) << ","
        << format_number(r.mean_search_us) << "," << format_number(r.mean_total_us) << "\n";
  }
}

StochasticWorkflowNet synthetic_workflow_net(const SyntheticNetShape& shape, std::uint64_t seed) {
  if (shape.stages == 0 || shape.width == 0 || shape.width > shape.activities) {
    throw PreconditionError("synthetic net needs stages >= 1 and 1 <= width <= activities");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> pool;
  for (std::size_t a = 0; a < shape.activities; ++a) pool.push_back("act" + std::to_string(a));

  StochasticWorkflowNet::Builder b;
  for (std::size_t p = 0; p <= shape.stages; ++p) b.place("p" + std::to_string(p));
  std::size_t skips_in_a_row = 0;
  bool previous_redo = false;
  for (std::size_t s = 0; s < shape.stages; ++s) {
    std::vector<std::string> choice = pool;
    std::shuffle(choice.begin(), choice.end(), rng);
    choice.resize(shape.width);
    const std::string from = "p" + std::to_string(s), to = "p" + std::to_string(s + 1);
    for (std::size_t w = 0; w < shape.width; ++w) {
      const std::string id = "t" + std::to_string(s) + "_" + std::to_string(w);
      b.transition(id, Label::task(choice[w]), weight(rng)).arc(from, id).arc(id, to);
    }
    const double r = unit(rng);
    if (r < shape.skip_probability && skips_in_a_row < 2) {
      const std::string id = "skip" + std::to_string(s);
      b.transition(id, Label::tau(), weight(rng)).arc(from, id).arc(id, to);
      ++skips_in_a_row;
      previous_redo = false;
    } else if (r < shape.skip_probability + shape.redo_probability && !previous_redo && s > 0 &&
               s + 1 < shape.stages) {
      const std::string id = "redo" + std::to_string(s);
      b.transition(id, Label::tau(), weight(rng)).arc(to, id).arc(id, from);
      skips_in_a_row = 0;
      previous_redo = true;
    } else {
      skips_in_a_row = 0;
      previous_redo = false;
    }
  }
  return b.build();
}

std::vector<Trace> sample_queries(const TransitionGraph& tg, std::size_t count,
                                  std::size_t max_edits, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<Activity> activities = tg.activities();
  if (activities.empty()) throw PreconditionError("graph has no activities to sample");
  std::uniform_int_distribution<std::size_t> pick(0, activities.size() - 1);
  std::uniform_int_distribution<std::size_t> edits(0, max_edits);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Trace> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > count * 1000) throw ModelAssumptionError("could not sample enough traces");
    Trace t;
    std::size_t v = tg.start();
    for (std::size_t steps = 0; v != tg.end() && steps < 10'000; ++steps) {
      const auto& row = tg.successors(v);
      if (row.empty()) break;
      double r = unit(rng), acc = 0.0;
      std::size_t next = row.back().to;
      for (const Arc& a : row) {
        acc += a.probability;
        if (r < acc) {
          next = a.to;
          break;
        }
      }
      v = next;
      if (!tg.label(v).is_tau()) t.push_back(tg.label(v).activity());
    }
    if (v != tg.end() || t.empty()) continue;
    for (std::size_t e = edits(rng); e > 0; --e) {
      std::uniform_int_distribution<std::size_t> at(0, t.size());
      const std::size_t pos = at(rng);
      switch (rng() % 3) {
        case 0: t.insert(t.begin() + pos, activities[pick(rng)]); break;
        case 1: if (pos < t.size() && t.size() > 1) t.erase(t.begin() + pos); break;
        default: if (pos < t.size()) t[pos] = activities[pick(rng)]; break;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace ptalign
