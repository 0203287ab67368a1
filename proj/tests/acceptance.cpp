// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "ptalign/bench.hpp"
#include "ptalign/embedding.hpp"
#include "ptalign/io.hpp"
#include "ptalign/ranking.hpp"
#include "ptalign/session.hpp"

using namespace ptalign;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(4);
  out << x;
  return out.str();
}

Outcome golden_table() {
  const auto t0 = Clock::now();
  const Trace caba{"c", "a", "b", "a"};
  const auto traces = unfold(example_fixture_tg(), {0.0, 4});
  const Ranking r = optimal_topk(traces, caba, 8, 5, IndexKind::kKd);
  struct Row {
    Trace labels;
    std::size_t d;
    double p, s, score;
  };
  const std::vector<Row> want{
      {{"a"}, 3, 0.4, 0.6250, 0.2500},           {{"a", "a"}, 2, 0.2, 0.7142, 0.1428},
      {{"a", "a", "a"}, 2, 0.1, 0.7142, 0.0714}, {{"c", "a"}, 2, 0.07, 0.7142, 0.0500},
      {{"c", "b"}, 2, 0.06, 0.7142, 0.0428},     {{"a", "a", "a", "a"}, 2, 0.05, 0.7142, 0.0357},
      {{"c", "a", "a"}, 1, 0.035, 0.8333, 0.0292}, {{"c", "a", "a", "a"}, 1, 0.0175, 0.8333, 0.0145}};
  if (r.entries.size() != want.size()) return {false, "expected 8 rows"};
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto& e = r.entries[i];
    const bool ok = e.model_trace.labels == want[i].labels && e.distance == want[i].d &&
                    std::abs(e.model_trace.probability - want[i].p) < 1e-12 &&
                    std::abs(e.similarity - want[i].s) < 1e-4 && std::abs(e.score - want[i].score) < 1e-4;
    if (!ok) return {false, "row " + std::to_string(i + 1) + " differs (" + join_trace(e.model_trace.labels) + ")"};
  }
  const double sec = seconds_since(t0);
  return {sec < 1.0, "8 rows within 1e-4, " + fmt(sec) + " s"};
}

Outcome string_table() {
  const double l = 0.07;
  const Alphabet abc(std::vector<Activity>{"a", "b", "c"});
  auto idx = [&](const char* x, const char* y) { return *abc.index_of(x) * 3 + *abc.index_of(y); };
  struct Entry {
    const char* from;
    const char* to;
    double value;
  };
  auto matches = [&](const Trace& t, const std::vector<Entry>& entries) {
    const auto v = string_embedding(t, l, abc);
    std::vector<double> want(9, 0.0);
    for (const auto& e : entries) want[idx(e.from, e.to)] = e.value;
    for (std::size_t i = 0; i < 9; ++i) {
      if (std::abs(v[i] - want[i]) > 1e-15) return false;
    }
    return true;
  };
  const Trace caba{"c", "a", "b", "a"}, caa{"c", "a", "a"}, cb{"c", "b"};
  const bool rows =
      matches(caba, {{"a", "a", l * l}, {"a", "b", l}, {"b", "a", l}, {"c", "a", l + l * l * l}, {"c", "b", l * l}}) &&
      matches(caa, {{"a", "a", l}, {"c", "a", l + l * l}}) && matches(cb, {{"c", "b", l}});
  const auto e1 = string_embedding(caba, l, abc), e2 = string_embedding(caa, l, abc),
             e3 = string_embedding(cb, l, abc);
  const double k12 = std::inner_product(e1.begin(), e1.end(), e2.begin(), 0.0);
  const double k13 = std::inner_product(e1.begin(), e1.end(), e3.begin(), 0.0);
  const double err12 = std::abs(k12 - (l * l * l + (l + l * l * l) * (l + l * l)));
  const double err13 = std::abs(k13 - l * l * l);
  const bool ok = rows && err12 < 1e-12 && err13 < 1e-12;
  return {ok, std::string(rows ? "rows match" : "rows differ") + ", kernel errors " + fmt(err12) + " / " + fmt(err13)};
}

Outcome approx_order() {
  const auto alphabet = std::make_shared<const Alphabet>(std::vector<Activity>{"a", "b", "c"});
  EmbeddingConfig cfg;
  cfg.t_f = 1e-4;
  cfg.lambda = 0.07;
  cfg.eps = EpsStrategy::kEps1;
  cfg.nu = NuStrategy::kNu1;
  const EmbeddingTable table(example_fixture_tg(), unfold(example_fixture_tg(), {0.0, 4}), cfg, alphabet,
                             IndexKind::kKd);
  const Ranking r = approx_topk(table, {"c", "a", "b", "a"}, 8, 5, ApproxMode::kKernel);
  std::string order;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, r.entries.size()); ++i) {
    order += (i ? ", " : "") + join_trace(r.entries[i].model_trace.labels, "");
  }
  return {order == "a, ca, cb", "top-3 " + order};
}

Outcome isometry() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool ordered = true;
  for (int set = 0; set < 100; ++set) {
    std::vector<double> score, dist;
    for (int i = 0; i < 100; ++i) {
      const double p = 1.0 - u(rng), s = 1.0 - u(rng);  // (0, 1]
      const auto t = t_transform(p, s);
      // Reference and norm in extended precision; 1/(p*s) in double is itself off by an ulp.
      const long double n = std::hypot(static_cast<long double>(t[0]), static_cast<long double>(t[1]));
      const long double exact = 1.0L / (static_cast<long double>(p) * s);
      worst = std::max(worst, static_cast<double>(std::fabs(n - exact)));
      score.push_back(p * s);
      dist.push_back(std::hypot(t[0], t[1]));
    }
    std::vector<std::size_t> by_score(score.size()), by_dist(score.size());
    std::iota(by_score.begin(), by_score.end(), 0);
    std::iota(by_dist.begin(), by_dist.end(), 0);
    std::stable_sort(by_score.begin(), by_score.end(), [&](auto a, auto b) { return score[a] > score[b]; });
    std::stable_sort(by_dist.begin(), by_dist.end(), [&](auto a, auto b) { return dist[a] < dist[b]; });
    ordered = ordered && by_score == by_dist;
  }
  return {worst < 1e-10 && ordered,
          "10000 samples, max |norm - 1/(ps)| = " + fmt(worst) + (ordered ? ", order preserved" : ", order differs")};
}

Outcome index_exactness() {
  std::mt19937_64 rng(7);
  const Alphabet letters(std::vector<Activity>{"a", "b", "c", "d", "e", "f"});
  auto random_vector = [&]() {
    Trace t(1 + rng() % 8);
    for (auto& x : t) x = letters.name(rng() % letters.size());
    return embed_log_trace(t, EmbeddingConfig{}, letters);
  };
  std::vector<Point> pts;
  for (std::size_t i = 0; i < 500; ++i) {
    const auto v = random_vector();
    pts.push_back({i, {v.values().begin(), v.values().end()}});
  }
  const KnnIndex kd(pts, IndexKind::kKd), vp(pts, IndexKind::kVp), lin(pts, IndexKind::kLinear);
  std::size_t mismatches = 0;
  for (int q = 0; q < 50; ++q) {
    const auto v = random_vector();
    const std::vector<double> query(v.values().begin(), v.values().end());
    for (std::size_t k : {1u, 5u, 20u}) {
      const auto want = lin.query(query, k);
      auto same = [&](const std::vector<Neighbor>& got) {
        if (got.size() != want.size()) return false;
        for (std::size_t i = 0; i < got.size(); ++i) {
          if (got[i].id != want[i].id || std::abs(got[i].distance - want[i].distance) > 1e-12) return false;
        }
        return true;
      };
      mismatches += !same(kd.query(query, k)) + !same(vp.query(query, k)) + !same(brute_force(pts, query, k));
    }
  }
  return {mismatches == 0, "500 vectors of dimension " + std::to_string(pts[0].coords.size()) + ", 50 queries, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome mass_bound() {
  const auto tg = example_fixture_tg();
  double previous = 0.0;
  bool monotone = true, bounded = true;
  for (std::size_t n = 1; n <= 32; ++n) {
    double mass = 0.0;
    for (const auto& t : unfold(tg, {0.0, n})) mass += t.probability;
    monotone = monotone && mass >= previous;
    bounded = bounded && mass <= 1.0;
    previous = mass;
  }
  return {monotone && bounded && previous >= 0.999,
          std::string(monotone ? "non-decreasing" : "decreasing") + ", " + (bounded ? "<= 1" : "exceeds 1") +
              ", mass at 32 = " + format_number(previous)};
}

Outcome weak_equality() {
  const Alphabet abc(std::vector<Activity>{"a", "b", "c"});
  EmbeddingConfig same;
  same.t_f = 1.0;
  same.eps = EpsStrategy::kEps2;
  same.nu = NuStrategy::kNu2;
  double worst = 0.0;
  std::size_t pairs = 0;
  for (double w1 : {1.0, 0.6, 0.25}) {
    for (double w2 : {1.0, 0.3, 0.05}) {
      const WeightedTransitionGraph chain(LabelledGraph({Label::task("a"), Label::task("b")}, {{{1, 1.0}}, {}}),
                                          {0}, {1}, w1, 2);
      const WeightedTransitionGraph fork(
          LabelledGraph({Label::task("a"), Label::task("a"), Label::task("b")}, {{{2, 1.0}}, {{2, 1.0}}, {}}),
          {0, 1}, {2}, w2, 2);
      worst = std::max(worst, std::abs(kernel(tg_embedding(chain, same, abc), tg_embedding(fork, same, abc)) - w1 * w2));
      ++pairs;
    }
  }
  // c a b as a chain, with the a node split in two, and with two c starts.
  const Label a = Label::task("a"), b = Label::task("b"), c = Label::task("c");
  const WeightedTransitionGraph cab(LabelledGraph({c, a, b}, {{{1, 1.0}}, {{2, 1.0}}, {}}), {0}, {2}, 0.7, 3);
  const WeightedTransitionGraph split_a(
      LabelledGraph({c, a, a, b}, {{{1, 0.4}, {2, 0.6}}, {{3, 1.0}}, {{3, 1.0}}, {}}), {0}, {3}, 0.45, 3);
  const WeightedTransitionGraph two_starts(
      LabelledGraph({c, c, a, b}, {{{2, 1.0}}, {{2, 1.0}}, {{3, 1.0}}, {}}), {0, 1}, {3}, 0.9, 3);
  for (const auto* g1 : {&cab, &split_a, &two_starts}) {
    for (const auto* g2 : {&cab, &split_a, &two_starts}) {
      const double k = kernel(tg_embedding(*g1, same, abc), tg_embedding(*g2, same, abc));
      worst = std::max(worst, std::abs(k - g1->omega() * g2->omega()));
      ++pairs;
    }
  }

  // Strong dissimilarity over random traces, both directions.
  std::mt19937_64 rng(99);
  const Alphabet letters(std::vector<Activity>{"a", "b", "c", "d", "e", "f", "g", "h"});
  EmbeddingConfig cfg;
  cfg.t_f = 0.5;
  std::size_t wrong = 0, disjoint = 0;
  for (int i = 0; i < 1000; ++i) {
    auto random_trace = [&] {
      Trace t(1 + rng() % 4);
      for (auto& x : t) x = letters.name(rng() % letters.size());
      return t;
    };
    const Trace x = random_trace(), y = random_trace();
    const double k = kernel(embed_log_trace(x, cfg, letters), embed_log_trace(y, cfg, letters));
    const std::set<Activity> sx(x.begin(), x.end());
    const bool shared = std::any_of(y.begin(), y.end(), [&](const Activity& a) { return sx.count(a) > 0; });
    disjoint += !shared;
    wrong += (k == 0.0) == shared;
  }
  return {worst <= 1e-12 && wrong == 0,
          std::to_string(pairs) + " equal-language pairs, max error " + fmt(worst) + "; 1000 random pairs (" +
              std::to_string(disjoint) + " disjoint), " + std::to_string(wrong) + " violations"};
}

Outcome closure_preservation() {
  const auto raw = tg_from_reachability(reachability_graph(ptalign::testing::loop_net()));
  const auto closed = tau_closure(raw);
  SessionConfig cfg;
  SyntheticNetShape shape;
  shape.skip_probability = 0.5;
  shape.redo_probability = 0.3;
  const auto net = synthetic_workflow_net(shape, 11);
  const auto raw2 = tg_from_reachability(reachability_graph(net));
  const auto closed2 = tau_closure(raw2);
  double worst = 0.0;
  std::size_t traces = 0;
  for (const auto& [before, after] : {std::pair{&raw, &closed}, std::pair{&raw2, &closed2}}) {
    for (const auto& t : unfold(*before, {1e-4, std::nullopt})) {
      worst = std::max(worst, std::abs(trace_probability(*before, t.labels) - trace_probability(*after, t.labels)));
      ++traces;
    }
  }
  return {worst < 1e-9, std::to_string(traces) + " traces, max difference " + fmt(worst)};
}

Outcome benchmark_shape() {
  const auto t0 = Clock::now();
  SyntheticNetShape shape;
  shape.stages = 5;
  shape.width = 4;
  shape.activities = 10;
  shape.skip_probability = 0.2;
  shape.redo_probability = 0.4;
  SessionConfig cfg;
  const auto tg = model_from_net(synthetic_workflow_net(shape, 1), cfg);
  const auto traces = unfold(tg, cfg.unfold_options());
  const auto queries = sample_queries(tg, 50, 2, 1);
  BenchOptions options;
  const auto report = run_benchmark(tg, traces, queries, options);
  bool faster = true;
  std::ostringstream detail;
  detail << traces.size() << " traces, 50 queries;";
  for (IndexKind kind : options.indexes) {
    const auto opt = report.overall("optimal", kind);
    const auto app = report.overall("e1n1", kind);
    faster = faster && app.mean_total_us < opt.mean_total_us;
    detail << " " << to_string(kind) << " optimal " << fmt(opt.mean_total_us) << " us vs approx "
           << fmt(app.mean_total_us) << " us;";
  }
  const double rho = report.overall("e1n1", IndexKind::kKd).mean_spearman;
  const double sec = seconds_since(t0);
  detail << " mean spearman " << fmt(rho) << "; " << fmt(sec) << " s";
  return {traces.size() >= 1000 && faster && rho >= 0.5 && sec < 120.0, detail.str()};
}

}  // namespace

int main() {
  report(1, "golden ranking table", golden_table);
  report(2, "string embedding table", string_table);
  report(3, "approximate top-3 order", approx_order);
  report(4, "t-transform isometry", isometry);
  report(5, "index exactness", index_exactness);
  report(6, "probability mass", mass_bound);
  report(7, "weak equality / strong dissimilarity", weak_equality);
  report(8, "tau-closure preservation", closure_preservation);
  report(9, "benchmark shape", benchmark_shape);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
