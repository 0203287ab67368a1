// ptalign: probabilistic trace alignment against stochastic workflow nets.
//
//   ptalign unfold --model net.pnml --rho 1e-5 [--nmax N] [--out traces.csv]
//   ptalign align  --model g.tg --strategy optimal --trace "c a b a" [--json]
//   ptalign embed  --model g.tg [--log queries.txt] [--eps 1 --nu 1]
//   ptalign bench  --model g.tg --log queries.txt [--out report.csv]
//
// Exit codes: 0 ok, 1 usage/configuration, 2 parse, 3 model assumption.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptalign/bench.hpp"
#include "ptalign/errors.hpp"
#include "ptalign/io.hpp"
#include "ptalign/ranking.hpp"
#include "ptalign/session.hpp"

using namespace ptalign;

namespace {

constexpr int kUsage = 1;
constexpr int kParse = 2;
constexpr int kModel = 3;

struct Common {
  std::string model;
  std::string format;
  std::string estimator = "asgiven";
  std::string out;
  std::optional<std::size_t> n_max;
  double rho = 1e-5;
  std::size_t silence_bound = 3;
  std::size_t node_budget = 1'000'000;
  bool allow_unsafe = false;
};

struct Query {
  std::string trace;
  std::string log;
};

struct Embed {
  double lambda = 0.07;
  double t_f = 1e-4;
  int eps = 1;
  int nu = 1;
  std::optional<std::size_t> horizon;
};

void add_common(CLI::App* app, Common& c, bool model_required = true) {
  auto* m = app->add_option("--model", c.model, "Model file (.pnml or .tg)");
  if (model_required) m->required();
  app->add_option("--format", c.format, "pnml or tg (default: from extension)");
  app->add_option("--rho", c.rho, "Probability threshold")->check(CLI::Range(0.0, 1.0));
  app->add_option("--nmax", c.n_max, "Maximum model trace length");
  app->add_option("-b,--silence-bound", c.silence_bound, "Maximum consecutive silent steps");
  app->add_option("--estimator", c.estimator, "asgiven or constant");
  app->add_option("--node-budget", c.node_budget, "Reachability graph size limit");
  app->add_flag("--allow-unsafe", c.allow_unsafe, "Accept markings with more than one token");
  app->add_option("--out", c.out, "Output path (default: stdout)");
}

void add_embed(CLI::App* app, Embed& e) {
  app->add_option("--lambda", e.lambda, "Decay factor")->check(CLI::Range(0.0, 1.0));
  app->add_option("--tf", e.t_f, "Graph size penalty")->check(CLI::Range(0.0, 1.0));
  app->add_option("--eps", e.eps, "Edge sub-embedding (1 or 2)")->check(CLI::IsMember({1, 2}));
  app->add_option("--nu", e.nu, "Label sub-embedding (1 or 2)")->check(CLI::IsMember({1, 2}));
  app->add_option("--horizon", e.horizon, "Path length horizon");
}

SessionConfig make_config(const Common& c) {
  SessionConfig cfg;
  cfg.model_path = c.model;
  if (!c.format.empty()) {
    cfg.format = parse_model_format(c.format);
  } else {
    const auto dot = c.model.rfind('.');
    cfg.format = dot != std::string::npos && c.model.substr(dot) == ".pnml" ? ModelFormat::kPnml
                                                                           : ModelFormat::kTg;
  }
  cfg.rho = c.rho;
  cfg.n_max = c.n_max;
  cfg.silence_bound = c.silence_bound;
  cfg.estimator = parse_estimator(c.estimator);
  cfg.allow_unsafe = c.allow_unsafe;
  cfg.node_budget = c.node_budget;
  return cfg;
}

EmbeddingConfig make_embedding(const Embed& e) {
  EmbeddingConfig cfg;
  cfg.lambda = e.lambda;
  cfg.t_f = e.t_f;
  cfg.eps = e.eps == 2 ? EpsStrategy::kEps2 : EpsStrategy::kEps1;
  cfg.nu = e.nu == 2 ? NuStrategy::kNu2 : NuStrategy::kNu1;
  cfg.horizon = e.horizon;
  return cfg;
}

std::vector<Trace> read_queries(const Query& q) {
  if (!q.trace.empty() && !q.log.empty()) throw PreconditionError("give --trace or --log, not both");
  if (!q.trace.empty()) return {split_trace(q.trace)};
  if (!q.log.empty()) return parse_log(read_file(q.log));
  return {};
}

// Output is assembled in memory and written only on success, so a failed
// command never leaves a partial file behind.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !(out.flush())) {
    out.close();
    std::remove(path.c_str());
    throw Error("cannot write '" + path + "'");
  }
}

int cmd_unfold(const Common& c) {
  const SessionConfig cfg = make_config(c);
  const TransitionGraph tg = load_model(cfg);
  std::ostringstream out;
  write_traces_csv(out, unfold(tg, cfg.unfold_options()));
  emit(c.out, out.str());
  return 0;
}

int cmd_align(const Common& c, const Query& q, const Embed& e, const std::string& strategy,
              std::size_t k, unsigned cost, const std::string& index, bool by_kernel, bool json) {
  SessionConfig cfg = make_config(c);
  cfg.k = k;
  cfg.c = cost;
  cfg.index = parse_index_kind(index);
  cfg.embedding = make_embedding(e);
  const std::vector<Trace> queries = read_queries(q);
  if (queries.empty()) throw PreconditionError("no query trace; use --trace or --log");
  if (strategy != "optimal" && strategy != "approx") {
    throw PreconditionError("unknown strategy '" + strategy + "'");
  }

  const TransitionGraph tg = load_model(cfg);
  const std::vector<ModelTrace> traces = unfold(tg, cfg.unfold_options());
  if (traces.empty()) throw PreconditionError("model has no trace above the threshold");
  std::optional<EmbeddingTable> table;
  if (strategy == "approx") {
    table.emplace(tg, traces, cfg.embedding, session_alphabet(tg, queries), cfg.index,
                  cfg.silence_bound);
  }

  std::ostringstream out;
  if (json) out << "[";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Ranking r = table ? approx_topk(*table, queries[i], cfg.k, cfg.c,
                                          by_kernel ? ApproxMode::kKernel : ApproxMode::kDistance)
                            : optimal_topk(traces, queries[i], cfg.k, cfg.c, cfg.index);
    if (r.truncated) {
      std::cerr << "warning: only " << r.entries.size() << " model traces available\n";
    }
    if (json) {
      out << (i ? "," : "") << ranking_json(queries[i], r);
    } else if (queries.size() == 1) {
      write_ranking_csv(out, r);
    } else {
      std::ostringstream block;
      write_ranking_csv(block, r);
      std::istringstream lines(block.str());
      std::string line;
      std::getline(lines, line);
      if (i == 0) out << "query," << line << "\n";
      while (std::getline(lines, line)) out << csv_field(join_trace(queries[i])) << "," << line << "\n";
    }
  }
  if (json) out << "]\n";
  emit(c.out, out.str());
  return 0;
}

int cmd_embed(const Common& c, const Query& q, const Embed& e, const std::string& index) {
  SessionConfig cfg = make_config(c);
  cfg.embedding = make_embedding(e);
  cfg.index = parse_index_kind(index);
  const TransitionGraph tg = load_model(cfg);
  const std::vector<ModelTrace> traces = unfold(tg, cfg.unfold_options());
  if (traces.empty()) throw PreconditionError("model has no trace above the threshold");
  const EmbeddingTable table(tg, traces, cfg.embedding, session_alphabet(tg, read_queries(q)),
                             cfg.index, cfg.silence_bound);
  std::ostringstream out;
  write_embedding_csv(out, table);
  emit(c.out, out.str());
  return 0;
}

int cmd_bench(const Common& c, const Query& q, const Embed& e, std::size_t k, unsigned cost,
              const std::vector<std::string>& indexes, std::optional<std::uint64_t> synthetic,
              std::size_t sample, std::uint64_t seed) {
  SessionConfig cfg = make_config(c);
  TransitionGraph tg = [&] {
    if (synthetic) {
      SyntheticNetShape shape;
      shape.stages = 5;
      shape.width = 4;
      shape.skip_probability = 0.2;
      shape.redo_probability = 0.4;
      return model_from_net(synthetic_workflow_net(shape, *synthetic), cfg);
    }
    if (cfg.model_path.empty()) throw PreconditionError("give --model or --synthetic");
    return load_model(cfg);
  }();
  std::vector<Trace> queries = read_queries(q);
  if (queries.empty()) queries = sample_queries(tg, sample, 2, seed);

  BenchOptions options;
  options.k = k;
  options.c = cost;
  options.embedding = make_embedding(e);
  options.silence_bound = cfg.silence_bound;
  options.indexes.clear();
  for (const auto& name : indexes) options.indexes.push_back(parse_index_kind(name));
  if (options.indexes.empty()) throw PreconditionError("no index kind selected");

  const BenchmarkReport report = run_benchmark(tg, unfold(tg, cfg.unfold_options()), queries, options);
  std::ostringstream out;
  write_benchmark_csv(out, report);
  emit(c.out, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic trace alignment against stochastic workflow nets"};
  app.require_subcommand(1);

  Common unfold_c;
  auto* unfold_cmd = app.add_subcommand("unfold", "List model traces with their probabilities");
  add_common(unfold_cmd, unfold_c);

  Common align_c;
  Query align_q;
  Embed align_e;
  std::string strategy = "optimal", align_index = "kd";
  std::size_t align_k = 20;
  unsigned align_cost = 5;
  bool by_kernel = false, json = false;
  auto* align_cmd = app.add_subcommand("align", "Rank model traces against a log trace");
  add_common(align_cmd, align_c);
  add_embed(align_cmd, align_e);
  align_cmd->add_option("--strategy", strategy, "optimal or approx");
  align_cmd->add_option("--trace", align_q.trace, "Space separated activities");
  align_cmd->add_option("--log", align_q.log, "One trace per line");
  align_cmd->add_option("--k", align_k, "Ranking size")->check(CLI::PositiveNumber);
  align_cmd->add_option("--c", align_cost, "Edit cost scale")->check(CLI::PositiveNumber);
  align_cmd->add_option("--index", align_index, "kd, vp or linear");
  align_cmd->add_flag("--by-kernel", by_kernel, "Approximate ranking by kernel value");
  align_cmd->add_flag("--json", json, "JSON output");

  Common embed_c;
  Query embed_q;
  Embed embed_e;
  std::string embed_index = "kd";
  auto* embed_cmd = app.add_subcommand("embed", "Write the model trace embedding table");
  add_common(embed_cmd, embed_c);
  add_embed(embed_cmd, embed_e);
  embed_cmd->add_option("--log", embed_q.log, "Extra activities to include in the alphabet");
  embed_cmd->add_option("--index", embed_index, "kd, vp or linear");

  Common bench_c;
  Query bench_q;
  Embed bench_e;
  std::size_t bench_k = 20, sample = 50;
  unsigned bench_cost = 5;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> synthetic;
  std::vector<std::string> indexes{"kd", "vp"};
  auto* bench_cmd = app.add_subcommand("bench", "Compare optimal and approximate rankings");
  add_common(bench_cmd, bench_c, false);
  add_embed(bench_cmd, bench_e);
  bench_cmd->add_option("--log", bench_q.log, "Query traces, one per line");
  bench_cmd->add_option("--k", bench_k, "Ranking size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--c", bench_cost, "Edit cost scale")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--indexes", indexes, "Index kinds")->delimiter(',');
  bench_cmd->add_option("--synthetic", synthetic, "Use a generated model with this seed");
  bench_cmd->add_option("--queries", sample, "Sampled queries when no --log is given");
  bench_cmd->add_option("--seed", seed, "Query sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*unfold_cmd) return cmd_unfold(unfold_c);
    if (*align_cmd) {
      return cmd_align(align_c, align_q, align_e, strategy, align_k, align_cost, align_index,
                       by_kernel, json);
    }
    if (*embed_cmd) return cmd_embed(embed_c, embed_q, embed_e, embed_index);
    if (*bench_cmd) {
      return cmd_bench(bench_c, bench_q, bench_e, bench_k, bench_cost, indexes, synthetic, sample,
                       seed);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const ModelAssumptionError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModel;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
