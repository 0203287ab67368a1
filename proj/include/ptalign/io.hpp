#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ptalign/embedding.hpp"
#include "ptalign/net.hpp"
#include "ptalign/ranking.hpp"
#include "ptalign/transition_graph.hpp"
#include "ptalign/unfolder.hpp"

namespace ptalign {

// PNML subset: place/transition/arc elements, possibly nested in <page>.
// Transition labels come from <name><text>; a missing name or a ProM
// "$invisible$" activity marks tau. Weights come from
// <toolspecific><property key="weight">, defaulting to 1.0.
StochasticWorkflowNet parse_pnml(std::string_view xml);

// Line-oriented transition graph format:
//   start <node>
//   end <node>
//   <node> <label>        (label "tau" marks a silent node)
//   <src> <dst> <prob>
// '#' starts a comment. Rows must sum to 1 within 1e-6.
TransitionGraph parse_tg(std::string_view text);
std::string serialize_tg(const TransitionGraph& tg);

// One trace per line, whitespace-separated activities; blank lines skipped.
std::vector<Trace> parse_log(std::string_view text);

std::string read_file(const std::string& path);

// 17 significant digits.
std::string format_number(double x);
std::string csv_field(std::string_view text);

void write_traces_csv(std::ostream& out, const std::vector<ModelTrace>& traces);
void write_ranking_csv(std::ostream& out, const Ranking& ranking);
std::string ranking_json(const Trace& query, const Ranking& ranking);
void write_embedding_csv(std::ostream& out, const EmbeddingTable& table);

}  // namespace ptalign
