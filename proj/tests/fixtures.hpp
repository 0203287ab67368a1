#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptalign/net.hpp"
#include "ptalign/transition_graph.hpp"
#include "ptalign/unfolder.hpp"

namespace ptalign::testing {

inline std::string data_path(const std::string& name) { return std::string(PTALIGN_DATA_DIR) + "/" + name; }

// p1 -tau-> p2; p2 -a(0.8)-> p5 | -c(0.2)-> p4; p4 -tau(0.7)-> p3 | -b(0.3)-> p7;
// p3 -a-> p5; p5 -a(0.5)-> p5 | -tau(0.5)-> p7.
inline StochasticWorkflowNet loop_net() {
  StochasticWorkflowNet::Builder b;
  for (const char* p : {"p1", "p2", "p3", "p4", "p5", "p7"}) b.place(p);
  auto t = [&](const std::string& id, Label label, double w, const std::string& from,
               const std::string& to) { b.transition(id, label, w).arc(from, id).arc(id, to); };
  t("t1", Label::tau(), 1.0, "p1", "p2");
  t("t2", Label::task("a"), 0.8, "p2", "p5");
  t("t3", Label::task("c"), 0.2, "p2", "p4");
  t("t4", Label::tau(), 0.7, "p4", "p3");
  t("t5", Label::task("b"), 0.3, "p4", "p7");
  t("t6", Label::task("a"), 1.0, "p3", "p5");
  t("t7", Label::task("a"), 0.5, "p5", "p5");
  t("t8", Label::tau(), 0.5, "p5", "p7");
  return b.build();
}

// close_order; accept_order (0.9) | refuse_order (0.1); archive_order.
inline StochasticWorkflowNet order_net() {
  StochasticWorkflowNet::Builder b;
  for (const char* p : {"start", "closed", "decided", "end"}) b.place(p);
  b.transition("close", Label::task("close_order")).arc("start", "close").arc("close", "closed");
  b.transition("accept", Label::task("accept_order"), 0.9).arc("closed", "accept").arc("accept", "decided");
  b.transition("refuse", Label::task("refuse_order"), 0.1).arc("closed", "refuse").arc("refuse", "decided");
  b.transition("archive", Label::task("archive_order")).arc("decided", "archive").arc("archive", "end");
  return b.build();
}

inline std::vector<ModelTrace> fixture_traces() {
  return {{{"a"}, 0.4},           {{"a", "a"}, 0.2},           {{"a", "a", "a"}, 0.1},
          {{"c", "a"}, 0.07},     {{"c", "b"}, 0.06},          {{"a", "a", "a", "a"}, 0.05},
          {{"c", "a", "a"}, 0.035}, {{"c", "a", "a", "a"}, 0.0175}};
}

// Independent path enumeration: every start->end path with at most
// max_labels visible nodes, probabilities summed per label sequence.
inline std::map<Trace, double> enumerate_paths(const TransitionGraph& tg, std::size_t max_labels) {
  std::map<Trace, double> out;
  struct Frame {
    std::size_t node;
    Trace labels;
    double p;
    std::size_t depth;
  };
  std::vector<Frame> stack{{tg.start(), {}, 1.0, 0}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (!tg.label(f.node).is_tau()) f.labels.push_back(tg.label(f.node).activity());
    if (f.labels.size() > max_labels || f.depth > 4 * (max_labels + 2)) continue;
    if (f.node == tg.end()) {
      if (!f.labels.empty()) out[f.labels] += f.p;
      continue;
    }
    for (const Arc& a : tg.successors(f.node)) stack.push_back({a.to, f.labels, f.p * a.probability, f.depth + 1});
  }
  return out;
}

}  // namespace ptalign::testing
