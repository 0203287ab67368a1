#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "ptalign/errors.hpp"
#include "ptalign/net.hpp"

using namespace ptalign;
using ptalign::testing::loop_net;
using ptalign::testing::order_net;

namespace {

// i -t-> p; p -a-> f and p -b-> f, weights wa and wb.
StochasticWorkflowNet conflict_net(double wa, double wb, double wc = 0.0) {
  StochasticWorkflowNet::Builder b;
  b.place("i").place("p").place("f");
  b.transition("t", Label::task("start")).arc("i", "t").arc("t", "p");
  b.transition("a", Label::task("a"), wa).arc("p", "a").arc("a", "f");
  b.transition("b", Label::task("b"), wb).arc("p", "b").arc("b", "f");
  if (wc > 0) b.transition("c", Label::task("c"), wc).arc("p", "c").arc("c", "f");
  return b.build();
}

// i -t-> p1 + p2 (parallel split) -j-> f.
StochasticWorkflowNet split_net() {
  StochasticWorkflowNet::Builder b;
  b.place("i").place("p1").place("p2").place("f");
  b.transition("t", Label::task("split")).arc("i", "t").arc("t", "p1").arc("t", "p2");
  b.transition("j", Label::task("join")).arc("p1", "j").arc("p2", "j").arc("j", "f");
  return b.build();
}

// i -t-> p; p -g-> p + q keeps producing tokens on q; p -e-> f.
StochasticWorkflowNet producer_net() {
  StochasticWorkflowNet::Builder b;
  b.place("i").place("p").place("q").place("f");
  b.transition("t", Label::task("t")).arc("i", "t").arc("t", "p");
  b.transition("g", Label::task("g")).arc("p", "g").arc("g", "p").arc("g", "q");
  b.transition("e", Label::task("e")).arc("p", "e").arc("q", "e").arc("e", "f");
  return b.build();
}

StochasticWorkflowNet tau_chain_net(std::size_t taus) {
  StochasticWorkflowNet::Builder b;
  b.place("q0");
  for (std::size_t i = 0; i < taus; ++i) {
    const std::string from = "q" + std::to_string(i), to = "q" + std::to_string(i + 1);
    b.place(to).transition("t" + std::to_string(i), Label::tau()).arc(from, "t" + std::to_string(i)).arc("t" + std::to_string(i), to);
  }
  const std::string last = "q" + std::to_string(taus);
  b.place("f").transition("x", Label::task("x")).arc(last, "x").arc("x", "f");
  return b.build();
}

double outgoing_sum(const ReachabilityGraph& rg, std::size_t m) {
  double sum = 0.0;
  for (std::size_t e : rg.outgoing(m)) sum += rg.probability(e);
  return sum;
}

}  // namespace

TEST_CASE("labels") {
  CHECK(Label::tau().is_tau());
  CHECK_FALSE(Label::task("a").is_tau());
  CHECK(Label::task("a") != Label::tau());
  CHECK(Label::task("a").to_string() == "a");
  CHECK_THROWS_AS(Label::task(""), StructuralError);
}

TEST_CASE("builder rejects malformed nets") {
  SUBCASE("non-positive weight") {
    StochasticWorkflowNet::Builder b;
    b.place("i").place("f").transition("t", Label::task("a"), 0.0).arc("i", "t").arc("t", "f");
    CHECK_THROWS_AS(b.build(), StructuralError);
  }
  SUBCASE("place to place arc") {
    StochasticWorkflowNet::Builder b;
    b.place("i").place("f").transition("t", Label::task("a")).arc("i", "f").arc("i", "t").arc("t", "f");
    CHECK_THROWS_AS(b.build(), StructuralError);
  }
  SUBCASE("missing sink") {
    StochasticWorkflowNet::Builder b;
    b.place("i").place("p").transition("t", Label::task("a")).arc("i", "t").arc("t", "p");
    b.transition("u", Label::task("b")).arc("p", "u").arc("u", "p");
    CHECK_THROWS_AS(b.build(), StructuralError);
  }
  SUBCASE("duplicate id") {
    StochasticWorkflowNet::Builder b;
    b.place("i").place("i").place("f").transition("t", Label::task("a")).arc("i", "t").arc("t", "f");
    CHECK_THROWS_AS(b.build(), StructuralError);
  }
  SUBCASE("dangling arc") {
    StochasticWorkflowNet::Builder b;
    b.place("i").place("f").transition("t", Label::task("a")).arc("i", "t").arc("t", "nowhere");
    CHECK_THROWS_AS(b.build(), StructuralError);
  }
}

TEST_CASE("enabled transitions") {
  const auto net = loop_net();
  auto ids = [&](const std::vector<TransitionIndex>& ts) {
    std::vector<std::string> out;
    for (auto t : ts) out.push_back(net.transitions()[t].id);
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(ids(enabled(net, net.initial_marking())) == std::vector<std::string>{"t1"});
  CHECK(enabled(net, Marking{}).empty());
  CHECK(ids(enabled(net, net.marking({"p4"}))) == std::vector<std::string>{"t4", "t5"});
  CHECK_THROWS_AS(net.marking({"nope"}), StructuralError);
  CHECK_THROWS_AS(enabled(net, Marking({99})), StructuralError);
}

TEST_CASE("firing") {
  const auto net = loop_net();
  const Marking m = fire(net, net.initial_marking(), net.transition_index("t1"));
  CHECK(m == net.marking({"p2"}));
  CHECK_THROWS_AS(fire(net, net.initial_marking(), net.transition_index("t2")), PreconditionError);

  const auto split = split_net();
  const Marking s = fire(split, split.initial_marking(), split.transition_index("t"));
  CHECK(s.tokens().size() == 2);

  // A second token on a place is returned as is; safety is a global check.
  const auto prod = producer_net();
  Marking p = fire(prod, prod.initial_marking(), prod.transition_index("t"));
  p = fire(prod, p, prod.transition_index("g"));
  p = fire(prod, p, prod.transition_index("g"));
  CHECK(p.token_count(prod.place_index("q")) == 2);
  CHECK(p.max_tokens() == 2);
}

TEST_CASE("transition probabilities") {
  const auto order = order_net();
  const Marking choice = order.marking({"closed"});
  CHECK(transition_probability(order, choice, order.transition_index("accept")) == doctest::Approx(0.9));
  CHECK(transition_probability(order, choice, order.transition_index("refuse")) == doctest::Approx(0.1));
  CHECK(transition_probability(order, order.initial_marking(), order.transition_index("close")) == 1.0);

  const auto net = conflict_net(2, 6);
  const Marking p = net.marking({"p"});
  CHECK(transition_probability(net, p, net.transition_index("a")) == 0.25);
  CHECK(transition_probability(net, p, net.transition_index("b")) == 0.75);
  CHECK_THROWS_AS(transition_probability(net, net.initial_marking(), net.transition_index("a")),
                  PreconditionError);
}

TEST_CASE("reachability graph of the loop net") {
  const auto net = loop_net();
  const auto rg = reachability_graph(net);
  CHECK(rg.markings().size() == 6);
  CHECK(rg.edges().size() == 8);
  CHECK(rg.markings()[rg.root()] == net.initial_marking());
  REQUIRE(rg.final_marking() < rg.markings().size());
  CHECK(rg.markings()[rg.final_marking()] == net.final_marking());
  for (std::size_t i = 0; i < rg.edges().size(); ++i) {
    const auto& e = rg.edges()[i];
    CHECK(rg.probability(i) ==
          transition_probability(net, rg.markings()[e.source], e.transition));
  }
  for (std::size_t m = 0; m < rg.markings().size(); ++m) {
    if (!rg.outgoing(m).empty()) CHECK(std::abs(outgoing_sum(rg, m) - 1.0) < 1e-9);
  }
  CHECK(check_safe(rg));
  CHECK(check_bounded_silence(rg, 1));
}

TEST_CASE("reachability of a single chain") {
  StochasticWorkflowNet::Builder b;
  b.place("i").place("f").transition("t", Label::task("a")).arc("i", "t").arc("t", "f");
  const auto rg = reachability_graph(b.build());
  CHECK(rg.markings().size() == 2);
  CHECK(rg.edges().size() == 1);
  CHECK(rg.probability(0) == 1.0);
}

TEST_CASE("reachability is deterministic") {
  const auto a = reachability_graph(loop_net());
  const auto b = reachability_graph(loop_net());
  REQUIRE(a.markings() == b.markings());
  REQUIRE(a.edges().size() == b.edges().size());
  for (std::size_t i = 0; i < a.edges().size(); ++i) {
    CHECK(a.edges()[i].source == b.edges()[i].source);
    CHECK(a.edges()[i].target == b.edges()[i].target);
    CHECK(a.probability(i) == b.probability(i));
  }
}

TEST_CASE("unsafe and unbounded nets") {
  const auto prod = producer_net();
  CHECK_THROWS_AS(reachability_graph(prod), ModelAssumptionError);
  ReachabilityOptions opts;
  opts.allow_unsafe = true;
  opts.node_budget = 50;
  CHECK_THROWS_AS(reachability_graph(prod, opts), ModelAssumptionError);

  // Two tokens meet on one place but the net stays bounded.
  StochasticWorkflowNet::Builder b;
  b.place("i").place("p").place("f");
  b.transition("t", Label::task("t")).arc("i", "t").arc("t", "p").arc("t", "p");
  b.transition("j", Label::task("j")).arc("p", "j").arc("p", "j").arc("j", "f");
  const auto twice = b.build();
  CHECK_THROWS_AS(reachability_graph(twice), ModelAssumptionError);
  opts.node_budget = 1000;
  const auto rg = reachability_graph(twice, opts);
  CHECK_FALSE(check_safe(rg));
}

TEST_CASE("safety of trivial graphs") {
  const ReachabilityGraph single({Marking({0})}, {}, {}, {}, 0);
  CHECK(check_safe(single));
  CHECK(check_safe(reachability_graph(order_net())));
}

TEST_CASE("bounded silence") {
  const auto rg3 = reachability_graph(tau_chain_net(3));
  CHECK_FALSE(check_bounded_silence(rg3, 2));
  CHECK(check_bounded_silence(rg3, 3));

  StochasticWorkflowNet::Builder b;
  b.place("i").place("p").place("q").place("f");
  b.transition("s", Label::task("s")).arc("i", "s").arc("s", "p");
  b.transition("u", Label::tau()).arc("p", "u").arc("u", "q");
  b.transition("v", Label::tau()).arc("q", "v").arc("v", "p");
  b.transition("e", Label::task("e")).arc("q", "e").arc("e", "f");
  const auto cyc = reachability_graph(b.build());
  for (std::size_t bound : {1u, 3u, 100u}) CHECK_FALSE(check_bounded_silence(cyc, bound));
}

TEST_CASE("constant estimator") {
  const auto two = estimate_weights_constant(conflict_net(0.3, 5.0));
  const auto rg2 = reachability_graph(two);
  for (std::size_t i = 1; i < rg2.edges().size(); ++i) CHECK(rg2.probability(i) == 0.5);

  const auto three = estimate_weights_constant(conflict_net(0.3, 5.0, 2.0));
  const Marking p = three.marking({"p"});
  for (const char* t : {"a", "b", "c"}) {
    CHECK(transition_probability(three, p, three.transition_index(t)) == doctest::Approx(1.0 / 3.0));
  }

  const auto chain = ConstantEstimator().estimate(tau_chain_net(2));
  const auto rgc = reachability_graph(chain);
  for (std::size_t i = 0; i < rgc.edges().size(); ++i) CHECK(rgc.probability(i) == 1.0);
}

TEST_CASE("scaling a conflict set leaves probabilities unchanged") {
  const auto net = loop_net();
  const auto base = reachability_graph(net);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int round = 0; round < 20; ++round) {
    // Every transition of this net has one input place, so a conflict set
    // is the set of transitions sharing that place.
    std::vector<double> factor(net.places().size());
    for (double& f : factor) f = scale(rng);
    std::vector<double> w;
    for (const auto& t : net.transitions()) w.push_back(t.weight * factor[t.inputs.front()]);
    const auto rg = reachability_graph(net.with_weights(w));
    for (std::size_t i = 0; i < rg.edges().size(); ++i) {
      CHECK(std::abs(rg.probability(i) - base.probability(i)) < 1e-12);
    }
    const auto re = base.reweighted(w);
    for (std::size_t i = 0; i < re.edges().size(); ++i) {
      CHECK(std::abs(re.probability(i) - base.probability(i)) < 1e-12);
    }
  }
}
