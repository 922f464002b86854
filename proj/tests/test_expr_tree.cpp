#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shapeguard/error.hpp"
#include "shapeguard/expr_tree.hpp"

using namespace shapeguard;

namespace {

const Schema kXY = make_schema({"x", "y"});

ExprTree var(const std::string& n) { return ExprTree::variable(kXY, n); }
ExprTree num(double v) { return ExprTree::constant(kXY, v); }
ExprTree bin(Op op, const ExprTree& a, const ExprTree& b) { return ExprTree::binary(op, a, b); }

double at(const ExprTree& t, double x, double y) { return t.eval(std::vector<double>{x, y}); }

ShapeConstraint d1x_nonneg(Interval region) { return {{"x"}, Interval::at_least(0.0), Box{{"x", region}}}; }

}  // namespace

TEST(Eval, BasicExamples) {
  EXPECT_EQ(at(num(2.5), 7, 8), 2.5);
  EXPECT_EQ(at(bin(Op::mul, var("x"), var("x")), 3, 0), 9.0);
  EXPECT_TRUE(std::isnan(at(bin(Op::div, var("x"), bin(Op::sub, var("y"), var("y"))), 1, 2)));
  EXPECT_EQ(at(ExprTree::unary(Op::neg, bin(Op::sub, var("x"), var("y"))), 5, 2), -3.0);
  EXPECT_EQ(at(bin(Op::div, var("x"), var("y")), 1, 4), 0.25);
}

TEST(Eval, RowsAgreeWithPointwise) {
  std::mt19937_64 rng(1);
  std::vector<double> xs(64), ys(64);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto& v : xs) v = u(rng);
  for (auto& v : ys) v = u(rng);
  for (int trial = 0; trial < 200; ++trial) {
    const ExprTree t = random_tree(rng, kXY, 5, trial % 2 == 0);
    std::vector<double> out(xs.size());
    t.eval_rows({xs, ys}, out);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double p = at(t, xs[i], ys[i]);
      if (std::isnan(p)) EXPECT_TRUE(std::isnan(out[i]));
      else EXPECT_EQ(out[i], p);
    }
  }
}

TEST(Structure, SubtreeReplaceAndDepth) {
  const ExprTree t = bin(Op::add, bin(Op::mul, var("x"), num(2)), var("y"));
  EXPECT_EQ(t.size(), 5u);
  EXPECT_EQ(t.depth(), 3);
  EXPECT_EQ(t.subtree_end(1), 4u);
  EXPECT_EQ(t.subtree(1), bin(Op::mul, var("x"), num(2)));
  EXPECT_EQ(t.replace(1, num(1)), bin(Op::add, num(1), var("y")));
  EXPECT_THROW(ExprTree(kXY, {{Op::add, 0, -1}, {Op::constant, 1, -1}}), ConfigError);
  EXPECT_THROW(ExprTree::variable(kXY, "z"), SchemaError);
}

TEST(Format, InfixAndJsonRoundTrip) {
  const ExprTree t = bin(Op::sub, bin(Op::mul, var("x"), num(0.5)), ExprTree::unary(Op::neg, var("y")));
  EXPECT_EQ(t.to_infix(), "((x * 0.5) - (-y))");
  EXPECT_EQ(ExprTree::from_json(t.to_json(), kXY), t);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const ExprTree r = random_tree(rng, kXY, 5, false);
    EXPECT_EQ(ExprTree::from_json(r.to_json(), kXY), r);
  }
  EXPECT_THROW(ExprTree::from_json(R"({"op":"pow","args":[]})", kXY), SchemaError);
}

TEST(Derivative, Examples) {
  const ExprTree sq = bin(Op::mul, var("x"), var("x"));
  const Interval d = tree_derivative_interval(sq, "x", Box{{"x", Interval(0.0, 1.0)}, {"y", Interval(0.0, 1.0)}});
  EXPECT_EQ(d, Interval(0.0, 2.0));
  EXPECT_EQ(tree_derivative_interval(num(3), "x", Box{{"x", Interval(-5.0, 5.0)}}), Interval(0.0));
  EXPECT_EQ(tree_derivative_interval(bin(Op::add, var("x"), var("y")), "x", Box{}), Interval(1.0));
  const ExprTree bad = bin(Op::div, num(1), var("x"));
  const Interval e = tree_derivative_interval(bad, "x", Box{{"x", Interval(-1.0, 1.0)}});
  EXPECT_TRUE(std::isinf(e.lo()) && std::isinf(e.hi()));
}

TEST(Derivative, WrapsFiniteDifferenceSamples) {
  // Symbolic oracle: for t = x*y/(y+2) - x*x, dt/dx = y/(y+2) - 2x, d2t/dx2 = -2.
  const ExprTree t = bin(Op::sub, bin(Op::div, bin(Op::mul, var("x"), var("y")), bin(Op::add, var("y"), num(2))),
                         bin(Op::mul, var("x"), var("x")));
  const std::vector<double> lo{-1.0, 0.0}, hi{0.5, 1.0};
  const IntervalJet j = interval_jet(t, lo, hi, 0, 0);
  EXPECT_TRUE(j.dab.contains(-2.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = lo[0] + u01(rng) * (hi[0] - lo[0]);
    const double y = lo[1] + u01(rng) * (hi[1] - lo[1]);
    EXPECT_TRUE(j.value.contains(at(t, x, y)));
    EXPECT_TRUE(j.da.contains(y / (y + 2) - 2 * x));
  }
}

TEST(Check, Examples) {
  EXPECT_TRUE(check_constraints(var("x"), {d1x_nonneg(Interval(0.0, 1.0))}).feasible);
  EXPECT_FALSE(check_constraints(ExprTree::unary(Op::neg, var("x")), {d1x_nonneg(Interval(0.0, 1.0))}).feasible);
  const auto sq = check_constraints(bin(Op::mul, var("x"), var("x")), {d1x_nonneg(Interval(-1.0, 1.0))});
  EXPECT_FALSE(sq.feasible);
  EXPECT_TRUE(sq.enclosures[0].lo() < 0.0 && sq.enclosures[0].hi() > 0.0);
}

TEST(Check, ScalingAppliesToValuesAndSlopes) {
  const ScaledTree flipped{var("x"), 1.0, -2.0};
  const auto r = check_constraints(flipped, {d1x_nonneg(Interval(0.0, 1.0)),
                                             {{}, Interval(-1.5, 1.0), Box{{"x", Interval(0.0, 1.0)}}}});
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.enclosures[0], Interval(-2.0));
  EXPECT_EQ(r.enclosures[1], Interval(-1.0, 1.0));
}

TEST(Check, DivisionByZeroEnclosureIsInfeasibleEvenWhenMultipliedByZero) {
  const ExprTree t = bin(Op::mul, num(0.0), bin(Op::div, num(1), var("x")));
  const auto r = check_constraints(t, {d1x_nonneg(Interval(-1.0, 1.0))});
  EXPECT_FALSE(r.feasible);
}

TEST(RandomTree, RespectsDepthAndSchema) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const ExprTree t = random_tree(rng, kXY, 4, i % 2 == 0);
    EXPECT_LE(t.depth(), 4);
    for (const auto& n : t.nodes()) {
      if (n.op == Op::constant) EXPECT_TRUE(n.value >= -2.0 && n.value <= 2.0);
      if (n.op == Op::variable) EXPECT_TRUE(n.var == 0 || n.var == 1);
    }
  }
}
