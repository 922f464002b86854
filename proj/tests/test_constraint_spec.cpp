#include <random>

#include <gtest/gtest.h>

#include "shapeguard/constraint_spec.hpp"
#include "shapeguard/error.hpp"

using namespace shapeguard;

namespace {

std::string source_path(const std::string& rel) { return std::string(SHAPEGUARD_SOURCE_DIR) + "/" + rel; }

const Box kUnitBox{{"v", Interval(0.0, 1.0)}, {"p", Interval(0.0, 1.0)}, {"T", Interval(0.0, 1.0)}};

}  // namespace

TEST(ConstraintFiles, ExpertFileHasSevenConstraintsOnTheFullBox) {
  const ConstraintSpec s = load_constraints(source_path("data/constraints/friction_expert.spec"));
  EXPECT_EQ(s.target, "mu");
  ASSERT_EQ(s.constraints.size(), 7u);
  std::vector<std::string> described;
  for (const auto& c : s.constraints) {
    described.push_back(c.describe());
    EXPECT_EQ(c.region, kUnitBox);
  }
  const std::vector<std::string> expected{"value >= 0.0", "value <= 1.0", "d1 v in [-0.01, 0.01]",
                                          "d1 p <= 0.0", "d2 p >= 0.0", "d1 T <= 0.0", "d2 T >= 0.0"};
  EXPECT_EQ(described, expected);
}

TEST(ConstraintFiles, MonotoneFileHasTwoConstraints) {
  const ConstraintSpec s = load_constraints(source_path("data/constraints/friction_monotone.spec"));
  ASSERT_EQ(s.constraints.size(), 2u);
  EXPECT_EQ(s.constraints[0].wrt, std::vector<std::string>{"p"});
  EXPECT_EQ(s.constraints[0].bound, Interval::at_most(0.0));
  EXPECT_EQ(s.constraints[1].wrt, std::vector<std::string>{"T"});
  EXPECT_EQ(s.constraints[1].region, kUnitBox);
}

TEST(Parse, BoxOnlyGivesNoConstraints) {
  const ConstraintSpec s = parse_constraints("target y\nbox x in [0, 1]\n");
  EXPECT_TRUE(s.constraints.empty());
  EXPECT_EQ(s.box.size(), 1u);
}

TEST(Parse, UnmentionedSideIsInfinite) {
  const ConstraintSpec s = parse_constraints("box x in [0, 1]\nd1 x >= 0.5\n");
  ASSERT_EQ(s.constraints.size(), 1u);
  EXPECT_EQ(s.constraints[0].bound.lo(), 0.5);
  EXPECT_TRUE(std::isinf(s.constraints[0].bound.hi()));
}

TEST(Parse, RegionOverride) {
  const ConstraintSpec s =
      parse_constraints("box x in [0, 1]\nbox y in [0, 1]\nd1 x >= 0 on x in [0.2, 0.4] on y in [0, 0.5]\n");
  ASSERT_EQ(s.constraints.size(), 1u);
  EXPECT_EQ(s.constraints[0].region.at("x"), Interval(0.2, 0.4));
  EXPECT_EQ(s.constraints[0].region.at("y"), Interval(0.0, 0.5));
}

TEST(Parse, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_constraints(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("box x in [0, 1]\n# c\nd1 z >= 0\n"), 3u);
  EXPECT_EQ(line_of("box x in [0, 1]\nd3 x >= 0\n"), 2u);
  EXPECT_EQ(line_of("box x in [1, 0]\n"), 1u);
  EXPECT_EQ(line_of("box x in [0, 1\n"), 1u);
  EXPECT_EQ(line_of("box x in [0, 1]\nvalue ~ 3\n"), 2u);
}

TEST(Parse, SerializeRoundTripOnRandomSpecs) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0), u01(0.0, 1.0);
  const std::vector<std::string> vars{"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    ConstraintSpec spec;
    spec.target = "y";
    for (const auto& v : vars) {
      double lo = u(rng), hi = u(rng);
      if (lo > hi) std::swap(lo, hi);
      spec.box.set(v, Interval(lo, hi));
    }
    const int n = static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) {
      ShapeConstraint c;
      const int order = static_cast<int>(rng() % 3);
      const std::string var = vars[rng() % 3];
      for (int o = 0; o < order; ++o) c.wrt.push_back(var);
      const int side = static_cast<int>(rng() % (order == 2 ? 2 : 3));
      double lo = u(rng), hi = u(rng);
      if (lo > hi) std::swap(lo, hi);
      c.bound = side == 0 ? Interval::at_least(lo) : side == 1 ? Interval::at_most(hi) : Interval(lo, hi);
      c.region = spec.box;
      if (u01(rng) < 0.5) {
        const auto& full = spec.box.at(var);
        const double a = full.lo() + u01(rng) * full.width();
        c.region.set(var, Interval(a, full.hi()));
      }
      spec.constraints.push_back(c);
    }
    EXPECT_EQ(parse_constraints(serialize_constraints(spec)), spec);
  }
}
