#include <gtest/gtest.h>

#include "grafcet/expression.hpp"

namespace grafcet {
namespace {

using Op = Expression::Op;

Expression var(const char* id) { return Expression::variable(id); }

TEST(Expression, DefaultIsFalseLiteral) {
  Expression e;
  EXPECT_EQ(e.op(), Op::bool_literal);
  EXPECT_EQ(e.literal(), 0);
  EXPECT_EQ(to_source(e), "false");
}

TEST(Expression, EqualityIsStructural) {
  auto a = Expression::binary(Op::logical_and, Expression::rising(var("a")), Expression::rising(var("b")));
  auto b = Expression::binary(Op::logical_and, Expression::rising(var("a")), Expression::rising(var("b")));
  auto c = Expression::binary(Op::logical_or, Expression::rising(var("a")), Expression::rising(var("b")));
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  EXPECT_FALSE(Expression::variable("X1") == Expression::step_activity("1"));
}

TEST(Expression, SourceUsesMinimalParentheses) {
  auto a = var("a");
  auto b = var("b");
  auto c = var("c");
  EXPECT_EQ(to_source(Expression::binary(Op::logical_or, Expression::binary(Op::logical_and, a, b), c)),
            "a AND b OR c");
  EXPECT_EQ(to_source(Expression::binary(Op::logical_and, a, Expression::binary(Op::logical_or, b, c))),
            "a AND (b OR c)");
  EXPECT_EQ(to_source(Expression::negate(Expression::binary(Op::logical_and, a, b))), "NOT (a AND b)");
  EXPECT_EQ(to_source(Expression::binary(Op::subtract, var("n"),
                                         Expression::binary(Op::subtract, var("m"), Expression::integer(1)))),
            "n - (m - 1)");
  EXPECT_EQ(to_source(Expression::binary(Op::less, Expression::binary(Op::add, var("n"), Expression::integer(1)),
                                         Expression::integer(-3))),
            "n + 1 < -3");
  EXPECT_EQ(to_source(Expression::rising(Expression::step_activity("12"))), "rising(X12)");
  EXPECT_EQ(to_source(Expression::falling(var("a"))), "falling(a)");
}

TEST(Expression, EdgeQueries) {
  auto e = Expression::binary(Op::logical_and, var("a"), Expression::negate(Expression::falling(var("b"))));
  EXPECT_TRUE(e.contains_edge());
  EXPECT_FALSE(e.is_edge());
  EXPECT_TRUE(e.rhs().lhs().is_edge());
  EXPECT_FALSE(var("a").contains_edge());
  EXPECT_TRUE(var("a").is_reference());
  EXPECT_TRUE(Expression::step_activity("1").is_reference());
  EXPECT_FALSE(Expression::integer(3).is_reference());
}

TEST(Expression, RewriteLeavesReplacesMatchingLeaves) {
  auto e = Expression::binary(Op::logical_or, Expression::name("X1"), Expression::rising(Expression::name("a")));
  auto resolved = e.rewrite_leaves([](const Expression& leaf) -> std::optional<Expression> {
    if (leaf.op() != Op::name) return std::nullopt;
    if (leaf.identifier() == "X1") return Expression::step_activity("1");
    return Expression::variable(leaf.identifier());
  });
  EXPECT_EQ(resolved, Expression::binary(Op::logical_or, Expression::step_activity("1"),
                                         Expression::rising(Expression::variable("a"))));
  EXPECT_EQ(e.lhs().op(), Op::name);  // the original is untouched
}

TEST(Expression, ForEachVisitsPreOrder) {
  auto e = Expression::binary(Op::add, var("n"), Expression::integer(2));
  std::vector<Op> seen;
  e.for_each([&](const Expression& x) { seen.push_back(x.op()); });
  EXPECT_EQ(seen, (std::vector<Op>{Op::add, Op::variable, Op::int_literal}));
}

}  // namespace
}  // namespace grafcet
