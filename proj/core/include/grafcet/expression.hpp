#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace grafcet {

using Value = std::int64_t;

/// Immutable condition / assignment expression. Copies share the node tree.
///
/// Leaves are literals, variable reads, and step-activity reads (`X<step>`).
/// Edge atoms (`rising`, `falling`) wrap exactly one variable or
/// step-activity leaf. Equality is structural.
class Expression {
 public:
  enum class Op {
    bool_literal,
    int_literal,
    name,           // unresolved identifier, only present before resolution
    variable,
    step_activity,
    logical_not,
    logical_and,
    logical_or,
    equal,
    not_equal,
    less,
    less_equal,
    greater,
    greater_equal,
    add,
    subtract,
    rising,
    falling,
  };

  Expression();  // literal false

  static Expression boolean(bool value);
  static Expression integer(Value value);
  static Expression name(std::string identifier);
  static Expression variable(std::string id);
  static Expression step_activity(std::string step_id);
  static Expression negate(Expression operand);
  static Expression binary(Op op, Expression lhs, Expression rhs);
  static Expression rising(Expression reference);
  static Expression falling(Expression reference);

  Op op() const;
  Value literal() const;                  // bool_literal (0/1) and int_literal
  const std::string& identifier() const;  // name, variable, step_activity
  const Expression& lhs() const;          // unary operand, edge reference, binary lhs
  const Expression& rhs() const;
  std::size_t arity() const;

  bool is_reference() const;
  bool is_edge() const;
  bool contains_edge() const;

  /// Rebuilds the tree bottom-up, replacing every leaf for which `leaf`
  /// returns a value.
  Expression rewrite_leaves(
      const std::function<std::optional<Expression>(const Expression&)>& leaf) const;

  /// Calls `visit` on every node in pre-order.
  void for_each(const std::function<void(const Expression&)>& visit) const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

bool is_binary(Expression::Op op);
bool is_comparison(Expression::Op op);

/// Canonical source form, parenthesized only where precedence requires.
std::string to_source(const Expression& expression);

}  // namespace grafcet
