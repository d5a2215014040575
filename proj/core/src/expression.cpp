#include "grafcet/expression.hpp"

#include <stdexcept>

namespace grafcet {

struct Expression::Node {
  Op op = Op::bool_literal;
  Value literal = 0;
  std::string identifier;
  std::vector<Expression> children;
};

Expression::Expression() {
  static const auto false_node = std::make_shared<const Node>();
  node_ = false_node;
}

Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::boolean(bool value) {
  auto node = std::make_shared<Node>();
  node->op = Op::bool_literal;
  node->literal = value ? 1 : 0;
  return Expression(std::move(node));
}

Expression Expression::integer(Value value) {
  auto node = std::make_shared<Node>();
  node->op = Op::int_literal;
  node->literal = value;
  return Expression(std::move(node));
}

Expression Expression::name(std::string identifier) {
  auto node = std::make_shared<Node>();
  node->op = Op::name;
  node->identifier = std::move(identifier);
  return Expression(std::move(node));
}

Expression Expression::variable(std::string id) {
  auto node = std::make_shared<Node>();
  node->op = Op::variable;
  node->identifier = std::move(id);
  return Expression(std::move(node));
}

Expression Expression::step_activity(std::string step_id) {
  auto node = std::make_shared<Node>();
  node->op = Op::step_activity;
  node->identifier = std::move(step_id);
  return Expression(std::move(node));
}

Expression Expression::negate(Expression operand) {
  auto node = std::make_shared<Node>();
  node->op = Op::logical_not;
  node->children.push_back(std::move(operand));
  return Expression(std::move(node));
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
  if (!is_binary(op)) throw std::invalid_argument("Expression::binary: not a binary operator");
  auto node = std::make_shared<Node>();
  node->op = op;
  node->children.push_back(std::move(lhs));
  node->children.push_back(std::move(rhs));
  return Expression(std::move(node));
}

Expression Expression::rising(Expression reference) {
  auto node = std::make_shared<Node>();
  node->op = Op::rising;
  node->children.push_back(std::move(reference));
  return Expression(std::move(node));
}

Expression Expression::falling(Expression reference) {
  auto node = std::make_shared<Node>();
  node->op = Op::falling;
  node->children.push_back(std::move(reference));
  return Expression(std::move(node));
}

Expression::Op Expression::op() const { return node_->op; }
Value Expression::literal() const { return node_->literal; }
const std::string& Expression::identifier() const { return node_->identifier; }

const Expression& Expression::lhs() const {
  if (node_->children.empty()) throw std::logic_error("Expression::lhs on a leaf");
  return node_->children[0];
}

const Expression& Expression::rhs() const {
  if (node_->children.size() < 2) throw std::logic_error("Expression::rhs on a non-binary node");
  return node_->children[1];
}

std::size_t Expression::arity() const { return node_->children.size(); }

bool Expression::is_reference() const {
  const Op o = op();
  return o == Op::name || o == Op::variable || o == Op::step_activity;
}

bool Expression::is_edge() const { return op() == Op::rising || op() == Op::falling; }

bool Expression::contains_edge() const {
  if (is_edge()) return true;
  for (const auto& child : node_->children) {
    if (child.contains_edge()) return true;
  }
  return false;
}

Expression Expression::rewrite_leaves(
    const std::function<std::optional<Expression>(const Expression&)>& leaf) const {
  if (node_->children.empty()) {
    if (auto replaced = leaf(*this)) return *replaced;
    return *this;
  }
  auto node = std::make_shared<Node>(*node_);
  for (auto& child : node->children) child = child.rewrite_leaves(leaf);
  return Expression(std::move(node));
}

void Expression::for_each(const std::function<void(const Expression&)>& visit) const {
  visit(*this);
  for (const auto& child : node_->children) child.for_each(visit);
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.op == y.op && x.literal == y.literal && x.identifier == y.identifier &&
         x.children == y.children;
}

bool is_binary(Expression::Op op) {
  using Op = Expression::Op;
  switch (op) {
    case Op::logical_and:
    case Op::logical_or:
    case Op::add:
    case Op::subtract:
      return true;
    default:
      return is_comparison(op);
  }
}

bool is_comparison(Expression::Op op) {
  using Op = Expression::Op;
  switch (op) {
    case Op::equal:
    case Op::not_equal:
    case Op::less:
    case Op::less_equal:
    case Op::greater:
    case Op::greater_equal:
      return true;
    default:
      return false;
  }
}

namespace {

// Binding strength; higher binds tighter.
enum Level { level_or = 1, level_and, level_compare, level_add, level_unary, level_primary };

int level_of(const Expression& e) {
  using Op = Expression::Op;
  switch (e.op()) {
    case Op::logical_or:
      return level_or;
    case Op::logical_and:
      return level_and;
    case Op::add:
    case Op::subtract:
      return level_add;
    case Op::logical_not:
      return level_unary;
    default:
      return is_comparison(e.op()) ? level_compare : level_primary;
  }
}

const char* symbol(Expression::Op op) {
  using Op = Expression::Op;
  switch (op) {
    case Op::logical_and: return "AND";
    case Op::logical_or: return "OR";
    case Op::equal: return "=";
    case Op::not_equal: return "!=";
    case Op::less: return "<";
    case Op::less_equal: return "<=";
    case Op::greater: return ">";
    case Op::greater_equal: return ">=";
    case Op::add: return "+";
    case Op::subtract: return "-";
    default: return "?";
  }
}

void emit(const Expression& e, int min_level, std::string& out);

void emit_reference(const Expression& e, std::string& out) {
  if (e.op() == Expression::Op::step_activity) out += 'X';
  out += e.identifier();
}

void emit(const Expression& e, int min_level, std::string& out) {
  const int level = level_of(e);
  const bool parens = level < min_level;
  if (parens) out += '(';
  using Op = Expression::Op;
  switch (e.op()) {
    case Op::bool_literal:
      out += e.literal() ? "true" : "false";
      break;
    case Op::int_literal:
      out += std::to_string(e.literal());
      break;
    case Op::name:
    case Op::variable:
    case Op::step_activity:
      emit_reference(e, out);
      break;
    case Op::rising:
    case Op::falling:
      out += e.op() == Op::rising ? "rising(" : "falling(";
      emit_reference(e.lhs(), out);
      out += ')';
      break;
    case Op::logical_not:
      out += "NOT ";
      emit(e.lhs(), level_unary, out);
      break;
    default: {
      // Left-associative chains for AND/OR/+/-; comparisons do not chain.
      const bool chains = !is_comparison(e.op());
      emit(e.lhs(), chains ? level : level + 1, out);
      out += ' ';
      out += symbol(e.op());
      out += ' ';
      emit(e.rhs(), level + 1, out);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_source(const Expression& expression) {
  std::string out;
  emit(expression, level_or, out);
  return out;
}

}  // namespace grafcet
