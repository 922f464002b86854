#include "shapeguard/expr_tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "shapeguard/error.hpp"

namespace shapeguard {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* op_name(Op op) {
  switch (op) {
    case Op::constant: return "const";
    case Op::variable: return "var";
    case Op::neg: return "neg";
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::div: return "div";
  }
  return "?";
}

Op op_from_name(const std::string& s) {
  for (Op op : {Op::constant, Op::variable, Op::neg, Op::add, Op::sub, Op::mul, Op::div}) {
    if (s == op_name(op)) return op;
  }
  throw SchemaError("unknown expression operator '" + s + "'");
}

double eval_at(const std::vector<Node>& nodes, std::size_t& i, std::span<const double> x) {
  const Node& n = nodes[i++];
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return x[static_cast<std::size_t>(n.var)];
    case Op::neg: return -eval_at(nodes, i, x);
    default: break;
  }
  const double a = eval_at(nodes, i, x);
  const double b = eval_at(nodes, i, x);
  switch (n.op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : a / b;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

void eval_rows_at(const std::vector<Node>& nodes, std::size_t& i,
                  const std::vector<std::span<const double>>& cols, std::vector<double>& out,
                  std::vector<std::vector<double>>& pool, std::size_t level) {
  const Node& n = nodes[i++];
  const std::size_t rows = out.size();
  switch (n.op) {
    case Op::constant:
      std::fill(out.begin(), out.end(), n.value);
      return;
    case Op::variable: {
      const auto& c = cols[static_cast<std::size_t>(n.var)];
      std::copy(c.begin(), c.begin() + static_cast<long>(rows), out.begin());
      return;
    }
    case Op::neg:
      eval_rows_at(nodes, i, cols, out, pool, level);
      for (double& v : out) v = -v;
      return;
    default: break;
  }
  eval_rows_at(nodes, i, cols, out, pool, level);
  std::vector<double>& right = pool[level];
  right.resize(rows);
  eval_rows_at(nodes, i, cols, right, pool, level + 1);
  switch (n.op) {
    case Op::add:
      for (std::size_t r = 0; r < rows; ++r) out[r] += right[r];
      break;
    case Op::sub:
      for (std::size_t r = 0; r < rows; ++r) out[r] -= right[r];
      break;
    case Op::mul:
      for (std::size_t r = 0; r < rows; ++r) out[r] *= right[r];
      break;
    case Op::div:
      for (std::size_t r = 0; r < rows; ++r) {
        out[r] = right[r] == 0.0 ? std::numeric_limits<double>::quiet_NaN() : out[r] / right[r];
      }
      break;
    default: break;
  }
}

struct JetValue {
  IntervalJet jet;
  bool defined = true;
};

JetValue undefined_jet() {
  const Interval e = Interval::entire();
  return {{e, e, e, e}, false};
}

JetValue jet_at(const std::vector<Node>& nodes, std::size_t& i, std::span<const double> lo,
                std::span<const double> hi, int va, int vb) {
  const Node& n = nodes[i++];
  const Interval zero(0.0);
  switch (n.op) {
    case Op::constant: return {{Interval(n.value), zero, zero, zero}, true};
    case Op::variable: {
      const auto v = static_cast<std::size_t>(n.var);
      return {{Interval(lo[v], hi[v]), Interval(n.var == va ? 1.0 : 0.0),
               Interval(n.var == vb ? 1.0 : 0.0), zero},
              true};
    }
    case Op::neg: {
      JetValue a = jet_at(nodes, i, lo, hi, va, vb);
      if (!a.defined) return a;
      return {{-a.jet.value, -a.jet.da, -a.jet.db, -a.jet.dab}, true};
    }
    default: break;
  }
  const JetValue left = jet_at(nodes, i, lo, hi, va, vb);
  const JetValue right = jet_at(nodes, i, lo, hi, va, vb);
  if (!left.defined || !right.defined) return undefined_jet();
  const IntervalJet& a = left.jet;
  const IntervalJet& b = right.jet;
  auto product = [](const IntervalJet& x, const IntervalJet& y) {
    return IntervalJet{x.value * y.value, x.da * y.value + x.value * y.da,
                       x.db * y.value + x.value * y.db,
                       x.dab * y.value + x.da * y.db + x.db * y.da + x.value * y.dab};
  };
  switch (n.op) {
    case Op::add: return {{a.value + b.value, a.da + b.da, a.db + b.db, a.dab + b.dab}, true};
    case Op::sub: return {{a.value - b.value, a.da - b.da, a.db - b.db, a.dab - b.dab}, true};
    case Op::mul: return {product(a, b), true};
    case Op::div: {
      if (b.value.contains_zero()) return undefined_jet();
      // 1/b and its derivatives, then the product rule.
      const Interval r = Interval(1.0) / b.value;
      const Interval r2 = pow_int(r, 2);
      const IntervalJet recip{r, -(b.da * r2), -(b.db * r2),
                              Interval(2.0) * b.da * b.db * pow_int(r, 3) - b.dab * r2};
      return {product(a, recip), true};
    }
    default: return undefined_jet();
  }
}

void infix_at(const ExprTree& t, std::size_t& i, std::string& out) {
  const Node& n = t.nodes()[i++];
  switch (n.op) {
    case Op::constant:
      out += shortest(n.value);
      return;
    case Op::variable:
      out += t.variables()[static_cast<std::size_t>(n.var)];
      return;
    case Op::neg:
      out += "(-";
      infix_at(t, i, out);
      out += ")";
      return;
    default: break;
  }
  static constexpr const char* kSym[] = {"", "", "", " + ", " - ", " * ", " / "};
  out += "(";
  infix_at(t, i, out);
  out += kSym[static_cast<int>(n.op)];
  infix_at(t, i, out);
  out += ")";
}

nlohmann::json json_at(const ExprTree& t, std::size_t& i) {
  const Node& n = t.nodes()[i++];
  nlohmann::json j;
  j["op"] = op_name(n.op);
  if (n.op == Op::constant) {
    j["value"] = n.value;
  } else if (n.op == Op::variable) {
    j["name"] = t.variables()[static_cast<std::size_t>(n.var)];
  } else {
    nlohmann::json args = nlohmann::json::array();
    for (int k = 0; k < arity(n.op); ++k) args.push_back(json_at(t, i));
    j["args"] = std::move(args);
  }
  return j;
}

void nodes_from_json(const nlohmann::json& j, const std::vector<std::string>& vars,
                     std::vector<Node>& out) {
  const Op op = op_from_name(j.at("op").get<std::string>());
  Node n{op, 0.0, -1};
  if (op == Op::constant) {
    n.value = j.at("value").get<double>();
    out.push_back(n);
    return;
  }
  if (op == Op::variable) {
    const auto name = j.at("name").get<std::string>();
    const auto it = std::find(vars.begin(), vars.end(), name);
    if (it == vars.end()) throw SchemaError("expression uses unknown variable '" + name + "'");
    n.var = static_cast<int>(it - vars.begin());
    out.push_back(n);
    return;
  }
  out.push_back(n);
  const auto& args = j.at("args");
  if (static_cast<int>(args.size()) != arity(op)) throw SchemaError("wrong operand count");
  for (const auto& a : args) nodes_from_json(a, vars, out);
}

int depth_at(const std::vector<Node>& nodes, std::size_t& i) {
  const Node& n = nodes[i++];
  int d = 0;
  for (int k = 0; k < arity(n.op); ++k) d = std::max(d, depth_at(nodes, i));
  return d + 1;
}

void grow(std::mt19937_64& rng, const Schema& schema, int depth_left, bool full,
          std::vector<Node>& out) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const bool terminal = depth_left <= 1 || (!full && u01(rng) < 0.3);
  if (terminal) {
    if (u01(rng) < 0.6) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(schema->size()) - 1);
      out.push_back({Op::variable, 0.0, pick(rng)});
    } else {
      out.push_back({Op::constant, std::uniform_real_distribution<double>(-2.0, 2.0)(rng), -1});
    }
    return;
  }
  static constexpr Op kBinary[] = {Op::add, Op::sub, Op::mul, Op::div};
  const Op op = u01(rng) < 0.1 ? Op::neg : kBinary[std::uniform_int_distribution<int>(0, 3)(rng)];
  out.push_back({op, 0.0, -1});
  for (int k = 0; k < arity(op); ++k) grow(rng, schema, depth_left - 1, full, out);
}

}  // namespace

int arity(Op op) noexcept {
  switch (op) {
    case Op::constant:
    case Op::variable: return 0;
    case Op::neg: return 1;
    default: return 2;
  }
}

Schema make_schema(std::vector<std::string> variables) {
  return std::make_shared<const std::vector<std::string>>(std::move(variables));
}

ExprTree::ExprTree(Schema schema, std::vector<Node> nodes)
    : schema_(std::move(schema)), nodes_(std::move(nodes)) {
  if (!schema_) throw ConfigError("expression tree needs a schema");
  // Validate the prefix structure.
  int open = 1;
  for (const Node& n : nodes_) {
    if (open == 0) throw ConfigError("expression has trailing nodes");
    open += arity(n.op) - 1;
    if (n.op == Op::variable && (n.var < 0 || n.var >= static_cast<int>(schema_->size()))) {
      throw ConfigError("variable index out of range");
    }
    if (n.op == Op::constant && !std::isfinite(n.value)) throw ConfigError("non-finite constant");
  }
  if (open != 0) throw ConfigError("incomplete expression");
}

ExprTree ExprTree::constant(Schema schema, double value) {
  return {std::move(schema), {{Op::constant, value, -1}}};
}

ExprTree ExprTree::variable(Schema schema, const std::string& name) {
  const auto it = std::find(schema->begin(), schema->end(), name);
  if (it == schema->end()) throw SchemaError("unknown variable '" + name + "'");
  const int idx = static_cast<int>(it - schema->begin());
  return {std::move(schema), {{Op::variable, 0.0, idx}}};
}

ExprTree ExprTree::unary(Op op, const ExprTree& child) {
  std::vector<Node> nodes{{op, 0.0, -1}};
  nodes.insert(nodes.end(), child.nodes_.begin(), child.nodes_.end());
  return {child.schema_, std::move(nodes)};
}

ExprTree ExprTree::binary(Op op, const ExprTree& left, const ExprTree& right) {
  std::vector<Node> nodes{{op, 0.0, -1}};
  nodes.insert(nodes.end(), left.nodes_.begin(), left.nodes_.end());
  nodes.insert(nodes.end(), right.nodes_.begin(), right.nodes_.end());
  return {left.schema_, std::move(nodes)};
}

int ExprTree::depth() const {
  std::size_t i = 0;
  return nodes_.empty() ? 0 : depth_at(nodes_, i);
}

std::size_t ExprTree::subtree_end(std::size_t index) const {
  int open = 1;
  std::size_t i = index;
  while (open > 0) open += arity(nodes_[i++].op) - 1;
  return i;
}

ExprTree ExprTree::subtree(std::size_t index) const {
  const auto end = subtree_end(index);
  return {schema_, std::vector<Node>(nodes_.begin() + static_cast<long>(index),
                                     nodes_.begin() + static_cast<long>(end))};
}

ExprTree ExprTree::replace(std::size_t index, const ExprTree& replacement) const {
  const auto end = subtree_end(index);
  std::vector<Node> nodes(nodes_.begin(), nodes_.begin() + static_cast<long>(index));
  nodes.insert(nodes.end(), replacement.nodes_.begin(), replacement.nodes_.end());
  nodes.insert(nodes.end(), nodes_.begin() + static_cast<long>(end), nodes_.end());
  return {schema_, std::move(nodes)};
}

double ExprTree::eval(std::span<const double> x) const {
  if (x.size() < schema_->size()) throw ArityError("point does not cover the tree schema");
  std::size_t i = 0;
  return eval_at(nodes_, i, x);
}

void ExprTree::eval_rows(const std::vector<std::span<const double>>& columns,
                         std::vector<double>& out) const {
  thread_local std::vector<std::vector<double>> pool;
  // Sized up front: growing it during recursion would move buffers in use.
  if (pool.size() < nodes_.size()) pool.resize(nodes_.size());
  std::size_t i = 0;
  eval_rows_at(nodes_, i, columns, out, pool, 0);
}

std::string ExprTree::to_infix() const {
  std::string out;
  std::size_t i = 0;
  infix_at(*this, i, out);
  return out;
}

std::string ExprTree::to_json() const {
  std::size_t i = 0;
  return json_at(*this, i).dump();
}

ExprTree ExprTree::from_json(const std::string& text, Schema schema) {
  std::vector<Node> nodes;
  try {
    nodes_from_json(nlohmann::json::parse(text), *schema, nodes);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("expression JSON: ") + e.what());
  }
  return {std::move(schema), std::move(nodes)};
}

bool operator==(const ExprTree& a, const ExprTree& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  if (a.schema_ != b.schema_ && (!a.schema_ || !b.schema_ || *a.schema_ != *b.schema_)) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const Node& x = a.nodes_[i];
    const Node& y = b.nodes_[i];
    if (x.op != y.op || x.var != y.var || x.value != y.value) return false;
  }
  return true;
}

IntervalJet interval_jet(const ExprTree& tree, std::span<const double> lo,
                         std::span<const double> hi, int var_a, int var_b) {
  std::size_t i = 0;
  return jet_at(tree.nodes(), i, lo, hi, var_a, var_b).jet;
}

Interval tree_derivative_interval(const ExprTree& tree, const std::string& var, const Box& region) {
  const auto& vars = tree.variables();
  const auto it = std::find(vars.begin(), vars.end(), var);
  if (it == vars.end()) throw ArityError("tree schema has no variable '" + var + "'");
  const int v = static_cast<int>(it - vars.begin());
  std::vector<double> lo, hi;
  for (const auto& name : vars) {
    const Interval r = region.has(name) ? region.at(name) : Interval(0.0, 1.0);
    lo.push_back(r.lo());
    hi.push_back(r.hi());
  }
  return interval_jet(tree, lo, hi, v, v).da;
}

ConstraintCheck check_constraints(const ScaledTree& model,
                                  const std::vector<ShapeConstraint>& constraints) {
  ConstraintCheck check;
  const auto& vars = model.tree.variables();
  for (const auto& c : constraints) {
    const auto [lo, hi] = c.region_bounds(vars);
    const MultiIndex index = c.derivative_index(vars);
    int va = -1, vb = -1;
    for (std::size_t v = 0; v < index.size(); ++v) {
      for (int k = 0; k < index.exponents[v]; ++k) (va < 0 ? va : vb) = static_cast<int>(v);
    }
    const IntervalJet jet = interval_jet(model.tree, lo, hi, va, vb);
    Interval enclosure;
    switch (c.order()) {
      case 0: enclosure = Interval(model.intercept) + Interval(model.slope) * jet.value; break;
      case 1: enclosure = Interval(model.slope) * jet.da; break;
      default: enclosure = Interval(model.slope) * jet.dab; break;
    }
    // Division by an enclosure containing zero makes every component entire.
    if (!jet.value.is_finite() && !std::isfinite(jet.value.lo()) && !std::isfinite(jet.value.hi())) {
      enclosure = Interval::entire();
    }
    check.enclosures.push_back(enclosure);
    if (!enclosure.subset_of(c.bound)) check.feasible = false;
  }
  return check;
}

ConstraintCheck check_constraints(const ExprTree& tree,
                                  const std::vector<ShapeConstraint>& constraints) {
  return check_constraints(ScaledTree{tree, 0.0, 1.0}, constraints);
}

ExprTree random_tree(std::mt19937_64& rng, const Schema& schema, int max_depth, bool full) {
  std::vector<Node> nodes;
  grow(rng, schema, std::max(1, max_depth), full, nodes);
  return {schema, std::move(nodes)};
}

}  // namespace shapeguard
