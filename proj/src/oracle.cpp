#include "etfad/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "etfad/errors.hpp"

namespace etfad::oracle {

ValueGradient analytic_gradient_mult(std::span<const double> x) {
  if (x.empty()) throw OracleError("product needs at least one factor");
  const std::size_t m = x.size();
  // Prefix and suffix products give every prod_{j != i} x_j without division.
  std::vector<double> prefix(m + 1, 1.0), suffix(m + 1, 1.0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * x[i];
  for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] * x[i];
  ValueGradient r;
  r.value = prefix[m];
  r.gradient.resize(m);
  for (std::size_t i = 0; i < m; ++i) r.gradient[i] = prefix[i] * suffix[i + 1];
  return r;
}

std::pair<double, double> analytic_gradient_nested(double x, std::size_t m) {
  if (m == 0) throw OracleError("nested sine needs at least one application");
  double s = x;
  double d = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    d *= std::cos(s);
    s = std::sin(s);
  }
  return {s, d};
}

double fd_step(double x) noexcept {
  static const double kCbrtEps = std::cbrt(std::numeric_limits<double>::epsilon());
  return kCbrtEps * std::max(1.0, std::abs(x));
}

double finite_difference(const ScalarFunction& f, std::span<const double> x, std::size_t i) {
  if (i >= x.size()) throw OracleError("finite difference coordinate out of range");
  std::vector<double> p(x.begin(), x.end());
  const double h = fd_step(x[i]);
  p[i] = x[i] + h;
  const double hi = p[i];
  const double fp = f(p);
  p[i] = x[i] - h;
  const double lo = p[i];
  const double fm = f(p);
  if (!std::isfinite(fp) || !std::isfinite(fm)) {
    throw OracleError("function is not finite near the finite-difference point");
  }
  // Divide by the representable step actually taken.
  return (fp - fm) / (hi - lo);
}

std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> x) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = finite_difference(f, x, i);
  return g;
}

// ---------------------------------------------------------------------------
// Reference evaluator. Written against <cmath> directly so it shares no code
// with the catalog rules it is used to check.

namespace {

double reference_unary(OpId op, double a) {
  switch (op) {
    case OpId::neg: return -a;
    case OpId::sin: return std::sin(a);
    case OpId::cos: return std::cos(a);
    case OpId::tan: return std::tan(a);
    case OpId::exp: return std::exp(a);
    case OpId::log: return std::log(a);
    case OpId::sqrt: return std::sqrt(a);
    case OpId::abs: return std::fabs(a);
    default: break;
  }
  throw OracleError("not a unary operation: " + std::string(to_string(op)));
}

double reference_binary(OpId op, double a, double b) {
  switch (op) {
    case OpId::add: return a + b;
    case OpId::sub: return a - b;
    case OpId::mul: return a * b;
    case OpId::div: return a / b;
    case OpId::pow: return std::pow(a, b);
    case OpId::max: return std::fmax(a, b);
    case OpId::min: return std::fmin(a, b);
    default: break;
  }
  throw OracleError("not a binary operation: " + std::string(to_string(op)));
}

int arity(OpId op) {
  switch (op) {
    case OpId::add: case OpId::sub: case OpId::mul: case OpId::div:
    case OpId::pow: case OpId::max: case OpId::min:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

RandomTree::RandomTree(std::vector<TreeNode> nodes, std::vector<double> variables, std::vector<double> passives)
    : nodes_(std::move(nodes)), variables_(std::move(variables)), passives_(std::move(passives)) {
  if (nodes_.empty()) throw OracleError("tree has no nodes");
}

double RandomTree::evaluate(std::span<const double> variables) const {
  if (variables.size() != variables_.size()) throw OracleError("wrong number of variable values");
  std::vector<double> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::variable: v[i] = variables[n.slot]; break;
      case NodeKind::passive: v[i] = passives_[n.slot]; break;
      case NodeKind::constant: v[i] = n.constant; break;
      case NodeKind::unary: v[i] = reference_unary(n.op, v[n.first]); break;
      case NodeKind::binary: v[i] = reference_binary(n.op, v[n.first], v[n.second]); break;
    }
  }
  return v.back();
}

std::vector<double> RandomTree::fd_gradient() const {
  return finite_difference_gradient([this](std::span<const double> x) { return evaluate(x); }, variables_);
}

std::vector<std::size_t> RandomTree::active_leaves_in_order() const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{root()};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::variable: out.push_back(i); break;
      case NodeKind::unary: stack.push_back(n.first); break;
      case NodeKind::binary:
        stack.push_back(n.second);
        stack.push_back(n.first);
        break;
      default: break;
    }
  }
  return out;
}

std::size_t RandomTree::active_leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                                [](const TreeNode& n) { return n.kind == NodeKind::variable; }));
}

std::size_t RandomTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) {
    return n.kind != NodeKind::unary && n.kind != NodeKind::binary;
  }));
}

std::size_t RandomTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.kind == NodeKind::unary) d[i] = d[n.first] + 1;
    if (n.kind == NodeKind::binary) d[i] = std::max(d[n.first], d[n.second]) + 1;
  }
  return d.back();
}

bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.kind == b.kind && a.op == b.op && a.first == b.first && a.second == b.second && a.slot == b.slot &&
         a.constant == b.constant;
}

bool operator==(const RandomTree& a, const RandomTree& b) {
  return a.nodes_ == b.nodes_ && a.variables_ == b.variables_ && a.passives_ == b.passives_;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

struct Built {
  std::size_t index;
  double value;
  bool constant;
};

class TreeBuilder {
 public:
  explicit TreeBuilder(const RandomTreeSpec& spec) : spec_(spec), rng_(spec.rng_seed) {
    if (spec.max_depth < 0) throw OracleError("max_depth must be non-negative");
    if (spec.n_components == 0) throw OracleError("n_components must be positive");
    if (!(spec.input_domain.lo < spec.input_domain.hi)) throw OracleError("empty input domain");
    for (std::size_t k = 0; k < kAllOps.size(); ++k) {
      if (spec.op_weights[k] < 0.0) throw OracleError("negative op weight");
      (arity(kAllOps[k]) == 1 ? unary_weight_ : binary_weight_) += spec.op_weights[k];
    }
    if (unary_weight_ + binary_weight_ <= 0.0) throw OracleError("all op weights are zero");
    variables_.resize(spec.n_components);
    for (double& v : variables_) v = sample_domain();
  }

  RandomTree build() {
    const Built root = node(spec_.max_depth, true);
    if (root.constant) throw OracleError("internal: constant root");
    return RandomTree(std::move(nodes_), std::move(variables_), std::move(passives_));
  }

 private:
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double sample_domain() {
    return std::uniform_real_distribution<double>(spec_.input_domain.lo, spec_.input_domain.hi)(rng_);
  }

  std::size_t push(TreeNode n) {
    nodes_.push_back(n);
    return nodes_.size() - 1;
  }

  Built variable_leaf() {
    const std::size_t slot = std::uniform_int_distribution<std::size_t>(0, variables_.size() - 1)(rng_);
    TreeNode n;
    n.kind = NodeKind::variable;
    n.slot = slot;
    return {push(n), variables_[slot], false};
  }

  Built leaf(bool allow_constant) {
    const double u = uniform();
    if (allow_constant && u < spec_.constant_probability) {
      TreeNode n;
      n.kind = NodeKind::constant;
      n.constant = sample_domain();
      return {push(n), n.constant, true};
    }
    if (allow_constant && u < spec_.constant_probability + spec_.passive_probability) {
      TreeNode n;
      n.kind = NodeKind::passive;
      n.slot = passives_.size();
      passives_.push_back(sample_domain());
      return {push(n), passives_.back(), false};
    }
    return variable_leaf();
  }

  OpId sample_op(int wanted_arity) {
    const double total = wanted_arity == 1 ? unary_weight_ : binary_weight_;
    double u = uniform() * total;
    OpId last = wanted_arity == 1 ? OpId::neg : OpId::add;
    for (std::size_t k = 0; k < kAllOps.size(); ++k) {
      if (arity(kAllOps[k]) != wanted_arity || spec_.op_weights[k] <= 0.0) continue;
      last = kAllOps[k];
      if (u < spec_.op_weights[k]) return kAllOps[k];
      u -= spec_.op_weights[k];
    }
    return last;
  }

  bool in_bounds(double f) const { return std::isfinite(f) && std::abs(f) <= spec_.value_bound; }

  bool valid_unary(OpId op, double a) const {
    switch (op) {
      case OpId::log: case OpId::sqrt: if (a < 0.1) return false; break;
      case OpId::exp: if (a > 3.0) return false; break;
      case OpId::tan: if (std::abs(std::cos(a)) < 0.3) return false; break;
      case OpId::abs: if (std::abs(a) < 1e-2) return false; break;
      default: break;
    }
    return in_bounds(reference_unary(op, a));
  }

  bool valid_binary(OpId op, double a, double b) const {
    switch (op) {
      case OpId::div: if (std::abs(b) < 0.2) return false; break;
      case OpId::pow: if (a < 0.2 || std::abs(b) > 3.0) return false; break;
      case OpId::max: case OpId::min: if (std::abs(a - b) < 1e-2) return false; break;
      default: break;
    }
    return in_bounds(reference_binary(op, a, b));
  }

  // Picks an op of the given arity that is valid for the operand values,
  // preferring `first`. Returns false when none is.
  template <class Valid>
  bool choose(int wanted_arity, OpId first, Valid&& valid, OpId& out) {
    if (valid(first)) {
      out = first;
      return true;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < kAllOps.size(); ++k) {
      if (arity(kAllOps[k]) == wanted_arity && spec_.op_weights[k] > 0.0 && valid(kAllOps[k])) {
        total += spec_.op_weights[k];
      }
    }
    if (total <= 0.0) return false;
    double u = uniform() * total;
    for (std::size_t k = 0; k < kAllOps.size(); ++k) {
      if (arity(kAllOps[k]) != wanted_arity || spec_.op_weights[k] <= 0.0 || !valid(kAllOps[k])) continue;
      out = kAllOps[k];
      if (u < spec_.op_weights[k]) return true;
      u -= spec_.op_weights[k];
    }
    return true;
  }

  Built node(int depth_left, bool is_root) {
    if (depth_left == 0) return is_root ? variable_leaf() : leaf(true);
    if (!is_root && uniform() < spec_.leaf_probability) return leaf(true);

    const double u = uniform() * (unary_weight_ + binary_weight_);
    const int wanted = u < unary_weight_ ? 1 : 2;
    const OpId first = sample_op(wanted);
    const std::size_t mark = nodes_.size();
    const std::size_t passive_mark = passives_.size();

    for (int attempt = 0; attempt < 8; ++attempt) {
      nodes_.resize(mark);
      passives_.resize(passive_mark);
      if (wanted == 1) {
        Built a = node(depth_left - 1, false);
        if (a.constant) {
          nodes_.resize(mark);
          a = variable_leaf();
        }
        OpId op{};
        if (choose(1, first, [&](OpId o) { return valid_unary(o, a.value); }, op)) {
          TreeNode n;
          n.kind = NodeKind::unary;
          n.op = op;
          n.first = a.index;
          return {push(n), reference_unary(op, a.value), false};
        }
      } else {
        const Built a = node(depth_left - 1, false);
        Built b = node(depth_left - 1, false);
        if (a.constant && b.constant) {
          nodes_.pop_back();
          b = variable_leaf();
        }
        OpId op{};
        if (choose(2, first, [&](OpId o) { return valid_binary(o, a.value, b.value); }, op)) {
          TreeNode n;
          n.kind = NodeKind::binary;
          n.op = op;
          n.first = a.index;
          n.second = b.index;
          return {push(n), reference_binary(op, a.value, b.value), false};
        }
      }
    }
    nodes_.resize(mark);
    passives_.resize(passive_mark);
    return is_root ? variable_leaf() : leaf(true);
  }

  const RandomTreeSpec& spec_;
  std::mt19937_64 rng_;
  double unary_weight_ = 0.0;
  double binary_weight_ = 0.0;
  std::vector<TreeNode> nodes_;
  std::vector<double> variables_;
  std::vector<double> passives_;
};

}  // namespace

RandomTree generate_tree(const RandomTreeSpec& spec) { return TreeBuilder(spec).build(); }

}  // namespace etfad::oracle
