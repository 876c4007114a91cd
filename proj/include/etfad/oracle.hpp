#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "etfad/ops.hpp"

namespace etfad::oracle {

// Reference results that do not go through the AD code paths: closed-form
// gradients of the two benchmark functions, central finite differences, and
// a plain-arithmetic evaluator for randomly generated expression trees.

struct ValueGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

/// y = x_1 * ... * x_M and dy/dx_i = prod_{j != i} x_j (computed without
/// division, so zeros in x are handled).
ValueGradient analytic_gradient_mult(std::span<const double> x);

/// y = sin(sin(...sin(x)...)) (M times) and dy/dx = prod_k cos(s_k) with
/// s_0 = x, s_{k+1} = sin(s_k).
std::pair<double, double> analytic_gradient_nested(double x, std::size_t m);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central-difference step for coordinate value x: cbrt(eps) * max(1, |x|).
double fd_step(double x) noexcept;

/// (f(x + h e_i) - f(x - h e_i)) / 2h. Throws OracleError if f is not finite
/// at either point.
double finite_difference(const ScalarFunction& f, std::span<const double> x, std::size_t i);

std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> x);

struct Interval {
  double lo = 0.5;
  double hi = 1.5;
};

struct RandomTreeSpec {
  int max_depth = 4;
  std::array<double, kAllOps.size()> op_weights = [] {
    std::array<double, kAllOps.size()> w{};
    w.fill(1.0);
    return w;
  }();
  std::size_t n_components = 1;
  Interval input_domain{};
  std::uint64_t rng_seed = 0;
  /// Chance that a non-root position below the depth limit becomes a leaf.
  double leaf_probability = 0.15;
  /// Of the leaves: passive reals, and passive variables (empty dx).
  double constant_probability = 0.1;
  double passive_probability = 0.05;
  /// Every intermediate value stays within [-value_bound, value_bound].
  double value_bound = 50.0;
};

enum class NodeKind : unsigned char { variable, passive, constant, unary, binary };

struct TreeNode {
  NodeKind kind = NodeKind::variable;
  OpId op = OpId::add;
  std::size_t first = 0;   // operand node indices (unary uses first only)
  std::size_t second = 0;
  std::size_t slot = 0;    // variable index or passive index
  double constant = 0.0;
};

/// Expression tree in post-order: operands precede their parent and the root
/// is the last node. Leaves name one of `variables()` (independent variable),
/// one of `passives()` (passive variable) or hold a constant.
class RandomTree {
 public:
  RandomTree(std::vector<TreeNode> nodes, std::vector<double> variables, std::vector<double> passives);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t root() const noexcept { return nodes_.size() - 1; }
  std::span<const double> variables() const noexcept { return variables_; }
  std::span<const double> passives() const noexcept { return passives_; }
  std::size_t n_components() const noexcept { return variables_.size(); }

  /// Plain double evaluation with the given independent-variable values.
  double evaluate(std::span<const double> variables) const;
  double value() const { return evaluate(variables_); }
  std::vector<double> fd_gradient() const;

  /// Node indices of the independent-variable leaves, left to right.
  std::vector<std::size_t> active_leaves_in_order() const;
  std::size_t active_leaf_count() const;
  std::size_t leaf_count() const;
  std::size_t depth() const;

  friend bool operator==(const RandomTree& a, const RandomTree& b);

 private:
  std::vector<TreeNode> nodes_;
  std::vector<double> variables_;
  std::vector<double> passives_;
};

bool operator==(const TreeNode& a, const TreeNode& b);

/// Deterministic in `spec`. Operators are only placed where their operand
/// values are well inside the domain (log/sqrt arguments >= 0.1, |divisor| >=
/// 0.2, pow base >= 0.2, exp argument <= 3, |cos| >= 0.3 under tan, no kinks
/// within 1e-2 for abs/max/min) and every value stays within value_bound.
RandomTree generate_tree(const RandomTreeSpec& spec);

}  // namespace etfad::oracle
