#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "etfad/instrument.hpp"

namespace etfad {

enum class OpId : std::uint8_t {
  add, sub, mul, div, neg, sin, cos, tan, exp, log, sqrt, pow, abs, max, min
};

inline constexpr std::array<OpId, 15> kAllOps{
    OpId::add, OpId::sub, OpId::mul, OpId::div, OpId::neg,
    OpId::sin, OpId::cos, OpId::tan, OpId::exp, OpId::log,
    OpId::sqrt, OpId::pow, OpId::abs, OpId::max, OpId::min};

// Value and partial-derivative rules, one struct per operation.
//
// Unary ops provide value(a) and partial(a, f); binary ops provide
// value(a, b), partial_a(a, b, f) and partial_b(a, b, f), where f is the
// value of the operation. `uses_value` marks rules whose partial reads f, so
// evaluators that do not keep f around know they have to recompute it.
// Linear ops additionally provide tangent(), the exact linear combination of
// operand tangents, and never need operand values for derivatives.
namespace op {

struct Add {
  static constexpr OpId id = OpId::add;
  static constexpr int arity = 2;
  static constexpr bool linear = true;
  static constexpr bool uses_value = false;
  static double value(double a, double b) noexcept { return a + b; }
  static double partial_a(double, double, double) noexcept { return 1.0; }
  static double partial_b(double, double, double) noexcept { return 1.0; }
  static double tangent(double da, double db) noexcept { return da + db; }
};

struct Sub {
  static constexpr OpId id = OpId::sub;
  static constexpr int arity = 2;
  static constexpr bool linear = true;
  static constexpr bool uses_value = false;
  static double value(double a, double b) noexcept { return a - b; }
  static double partial_a(double, double, double) noexcept { return 1.0; }
  static double partial_b(double, double, double) noexcept { return -1.0; }
  static double tangent(double da, double db) noexcept { return da - db; }
};

struct Mul {
  static constexpr OpId id = OpId::mul;
  static constexpr int arity = 2;
  static constexpr bool linear = false;
  static constexpr bool uses_value = false;
  static double value(double a, double b) noexcept { return a * b; }
  static double partial_a(double, double b, double) noexcept { return b; }
  static double partial_b(double a, double, double) noexcept { return a; }
};

struct Div {
  static constexpr OpId id = OpId::div;
  static constexpr int arity = 2;
  static constexpr bool linear = false;
  static constexpr bool uses_value = true;
  static double value(double a, double b) {
    detail::require_domain(b != 0.0, "division by zero");
    return a / b;
  }
  static double partial_a(double, double b, double) noexcept { return 1.0 / b; }
  static double partial_b(double, double b, double f) noexcept { return -f / b; }
};

struct Neg {
  static constexpr OpId id = OpId::neg;
  static constexpr int arity = 1;
  static constexpr bool linear = true;
  static constexpr bool uses_value = false;
  static double value(double a) noexcept { return -a; }
  static double partial(double, double) noexcept { return -1.0; }
  static double tangent(double da) noexcept { return -da; }
};

struct Sin {
  static constexpr OpId id = OpId::sin;
  static constexpr int arity = 1;
  static constexpr bool linear = false;
  static constexpr bool uses_value = false;
  static double value(double a) noexcept { return counted::sin(a); }
  static double partial(double a, double) noexcept { return counted::cos(a); }
};

struct Cos {
  static constexpr OpId id = OpId::cos;
  static constexpr int arity = 1;
  static constexpr bool linear = false;
  static constexpr bool uses_value = false;
  static double value(double a) noexcept { return counted::cos(a); }
  static double partial(double a, double) noexcept { return -counted::sin(a); }
};

struct Tan {
  static constexpr OpId id = OpId::tan;
  static constexpr int arity = 1;
  static constexpr bool linear = false;
  static constexpr bool uses_value = true;
  static double value(double a) noexcept { return counted::tan(a); }
  static double partial(double, double f) noexcept { return 1.0 + f * f; }
};

struct Exp {
  static constexpr OpId id = OpId::exp;
  static constexpr int arity = 1;
  static constexpr bool linear = false;
  static constexpr bool uses_value = true;
  static double value(double a) noexcept { return counted::exp(a); }
  static double partial(double, double f) noexcept { return f; }
};

struct Log {
  static constexpr OpId id = OpId::log;
  static constexpr int arity = 1;
  static constexpr bool linear = false;
  static constexpr bool uses_value = false;
  static double value(double a) {
    detail::require_domain(a > 0.0, "log of a non-positive value");
    return counted::log(a);
  }
  static double partial(double a, double) noexcept { return 1.0 / a; }
};

struct Sqrt {
  static constexpr OpId id = OpId::sqrt;
  static constexpr int arity = 1;
  static constexpr bool linear = false;
  static constexpr bool uses_value = true;
  static double value(double a) {
    detail::require_domain(a >= 0.0, "sqrt of a negative value");
    return counted::sqrt(a);
  }
  static double partial(double, double f) noexcept { return 0.5 / f; }
};

struct Pow {
  static constexpr OpId id = OpId::pow;
  static constexpr int arity = 2;
  static constexpr bool linear = false;
  static constexpr bool uses_value = true;
  static double value(double a, double b) {
    detail::require_domain(!(a < 0.0 && std::trunc(b) != b), "pow of a negative base to a non-integer exponent");
    detail::require_domain(!(a == 0.0 && b < 0.0), "pow of zero to a negative exponent");
    return counted::pow(a, b);
  }
  // At a == 0: zero for b > 1, otherwise whatever b * 0^(b-1) evaluates to.
  static double partial_a(double a, double b, double f) noexcept {
    if (a == 0.0) return b > 1.0 ? 0.0 : b * counted::pow(a, b - 1.0);
    return b * f / a;
  }
  static double partial_b(double a, double, double f) noexcept {
    if (a == 0.0) return 0.0;
    return f * counted::log(a);
  }
};

struct Abs {
  static constexpr OpId id = OpId::abs;
  static constexpr int arity = 1;
  static constexpr bool linear = false;
  static constexpr bool uses_value = false;
  static double value(double a) noexcept { return std::abs(a); }
  static double partial(double a, double) noexcept {
    return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
  }
};

// Ties pick the first operand.
struct Max {
  static constexpr OpId id = OpId::max;
  static constexpr int arity = 2;
  static constexpr bool linear = false;
  static constexpr bool uses_value = false;
  static double value(double a, double b) noexcept { return a >= b ? a : b; }
  static double partial_a(double a, double b, double) noexcept { return a >= b ? 1.0 : 0.0; }
  static double partial_b(double a, double b, double) noexcept { return a >= b ? 0.0 : 1.0; }
};

struct Min {
  static constexpr OpId id = OpId::min;
  static constexpr int arity = 2;
  static constexpr bool linear = false;
  static constexpr bool uses_value = false;
  static double value(double a, double b) noexcept { return a <= b ? a : b; }
  static double partial_a(double a, double b, double) noexcept { return a <= b ? 1.0 : 0.0; }
  static double partial_b(double a, double b, double) noexcept { return a <= b ? 0.0 : 1.0; }
};

}  // namespace op

/// Runtime view of a catalog entry. Unary rules ignore their `b` argument.
struct OpInfo {
  OpId id;
  std::string_view name;
  int arity;
  bool transcendental;
  double (*value)(double a, double b);
  double (*partial_a)(double a, double b, double f);
  double (*partial_b)(double a, double b, double f);  // nullptr for unary ops
};

/// Calls `fn(op::X{})` with the rule struct matching `id`.
template <class Fn>
decltype(auto) visit_op(OpId id, Fn&& fn) {
  switch (id) {
    case OpId::add: return fn(op::Add{});
    case OpId::sub: return fn(op::Sub{});
    case OpId::mul: return fn(op::Mul{});
    case OpId::div: return fn(op::Div{});
    case OpId::neg: return fn(op::Neg{});
    case OpId::sin: return fn(op::Sin{});
    case OpId::cos: return fn(op::Cos{});
    case OpId::tan: return fn(op::Tan{});
    case OpId::exp: return fn(op::Exp{});
    case OpId::log: return fn(op::Log{});
    case OpId::sqrt: return fn(op::Sqrt{});
    case OpId::pow: return fn(op::Pow{});
    case OpId::abs: return fn(op::Abs{});
    case OpId::max: return fn(op::Max{});
    case OpId::min: return fn(op::Min{});
  }
  return fn(op::Add{});
}

namespace detail {
template <class Op> double unary_value(double a, double) { return Op::value(a); }
template <class Op> double unary_partial(double a, double, double f) { return Op::partial(a, f); }
template <class Op> double binary_value(double a, double b) { return Op::value(a, b); }
template <class Op> double binary_partial_a(double a, double b, double f) { return Op::partial_a(a, b, f); }
template <class Op> double binary_partial_b(double a, double b, double f) { return Op::partial_b(a, b, f); }

constexpr bool is_transcendental_op(OpId id) noexcept {
  switch (id) {
    case OpId::sin: case OpId::cos: case OpId::tan: case OpId::exp:
    case OpId::log: case OpId::sqrt: case OpId::pow:
      return true;
    default:
      return false;
  }
}

constexpr std::string_view op_name(OpId id) noexcept {
  constexpr std::array<std::string_view, 15> names{
      "add", "sub", "mul", "div", "neg", "sin", "cos", "tan",
      "exp", "log", "sqrt", "pow", "abs", "max", "min"};
  return names[static_cast<std::size_t>(id)];
}

template <class Op>
OpInfo make_op_info() {
  if constexpr (Op::arity == 1) {
    return {Op::id, op_name(Op::id), 1, is_transcendental_op(Op::id),
            &unary_value<Op>, &unary_partial<Op>, nullptr};
  } else {
    return {Op::id, op_name(Op::id), 2, is_transcendental_op(Op::id),
            &binary_value<Op>, &binary_partial_a<Op>, &binary_partial_b<Op>};
  }
}
}  // namespace detail

inline const OpInfo& op_info(OpId id) {
  static const auto table = [] {
    std::array<OpInfo, kAllOps.size()> t{};
    for (OpId o : kAllOps) {
      t[static_cast<std::size_t>(o)] = visit_op(o, []<class Op>(Op) { return detail::make_op_info<Op>(); });
    }
    return t;
  }();
  return table[static_cast<std::size_t>(id)];
}

inline constexpr std::string_view to_string(OpId id) noexcept { return detail::op_name(id); }

}  // namespace etfad
