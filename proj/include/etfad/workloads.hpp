#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "etfad/assign.hpp"
#include "etfad/expr.hpp"
#include "etfad/fad.hpp"

namespace etfad {

/// Largest expression size the compiled workloads are instantiated for.
inline constexpr std::size_t kMaxStaticM = 24;

/// Calls fn(std::integral_constant<std::size_t, M>{}) for the run-time m.
template <class Fn>
void with_static_m(std::size_t m, Fn&& fn) {
  if (m == 0 || m > kMaxStaticM) {
    throw std::out_of_range("expression size " + std::to_string(m) + " outside [1, " +
                            std::to_string(kMaxStaticM) + "]");
  }
  [&]<std::size_t... I>(std::index_sequence<I...>) {
    (void)((m == I + 1 ? (fn(std::integral_constant<std::size_t, I + 1>{}), true) : false) || ...);
  }(std::make_index_sequence<kMaxStaticM>{});
}

/// Calls fn(std::integral_constant<Strategy, S>{}) for the run-time s.
template <class Fn>
void with_strategy(Strategy s, Fn&& fn) {
  switch (s) {
    case Strategy::eager: fn(std::integral_constant<Strategy, Strategy::eager>{}); return;
    case Strategy::standard: fn(std::integral_constant<Strategy, Strategy::standard>{}); return;
    case Strategy::cached: fn(std::integral_constant<Strategy, Strategy::cached>{}); return;
    case Strategy::elr: fn(std::integral_constant<Strategy, Strategy::elr>{}); return;
    case Strategy::cached_elr: fn(std::integral_constant<Strategy, Strategy::cached_elr>{}); return;
  }
}

/// x[0 % n] * x[1 % n] * ... * x[(M-1) % n], grouped left to right. For lazy
/// leaves this is an expression tree; for doubles and eager duals it is the
/// evaluated product.
template <std::size_t M, class T>
decltype(auto) product(std::span<const T> x) {
  static_assert(M >= 1);
  const std::size_t n = x.size();
  return [&]<std::size_t... I>(std::index_sequence<I...>) -> decltype(auto) {
    return (... * x[I % n]);
  }(std::make_index_sequence<M>{});
}

/// sin applied M times to x.
template <std::size_t M, class T>
decltype(auto) nested_sine(const T& x) {
  if constexpr (M == 0) {
    return (x);
  } else {
    using std::sin;
    return sin(nested_sine<M - 1>(x));
  }
}

struct WorkloadResult {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Evaluates the product of m factors, factor i being independent variable
/// (i mod n) with value values[i mod n].
WorkloadResult evaluate_mult(Strategy s, std::size_t m, std::span<const double> values);

/// Evaluates nested sine of depth m; x is the first of n independents.
WorkloadResult evaluate_nested(Strategy s, std::size_t m, double x, std::size_t n);

}  // namespace etfad
