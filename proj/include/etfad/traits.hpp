#pragma once

#include <concepts>
#include <cstddef>
#include <limits>
#include <type_traits>

#include "etfad/strategy.hpp"

namespace etfad {

/// Marks an expression whose argument count is only known at run time.
inline constexpr std::size_t kDynamicArgs = std::numeric_limits<std::size_t>::max();

/// How the derivative lengths of an expression's leaves relate to a target
/// length n: every active leaf has exactly n components (`full`), some leaves
/// are passive (`partial`), or some active leaf disagrees (`mismatch`).
enum class Fit : unsigned char { full = 0, partial = 1, mismatch = 2 };

constexpr Fit combine(Fit a, Fit b) noexcept { return a > b ? a : b; }

/// Anything that can serve as a node of an expression tree: leaves,
/// constants, operation nodes and type-erased handles.
template <class E>
concept Expression = requires {
  { std::remove_cvref_t<E>::kIsExpression } -> std::convertible_to<bool>;
  { std::remove_cvref_t<E>::strategy } -> std::convertible_to<Strategy>;
  { std::remove_cvref_t<E>::kStaticArgs } -> std::convertible_to<std::size_t>;
};

/// Expressions that build trees instead of evaluating eagerly.
template <class E>
concept LazyExpression = Expression<E> && is_lazy(std::remove_cvref_t<E>::strategy);

template <class E>
inline constexpr bool is_leaf_v = false;

template <class E>
inline constexpr bool is_constant_v = false;

template <class E>
inline constexpr bool has_static_args_v = std::remove_cvref_t<E>::kStaticArgs != kDynamicArgs;

namespace detail {

// Leaves are held by reference, every other node by value. An expression is
// therefore valid for as long as the leaf variables it mentions are alive,
// independently of the temporaries created while building it.
template <class E>
using stored_t = std::conditional_t<is_leaf_v<E>, const E&, E>;

template <bool Fast, class E>
double tangent(const E& e, std::size_t i) {
  if constexpr (Fast) {
    return e.fast_dx(i);
  } else {
    return e.dx(i);
  }
}

}  // namespace detail
}  // namespace etfad
