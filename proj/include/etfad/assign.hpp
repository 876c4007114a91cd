#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "etfad/expr.hpp"
#include "etfad/fad.hpp"

namespace etfad {

// Assignment algorithms. Each one evaluates the tree rooted at `x` into
// `target`, resizing target.dx to x.size().
//
// The target may also be a leaf of x (d = d * a). Every dx(i) of a node
// depends only on leaf values and on the leaves' i-th components, so the
// loops below read component i before writing it and the new value is
// committed last; no temporary derivative buffer is needed.

namespace detail {

template <class E>
Fit checked_fit(const E& x, std::size_t n) {
  const Fit fit = x.fit(n);
  if (fit == Fit::mismatch) {
    throw SizeMismatchError("active operands of the expression have different derivative lengths (expected " +
                            std::to_string(n) + ")");
  }
  return fit;
}

template <class L, class E>
void forward_loop(L& target, const E& x, std::size_t n, Fit fit) {
  target.resize(n);
  double* out = target.dx().data();
  if (fit == Fit::full) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x.fast_dx(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = x.dx(i);
  }
}

template <bool Fast, class E, std::size_t M, std::size_t... K>
double accumulate_static(const E& x, const std::array<double, M>& partials, std::size_t i,
                         std::index_sequence<K...>) {
  return (... + (partials[K] * x.template arg<K>().template tangent<Fast>(i)));
}

template <class L, class E>
void reverse_accumulate(L& target, const E& x, std::size_t n, Fit fit) {
  if constexpr (E::kStaticArgs != kDynamicArgs) {
    constexpr std::size_t m = E::kStaticArgs;
    static_assert(m > 0, "expression has no active arguments");
    std::array<double, m> partials;
    x.compute_partials(1.0, partials.data());
    target.resize(n);
    double* out = target.dx().data();
    constexpr auto ks = std::make_index_sequence<m>{};
    if (fit == Fit::full) {
      for (std::size_t i = 0; i < n; ++i) out[i] = accumulate_static<true>(x, partials, i, ks);
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = accumulate_static<false>(x, partials, i, ks);
    }
  } else {
    using leaf_type = typename E::leaf_type;
    const std::size_t m = x.num_args();
    std::vector<double> partials(m);
    std::vector<const leaf_type*> args(m);
    if (m != 0) x.compute_partials(1.0, partials.data());
    for (std::size_t k = 0; k < m; ++k) args[k] = &x.arg(k);
    target.resize(n);
    double* out = target.dx().data();
    for (std::size_t i = 0; i < n; ++i) {
      double t = 0.0;
      if (fit == Fit::full) {
        for (std::size_t k = 0; k < m; ++k) t += partials[k] * args[k]->fast_dx(i);
      } else {
        for (std::size_t k = 0; k < m; ++k) t += partials[k] * args[k]->dx(i);
      }
      out[i] = t;
    }
  }
}

template <class E, Strategy S>
concept TreeOf = Expression<E> && std::remove_cvref_t<E>::strategy == S;

}  // namespace detail

/// Runs the cache pass of a caching tree. A no-op on non-caching trees.
template <Expression E>
void cache_pass(const E& root) {
  root.cache();
}

/// Classic expression-template assignment: val() once, then dx(i) for each
/// component, recursing through the tree every time.
template <Strategy S, class St, detail::TreeOf<S> E>
  requires(!is_caching(S))
void assign_standard(Fad<S, St>& target, const E& x) {
  const std::size_t n = x.size();
  const Fit fit = detail::checked_fit(x, n);
  const double v = x.val();
  detail::forward_loop(target, x, n, fit);
  target.val() = v;
}

/// Caching assignment: exactly one cache pass, then the standard loop, whose
/// val() and dx(i) now read cached operand values only.
template <Strategy S, class St, detail::TreeOf<S> E>
  requires(is_caching(S))
void assign_cached(Fad<S, St>& target, const E& x) {
  const std::size_t n = x.size();
  const Fit fit = detail::checked_fit(x, n);
  x.cache();
  const double v = x.val();
  detail::forward_loop(target, x, n, fit);
  target.val() = v;
}

/// Expression-level reverse mode: one reverse sweep for the partials of the
/// result w.r.t. every leaf occurrence, then dx[i] = sum_k partials[k] *
/// arg(k).dx(i). When the argument count is a compile-time constant the sum
/// is fully unrolled.
template <Strategy S, class St, detail::TreeOf<S> E>
  requires(!is_caching(S))
void assign_elr(Fad<S, St>& target, const E& x) {
  const std::size_t n = x.size();
  const Fit fit = detail::checked_fit(x, n);
  const double v = x.val();
  detail::reverse_accumulate(target, x, n, fit);
  target.val() = v;
}

/// Cache pass followed by expression-level reverse mode over cached values.
template <Strategy S, class St, detail::TreeOf<S> E>
  requires(is_caching(S))
void assign_cached_elr(Fad<S, St>& target, const E& x) {
  const std::size_t n = x.size();
  const Fit fit = detail::checked_fit(x, n);
  x.cache();
  const double v = x.val();
  detail::reverse_accumulate(target, x, n, fit);
  target.val() = v;
}

template <Strategy S, class Storage, class E>
void assign_expression(Fad<S, Storage>& target, const E& x) {
  if constexpr (S == Strategy::eager) {
    // Conversion between eager storages.
    target.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) target.dx()[i] = x.dx(i);
    target.val() = x.val();
  } else if constexpr (S == Strategy::standard) {
    assign_standard(target, x);
  } else if constexpr (S == Strategy::cached) {
    assign_cached(target, x);
  } else if constexpr (S == Strategy::elr) {
    assign_elr(target, x);
  } else {
    assign_cached_elr(target, x);
  }
}

/// Fills `out` (length root.num_args()) with seed * d(root)/d(arg k). On a
/// caching tree the cache pass must have run first.
template <LazyExpression E>
void compute_partials(const E& root, double seed, std::span<double> out) {
  if (out.size() != root.num_args()) {
    throw SizeMismatchError("partials buffer has " + std::to_string(out.size()) + " slots, expression has " +
                            std::to_string(root.num_args()) + " arguments");
  }
  if (!out.empty()) root.compute_partials(seed, out.data());
}

template <LazyExpression E>
std::vector<double> compute_partials(const E& root, double seed = 1.0) {
  std::vector<double> out(root.num_args());
  compute_partials(root, seed, std::span<double>(out));
  return out;
}

/// k-th leaf occurrence in left-to-right order.
template <LazyExpression E>
const auto& get_arg(const E& root, std::size_t k) {
  if (k >= root.num_args()) {
    throw ArgIndexError("argument index " + std::to_string(k) + " out of range for " +
                        std::to_string(root.num_args()) + " arguments");
  }
  return root.arg(k);
}

template <std::size_t K, LazyExpression E>
const auto& get_arg(const E& root) {
  return root.template arg<K>();
}

}  // namespace etfad
