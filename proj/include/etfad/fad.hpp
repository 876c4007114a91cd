#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etfad/errors.hpp"
#include "etfad/ops.hpp"
#include "etfad/strategy.hpp"
#include "etfad/traits.hpp"

namespace etfad {

/// Growable derivative array, resized at assignment.
class DynamicStorage {
 public:
  DynamicStorage() = default;
  explicit DynamicStorage(std::size_t n) : d_(n, 0.0) {}

  std::size_t size() const noexcept { return d_.size(); }
  void resize(std::size_t n) { d_.resize(n, 0.0); }
  double* data() noexcept { return d_.data(); }
  const double* data() const noexcept { return d_.data(); }

 private:
  std::vector<double> d_;
};

/// Inline derivative array of fixed capacity. The length is still chosen at
/// run time (0 for a passive value) but may never exceed `Capacity`.
template <std::size_t Capacity>
class FixedStorage {
 public:
  static constexpr std::size_t capacity = Capacity;

  FixedStorage() = default;
  explicit FixedStorage(std::size_t n) { resize(n); }

  std::size_t size() const noexcept { return n_; }
  void resize(std::size_t n) {
    if (n > Capacity) {
      throw SizeMismatchError("derivative length " + std::to_string(n) +
                              " exceeds fixed capacity " + std::to_string(Capacity));
    }
    for (std::size_t i = n_; i < n; ++i) d_[i] = 0.0;
    n_ = n;
  }
  double* data() noexcept { return d_.data(); }
  const double* data() const noexcept { return d_.data(); }

 private:
  std::array<double, Capacity> d_{};
  std::size_t n_ = 0;
};

template <Strategy S, class Storage = DynamicStorage>
class Fad;

template <Strategy S, class Storage>
inline constexpr bool is_leaf_v<Fad<S, Storage>> = true;

// Defined in assign.hpp; picks the assignment algorithm for S.
template <Strategy S, class Storage, class E>
void assign_expression(Fad<S, Storage>& target, const E& x);

/// Value plus derivative array: the vector forward-mode scalar.
///
/// With `S == Strategy::eager` every operator evaluates immediately and
/// returns a new Fad. For the lazy strategies a Fad is the leaf of expression
/// trees and the target of their assignment; `S` selects the algorithm that
/// runs at assignment time.
///
/// A Fad whose derivative array is empty is passive: it contributes its value
/// and nothing else.
template <Strategy S, class Storage>
class Fad {
 public:
  using storage_type = Storage;
  using leaf_type = Fad;
  static constexpr bool kIsExpression = true;
  static constexpr Strategy strategy = S;
  static constexpr std::size_t kStaticArgs = 1;

  Fad() = default;
  Fad(double value) : val_(value) {}  // NOLINT(google-explicit-constructor): passive constant
  Fad(std::size_t n, double value) : val_(value), dx_(n) {}

  template <Expression E>
    requires(!std::is_same_v<std::remove_cvref_t<E>, Fad> && std::remove_cvref_t<E>::strategy == S)
  Fad(const E& x) {  // NOLINT(google-explicit-constructor)
    assign_expression(*this, x);
  }

  template <Expression E>
    requires(!std::is_same_v<std::remove_cvref_t<E>, Fad> && std::remove_cvref_t<E>::strategy == S)
  Fad& operator=(const E& x) {
    assign_expression(*this, x);
    return *this;
  }

  Fad& operator=(double value) {
    val_ = value;
    dx_.resize(0);
    return *this;
  }

  /// The index-th of n independent variables: dx is the unit vector e_index.
  static Fad independent(double value, std::size_t index, std::size_t n) {
    if (index >= n) {
      throw SeedIndexError("seed index " + std::to_string(index) + " out of range for " +
                           std::to_string(n) + " independent variables");
    }
    Fad x(n, value);
    x.dx_.data()[index] = 1.0;
    return x;
  }

  std::size_t size() const noexcept { return dx_.size(); }
  bool is_passive() const noexcept { return dx_.size() == 0; }

  double val() const noexcept { return val_; }
  double& val() noexcept { return val_; }

  /// i-th derivative; 0 for a passive value.
  double dx(std::size_t i) const noexcept { return dx_.size() != 0 ? dx_.data()[i] : 0.0; }
  double fast_dx(std::size_t i) const noexcept { return dx_.data()[i]; }
  template <bool Fast>
  double tangent(std::size_t i) const noexcept {
    return Fast ? fast_dx(i) : dx(i);
  }

  std::span<const double> dx() const noexcept { return {dx_.data(), dx_.size()}; }
  std::span<double> dx() noexcept { return {dx_.data(), dx_.size()}; }

  void resize(std::size_t n) { dx_.resize(n); }

  // Leaf side of the expression interface. A leaf is a one-argument identity
  // function: its partial with respect to itself is the incoming adjoint.
  void cache() const noexcept {}
  std::size_t num_args() const noexcept { return 1; }
  void compute_partials(double bar, double* partials) const noexcept { partials[0] = bar; }
  template <std::size_t K>
  const Fad& arg() const noexcept {
    static_assert(K == 0, "a leaf has exactly one argument");
    return *this;
  }
  const Fad& arg(std::size_t k) const {
    if (k != 0) throw ArgIndexError("leaf argument index " + std::to_string(k) + " out of range");
    return *this;
  }
  Fit fit(std::size_t n) const noexcept {
    if (dx_.size() == n) return Fit::full;
    return dx_.size() == 0 ? Fit::partial : Fit::mismatch;
  }
  bool references(const void* p) const noexcept { return p == this; }

 private:
  double val_ = 0.0;
  Storage dx_;
};

/// The eager dual-number type.
using DualVector = Fad<Strategy::eager>;

template <Strategy S = Strategy::eager, class Storage = DynamicStorage>
Fad<S, Storage> make_independent(double value, std::size_t index, std::size_t n) {
  return Fad<S, Storage>::independent(value, index, n);
}

namespace detail {

[[noreturn]] inline void throw_size_mismatch(std::size_t a, std::size_t b) {
  throw SizeMismatchError("active operands have different derivative lengths (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
}

template <class Op, class Storage>
Fad<Strategy::eager, Storage> eager_unary(double av, std::span<const double> adx) {
  const double f = Op::value(av);
  Fad<Strategy::eager, Storage> r(adx.size(), f);
  if (adx.empty()) return r;
  double* out = r.dx().data();
  if constexpr (Op::linear) {
    for (std::size_t i = 0; i < adx.size(); ++i) out[i] = Op::tangent(adx[i]);
  } else {
    const double p = Op::partial(av, f);
    for (std::size_t i = 0; i < adx.size(); ++i) out[i] = p * adx[i];
  }
  return r;
}

// An operand with an empty span is passive and contributes no term.
template <class Op, class Storage>
Fad<Strategy::eager, Storage> eager_binary(double av, std::span<const double> adx, double bv,
                                           std::span<const double> bdx) {
  if (!adx.empty() && !bdx.empty() && adx.size() != bdx.size()) {
    throw_size_mismatch(adx.size(), bdx.size());
  }
  const double f = Op::value(av, bv);
  const std::size_t n = std::max(adx.size(), bdx.size());
  Fad<Strategy::eager, Storage> r(n, f);
  if (n == 0) return r;
  double* out = r.dx().data();
  if constexpr (Op::linear) {
    if (!adx.empty() && !bdx.empty()) {
      for (std::size_t i = 0; i < n; ++i) out[i] = Op::tangent(adx[i], bdx[i]);
    } else if (!adx.empty()) {
      for (std::size_t i = 0; i < n; ++i) out[i] = Op::tangent(adx[i], 0.0);
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = Op::tangent(0.0, bdx[i]);
    }
  } else {
    if (!adx.empty() && !bdx.empty()) {
      const double pa = Op::partial_a(av, bv, f);
      const double pb = Op::partial_b(av, bv, f);
      for (std::size_t i = 0; i < n; ++i) out[i] = pa * adx[i] + pb * bdx[i];
    } else if (!adx.empty()) {
      const double pa = Op::partial_a(av, bv, f);
      for (std::size_t i = 0; i < n; ++i) out[i] = pa * adx[i];
    } else {
      const double pb = Op::partial_b(av, bv, f);
      for (std::size_t i = 0; i < n; ++i) out[i] = pb * bdx[i];
    }
  }
  return r;
}

}  // namespace detail

// Eager operators. Each one runs the value rule once and one loop over the
// derivative components.

#define ETFAD_EAGER_UNARY(NAME, OP)                                                  \
  template <class St>                                                                \
  Fad<Strategy::eager, St> NAME(const Fad<Strategy::eager, St>& a) {                 \
    return detail::eager_unary<OP, St>(a.val(), a.dx());                             \
  }

#define ETFAD_EAGER_BINARY(NAME, OP)                                                 \
  template <class St>                                                                \
  Fad<Strategy::eager, St> NAME(const Fad<Strategy::eager, St>& a,                   \
                                const Fad<Strategy::eager, St>& b) {                 \
    return detail::eager_binary<OP, St>(a.val(), a.dx(), b.val(), b.dx());           \
  }                                                                                  \
  template <class St>                                                                \
  Fad<Strategy::eager, St> NAME(const Fad<Strategy::eager, St>& a, double b) {       \
    return detail::eager_binary<OP, St>(a.val(), a.dx(), b, {});                     \
  }                                                                                  \
  template <class St>                                                                \
  Fad<Strategy::eager, St> NAME(double a, const Fad<Strategy::eager, St>& b) {       \
    return detail::eager_binary<OP, St>(a, {}, b.val(), b.dx());                     \
  }

ETFAD_EAGER_BINARY(operator+, op::Add)
ETFAD_EAGER_BINARY(operator-, op::Sub)
ETFAD_EAGER_BINARY(operator*, op::Mul)
ETFAD_EAGER_BINARY(operator/, op::Div)
ETFAD_EAGER_BINARY(pow, op::Pow)
ETFAD_EAGER_BINARY(max, op::Max)
ETFAD_EAGER_BINARY(min, op::Min)
ETFAD_EAGER_UNARY(operator-, op::Neg)
ETFAD_EAGER_UNARY(sin, op::Sin)
ETFAD_EAGER_UNARY(cos, op::Cos)
ETFAD_EAGER_UNARY(tan, op::Tan)
ETFAD_EAGER_UNARY(exp, op::Exp)
ETFAD_EAGER_UNARY(log, op::Log)
ETFAD_EAGER_UNARY(sqrt, op::Sqrt)
ETFAD_EAGER_UNARY(abs, op::Abs)

#undef ETFAD_EAGER_UNARY
#undef ETFAD_EAGER_BINARY

/// Applies catalog operation `id` eagerly. `b` must be given exactly when the
/// operation is binary.
template <class St>
Fad<Strategy::eager, St> dual_apply(OpId id, const Fad<Strategy::eager, St>& a,
                                    const Fad<Strategy::eager, St>* b = nullptr) {
  return visit_op(id, [&]<class Op>(Op) -> Fad<Strategy::eager, St> {
    if constexpr (Op::arity == 1) {
      if (b != nullptr) throw Error(std::string(to_string(id)) + " takes one operand");
      return detail::eager_unary<Op, St>(a.val(), a.dx());
    } else {
      if (b == nullptr) throw Error(std::string(to_string(id)) + " takes two operands");
      return detail::eager_binary<Op, St>(a.val(), a.dx(), b->val(), b->dx());
    }
  });
}

template <class St>
Fad<Strategy::eager, St> dual_apply(OpId id, const Fad<Strategy::eager, St>& a,
                                    const Fad<Strategy::eager, St>& b) {
  return dual_apply(id, a, &b);
}

}  // namespace etfad
