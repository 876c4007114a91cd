#pragma once

#include <algorithm>
#include <cstddef>
#include <type_traits>

#include "etfad/fad.hpp"
#include "etfad/ops.hpp"
#include "etfad/traits.hpp"

namespace etfad {

/// A passive real inside an expression: no derivative components and no
/// expression arguments.
template <Strategy S>
class ConstExpr {
 public:
  using leaf_type = void;
  static constexpr bool kIsExpression = true;
  static constexpr Strategy strategy = S;
  static constexpr std::size_t kStaticArgs = 0;

  explicit ConstExpr(double value) noexcept : value_(value) {}

  std::size_t size() const noexcept { return 0; }
  double val() const noexcept { return value_; }
  double dx(std::size_t) const noexcept { return 0.0; }
  double fast_dx(std::size_t) const noexcept { return 0.0; }
  template <bool Fast>
  double tangent(std::size_t) const noexcept { return 0.0; }
  void cache() const noexcept {}
  std::size_t num_args() const noexcept { return 0; }
  void compute_partials(double, double*) const noexcept {}
  Fit fit(std::size_t) const noexcept { return Fit::full; }
  bool references(const void*) const noexcept { return false; }

 private:
  double value_;
};

template <Strategy S>
inline constexpr bool is_constant_v<ConstExpr<S>> = true;

namespace detail {

template <bool Enabled>
struct UnaryCache {};
template <>
struct UnaryCache<true> {
  double f = 0.0;
  double p = 0.0;
};

template <bool Enabled>
struct BinaryCache {};
template <>
struct BinaryCache<true> {
  double f = 0.0;
  double pa = 0.0;
  double pb = 0.0;
};

template <class A, class B>
using binary_leaf_t = std::conditional_t<is_constant_v<A>, typename B::leaf_type, typename A::leaf_type>;

}  // namespace detail

/// Lazy unary operation node.
///
/// Non-caching strategies evaluate the operand value on every val(), dx(i)
/// and compute_partials() call, exactly like the classic expression template.
/// Caching strategies compute the value and partial once in cache(), which
/// the assignment calls before anything else; afterwards val() and dx(i)
/// only read the cache and the operand's tangents. Linear ops keep no cache.
template <Strategy S, class Op, class A>
class UnaryExpr {
  static constexpr bool kCaching = is_caching(S) && !Op::linear;

 public:
  using op_type = Op;
  using operand_type = A;
  using leaf_type = typename A::leaf_type;
  static constexpr bool kIsExpression = true;
  static constexpr Strategy strategy = S;
  static constexpr std::size_t kStaticArgs = A::kStaticArgs;

  static_assert(Op::arity == 1);
  static_assert(!is_constant_v<A>, "unary op on a constant is a plain real");

  explicit UnaryExpr(const A& a) : a_(a) {}

  const A& operand() const noexcept { return a_; }

  std::size_t size() const { return a_.size(); }
  Fit fit(std::size_t n) const { return a_.fit(n); }
  bool references(const void* p) const { return a_.references(p); }

  std::size_t num_args() const {
    if constexpr (kStaticArgs != kDynamicArgs) {
      return kStaticArgs;
    } else {
      return a_.num_args();
    }
  }

  void cache() const {
    a_.cache();
    if constexpr (kCaching) {
      const double av = a_.val();
      cache_.f = Op::value(av);
      cache_.p = Op::partial(av, cache_.f);
    }
  }

  double val() const {
    if constexpr (kCaching) {
      return cache_.f;
    } else {
      return Op::value(a_.val());
    }
  }

  template <bool Fast>
  double tangent(std::size_t i) const {
    if constexpr (Op::linear) {
      return Op::tangent(detail::tangent<Fast>(a_, i));
    } else if constexpr (kCaching) {
      return cache_.p * detail::tangent<Fast>(a_, i);
    } else {
      return partial() * detail::tangent<Fast>(a_, i);
    }
  }
  double dx(std::size_t i) const { return tangent<false>(i); }
  double fast_dx(std::size_t i) const { return tangent<true>(i); }

  void compute_partials(double bar, double* partials) const {
    if constexpr (Op::linear) {
      a_.compute_partials(Op::tangent(bar), partials);
    } else if constexpr (kCaching) {
      a_.compute_partials(bar * cache_.p, partials);
    } else {
      a_.compute_partials(bar * partial(), partials);
    }
  }

  template <std::size_t K>
  const leaf_type& arg() const {
    return a_.template arg<K>();
  }
  const leaf_type& arg(std::size_t k) const { return a_.arg(k); }

 private:
  double partial() const {
    const double av = a_.val();
    if constexpr (Op::uses_value) {
      return Op::partial(av, Op::value(av));
    } else {
      return Op::partial(av, 0.0);
    }
  }

  detail::stored_t<A> a_;
  [[no_unique_address]] mutable detail::UnaryCache<kCaching> cache_;
};

/// Lazy binary operation node. A ConstExpr operand is passive: its partial
/// is never formed and it occupies no argument slots.
template <Strategy S, class Op, class A, class B>
class BinaryExpr {
  static constexpr bool kCaching = is_caching(S) && !Op::linear;
  static constexpr bool kAConst = is_constant_v<A>;
  static constexpr bool kBConst = is_constant_v<B>;

 public:
  using op_type = Op;
  using first_type = A;
  using second_type = B;
  using leaf_type = detail::binary_leaf_t<A, B>;
  static constexpr bool kIsExpression = true;
  static constexpr Strategy strategy = S;
  static constexpr std::size_t kStaticArgs =
      (A::kStaticArgs == kDynamicArgs || B::kStaticArgs == kDynamicArgs)
          ? kDynamicArgs
          : A::kStaticArgs + B::kStaticArgs;

  static_assert(Op::arity == 2);
  static_assert(!(kAConst && kBConst), "binary op on two constants is a plain real");
  static_assert(kAConst || kBConst ||
                    std::is_same_v<typename A::leaf_type, typename B::leaf_type>,
                "operands must share one leaf type");

  BinaryExpr(const A& a, const B& b) : a_(a), b_(b) {}

  const A& first() const noexcept { return a_; }
  const B& second() const noexcept { return b_; }

  std::size_t size() const { return std::max(a_.size(), b_.size()); }
  Fit fit(std::size_t n) const { return combine(a_.fit(n), b_.fit(n)); }
  bool references(const void* p) const { return a_.references(p) || b_.references(p); }

  std::size_t num_args() const {
    if constexpr (kStaticArgs != kDynamicArgs) {
      return kStaticArgs;
    } else {
      return a_.num_args() + b_.num_args();
    }
  }

  void cache() const {
    a_.cache();
    b_.cache();
    if constexpr (kCaching) {
      const double av = a_.val();
      const double bv = b_.val();
      cache_.f = Op::value(av, bv);
      if constexpr (!kAConst) cache_.pa = Op::partial_a(av, bv, cache_.f);
      if constexpr (!kBConst) cache_.pb = Op::partial_b(av, bv, cache_.f);
    }
  }

  double val() const {
    if constexpr (kCaching) {
      return cache_.f;
    } else {
      return Op::value(a_.val(), b_.val());
    }
  }

  template <bool Fast>
  double tangent(std::size_t i) const {
    if constexpr (Op::linear) {
      return Op::tangent(detail::tangent<Fast>(a_, i), detail::tangent<Fast>(b_, i));
    } else if constexpr (kCaching) {
      if constexpr (kAConst) {
        return cache_.pb * detail::tangent<Fast>(b_, i);
      } else if constexpr (kBConst) {
        return cache_.pa * detail::tangent<Fast>(a_, i);
      } else {
        return cache_.pa * detail::tangent<Fast>(a_, i) + cache_.pb * detail::tangent<Fast>(b_, i);
      }
    } else {
      const double av = a_.val();
      const double bv = b_.val();
      const double f = value_for_partials(av, bv);
      if constexpr (kAConst) {
        return Op::partial_b(av, bv, f) * detail::tangent<Fast>(b_, i);
      } else if constexpr (kBConst) {
        return Op::partial_a(av, bv, f) * detail::tangent<Fast>(a_, i);
      } else {
        return Op::partial_a(av, bv, f) * detail::tangent<Fast>(a_, i) +
               Op::partial_b(av, bv, f) * detail::tangent<Fast>(b_, i);
      }
    }
  }
  double dx(std::size_t i) const { return tangent<false>(i); }
  double fast_dx(std::size_t i) const { return tangent<true>(i); }

  /// Reverse sweep: hands each operand its adjoint. Partials of the first
  /// operand fill the first a.num_args() slots, the second operand's the rest.
  void compute_partials(double bar, double* partials) const {
    if constexpr (Op::linear) {
      if constexpr (!kAConst) a_.compute_partials(bar * Op::partial_a(0.0, 0.0, 0.0), partials);
      if constexpr (!kBConst) b_.compute_partials(bar * Op::partial_b(0.0, 0.0, 0.0), partials + a_.num_args());
    } else if constexpr (kCaching) {
      if constexpr (!kAConst) a_.compute_partials(bar * cache_.pa, partials);
      if constexpr (!kBConst) b_.compute_partials(bar * cache_.pb, partials + a_.num_args());
    } else {
      const double av = a_.val();
      const double bv = b_.val();
      const double f = value_for_partials(av, bv);
      if constexpr (!kAConst) a_.compute_partials(bar * Op::partial_a(av, bv, f), partials);
      if constexpr (!kBConst) b_.compute_partials(bar * Op::partial_b(av, bv, f), partials + a_.num_args());
    }
  }

  template <std::size_t K>
  const leaf_type& arg() const {
    static_assert(kStaticArgs != kDynamicArgs && K < kStaticArgs, "argument index out of range");
    if constexpr (K < A::kStaticArgs) {
      return a_.template arg<K>();
    } else {
      return b_.template arg<K - A::kStaticArgs>();
    }
  }

  const leaf_type& arg(std::size_t k) const {
    if constexpr (kAConst) {
      return b_.arg(k);
    } else if constexpr (kBConst) {
      return a_.arg(k);
    } else {
      const std::size_t na = a_.num_args();
      return k < na ? a_.arg(k) : b_.arg(k - na);
    }
  }

 private:
  static double value_for_partials(double av, double bv) {
    if constexpr (Op::uses_value) {
      return Op::value(av, bv);
    } else {
      return 0.0;
    }
  }

  detail::stored_t<A> a_;
  detail::stored_t<B> b_;
  [[no_unique_address]] mutable detail::BinaryCache<kCaching> cache_;
};

/// Builds an operation node without evaluating anything.
template <class Op, LazyExpression A>
auto build_expr(const A& a) {
  return UnaryExpr<A::strategy, Op, A>(a);
}

template <class Op, LazyExpression A, LazyExpression B>
  requires(A::strategy == B::strategy)
auto build_expr(const A& a, const B& b) {
  return BinaryExpr<A::strategy, Op, A, B>(a, b);
}

template <class Op, LazyExpression A>
auto build_expr(const A& a, double b) {
  return BinaryExpr<A::strategy, Op, A, ConstExpr<A::strategy>>(a, ConstExpr<A::strategy>(b));
}

template <class Op, LazyExpression B>
auto build_expr(double a, const B& b) {
  return BinaryExpr<B::strategy, Op, ConstExpr<B::strategy>, B>(ConstExpr<B::strategy>(a), b);
}

#define ETFAD_LAZY_UNARY(NAME, OP)                                \
  template <LazyExpression A>                                     \
  auto NAME(const A& a) {                                         \
    return build_expr<OP>(a);                                     \
  }

#define ETFAD_LAZY_BINARY(NAME, OP)                               \
  template <LazyExpression A, LazyExpression B>                   \
    requires(A::strategy == B::strategy)                          \
  auto NAME(const A& a, const B& b) {                             \
    return build_expr<OP>(a, b);                                  \
  }                                                               \
  template <LazyExpression A>                                     \
  auto NAME(const A& a, double b) {                               \
    return build_expr<OP>(a, b);                                  \
  }                                                               \
  template <LazyExpression B>                                     \
  auto NAME(double a, const B& b) {                               \
    return build_expr<OP>(a, b);                                  \
  }

ETFAD_LAZY_BINARY(operator+, op::Add)
ETFAD_LAZY_BINARY(operator-, op::Sub)
ETFAD_LAZY_BINARY(operator*, op::Mul)
ETFAD_LAZY_BINARY(operator/, op::Div)
ETFAD_LAZY_BINARY(pow, op::Pow)
ETFAD_LAZY_BINARY(max, op::Max)
ETFAD_LAZY_BINARY(min, op::Min)
ETFAD_LAZY_UNARY(operator-, op::Neg)
ETFAD_LAZY_UNARY(sin, op::Sin)
ETFAD_LAZY_UNARY(cos, op::Cos)
ETFAD_LAZY_UNARY(tan, op::Tan)
ETFAD_LAZY_UNARY(exp, op::Exp)
ETFAD_LAZY_UNARY(log, op::Log)
ETFAD_LAZY_UNARY(sqrt, op::Sqrt)
ETFAD_LAZY_UNARY(abs, op::Abs)

#undef ETFAD_LAZY_UNARY
#undef ETFAD_LAZY_BINARY

}  // namespace etfad
