#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>

#include "etfad/errors.hpp"
#include "etfad/expr.hpp"

namespace etfad {

// Type-erased expression nodes for trees whose shape is only known at run
// time. The statically typed nodes from expr.hpp are reused unchanged with
// AnyRef children, so erased trees run the very same per-operation code as
// compiled expressions; only child access goes through a virtual call.

/// Polymorphic node. Every cache() call on a node is tallied so tests can
/// check that the cache pass touches each node exactly once.
template <Strategy S, class Leaf>
class AnyNode {
 public:
  virtual ~AnyNode() = default;

  virtual std::size_t size() const = 0;
  virtual double val() const = 0;
  virtual double dx(std::size_t i) const = 0;
  virtual double fast_dx(std::size_t i) const = 0;
  virtual std::size_t num_args() const = 0;
  virtual void compute_partials(double bar, double* partials) const = 0;
  virtual const Leaf& arg(std::size_t k) const = 0;
  virtual Fit fit(std::size_t n) const = 0;
  virtual bool references(const void* p) const = 0;

  void cache() const {
    ++cache_visits_;
    do_cache();
  }
  std::size_t cache_visits() const noexcept { return cache_visits_; }
  void reset_cache_visits() const noexcept { cache_visits_ = 0; }

 protected:
  virtual void do_cache() const = 0;

 private:
  mutable std::size_t cache_visits_ = 0;
};

/// Non-owning handle to an AnyNode; itself an expression, so it can be the
/// operand of any node type.
template <Strategy S, class Leaf>
class AnyRef {
 public:
  using leaf_type = Leaf;
  static constexpr bool kIsExpression = true;
  static constexpr Strategy strategy = S;
  static constexpr std::size_t kStaticArgs = kDynamicArgs;

  explicit AnyRef(const AnyNode<S, Leaf>& node) noexcept : node_(&node) {}

  const AnyNode<S, Leaf>& node() const noexcept { return *node_; }

  std::size_t size() const { return node_->size(); }
  double val() const { return node_->val(); }
  double dx(std::size_t i) const { return node_->dx(i); }
  double fast_dx(std::size_t i) const { return node_->fast_dx(i); }
  template <bool Fast>
  double tangent(std::size_t i) const {
    return Fast ? node_->fast_dx(i) : node_->dx(i);
  }
  void cache() const { node_->cache(); }
  std::size_t num_args() const { return node_->num_args(); }
  void compute_partials(double bar, double* partials) const { node_->compute_partials(bar, partials); }
  const Leaf& arg(std::size_t k) const { return node_->arg(k); }
  Fit fit(std::size_t n) const { return node_->fit(n); }
  bool references(const void* p) const { return node_->references(p); }

 private:
  const AnyNode<S, Leaf>* node_;
};

/// Owns a statically typed node whose children are AnyRefs.
template <class E>
class ErasedExpr final : public AnyNode<E::strategy, typename E::leaf_type> {
 public:
  using Leaf = typename E::leaf_type;

  explicit ErasedExpr(E expr) : expr_(std::move(expr)), num_args_(expr_.num_args()) {}

  std::size_t size() const override { return expr_.size(); }
  double val() const override { return expr_.val(); }
  double dx(std::size_t i) const override { return expr_.dx(i); }
  double fast_dx(std::size_t i) const override { return expr_.fast_dx(i); }
  std::size_t num_args() const override { return num_args_; }
  void compute_partials(double bar, double* partials) const override { expr_.compute_partials(bar, partials); }
  const Leaf& arg(std::size_t k) const override {
    if (k >= num_args_) throw ArgIndexError("argument index " + std::to_string(k) + " out of range");
    return expr_.arg(k);
  }
  Fit fit(std::size_t n) const override { return expr_.fit(n); }
  bool references(const void* p) const override { return expr_.references(p); }

 protected:
  void do_cache() const override { expr_.cache(); }

 private:
  E expr_;
  std::size_t num_args_;  // trees are immutable once built
};

/// Leaf occurrence. A passive leaf (empty dx) takes no argument slot.
template <Strategy S, class Leaf>
class ErasedLeaf final : public AnyNode<S, Leaf> {
 public:
  explicit ErasedLeaf(const Leaf& leaf) noexcept : leaf_(leaf) {}

  std::size_t size() const override { return leaf_.size(); }
  double val() const override { return leaf_.val(); }
  double dx(std::size_t i) const override { return leaf_.dx(i); }
  double fast_dx(std::size_t i) const override { return leaf_.fast_dx(i); }
  std::size_t num_args() const override { return leaf_.is_passive() ? 0 : 1; }
  void compute_partials(double bar, double* partials) const override {
    if (!leaf_.is_passive()) partials[0] = bar;
  }
  const Leaf& arg(std::size_t k) const override {
    if (k >= num_args()) throw ArgIndexError("leaf argument index " + std::to_string(k) + " out of range");
    return leaf_;
  }
  Fit fit(std::size_t n) const override { return leaf_.fit(n); }
  bool references(const void* p) const override { return leaf_.references(p); }

 protected:
  void do_cache() const override {}

 private:
  const Leaf& leaf_;
};

template <class E>
std::unique_ptr<AnyNode<E::strategy, typename E::leaf_type>> erase(E expr) {
  return std::make_unique<ErasedExpr<E>>(std::move(expr));
}

}  // namespace etfad
