#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "etfad/assign.hpp"
#include "etfad/erased.hpp"
#include "etfad/oracle.hpp"

namespace etfad::oracle {

/// How leaf occurrences of a RandomTree map onto Fad objects.
enum class LeafBinding {
  /// One Fad per independent variable, seeded as the j-th of N. Repeated
  /// occurrences share it.
  shared_variables,
  /// One Fad per active leaf occurrence, in left-to-right order; occurrence
  /// k is seeded with e_k over (number of occurrences) components.
  per_occurrence,
};

/// A RandomTree built out of type-erased expression nodes for strategy S.
template <Strategy S, class Storage = DynamicStorage>
class MaterializedTree {
 public:
  using Leaf = Fad<S, Storage>;
  using Node = AnyNode<S, Leaf>;
  using Ref = AnyRef<S, Leaf>;

  explicit MaterializedTree(const RandomTree& tree, LeafBinding binding = LeafBinding::shared_variables) {
    const auto& tn = tree.nodes();
    if (binding == LeafBinding::shared_variables) {
      const std::size_t n = tree.n_components();
      variables_.reserve(n);
      for (std::size_t j = 0; j < n; ++j) variables_.push_back(Leaf::independent(tree.variables()[j], j, n));
    } else {
      const auto order = tree.active_leaves_in_order();
      occurrence_of_.assign(tn.size(), 0);
      variables_.reserve(order.size());
      for (std::size_t k = 0; k < order.size(); ++k) {
        occurrence_of_[order[k]] = k;
        variables_.push_back(Leaf::independent(tree.variables()[tn[order[k]].slot], k, order.size()));
      }
    }
    passives_.reserve(tree.passives().size());
    for (double p : tree.passives()) passives_.emplace_back(p);

    nodes_.resize(tn.size());
    for (std::size_t i = 0; i < tn.size(); ++i) {
      const TreeNode& n = tn[i];
      switch (n.kind) {
        case NodeKind::variable: {
          const std::size_t slot = binding == LeafBinding::shared_variables ? n.slot : occurrence_of_[i];
          nodes_[i] = std::make_unique<ErasedLeaf<S, Leaf>>(variables_[slot]);
          break;
        }
        case NodeKind::passive:
          nodes_[i] = std::make_unique<ErasedLeaf<S, Leaf>>(passives_[n.slot]);
          break;
        case NodeKind::constant:
          break;  // folded into the parent as a ConstExpr operand
        case NodeKind::unary:
          nodes_[i] = make_unary(n.op, ref(n.first));
          break;
        case NodeKind::binary:
          nodes_[i] = make_binary(n.op, tn, n.first, n.second);
          break;
      }
    }
  }

  MaterializedTree(const MaterializedTree&) = delete;
  MaterializedTree& operator=(const MaterializedTree&) = delete;
  MaterializedTree(MaterializedTree&&) noexcept = default;

  Ref root() const { return Ref(*nodes_.back()); }

  /// Independent variables (shared binding) or leaf occurrences (per
  /// occurrence binding, left-to-right).
  std::span<Leaf> leaves() noexcept { return variables_; }
  std::span<const Leaf> leaves() const noexcept { return variables_; }

  std::size_t node_count() const noexcept {
    std::size_t c = 0;
    for (const auto& p : nodes_) c += p != nullptr;
    return c;
  }
  void reset_cache_visits() const {
    for (const auto& p : nodes_) {
      if (p) p->reset_cache_visits();
    }
  }
  /// Cache visits per non-constant node.
  std::vector<std::size_t> cache_visits() const {
    std::vector<std::size_t> v;
    for (const auto& p : nodes_) {
      if (p) v.push_back(p->cache_visits());
    }
    return v;
  }

 private:
  Ref ref(std::size_t i) const { return Ref(*nodes_[i]); }

  static std::unique_ptr<Node> make_unary(OpId id, Ref a) {
    return visit_op(id, [&]<class Op>(Op) -> std::unique_ptr<Node> {
      if constexpr (Op::arity == 1) {
        return erase(UnaryExpr<S, Op, Ref>(a));
      } else {
        throw std::logic_error("binary op in unary node");
      }
    });
  }

  std::unique_ptr<Node> make_binary(OpId id, const std::vector<TreeNode>& tn, std::size_t a, std::size_t b) const {
    const bool ca = tn[a].kind == NodeKind::constant;
    const bool cb = tn[b].kind == NodeKind::constant;
    return visit_op(id, [&]<class Op>(Op) -> std::unique_ptr<Node> {
      if constexpr (Op::arity == 2) {
        using C = ConstExpr<S>;
        if (ca) return erase(BinaryExpr<S, Op, C, Ref>(C(tn[a].constant), ref(b)));
        if (cb) return erase(BinaryExpr<S, Op, Ref, C>(ref(a), C(tn[b].constant)));
        return erase(BinaryExpr<S, Op, Ref, Ref>(ref(a), ref(b)));
      } else {
        throw std::logic_error("unary op in binary node");
      }
    });
  }

  std::vector<Leaf> variables_;
  std::vector<Leaf> passives_;
  std::vector<std::size_t> occurrence_of_;
  std::vector<std::unique_ptr<Node>> nodes_;
};

struct Evaluation {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Eager evaluation, node by node, through dual_apply.
inline Evaluation evaluate_eager(const RandomTree& tree) {
  const std::size_t n = tree.n_components();
  std::vector<DualVector> v(tree.nodes().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const TreeNode& t = tree.nodes()[i];
    switch (t.kind) {
      case NodeKind::variable: v[i] = make_independent(tree.variables()[t.slot], t.slot, n); break;
      case NodeKind::passive: v[i] = DualVector(tree.passives()[t.slot]); break;
      case NodeKind::constant: v[i] = DualVector(t.constant); break;
      case NodeKind::unary: v[i] = dual_apply(t.op, v[t.first]); break;
      case NodeKind::binary: v[i] = dual_apply(t.op, v[t.first], v[t.second]); break;
    }
  }
  Evaluation e;
  e.value = v.back().val();
  e.gradient.assign(v.back().dx().begin(), v.back().dx().end());
  e.gradient.resize(n, 0.0);
  return e;
}

/// Assigns the tree with strategy S's algorithm.
template <Strategy S>
Evaluation evaluate_lazy(const RandomTree& tree) {
  static_assert(is_lazy(S));
  MaterializedTree<S> m(tree);
  Fad<S> y;
  y = m.root();
  Evaluation e;
  e.value = y.val();
  e.gradient.assign(y.dx().begin(), y.dx().end());
  e.gradient.resize(tree.n_components(), 0.0);
  return e;
}

inline Evaluation evaluate(const RandomTree& tree, Strategy s) {
  switch (s) {
    case Strategy::eager: return evaluate_eager(tree);
    case Strategy::standard: return evaluate_lazy<Strategy::standard>(tree);
    case Strategy::cached: return evaluate_lazy<Strategy::cached>(tree);
    case Strategy::elr: return evaluate_lazy<Strategy::elr>(tree);
    case Strategy::cached_elr: return evaluate_lazy<Strategy::cached_elr>(tree);
  }
  return evaluate_eager(tree);
}

}  // namespace etfad::oracle
