#pragma once

// The C, GC, CGC and RCGC rebalancing routines.
//
// Every routine works on an owning slot and leaves the new subtree root in it.
// Grandchild weights under an absent child are the phantom value 1/2, which
// keeps a leaf (weight 2, grandchildren 1/2) from looking grandchild-heavy.

#include <sstream>

#include "gcb/node.hpp"
#include "gcb/params.hpp"

namespace gcb {

namespace detail {

inline void emit(const rotation_context& ctx, const rebalance_event& e) {
  if (ctx.observer) ctx.observer->on_rebalance(e);
  if (ctx.events && e.rotation != rotation_kind::none) ctx.events->push_back(e);
}

inline void audit_exclusive(const rotation_context& ctx, int holding, const char* routine,
                            weight_t w) {
  if (ctx.audit && holding > 1) {
    std::ostringstream os;
    os << routine << "-balancing: " << holding
       << " rotation conditions hold at once on a subtree of weight " << w;
    throw invariant_violation(os.str());
  }
}

template <class Key>
void apply(node_ptr<Key>& slot, rotation_kind r, const rotation_context& ctx) {
  switch (r) {
    case rotation_kind::simple_left: rotate_simple(slot, direction::left, ctx); break;
    case rotation_kind::simple_right: rotate_simple(slot, direction::right, ctx); break;
    case rotation_kind::double_left: rotate_double(slot, direction::left, ctx); break;
    case rotation_kind::double_right: rotate_double(slot, direction::right, ctx); break;
    case rotation_kind::none: break;
  }
}

/// RAII pairing of on_balance_begin / on_balance_end.
class balance_scope {
 public:
  balance_scope(const rotation_context& ctx, routine_kind r, weight_t w)
      : ctx_(ctx), routine_(r), weight_(w) {
    if (ctx_.observer) ctx_.observer->on_balance_begin(routine_, weight_);
  }
  ~balance_scope() {
    if (ctx_.observer) ctx_.observer->on_balance_end(routine_, weight_, changed);
  }
  balance_scope(const balance_scope&) = delete;
  balance_scope& operator=(const balance_scope&) = delete;

  bool changed = false;

 private:
  const rotation_context& ctx_;
  routine_kind routine_;
  weight_t weight_;
};

}  // namespace detail

/// C(u, v, w, x)-balancing. Cases are tried in the order 1 to 5.
template <class Key>
rebalance_event c_balance(node_ptr<Key>& slot, double u, double v, double w, double x,
                          const rotation_context& ctx = {}) {
  rebalance_event e{routine_kind::c, 5, rotation_kind::none, node_weight(slot)};
  if (!slot) {
    detail::emit(ctx, e);
    return e;
  }
  const double n = static_cast<double>(slot->weight);
  const double limit = u * n + w;
  const double outer_min = (1.0 - v) * n - x;
  const bool heavy1 = static_cast<double>(node_weight(slot->left)) > limit;
  const bool heavy2 = static_cast<double>(node_weight(slot->right)) > limit;
  detail::audit_exclusive(ctx, int(heavy1) + int(heavy2), "C", slot->weight);

  const bool outer1 = heavy1 && grandchild_weight(slot->left.get(), true) >= outer_min;
  const bool outer2 = heavy2 && grandchild_weight(slot->right.get(), false) >= outer_min;
  if (outer1) {
    e.case_index = 1;
    e.rotation = rotation_kind::simple_right;
  } else if (outer2) {
    e.case_index = 2;
    e.rotation = rotation_kind::simple_left;
  } else if (heavy1) {
    e.case_index = 3;
    e.rotation = rotation_kind::double_right;
  } else if (heavy2) {
    e.case_index = 4;
    e.rotation = rotation_kind::double_left;
  }
  detail::apply(slot, e.rotation, ctx);
  detail::emit(ctx, e);
  return e;
}

/// GC(y, z)-balancing: promote (cases 1, 2) or split (cases 3, 4) an overweight grandchild.
template <class Key>
rebalance_event gc_balance(node_ptr<Key>& slot, double y, double z,
                           const rotation_context& ctx = {}) {
  rebalance_event e{routine_kind::gc, 5, rotation_kind::none, node_weight(slot)};
  if (!slot) {
    detail::emit(ctx, e);
    return e;
  }
  const double limit = y * static_cast<double>(slot->weight) + z;
  const auto g = grandchild_weights(*slot);
  const bool h11 = g[0] > limit;
  const bool h12 = g[1] > limit;
  const bool h21 = g[2] > limit;
  const bool h22 = g[3] > limit;
  detail::audit_exclusive(ctx, int(h11) + int(h12) + int(h21) + int(h22), "GC", slot->weight);

  if (h11) {
    e.case_index = 1;
    e.rotation = rotation_kind::simple_right;
  } else if (h22) {
    e.case_index = 2;
    e.rotation = rotation_kind::simple_left;
  } else if (h12) {
    e.case_index = 3;
    e.rotation = rotation_kind::double_right;
  } else if (h21) {
    e.case_index = 4;
    e.rotation = rotation_kind::double_left;
  }
  detail::apply(slot, e.rotation, ctx);
  detail::emit(ctx, e);
  return e;
}

/// CGC(u, v, y, y_hat)-balancing. Returns true when the subtree changed.
template <class Key>
bool cgc_balance(node_ptr<Key>& slot, double u, double v, double y, double y_hat,
                 const rotation_context& ctx = {}) {
  detail::balance_scope scope(ctx, routine_kind::cgc, node_weight(slot));
  if (!slot) return false;
  const rebalance_event first = c_balance(slot, u, v, 0.0, 0.0, ctx);
  if (first.rotation != rotation_kind::none) {
    gc_balance(slot->left, y_hat, 0.0, ctx);
    gc_balance(slot->right, y_hat, 0.0, ctx);
    gc_balance(slot, y_hat, 0.0, ctx);
    scope.changed = true;
  } else {
    scope.changed = gc_balance(slot, y, 0.0, ctx).rotation != rotation_kind::none;
  }
  return scope.changed;
}

/// The parameterisation used by bottom-up updates: CGC(alpha, alpha_hat, beta, beta_hat).
template <class Key>
bool cgc_balance(node_ptr<Key>& slot, const balance_params& p, const rotation_context& ctx = {}) {
  return cgc_balance(slot, p.alpha, p.alpha_hat, p.beta, p.beta_hat, ctx);
}

/// Smallest node count RCGC-balancing accepts.
inline constexpr weight_t rcgc_min_nodes = 30;

/// RCGC(alpha, alpha_hat, beta, beta_hat)-balancing: make the root robustly balanced.
/// Throws precondition_error on subtrees with fewer than 30 nodes.
template <class Key>
bool rcgc_balance(node_ptr<Key>& slot, const balance_params& p, const rotation_context& ctx = {}) {
  const weight_t w = node_weight(slot);
  if (w - 1 < rcgc_min_nodes) {
    std::ostringstream os;
    os << "RCGC-balancing needs at least " << rcgc_min_nodes << " nodes, got " << (w - 1);
    throw precondition_error(os.str());
  }
  detail::balance_scope scope(ctx, routine_kind::rcgc, w);
  const double ah = p.alpha_hat;
  const double bh = p.beta_hat;
  auto fix_children = [&] {
    cgc_balance(slot->left, ah, ah, bh, bh, ctx);
    cgc_balance(slot->right, ah, ah, bh, bh, ctx);
  };

  const rebalance_event first =
      c_balance(slot, p.alpha, ah, robustness_offset(p.alpha), robustness_offset(ah), ctx);
  if (first.rotation != rotation_kind::none) {
    fix_children();
    gc_balance(slot, bh, robustness_offset(bh), ctx);
    fix_children();
    scope.changed = true;
  } else if (gc_balance(slot, p.beta, robustness_offset(p.beta), ctx).rotation !=
             rotation_kind::none) {
    fix_children();
    scope.changed = true;
  }
  return scope.changed;
}

}  // namespace gcb
