#pragma once

// Tree nodes, weights, the two rotation shapes and perfect rebuilding.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "gcb/errors.hpp"
#include "gcb/events.hpp"

namespace gcb {

/// Largest root weight an insertion may produce.
inline constexpr weight_t max_weight = weight_t{1} << 50;

template <class Key>
struct node {
  Key key;
  weight_t weight = 2;
  std::unique_ptr<node> left;
  std::unique_ptr<node> right;

  explicit node(Key k) : key(std::move(k)) {}
};

template <class Key>
using node_ptr = std::unique_ptr<node<Key>>;

/// Weight of a possibly absent subtree: 1 for an empty one.
template <class Key>
weight_t node_weight(const node<Key>* n) {
  return n ? n->weight : 1;
}

template <class Key>
weight_t node_weight(const node_ptr<Key>& n) {
  return node_weight(n.get());
}

template <class Key>
void refresh_weight(node<Key>& n) {
  n.weight = node_weight(n.left) + node_weight(n.right);
}

/// Weight of a grandchild reached through `child`. An empty child of weight 1
/// splits into two phantom subtrees of weight 1/2.
template <class Key>
double grandchild_weight(const node<Key>* child, bool left_side) {
  if (!child) return 0.5;
  return static_cast<double>(node_weight(left_side ? child->left : child->right));
}

/// The four grandchild weights of `n` in the order n11, n12, n21, n22.
template <class Key>
std::array<double, 4> grandchild_weights(const node<Key>& n) {
  return {grandchild_weight(n.left.get(), true), grandchild_weight(n.left.get(), false),
          grandchild_weight(n.right.get(), true), grandchild_weight(n.right.get(), false)};
}

struct balance_pair {
  double bal_c = 0.0;
  double bal_gc = 0.0;
};

template <class Key>
balance_pair balances(const node<Key>& n) {
  const double w = static_cast<double>(n.weight);
  const auto gc = grandchild_weights(n);
  balance_pair b;
  b.bal_c = static_cast<double>(std::max(node_weight(n.left), node_weight(n.right))) / w;
  b.bal_gc = *std::max_element(gc.begin(), gc.end()) / w;
  return b;
}

struct rotation_counters {
  std::uint64_t total = 0;    // simple = 1, double = 2
  std::uint64_t simple = 0;
  std::uint64_t doubles = 0;
};

/// Where rotations and rebuilds report to. Every member is optional.
struct rotation_context {
  rotation_counters* counters = nullptr;
  tree_observer* observer = nullptr;
  std::vector<rebalance_event>* events = nullptr;  // receives rotating and base-case events
  bool audit = false;

  void affected(const void* id) const {
    if (observer) observer->on_affected(id);
  }
};

enum class direction { left, right };

/// Simple rotation at `slot`. `direction::right` lifts the left child n1:
/// n1 becomes the root with children (n11, n) and n keeps (n12, n2).
template <class Key>
void rotate_simple(node_ptr<Key>& slot, direction dir, const rotation_context& ctx = {}) {
  if (!slot) throw degenerate_structure_error("simple rotation on an empty subtree");
  const bool right = dir == direction::right;
  node_ptr<Key>& near = right ? slot->left : slot->right;
  if (!near) throw degenerate_structure_error("simple rotation needs the lifted child");
  node_ptr<Key> n = std::move(slot);
  node_ptr<Key> n1 = std::move(near);
  if (right) {
    n->left = std::move(n1->right);
    refresh_weight(*n);
    n1->right = std::move(n);
  } else {
    n->right = std::move(n1->left);
    refresh_weight(*n);
    n1->left = std::move(n);
  }
  refresh_weight(*n1);
  ctx.affected(n1.get());
  ctx.affected(right ? n1->right.get() : n1->left.get());
  slot = std::move(n1);
  if (ctx.counters) {
    ctx.counters->total += 1;
    ctx.counters->simple += 1;
  }
}

/// Double rotation at `slot`. `direction::right` lifts n12: it becomes the root
/// with children (n1, n), n1 keeps (n11, n121) and n takes (n122, n2).
template <class Key>
void rotate_double(node_ptr<Key>& slot, direction dir, const rotation_context& ctx = {}) {
  if (!slot) throw degenerate_structure_error("double rotation on an empty subtree");
  const bool right = dir == direction::right;
  node_ptr<Key>& near = right ? slot->left : slot->right;
  if (!near) throw degenerate_structure_error("double rotation needs the child");
  node_ptr<Key>& inner = right ? near->right : near->left;
  if (!inner) throw degenerate_structure_error("double rotation needs the inner grandchild");

  node_ptr<Key> n = std::move(slot);
  node_ptr<Key> n1 = std::move(near);
  node_ptr<Key> n12 = std::move(right ? n1->right : n1->left);
  if (right) {
    n1->right = std::move(n12->left);
    n->left = std::move(n12->right);
  } else {
    n1->left = std::move(n12->right);
    n->right = std::move(n12->left);
  }
  refresh_weight(*n1);
  refresh_weight(*n);
  ctx.affected(n.get());
  ctx.affected(n1.get());
  ctx.affected(n12.get());
  if (right) {
    n12->left = std::move(n1);
    n12->right = std::move(n);
  } else {
    n12->left = std::move(n);
    n12->right = std::move(n1);
  }
  refresh_weight(*n12);
  slot = std::move(n12);
  if (ctx.counters) {
    ctx.counters->total += 2;
    ctx.counters->doubles += 1;
  }
}

/// Detach every node of `slot` into `out`, in key order. Child links are cleared.
template <class Key>
void flatten(node_ptr<Key>& slot, std::vector<node_ptr<Key>>& out) {
  if (!slot) return;
  node_ptr<Key> n = std::move(slot);
  flatten(n->left, out);
  node_ptr<Key> r = std::move(n->right);
  out.push_back(std::move(n));
  flatten(r, out);
}

namespace detail {

template <class Key>
node_ptr<Key> link_perfect(std::vector<node_ptr<Key>>& nodes, std::size_t lo, std::size_t hi) {
  if (lo == hi) return nullptr;
  // The left side gets the larger half when the two halves differ.
  const std::size_t mid = lo + (hi - lo) / 2;
  node_ptr<Key> root = std::move(nodes[mid]);
  root->left = link_perfect(nodes, lo, mid);
  root->right = link_perfect(nodes, mid + 1, hi);
  refresh_weight(*root);
  return root;
}

}  // namespace detail

/// Link sorted, detached nodes into a tree whose sibling weights differ by at most 1.
template <class Key>
node_ptr<Key> link_perfect(std::vector<node_ptr<Key>>& nodes, const rotation_context& ctx = {}) {
  for (const auto& n : nodes) ctx.affected(n.get());
  return detail::link_perfect(nodes, 0, nodes.size());
}

/// Reshape the subtree at `slot` into a perfectly balanced one on the same nodes.
template <class Key>
void rebuild_perfect(node_ptr<Key>& slot, const rotation_context& ctx = {}) {
  std::vector<node_ptr<Key>> nodes;
  flatten(slot, nodes);
  slot = link_perfect(nodes, ctx);
}

/// Build a perfectly balanced tree from strictly increasing keys.
template <class Key>
node_ptr<Key> build_perfect(const std::vector<Key>& keys) {
  std::vector<node_ptr<Key>> nodes;
  nodes.reserve(keys.size());
  for (const Key& k : keys) nodes.push_back(std::make_unique<node<Key>>(k));
  return link_perfect(nodes);
}

template <class Key>
void in_order(const node<Key>* n, std::vector<Key>& out) {
  // Iterative so degenerate hand-built trees cannot overflow the stack.
  std::vector<const node<Key>*> stack;
  while (n || !stack.empty()) {
    while (n) {
      stack.push_back(n);
      n = n->left.get();
    }
    n = stack.back();
    stack.pop_back();
    out.push_back(n->key);
    n = n->right.get();
  }
}

template <class Key, class Compare = std::less<Key>>
const node<Key>* find(const node<Key>* n, const Key& key, const Compare& comp = Compare{}) {
  while (n) {
    if (comp(key, n->key)) {
      n = n->left.get();
    } else if (comp(n->key, key)) {
      n = n->right.get();
    } else {
      return n;
    }
  }
  return nullptr;
}

/// Deep copy, preserving shape and cached weights.
template <class Key>
node_ptr<Key> clone(const node<Key>* n) {
  if (!n) return nullptr;
  auto c = std::make_unique<node<Key>>(n->key);
  c->weight = n->weight;
  c->left = clone(n->left.get());
  c->right = clone(n->right.get());
  return c;
}

}  // namespace gcb
