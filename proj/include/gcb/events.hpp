#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace gcb {

using weight_t = std::uint64_t;

enum class update_kind { insert, erase };

enum class routine_kind { c, gc, cgc, rcgc, base_case };

/// `simple_right` lifts the left child, `double_right` lifts the left child's right child.
enum class rotation_kind { none, simple_left, simple_right, double_left, double_right };

struct rebalance_event {
  routine_kind routine = routine_kind::c;
  int case_index = 5;
  rotation_kind rotation = rotation_kind::none;
  weight_t subtree_weight = 1;

  friend bool operator==(const rebalance_event&, const rebalance_event&) = default;
};

/// A node whose subtree gained or lost a key, with its weight before the change.
struct path_entry {
  const void* id = nullptr;
  weight_t weight_before = 0;
};

/// Hooks fired by the tree while it updates. Node identities are opaque addresses
/// that stay stable for a node's whole lifetime (keys may move, nodes do not).
class tree_observer {
 public:
  virtual ~tree_observer() = default;

  virtual void on_update_begin(update_kind, weight_t /*root_weight*/) {}
  virtual void on_update_end(bool /*changed_key_set*/) {}
  /// Fired once per non-redundant update, before any node is freed.
  virtual void on_leaf_change(update_kind, std::span<const path_entry> /*ancestors*/,
                              const void* /*created*/, const void* /*removed*/) {}
  /// A node's children list changed through a rotation or a base-case rebuild.
  virtual void on_affected(const void* /*id*/) {}
  virtual void on_balance_begin(routine_kind, weight_t /*subtree_weight*/) {}
  virtual void on_balance_end(routine_kind, weight_t /*subtree_weight*/, bool /*changed*/) {}
  virtual void on_rebalance(const rebalance_event&) {}
};

inline std::string_view to_string(routine_kind r) {
  switch (r) {
    case routine_kind::c: return "C";
    case routine_kind::gc: return "GC";
    case routine_kind::cgc: return "CGC";
    case routine_kind::rcgc: return "RCGC";
    case routine_kind::base_case: return "BaseCase";
  }
  return "?";
}

inline std::string_view to_string(rotation_kind r) {
  switch (r) {
    case rotation_kind::none: return "none";
    case rotation_kind::simple_left: return "simple-left";
    case rotation_kind::simple_right: return "simple-right";
    case rotation_kind::double_left: return "double-left";
    case rotation_kind::double_right: return "double-right";
  }
  return "?";
}

}  // namespace gcb
