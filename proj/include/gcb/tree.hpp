#pragma once

// Grandchildren-balanced search tree with bottom-up and top-down updates.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "gcb/node.hpp"
#include "gcb/params.hpp"
#include "gcb/rebalance.hpp"

namespace gcb {

/// Largest subtree (in nodes) that a bottom-up update rebuilds outright.
inline constexpr weight_t bu_base_max_nodes = 11;
/// Largest subtree (in nodes) that a top-down update rebuilds outright.
inline constexpr weight_t td_base_max_nodes = 29;

struct tree_options {
#ifdef NDEBUG
  bool audit = false;
#else
  bool audit = true;
#endif
  /// Root weight an insertion may not exceed. Clamped to `max_weight`.
  weight_t capacity = max_weight;
};

enum class update_effect { inserted, deleted, redundant };

struct update_outcome {
  update_effect effect = update_effect::redundant;
  std::vector<rebalance_event> events;  // rotating routine calls and base-case rebuilds
  std::uint64_t nodes_visited = 0;
  int passes = 1;  // 2 when a top-down update had to undo its weight changes

  bool changed() const { return effect != update_effect::redundant; }
};

inline std::string_view to_string(update_effect e) {
  switch (e) {
    case update_effect::inserted: return "inserted";
    case update_effect::deleted: return "deleted";
    case update_effect::redundant: return "redundant";
  }
  return "?";
}

template <class Key, class Compare = std::less<Key>>
class tree {
 public:
  using key_type = Key;
  using node_type = node<Key>;

  explicit tree(const balance_params& p, tree_options opts = {})
      : params_(p), opts_(opts) {
    opts_.capacity = std::min(opts_.capacity, max_weight);
  }
  tree(double alpha, double beta, tree_options opts = {})
      : tree(derive_constants(alpha, beta), opts) {}

  tree(const tree& other)
      : root_(clone(other.root_.get())),
        params_(other.params_),
        opts_(other.opts_),
        counters_(other.counters_),
        comp_(other.comp_) {}
  tree& operator=(const tree& other) {
    if (this != &other) *this = tree(other);
    return *this;
  }
  tree(tree&&) noexcept = default;
  tree& operator=(tree&&) noexcept = default;
  ~tree() { clear(); }

  update_outcome insert_bu(const Key& key) { return update_bu(update_kind::insert, key); }
  update_outcome erase_bu(const Key& key) { return update_bu(update_kind::erase, key); }
  update_outcome insert_td(const Key& key) { return update_td(update_kind::insert, key); }
  update_outcome erase_td(const Key& key) { return update_td(update_kind::erase, key); }

  bool contains(const Key& key) const { return find(root_.get(), key, comp_) != nullptr; }

  std::vector<Key> in_order_keys() const {
    std::vector<Key> out;
    out.reserve(size());
    in_order(root_.get(), out);
    return out;
  }

  weight_t weight() const { return node_weight(root_); }
  std::size_t size() const { return static_cast<std::size_t>(weight() - 1); }
  bool empty() const { return !root_; }

  const node_type* root() const { return root_.get(); }
  const balance_params& params() const { return params_; }
  const tree_options& options() const { return opts_; }
  void set_audit(bool on) { opts_.audit = on; }

  const rotation_counters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

  /// Route update hooks to `obs` (nullptr detaches). The tree does not own it.
  void attach(tree_observer* obs) { observer_ = obs; }

  /// Replace the contents with an externally built subtree. The caller vouches
  /// for key order and cached weights; `validate` can check both.
  void adopt(node_ptr<Key> r) {
    clear();
    root_ = std::move(r);
  }
  node_ptr<Key> release() { return std::move(root_); }

  void clear() {
    // Iterative teardown so hand-built degenerate trees cannot overflow the stack.
    std::vector<node_ptr<Key>> pending;
    if (root_) pending.push_back(std::move(root_));
    while (!pending.empty()) {
      node_ptr<Key> n = std::move(pending.back());
      pending.pop_back();
      if (n->left) pending.push_back(std::move(n->left));
      if (n->right) pending.push_back(std::move(n->right));
    }
  }

 private:
  enum class seek { key, minimum, maximum };

  struct update_state {
    update_kind kind;
    const Key& key;
    seek target = seek::key;
    update_outcome out;
    std::vector<path_entry> path;
    rotation_context ctx;
    std::optional<Key> extracted;  // key removed by a minimum / maximum search
  };

  update_state start(update_kind kind, const Key& key) {
    if (kind == update_kind::insert && weight() >= opts_.capacity) {
      std::ostringstream os;
      os << "tree weight " << weight() << " has reached the capacity " << opts_.capacity;
      throw capacity_error(os.str());
    }
    update_state st{kind, key, seek::key, {}, {}, {}, {}};
    st.ctx.counters = &counters_;
    st.ctx.observer = observer_;
    st.ctx.audit = opts_.audit;
    if (observer_) observer_->on_update_begin(kind, weight());
    return st;
  }

  update_outcome finish(update_state& st, bool changed) {
    st.out.effect = !changed                             ? update_effect::redundant
                    : st.kind == update_kind::insert ? update_effect::inserted
                                                     : update_effect::deleted;
    if (observer_) observer_->on_update_end(changed);
    return std::move(st.out);
  }

  // Direction taken from `n` while searching: -1 left, 1 right, 0 when `n` holds the key.
  int compare_at(const node_type& n, const update_state& st) const {
    switch (st.target) {
      case seek::minimum: return -1;
      case seek::maximum: return 1;
      case seek::key: break;
    }
    if (comp_(st.key, n.key)) return -1;
    if (comp_(n.key, st.key)) return 1;
    return 0;
  }

  // Insert or delete inside a small subtree, then rebuild it perfectly.
  // Redundant updates leave the subtree untouched.
  bool base_case(node_ptr<Key>& slot, update_state& st) {
    std::vector<node_ptr<Key>> nodes;
    if (st.target == seek::key) {
      const bool present = find(slot.get(), st.key, comp_) != nullptr;
      if (present == (st.kind == update_kind::insert)) return false;
    } else if (!slot) {
      throw invariant_violation("extremum search reached an empty subtree");
    }
    flatten(slot, nodes);
    st.out.nodes_visited += nodes.size();

    const void* created = nullptr;
    node_ptr<Key> removed;
    if (st.kind == update_kind::insert) {
      auto pos = std::lower_bound(nodes.begin(), nodes.end(), st.key,
                                  [&](const node_ptr<Key>& n, const Key& k) { return comp_(n->key, k); });
      auto fresh = std::make_unique<node_type>(st.key);
      created = fresh.get();
      nodes.insert(pos, std::move(fresh));
    } else {
      auto pos = nodes.begin();
      if (st.target == seek::maximum) {
        pos = nodes.end() - 1;
      } else if (st.target == seek::key) {
        pos = std::lower_bound(nodes.begin(), nodes.end(), st.key,
                               [&](const node_ptr<Key>& n, const Key& k) { return comp_(n->key, k); });
      }
      removed = std::move(*pos);
      nodes.erase(pos);
      if (st.target != seek::key) st.extracted = std::move(removed->key);
    }
    if (observer_) observer_->on_leaf_change(st.kind, st.path, created, removed.get());
    removed.reset();

    slot = link_perfect(nodes, st.ctx);
    const rebalance_event e{routine_kind::base_case, 0, rotation_kind::none, node_weight(slot)};
    if (observer_) observer_->on_rebalance(e);
    st.out.events.push_back(e);
    return true;
  }

  void audit_bullet(const node_type& n) const {
    const double limit = params_.alpha_bullet * static_cast<double>(n.weight);
    if (static_cast<double>(std::max(node_weight(n.left), node_weight(n.right))) > limit) {
      std::ostringstream os;
      os << "bottom-up update: root of weight " << n.weight
         << " is not alpha-bullet child-balanced before CGC-balancing";
      throw invariant_violation(os.str());
    }
  }

  bool is_balanced(const node_type& n, double a, double ra, double b, double rb) const {
    const double w = static_cast<double>(n.weight);
    const auto g = grandchild_weights(n);
    return static_cast<double>(std::max(node_weight(n.left), node_weight(n.right))) <= a * w + ra &&
           *std::max_element(g.begin(), g.end()) <= b * w + rb;
  }

  bool recurse_bu(node_ptr<Key>& slot, update_state& st) {
    if (slot) ++st.out.nodes_visited;
    const bool small = node_weight(slot) - 1 <= bu_base_max_nodes;
    const bool edge = slot && ((st.target == seek::minimum && !slot->left) ||
                               (st.target == seek::maximum && !slot->right));
    if (small || edge) return base_case(slot, st);

    node_type& n = *slot;
    const int dir = compare_at(n, st);
    bool changed = false;
    st.path.push_back({&n, n.weight});
    if (dir < 0) {
      changed = recurse_bu(n.left, st);
    } else if (dir > 0) {
      changed = recurse_bu(n.right, st);
    } else if (st.kind == update_kind::erase) {
      // Hibbard deletion: pull the neighbouring key up from a leaf-side search.
      st.target = n.right ? seek::minimum : seek::maximum;
      changed = recurse_bu(n.right ? n.right : n.left, st);
      n.key = std::move(*st.extracted);
    }
    st.path.pop_back();
    if (!changed) return false;

    if (st.kind == update_kind::insert) {
      ++n.weight;
    } else {
      --n.weight;
    }
    if (st.ctx.audit) audit_bullet(n);
    cgc_balance(slot, params_, st.ctx);
    return true;
  }

  update_outcome update_bu(update_kind kind, const Key& key) {
    update_state st = start(kind, key);
    st.ctx.events = &st.out.events;
    const bool changed = recurse_bu(root_, st);
    return finish(st, changed);
  }

  update_outcome update_td(update_kind kind, const Key& key) {
    update_state st = start(kind, key);
    st.ctx.events = &st.out.events;
    const int delta = kind == update_kind::insert ? 1 : -1;

    node_ptr<Key>* slot = &root_;
    node_type* retained = nullptr;
    bool found_on_path = false;
    while (node_weight(*slot) - 1 > td_base_max_nodes) {
      ++st.out.nodes_visited;
      rcgc_balance(*slot, params_, st.ctx);
      node_type& n = **slot;
      if (st.ctx.audit &&
          !is_balanced(n, params_.alpha, robustness_offset(params_.alpha), params_.beta,
                       robustness_offset(params_.beta))) {
        std::ostringstream os;
        os << "top-down update: node of weight " << n.weight
           << " is not robustly balanced after RCGC-balancing";
        throw invariant_violation(os.str());
      }
      int dir = compare_at(n, st);
      if (dir == 0) {
        if (kind == update_kind::insert) {
          found_on_path = true;
          break;
        }
        retained = &n;
        st.target = n.right ? seek::minimum : seek::maximum;
        dir = n.right ? 1 : -1;
      }
      st.path.push_back({&n, n.weight});
      n.weight = static_cast<weight_t>(static_cast<std::int64_t>(n.weight) + delta);
      slot = dir < 0 ? &n.left : &n.right;
    }

    const bool changed = !found_on_path && base_case(*slot, st);
    if (!changed) {
      if (!st.path.empty()) revert_weights(st, delta);
    } else {
      if (retained) retained->key = std::move(*st.extracted);
      if (st.ctx.audit) audit_path(st);
    }
    return finish(st, changed);
  }

  // Second pass of a redundant top-down update: undo the optimistic weight changes
  // by replaying the comparison path from the root.
  void revert_weights(update_state& st, int delta) {
    st.out.passes = 2;
    node_type* n = root_.get();
    for (std::size_t i = 0; i < st.path.size(); ++i) {
      ++st.out.nodes_visited;
      n->weight = static_cast<weight_t>(static_cast<std::int64_t>(n->weight) - delta);
      n = comp_(st.key, n->key) ? n->left.get() : n->right.get();
    }
  }

  void audit_path(const update_state& st) const {
    for (const path_entry& e : st.path) {
      const auto& n = *static_cast<const node_type*>(e.id);
      if (!is_balanced(n, params_.alpha, 0.0, params_.beta, 0.0)) {
        std::ostringstream os;
        os << "top-down update: path node of weight " << n.weight
           << " is not (alpha, beta)-balanced after the base case";
        throw invariant_violation(os.str());
      }
    }
  }

  node_ptr<Key> root_;
  balance_params params_;
  tree_options opts_;
  rotation_counters counters_;
  tree_observer* observer_ = nullptr;
  Compare comp_{};
};

}  // namespace gcb
