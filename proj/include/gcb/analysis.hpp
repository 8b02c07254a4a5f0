#pragma once

// Validation, statistics, the worst-case generator T(s), the minimal external
// path length oracle and potential-counter instrumentation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gcb/node.hpp"
#include "gcb/params.hpp"
#include "gcb/tree.hpp"

namespace gcb {

enum class violation_kind { child, grandchild, robust_child, robust_grandchild, weight_mismatch, order };

inline std::string_view to_string(violation_kind k) {
  switch (k) {
    case violation_kind::child: return "child";
    case violation_kind::grandchild: return "grandchild";
    case violation_kind::robust_child: return "robust-child";
    case violation_kind::robust_grandchild: return "robust-grandchild";
    case violation_kind::weight_mismatch: return "weight-mismatch";
    case violation_kind::order: return "order";
  }
  return "?";
}

template <class Key>
struct violation {
  Key key;
  violation_kind kind;
  double measured = 0.0;
  double threshold = 0.0;
};

template <class Key>
struct balance_report {
  std::vector<violation<Key>> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(violation_kind k) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [k](const auto& v) { return v.kind == k; }));
  }
  /// Violations that break plain (alpha, beta)-balance or the structure itself.
  std::size_t hard_count() const {
    return violations.size() - count(violation_kind::robust_child) -
           count(violation_kind::robust_grandchild);
  }
};

/// True iff `n` satisfies the four robust-balance inequalities
/// max child + 1 <= a(|n| + 1), max child <= a(|n| - 1), and the same for grandchildren with b.
template <class Key>
bool validate_robust(const node<Key>& n, double alpha, double beta) {
  const double w = static_cast<double>(n.weight);
  const double c = static_cast<double>(std::max(node_weight(n.left), node_weight(n.right)));
  const auto gw = grandchild_weights(n);
  const double g = *std::max_element(gw.begin(), gw.end());
  return c + 1.0 <= alpha * (w + 1.0) && c <= alpha * (w - 1.0) && g + 1.0 <= beta * (w + 1.0) &&
         g <= beta * (w - 1.0);
}

template <class Key>
bool validate_robust(const node<Key>& n, const balance_params& p) {
  return validate_robust(n, p.alpha, p.beta);
}

namespace detail {

struct subtree_weights {
  weight_t self = 1;
  weight_t left = 1;  // meaningful only when self > 1
  weight_t right = 1;
};

template <class Key, class Compare>
class validator {
 public:
  validator(const balance_params& p, bool robust, const Compare& comp)
      : p_(p), robust_(robust), comp_(comp) {}

  subtree_weights visit(const node<Key>* n, const Key* lo, const Key* hi) {
    if (!n) return {};
    if ((lo && !comp_(*lo, n->key)) || (hi && !comp_(n->key, *hi))) {
      add(n->key, violation_kind::order, 0.0, 0.0);
    }
    const subtree_weights l = visit(n->left.get(), lo, &n->key);
    const subtree_weights r = visit(n->right.get(), &n->key, hi);
    subtree_weights s{l.self + r.self, l.self, r.self};
    if (s.self != n->weight) {
      add(n->key, violation_kind::weight_mismatch, static_cast<double>(n->weight),
          static_cast<double>(s.self));
    }
    const double w = static_cast<double>(s.self);
    const double c = static_cast<double>(std::max(l.self, r.self));
    const double g = std::max(max_below(n->left.get(), l), max_below(n->right.get(), r));
    if (c > p_.alpha * w) add(n->key, violation_kind::child, c / w, p_.alpha);
    if (g > p_.beta * w) add(n->key, violation_kind::grandchild, g / w, p_.beta);
    if (robust_) {
      const double ct = p_.alpha * w + robustness_offset(p_.alpha);
      const double gt = p_.beta * w + robustness_offset(p_.beta);
      if (!(c + 1.0 <= p_.alpha * (w + 1.0) && c <= p_.alpha * (w - 1.0))) {
        add(n->key, violation_kind::robust_child, c, ct);
      }
      if (!(g + 1.0 <= p_.beta * (w + 1.0) && g <= p_.beta * (w - 1.0))) {
        add(n->key, violation_kind::robust_grandchild, g, gt);
      }
    }
    return s;
  }

  balance_report<Key> report;

 private:
  static double max_below(const node<Key>* child, const subtree_weights& s) {
    if (!child) return 0.5;
    return static_cast<double>(std::max(s.left, s.right));
  }

  void add(const Key& k, violation_kind kind, double measured, double threshold) {
    report.violations.push_back({k, kind, measured, threshold});
  }

  const balance_params& p_;
  bool robust_;
  const Compare& comp_;
};

}  // namespace detail

/// Check every node: key order, cached weights (recomputed from scratch), child
/// balance and grandchild balance; with `robust`, also the robust inequalities.
/// Balance is judged on recomputed weights, so a stale cache shows up only as
/// weight-mismatch findings.
template <class Key, class Compare = std::less<Key>>
balance_report<Key> validate(const node<Key>* root, const balance_params& p, bool robust = false,
                             const Compare& comp = Compare{}) {
  detail::validator<Key, Compare> v(p, robust, comp);
  v.visit(root, nullptr, nullptr);
  return std::move(v.report);
}

template <class Key, class Compare>
balance_report<Key> validate(const tree<Key, Compare>& t, bool robust = false) {
  return validate<Key, Compare>(t.root(), t.params(), robust);
}

struct tree_stats {
  std::uint64_t n_nodes = 0;
  std::int64_t height = -1;  // -1 for the empty tree
  std::uint64_t internal_path_length = 0;
  std::uint64_t external_path_length = 0;  // sum of node weights
  double potential_sum = 0.0;
  std::uint64_t rotations_simple = 0;
  std::uint64_t rotations_double = 0;
};

template <class Key>
tree_stats compute_stats(const node<Key>* root) {
  tree_stats s;
  std::vector<std::pair<const node<Key>*, std::int64_t>> stack;
  if (root) stack.push_back({root, 0});
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    ++s.n_nodes;
    s.height = std::max(s.height, depth);
    s.external_path_length += n->weight;
    if (n->left) stack.push_back({n->left.get(), depth + 1});
    if (n->right) stack.push_back({n->right.get(), depth + 1});
  }
  s.internal_path_length = s.external_path_length - 2 * s.n_nodes;
  return s;
}

class potential_tracker;

template <class Key, class Compare>
tree_stats compute_stats(const tree<Key, Compare>& t, const potential_tracker* pt = nullptr);

/// The worst-case tree T(s) of weight s, keys 1..s-1 in order. Requires (alpha, beta) in D''.
template <class Key = std::int64_t>
node_ptr<Key> worst_case_tree(std::uint64_t s, double alpha, double beta) {
  if (!domain_check(alpha, beta).in_d_double_prime) {
    std::ostringstream os;
    os << "(alpha, beta) = (" << alpha << ", " << beta
       << ") is outside D'' = {2/3 <= beta/alpha <= alpha < 3/4}";
    throw domain_error(os.str());
  }
  if (s < 1) throw precondition_error("worst_case_tree needs a weight s >= 1");
  if (s > max_weight) throw capacity_error("worst_case_tree weight exceeds the capacity");
  const double gamma = beta / alpha;
  Key next{1};

  std::function<node_ptr<Key>(std::uint64_t)> build = [&](std::uint64_t w) -> node_ptr<Key> {
    if (w == 1) return nullptr;
    if (w == 2) {
      auto leaf = std::make_unique<node<Key>>(next);
      ++next;
      return leaf;
    }
    const auto s2 = static_cast<std::uint64_t>(std::floor(alpha * static_cast<double>(w)));
    const std::uint64_t s1 = w - s2;
    const auto s21 = static_cast<std::uint64_t>(std::floor(gamma * static_cast<double>(s2)));
    const std::uint64_t s22 = s2 - s21;
    node_ptr<Key> left = build(s1);
    auto root = std::make_unique<node<Key>>(next);
    ++next;
    node_ptr<Key> right_left = build(s21);
    auto right = std::make_unique<node<Key>>(next);
    ++next;
    right->left = std::move(right_left);
    right->right = build(s22);
    refresh_weight(*right);
    root->left = std::move(left);
    root->right = std::move(right);
    refresh_weight(*root);
    return root;
  };
  return build(s);
}

/// lambda-(s): the least external path length of a binary tree of weight s.
inline std::uint64_t min_external_path(std::uint64_t s) {
  static thread_local std::unordered_map<std::uint64_t, std::uint64_t> memo;
  if (s < 1) throw precondition_error("min_external_path needs s >= 1");
  if (s == 1) return 0;
  if (auto it = memo.find(s); it != memo.end()) return it->second;
  const std::uint64_t v = s + min_external_path(s / 2) + min_external_path(s - s / 2);
  memo.emplace(s, v);
  return v;
}

/// Per-node counters c(n) of the amortised rotation analysis and their sum C.
class potential_tracker {
 public:
  void created(const void* id) { counters_[id] = 0.0; }

  void removed(const void* id) {
    if (auto it = counters_.find(id); it != counters_.end()) {
      sum_ -= it->second;
      counters_.erase(it);
    }
  }

  /// A descendant of `id` is about to be created or deleted.
  void descendant_changed(const void* id, weight_t weight_before) {
    const double inc = 2.0 / static_cast<double>(weight_before);
    double& c = counters_[id];
    c += inc;
    sum_ += inc;
    lowest_written_ = std::min(lowest_written_, c);
  }

  void affected(const void* id) {
    auto it = counters_.find(id);
    if (it == counters_.end()) {
      counters_.emplace(id, 0.0);
      return;
    }
    sum_ -= it->second;
    it->second = 0.0;
  }

  double total() const { return sum_; }
  double value(const void* id) const {
    auto it = counters_.find(id);
    return it == counters_.end() ? 0.0 : it->second;
  }
  std::size_t tracked() const { return counters_.size(); }

  /// Smallest value any counter has held since the last reset.
  double lowest_written() const { return lowest_written_; }

  double min_counter() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [id, c] : counters_) m = std::min(m, c);
    return counters_.empty() ? 0.0 : m;
  }

  /// Sum recomputed from the individual counters, free of running-sum drift.
  double recompute() const {
    double s = 0.0;
    for (const auto& [id, c] : counters_) s += c;
    return s;
  }

  void reset() {
    counters_.clear();
    sum_ = 0.0;
    lowest_written_ = 0.0;
  }

 private:
  std::unordered_map<const void*, double> counters_;
  double sum_ = 0.0;
  double lowest_written_ = 0.0;
};

/// Feeds a tree's update hooks into a potential_tracker and checks the
/// amortisation bounds: each update raises C by at most 16, each top-level
/// rotating CGC / RCGC call on a large enough subtree lowers it by at least
/// `delta_potential`, and no counter goes negative.
class potential_observer : public tree_observer {
 public:
  static constexpr double max_update_increase = 16.0;
  static constexpr double tolerance = 1e-9;

  explicit potential_observer(const balance_params& p)
      : drop_(p.delta_potential), threshold_(p.potential_threshold_weight()) {}

  void on_update_begin(update_kind, weight_t) override { update_start_ = tracker.total(); }

  void on_update_end(bool) override {
    const double d = tracker.total() - update_start_;
    ++updates;
    max_update_delta = std::max(max_update_delta, d);
    if (d > max_update_increase + tolerance) fail("update raised C by " + str(d));
    if (tracker.lowest_written() < -tolerance) {
      fail("negative counter " + str(tracker.lowest_written()));
    }
    if (tracker.total() < -tolerance) fail("negative potential sum " + str(tracker.total()));
  }

  void on_leaf_change(update_kind, std::span<const path_entry> ancestors, const void* created,
                      const void* removed) override {
    for (const path_entry& e : ancestors) tracker.descendant_changed(e.id, e.weight_before);
    if (created) tracker.created(created);
    if (removed) tracker.removed(removed);
  }

  void on_affected(const void* id) override { tracker.affected(id); }

  void on_balance_begin(routine_kind r, weight_t) override {
    if (depth_++ == 0 && (r == routine_kind::cgc || r == routine_kind::rcgc)) {
      call_start_ = tracker.total();
    }
  }

  void on_balance_end(routine_kind r, weight_t w, bool changed) override {
    if (--depth_ != 0 || !changed || (r != routine_kind::cgc && r != routine_kind::rcgc)) return;
    ++rotating_calls;
    if (w < threshold_) return;
    const double d = tracker.total() - call_start_;
    ++large_calls;
    max_large_call_delta = std::max(max_large_call_delta, d);
    if (d > -drop_ + tolerance) {
      fail(std::string(to_string(r)) + " call on weight " + std::to_string(w) +
           " changed C by " + str(d));
    }
  }

  potential_tracker tracker;
  std::uint64_t updates = 0;
  std::uint64_t rotating_calls = 0;
  std::uint64_t large_calls = 0;
  double max_update_delta = -std::numeric_limits<double>::infinity();
  double max_large_call_delta = -std::numeric_limits<double>::infinity();
  std::uint64_t failure_count = 0;
  std::vector<std::string> failures;  // first few messages only

  bool ok() const { return failure_count == 0; }
  weight_t large_call_threshold() const { return threshold_; }

 private:
  static std::string str(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
  }

  void fail(std::string msg) {
    ++failure_count;
    if (failures.size() < 16) failures.push_back(std::move(msg));
  }

  double drop_;
  weight_t threshold_;
  int depth_ = 0;
  double update_start_ = 0.0;
  double call_start_ = 0.0;
};

template <class Key, class Compare>
tree_stats compute_stats(const tree<Key, Compare>& t, const potential_tracker* pt) {
  tree_stats s = compute_stats(t.root());
  s.rotations_simple = t.counters().simple;
  s.rotations_double = t.counters().doubles;
  if (pt) s.potential_sum = pt->total();
  return s;
}

}  // namespace gcb
