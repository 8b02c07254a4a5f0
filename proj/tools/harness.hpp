#pragma once

// Workloads, run reports and the commands behind the gcb command-line tool.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gcb/gcb.hpp"

namespace gcb::cli {

using key_t = std::int64_t;
using json = nlohmann::ordered_json;

class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum exit_code : int { exit_ok = 0, exit_failed = 1, exit_usage = 2, exit_domain = 3 };

// ---------------------------------------------------------------- numbers

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Accepts a decimal number or `1/sqrt2`.
inline double parse_alpha(const std::string& token) {
  if (token == "1/sqrt2" || token == "1/sqrt(2)") return inv_sqrt2;
  if (auto v = parse_number(token)) return *v;
  throw parse_error("cannot parse alpha '" + token + "' (expected a number or 1/sqrt2)");
}

/// Accepts a decimal number, `B` for B(alpha) or `a^2` for alpha squared.
inline double parse_beta(const std::string& token, double alpha) {
  if (token == "B" || token == "B(a)") return scriptB(alpha);
  if (token == "a^2" || token == "alpha^2") return alpha * alpha;
  if (auto v = parse_number(token)) return *v;
  throw parse_error("cannot parse beta '" + token + "' (expected a number, B or a^2)");
}

// ---------------------------------------------------------------- workloads

enum class op_kind : char { insert = 'i', erase = 'd', query = 'q' };

struct workload_record {
  op_kind op = op_kind::insert;
  key_t key = 0;

  friend bool operator==(const workload_record&, const workload_record&) = default;
};

/// One record per line, "<op> <key>" with op in {i, d, q}. Blank lines and lines
/// starting with '#' are skipped.
inline std::vector<workload_record> parse_workload(std::istream& in) {
  std::vector<workload_record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line.substr(first));
    std::string op;
    std::string key;
    std::string extra;
    auto fail = [&](const std::string& why) {
      throw parse_error("line " + std::to_string(line_no) + ": " + why + ": '" + line + "'");
    };
    if (!(ls >> op >> key)) fail("expected '<op> <key>'");
    if (ls >> extra) fail("unexpected trailing text");
    if (op.size() != 1 || (op[0] != 'i' && op[0] != 'd' && op[0] != 'q')) {
      fail("unknown op '" + op + "' (expected i, d or q)");
    }
    key_t k = 0;
    auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), k);
    if (ec != std::errc{} || end != key.data() + key.size()) fail("bad 64-bit key '" + key + "'");
    out.push_back({static_cast<op_kind>(op[0]), k});
  }
  return out;
}

inline void write_workload(std::ostream& os, const std::vector<workload_record>& records) {
  for (const auto& r : records) os << static_cast<char>(r.op) << ' ' << r.key << '\n';
}

/// SplitMix64 (Steele, Lea, Flood). Fixed so that a seed means the same stream everywhere.
class splitmix64 {
  __extension__ using u128 = unsigned __int128;

 public:
  explicit splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by Lemire's multiply-shift, with rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const u128 m = static_cast<u128>(next()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::uint64_t state_;
};

inline constexpr std::string_view rng_name = "splitmix64";

inline const std::vector<std::string>& workload_kinds() {
  static const std::vector<std::string> kinds{"random", "ascending", "descending",
                                              "interleaved-delete", "mixed"};
  return kinds;
}

/// Deterministic workloads.
///   random: n inserts of uniform keys in [0, 4n).
///   ascending / descending: inserts of 1..n in order.
///   interleaved-delete: n inserts of distinct random keys, then n/2 rounds of
///     one delete of a random present key and one insert of a fresh key.
///   mixed: n operations, each an insert (1/2), delete (1/3) or query (1/6)
///     of a uniform key in [0, n).
inline std::vector<workload_record> generate(const std::string& kind, std::uint64_t n,
                                             std::uint64_t seed) {
  splitmix64 rng(seed);
  std::vector<workload_record> out;
  const auto key_range = std::max<std::uint64_t>(1, n);
  if (kind == "random") {
    for (std::uint64_t i = 0; i < n; ++i) {
      out.push_back({op_kind::insert, static_cast<key_t>(rng.below(4 * key_range))});
    }
  } else if (kind == "ascending") {
    for (std::uint64_t i = 1; i <= n; ++i) out.push_back({op_kind::insert, static_cast<key_t>(i)});
  } else if (kind == "descending") {
    for (std::uint64_t i = n; i >= 1; --i) out.push_back({op_kind::insert, static_cast<key_t>(i)});
  } else if (kind == "interleaved-delete") {
    std::set<key_t> used;
    std::vector<key_t> present;
    auto fresh = [&] {
      for (;;) {
        const auto k = static_cast<key_t>(rng.below(std::uint64_t{1} << 62));
        if (used.insert(k).second) return k;
      }
    };
    for (std::uint64_t i = 0; i < n; ++i) {
      present.push_back(fresh());
      out.push_back({op_kind::insert, present.back()});
    }
    for (std::uint64_t i = 0; i < n / 2; ++i) {
      const std::size_t at = rng.below(present.size());
      out.push_back({op_kind::erase, present[at]});
      present[at] = present.back();
      present.pop_back();
      present.push_back(fresh());
      out.push_back({op_kind::insert, present.back()});
    }
  } else if (kind == "mixed") {
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t r = rng.below(6);
      const op_kind op = r < 3 ? op_kind::insert : r < 5 ? op_kind::erase : op_kind::query;
      out.push_back({op, static_cast<key_t>(rng.below(key_range))});
    }
  } else {
    throw parse_error("unknown workload kind '" + kind + "'");
  }
  return out;
}

inline void write_generated(std::ostream& os, const std::string& kind, std::uint64_t n,
                            std::uint64_t seed) {
  const auto records = generate(kind, n, seed);
  os << "# gcb workload kind=" << kind << " n=" << n << " seed=" << seed << " rng=" << rng_name
     << '\n';
  write_workload(os, records);
}

// ---------------------------------------------------------------- runs

enum class algorithm { bu, td };

inline algorithm parse_algorithm(const std::string& s) {
  if (s == "bu") return algorithm::bu;
  if (s == "td") return algorithm::td;
  throw parse_error("unknown algorithm '" + s + "' (expected bu or td)");
}

inline std::string_view to_string(algorithm a) { return a == algorithm::bu ? "bu" : "td"; }

/// x such that (alpha, beta) = (1/sqrt2 + x, B(1/sqrt2) + x) or further inside;
/// the crude rotation bound 30 (1 + 28/x) k is stated in terms of it.
inline double crude_bound_x(const balance_params& p) {
  return std::min(p.alpha - inv_sqrt2, p.beta - scriptB(inv_sqrt2));
}

struct run_options {
  algorithm algo = algorithm::bu;
  bool verify = false;                // audit mode, potential checks, robust census
  std::uint64_t checkpoint_every = 1024;
};

struct run_report {
  balance_params params;
  algorithm algo = algorithm::bu;
  bool verify = false;
  std::uint64_t records = 0;
  std::uint64_t updates = 0;  // attempted inserts and deletes
  std::uint64_t inserted = 0;
  std::uint64_t deleted = 0;
  std::uint64_t redundant = 0;
  std::uint64_t queries = 0;
  std::uint64_t query_hits = 0;
  tree_stats stats;
  std::uint64_t rotations_total = 0;
  double rotations_per_update = 0.0;
  double height_bound = 0.0;
  double path_bound = 0.0;
  double worst_height_slack = 0.0;  // min over checkpoints of bound - height
  double worst_path_slack = 0.0;
  std::uint64_t checkpoints = 0;
  std::optional<double> crude_x;
  std::optional<double> crude_rotation_bound;
  std::uint64_t violations = 0;
  std::uint64_t robust_violations = 0;  // informational, verify only
  bool validation_ok = false;
  bool height_ok = false;
  bool path_ok = false;
  std::optional<bool> rotations_ok;
  std::optional<bool> potential_ok;
  double potential_sum = 0.0;
  double max_update_delta = 0.0;
  std::uint64_t large_calls = 0;
  std::vector<std::string> potential_failures;
  std::string error;  // invariant violation raised during the run
  double seconds = 0.0;

  bool ok() const {
    return error.empty() && validation_ok && height_ok && path_ok && rotations_ok.value_or(true) &&
           potential_ok.value_or(true);
  }
};

inline run_report run(const std::vector<workload_record>& records, const balance_params& p,
                      const run_options& opts) {
  const auto started = std::chrono::steady_clock::now();
  run_report rep;
  rep.params = p;
  rep.algo = opts.algo;
  rep.verify = opts.verify;
  rep.worst_height_slack = std::numeric_limits<double>::infinity();
  rep.worst_path_slack = std::numeric_limits<double>::infinity();

  tree_options topts;
  topts.audit = opts.verify;
  tree<key_t> t(p, topts);
  std::optional<potential_observer> po;
  if (opts.verify) {
    po.emplace(p);
    t.attach(&*po);
  }

  auto checkpoint = [&] {
    const tree_stats s = compute_stats(t);
    const bound_values b = theoretical_bounds(s.n_nodes, p);
    rep.worst_height_slack = std::min(rep.worst_height_slack, b.height - double(std::max<std::int64_t>(s.height, 0)));
    rep.worst_path_slack =
        std::min(rep.worst_path_slack, b.external_path_length - double(s.external_path_length));
    ++rep.checkpoints;
  };

  try {
    for (const workload_record& r : records) {
      ++rep.records;
      if (r.op == op_kind::query) {
        ++rep.queries;
        rep.query_hits += t.contains(r.key) ? 1 : 0;
        continue;
      }
      ++rep.updates;
      const bool bu = opts.algo == algorithm::bu;
      const update_outcome o = r.op == op_kind::insert ? (bu ? t.insert_bu(r.key) : t.insert_td(r.key))
                                                       : (bu ? t.erase_bu(r.key) : t.erase_td(r.key));
      switch (o.effect) {
        case update_effect::inserted: ++rep.inserted; break;
        case update_effect::deleted: ++rep.deleted; break;
        case update_effect::redundant: ++rep.redundant; break;
      }
      if (opts.checkpoint_every && rep.updates % opts.checkpoint_every == 0) checkpoint();
    }
  } catch (const invariant_violation& e) {
    rep.error = e.what();
  }
  checkpoint();

  rep.stats = compute_stats(t, po ? &po->tracker : nullptr);
  rep.rotations_total = t.counters().total;
  rep.rotations_per_update =
      rep.updates ? static_cast<double>(rep.rotations_total) / static_cast<double>(rep.updates) : 0.0;
  const bound_values b = theoretical_bounds(rep.stats.n_nodes, p);
  rep.height_bound = b.height;
  rep.path_bound = b.external_path_length;
  rep.height_ok = rep.worst_height_slack >= 0.0;
  rep.path_ok = rep.worst_path_slack >= 0.0;

  const double x = crude_bound_x(p);
  if (x > 0.0) {
    rep.crude_x = x;
    rep.crude_rotation_bound = 30.0 * (1.0 + 28.0 / x) * static_cast<double>(rep.updates);
    rep.rotations_ok = static_cast<double>(rep.rotations_total) < *rep.crude_rotation_bound ||
                       rep.updates == 0;
  }

  const auto report = validate(t, opts.verify);
  rep.violations = report.hard_count();
  rep.robust_violations = report.violations.size() - report.hard_count();
  rep.validation_ok = rep.violations == 0;

  if (po) {
    rep.potential_ok = po->ok();
    rep.potential_sum = po->tracker.total();
    rep.max_update_delta = po->updates ? po->max_update_delta : 0.0;
    rep.large_calls = po->large_calls;
    rep.potential_failures = po->failures;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

inline json params_json(const balance_params& p) {
  return json{{"alpha", p.alpha},
              {"beta", p.beta},
              {"scriptB", p.scriptB},
              {"alpha_hat_c", p.alpha_hat_c},
              {"alpha_hat", p.alpha_hat},
              {"beta_hat", p.beta_hat},
              {"delta_gc", p.delta_gc},
              {"alpha_bullet", p.alpha_bullet},
              {"Delta", p.Delta},
              {"delta_potential", p.delta_potential},
              {"eta", p.eta},
              {"epsilon", p.epsilon}};
}

inline std::string verdict(bool ok) { return ok ? "pass" : "fail"; }
inline std::string verdict(const std::optional<bool>& ok) {
  return ok ? verdict(*ok) : std::string("skipped");
}

inline json to_json(const run_report& r) {
  json j;
  j["format"] = "gcb-run/1";
  j["command"] = r.verify ? "verify" : "run";
  j["algorithm"] = std::string(to_string(r.algo));
  j["params"] = params_json(r.params);
  j["workload"] = {{"records", r.records},       {"updates", r.updates},
                   {"inserted", r.inserted},     {"deleted", r.deleted},
                   {"redundant", r.redundant},   {"queries", r.queries},
                   {"query_hits", r.query_hits}};
  j["stats"] = {{"n_nodes", r.stats.n_nodes},
                {"height", r.stats.height},
                {"internal_path_length", r.stats.internal_path_length},
                {"external_path_length", r.stats.external_path_length},
                {"potential_sum", r.stats.potential_sum},
                {"rotations_simple", r.stats.rotations_simple},
                {"rotations_double", r.stats.rotations_double},
                {"rotations_total", r.rotations_total},
                {"rotations_per_update", r.rotations_per_update}};
  j["bounds"] = {{"height", r.height_bound},
                 {"external_path_length", r.path_bound},
                 {"checkpoints", r.checkpoints},
                 {"min_height_slack", r.worst_height_slack},
                 {"min_path_slack", r.worst_path_slack},
                 {"crude_x", r.crude_x ? json(*r.crude_x) : json(nullptr)},
                 {"crude_rotation_bound",
                  r.crude_rotation_bound ? json(*r.crude_rotation_bound) : json(nullptr)}};
  j["violations"] = r.violations;
  j["verdicts"] = {{"validation", verdict(r.validation_ok)},
                   {"height", verdict(r.height_ok)},
                   {"path_length", verdict(r.path_ok)},
                   {"rotations", verdict(r.rotations_ok)}};
  if (r.verify) {
    j["verdicts"]["potential"] = verdict(r.potential_ok);
    j["potential"] = {{"sum", r.potential_sum},
                      {"max_update_increase", r.max_update_delta},
                      {"large_calls", r.large_calls},
                      {"failures", r.potential_failures}};
    j["robust_violations"] = r.robust_violations;
  }
  if (!r.error.empty()) j["error"] = r.error;
  j["ok"] = r.ok();
  j["duration_seconds"] = r.seconds;
  return j;
}

inline void write_csv(std::ostream& os, const run_report& r) {
  os << "# format=gcb-run/1\n";
  os << "algorithm,alpha,beta,updates,n_nodes,height,internal_path_length,external_path_length,"
        "rotations_simple,rotations_double,rotations_per_update,height_bound,path_bound,"
        "violations,validation,height,path_length,rotations,ok\n";
  os << to_string(r.algo) << ',' << format_double(r.params.alpha) << ','
     << format_double(r.params.beta) << ',' << r.updates << ',' << r.stats.n_nodes << ','
     << r.stats.height << ',' << r.stats.internal_path_length << ','
     << r.stats.external_path_length << ',' << r.stats.rotations_simple << ','
     << r.stats.rotations_double << ',' << format_double(r.rotations_per_update) << ','
     << format_double(r.height_bound) << ',' << format_double(r.path_bound) << ','
     << r.violations << ',' << verdict(r.validation_ok) << ',' << verdict(r.height_ok) << ','
     << verdict(r.path_ok) << ',' << verdict(r.rotations_ok) << ',' << (r.ok() ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------- worst case

struct worst_report {
  std::uint64_t s = 0;
  double alpha = 0.0;
  double beta = 0.0;
  tree_stats stats;
  double height_lower = 0.0;  // -2 log2(s) / log2(beta) - 7
  double path_lower = 0.0;    // s log2(s) / Delta - 4(s - 1)
  std::uint64_t min_path = 0;
  std::uint64_t violations = 0;

  bool tight() const {
    return double(stats.height) >= height_lower && double(stats.external_path_length) >= path_lower;
  }
  bool ok() const { return violations == 0 && tight(); }
};

inline worst_report worst(std::uint64_t s, double alpha, double beta) {
  worst_report r;
  r.s = s;
  r.alpha = alpha;
  r.beta = beta;
  const node_ptr<key_t> root = worst_case_tree<key_t>(s, alpha, beta);
  r.stats = compute_stats(root.get());
  const double ls = std::log2(static_cast<double>(s));
  r.height_lower = -2.0 * ls / std::log2(beta) - 7.0;
  r.path_lower = static_cast<double>(s) * ls / path_length_entropy(alpha, beta) -
                 4.0 * static_cast<double>(s - 1);
  r.min_path = min_external_path(s);
  // The validator only needs alpha and beta; T(s) may lie outside D'.
  balance_params p;
  p.alpha = alpha;
  p.beta = beta;
  r.violations = validate(root.get(), p).violations.size();
  return r;
}

inline json to_json(const worst_report& r) {
  return json{{"format", "gcb-worst/1"},
              {"s", r.s},
              {"alpha", r.alpha},
              {"beta", r.beta},
              {"n_nodes", r.stats.n_nodes},
              {"height", r.stats.height},
              {"internal_path_length", r.stats.internal_path_length},
              {"external_path_length", r.stats.external_path_length},
              {"min_external_path_length", r.min_path},
              {"height_lower", r.height_lower},
              {"path_lower", r.path_lower},
              {"violations", r.violations},
              {"tightness", verdict(r.tight())},
              {"ok", r.ok()}};
}

inline void write_dot(std::ostream& os, const node<key_t>* root) {
  os << "digraph T {\n";
  std::vector<const node<key_t>*> stack;
  if (root) stack.push_back(root);
  std::vector<std::string> edges;
  while (!stack.empty()) {
    const node<key_t>* n = stack.back();
    stack.pop_back();
    os << "  n" << n->key << " [label=\"" << n->key << " (" << n->weight << ")\"];\n";
    for (const node<key_t>* c : {n->left.get(), n->right.get()}) {
      if (!c) continue;
      edges.push_back("  n" + std::to_string(n->key) + " -> n" + std::to_string(c->key) + ";");
      stack.push_back(c);
    }
  }
  for (const auto& e : edges) os << e << '\n';
  os << "}\n";
}

// ---------------------------------------------------------------- bench

struct bench_point {
  double alpha = 0.0;
  double beta = 0.0;
};

/// "a:b,a:b,..." where each side accepts the same tokens as --alpha / --beta.
inline std::vector<bench_point> parse_sweep(const std::string& text) {
  std::vector<bench_point> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw parse_error("sweep point '" + item + "' is not alpha:beta");
    const double a = parse_alpha(item.substr(0, colon));
    out.push_back({a, parse_beta(item.substr(colon + 1), a)});
  }
  if (out.empty()) throw parse_error("empty sweep");
  return out;
}

inline constexpr std::string_view default_sweep = "1/sqrt2:B,0.72:0.5,0.74:a^2";

struct bench_row {
  algorithm algo = algorithm::bu;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t n = 0;
  std::int64_t height = 0;
  double height_ratio = 0.0;        // height / log2(N + 1)
  double path_ratio = 0.0;          // external path length / ((N + 1) log2(N + 1))
  double rotations_per_update = 0.0;
  double height_coefficient = 0.0;  // -2 / log2(beta)
  double path_coefficient = 0.0;    // 1 / Delta
};

/// Replays the interleaved-delete workload of size n at every sweep point with both algorithms.
inline std::vector<bench_row> bench(std::uint64_t n, std::uint64_t seed,
                                    const std::vector<bench_point>& sweep) {
  std::vector<balance_params> params;
  for (const auto& pt : sweep) params.push_back(derive_constants(pt.alpha, pt.beta));
  const auto records = generate("interleaved-delete", n, seed);
  std::vector<bench_row> rows;
  for (const auto& p : params) {
    for (algorithm a : {algorithm::bu, algorithm::td}) {
      run_options o;
      o.algo = a;
      o.checkpoint_every = 0;
      const run_report r = run(records, p, o);
      bench_row row;
      row.algo = a;
      row.alpha = p.alpha;
      row.beta = p.beta;
      row.n = r.stats.n_nodes;
      row.height = r.stats.height;
      const double l = std::log2(static_cast<double>(row.n) + 1.0);
      row.height_ratio = l > 0 ? static_cast<double>(row.height) / l : 0.0;
      row.path_ratio = l > 0 ? static_cast<double>(r.stats.external_path_length) /
                                   ((static_cast<double>(row.n) + 1.0) * l)
                             : 0.0;
      row.rotations_per_update = r.rotations_per_update;
      row.height_coefficient = -2.0 / std::log2(p.beta);
      row.path_coefficient = 1.0 / p.Delta;
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<bench_row>& rows) {
  os << "# format=gcb-bench/1\n";
  os << "algorithm,alpha,beta,n,height,height_ratio,path_ratio,rotations_per_update,"
        "height_coefficient,path_coefficient\n";
  for (const auto& r : rows) {
    os << to_string(r.algo) << ',' << format_double(r.alpha) << ',' << format_double(r.beta) << ','
       << r.n << ',' << r.height << ',' << format_double(r.height_ratio) << ','
       << format_double(r.path_ratio) << ',' << format_double(r.rotations_per_update) << ','
       << format_double(r.height_coefficient) << ',' << format_double(r.path_coefficient) << '\n';
  }
}

}  // namespace gcb::cli
