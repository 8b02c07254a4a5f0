#include <gtest/gtest.h>

#include <sstream>

#include "harness.hpp"

using namespace gcb;
using namespace gcb::cli;

TEST(ParseWorkload, RecordsCommentsAndBlankLines) {
  std::istringstream in("# header\n\ni 5\r\n  d -3\nq 9223372036854775807\n");
  const auto r = parse_workload(in);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], (workload_record{op_kind::insert, 5}));
  EXPECT_EQ(r[1], (workload_record{op_kind::erase, -3}));
  EXPECT_EQ(r[2].key, INT64_MAX);
}

TEST(ParseWorkload, ErrorsNameTheLine) {
  for (const char* bad : {"i 1\ni 2\nx 3\n", "i 1\ni 2\ni\n", "i 1\n\ni 9999999999999999999\n",
                          "i 1\ni 2\ni 3 4\n", "i 1\ni 2\ni 0x10\n"}) {
    std::istringstream in(bad);
    try {
      parse_workload(in);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const parse_error& e) {
      EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
  }
}

TEST(ParseWorkload, WriteRoundTrip) {
  const auto records = generate("mixed", 500, 9);
  std::stringstream ss;
  write_workload(ss, records);
  EXPECT_EQ(parse_workload(ss), records);
}

TEST(ParseParams, Tokens) {
  EXPECT_EQ(parse_alpha("1/sqrt2"), inv_sqrt2);
  EXPECT_EQ(parse_alpha("0.72"), 0.72);
  EXPECT_EQ(parse_beta("B", inv_sqrt2), scriptB(inv_sqrt2));
  EXPECT_EQ(parse_beta("a^2", 0.74), 0.74 * 0.74);
  EXPECT_EQ(parse_beta("0.5", 0.72), 0.5);
  EXPECT_THROW(parse_alpha("seven"), parse_error);
  EXPECT_THROW(parse_beta("0.5x", 0.72), parse_error);
  EXPECT_THROW(parse_algorithm("xx"), parse_error);
  EXPECT_EQ(parse_algorithm("td"), algorithm::td);
}

TEST(Splitmix64, FrozenStream) {
  splitmix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

TEST(Splitmix64, BelowStaysInRange) {
  splitmix64 rng(7);
  for (std::uint64_t bound : {1ull, 2ull, 3ull, 10ull, 1000003ull}) {
    for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(bound), bound);
  }
  EXPECT_EQ(rng.below(0), 0u);
}

TEST(Generate, DeterministicAndSized) {
  for (const std::string& kind : workload_kinds()) {
    EXPECT_EQ(generate(kind, 300, 4), generate(kind, 300, 4)) << kind;
  }
  EXPECT_NE(generate("random", 300, 4), generate("random", 300, 5));
  EXPECT_EQ(generate("interleaved-delete", 1000, 1).size(), 2000u);
  EXPECT_EQ(generate("ascending", 3, 0),
            (std::vector<workload_record>{{op_kind::insert, 1}, {op_kind::insert, 2}, {op_kind::insert, 3}}));
  EXPECT_THROW(generate("sideways", 3, 0), parse_error);
}

TEST(Generate, InterleavedDeleteOnlyDeletesPresentKeys) {
  const auto records = generate("interleaved-delete", 2000, 3);
  std::set<std::int64_t> present;
  for (const auto& r : records) {
    if (r.op == op_kind::insert) {
      EXPECT_TRUE(present.insert(r.key).second);
    } else {
      EXPECT_EQ(present.erase(r.key), 1u);
    }
  }
  EXPECT_EQ(present.size(), 2000u);
}

TEST(Generate, HeaderLine) {
  std::ostringstream os;
  write_generated(os, "ascending", 2, 11);
  EXPECT_EQ(os.str(), "# gcb workload kind=ascending n=2 seed=11 rng=splitmix64\ni 1\ni 2\n");
}

TEST(Run, VerifyReportsPassingVerdicts) {
  const balance_params p = derive_constants(0.72, 0.5);
  const auto records = generate("interleaved-delete", 3000, 2);
  for (algorithm a : {algorithm::bu, algorithm::td}) {
    run_options o;
    o.algo = a;
    o.verify = true;
    o.checkpoint_every = 256;
    const run_report r = run(records, p, o);
    EXPECT_TRUE(r.ok()) << r.error;
    EXPECT_EQ(r.updates, 6000u);
    EXPECT_EQ(r.inserted, 4500u);
    EXPECT_EQ(r.deleted, 1500u);
    EXPECT_EQ(r.stats.n_nodes, 3000u);
    EXPECT_GE(r.checkpoints, 6000u / 256);
    ASSERT_TRUE(r.rotations_ok.has_value());
    EXPECT_TRUE(*r.rotations_ok);
    ASSERT_TRUE(r.potential_ok.has_value());
    EXPECT_TRUE(*r.potential_ok);
    EXPECT_GE(r.worst_height_slack, 0.0);
  }
}

TEST(Run, CriticalPointSkipsCrudeRotationBound) {
  const balance_params p = derive_constants(inv_sqrt2, scriptB(inv_sqrt2));
  const run_report r = run(generate("random", 500, 1), p, {});
  EXPECT_FALSE(r.crude_x.has_value());
  EXPECT_FALSE(r.rotations_ok.has_value());
  EXPECT_TRUE(r.ok());
}

TEST(Run, QueriesCountHits) {
  const balance_params p = derive_constants(0.72, 0.5);
  const std::vector<workload_record> records{{op_kind::insert, 1}, {op_kind::query, 1},
                                             {op_kind::query, 2}, {op_kind::erase, 5}};
  const run_report r = run(records, p, {});
  EXPECT_EQ(r.queries, 2u);
  EXPECT_EQ(r.query_hits, 1u);
  EXPECT_EQ(r.redundant, 1u);
  EXPECT_EQ(r.updates, 2u);
}

TEST(Report, JsonFields) {
  const balance_params p = derive_constants(0.72, 0.5);
  run_options o;
  o.verify = true;
  const run_report r = run(generate("ascending", 1000, 0), p, o);
  const json j = json::parse(to_json(r).dump());
  EXPECT_EQ(j["format"], "gcb-run/1");
  EXPECT_EQ(j["command"], "verify");
  EXPECT_EQ(j["algorithm"], "bu");
  EXPECT_EQ(j["stats"]["n_nodes"], 1000);
  EXPECT_EQ(j["verdicts"]["validation"], "pass");
  EXPECT_EQ(j["verdicts"]["potential"], "pass");
  EXPECT_DOUBLE_EQ(j["params"]["alpha_hat"].get<double>(), p.alpha_hat);
  EXPECT_TRUE(j["ok"].get<bool>());
  EXPECT_FALSE(j.contains("error"));
}

TEST(Report, CsvShape) {
  const balance_params p = derive_constants(0.72, 0.5);
  std::ostringstream os;
  write_csv(os, run(generate("ascending", 100, 0), p, {}));
  std::istringstream in(os.str());
  std::string format, header, row;
  std::getline(in, format);
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(format, "# format=gcb-run/1");
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.rfind("bu,0.72,0.5,100,100,", 0), 0u) << row;
  EXPECT_EQ(row.back(), '1');
}

TEST(Worst, ReportAndDot) {
  const worst_report r = worst(6, 0.72, 0.5);
  EXPECT_EQ(r.stats.height, 2);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_TRUE(r.ok());
  const json j = to_json(r);
  EXPECT_EQ(j["format"], "gcb-worst/1");
  EXPECT_EQ(j["tightness"], "pass");

  const auto t = worst_case_tree<std::int64_t>(4, 0.72, 0.5);
  std::ostringstream os;
  write_dot(os, t.get());
  const std::string dot = os.str();
  EXPECT_EQ(dot.rfind("digraph T {", 0), 0u);
  std::size_t labels = 0;
  for (auto at = dot.find("label="); at != std::string::npos; at = dot.find("label=", at + 1)) ++labels;
  EXPECT_EQ(labels, 3u);
  EXPECT_NE(dot.find("n2 -> n1;"), std::string::npos);
}

TEST(Worst, LargeTreesAreTight) {
  for (std::uint64_t s : {100ull, 1000ull, 10000ull}) EXPECT_TRUE(worst(s, 0.72, 0.5).ok()) << s;
  EXPECT_THROW(worst(100, 0.72, 0.52), domain_error);
}

TEST(Bench, SweepParsing) {
  const auto pts = parse_sweep(std::string(default_sweep));
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].alpha, inv_sqrt2);
  EXPECT_EQ(pts[0].beta, scriptB(inv_sqrt2));
  EXPECT_EQ(pts[2].beta, 0.74 * 0.74);
  EXPECT_THROW(parse_sweep("0.72"), parse_error);
  EXPECT_THROW(parse_sweep(""), parse_error);
}

TEST(Bench, RatiosStayBelowCoefficients) {
  const auto rows = bench(20000, 3, parse_sweep(std::string(default_sweep)));
  ASSERT_EQ(rows.size(), 6u);
  for (const bench_row& r : rows) {
    EXPECT_EQ(r.n, 20000u);
    EXPECT_LE(r.height_ratio, r.height_coefficient) << to_string(r.algo) << ' ' << r.alpha;
    EXPECT_LE(r.path_ratio, r.path_coefficient) << to_string(r.algo) << ' ' << r.alpha;
  }
  EXPECT_NEAR(rows[0].height_coefficient, 1.8798, 5e-5);
  EXPECT_NEAR(rows[0].path_coefficient, 1.1271, 5e-5);
  std::ostringstream a, b;
  write_bench_csv(a, rows);
  write_bench_csv(b, bench(20000, 3, parse_sweep(std::string(default_sweep))));
  EXPECT_EQ(a.str(), b.str());
}
