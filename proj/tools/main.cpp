#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "harness.hpp"

namespace {

using namespace gcb::cli;

struct common_flags {
  std::string alpha = "0.72";
  std::string beta = "0.5";
  std::string output;
};

void add_params(CLI::App* cmd, common_flags& f) {
  cmd->add_option("--alpha", f.alpha, "child-balance parameter: a number or 1/sqrt2")
      ->capture_default_str();
  cmd->add_option("--beta", f.beta, "grandchild-balance parameter: a number, B (=B(alpha)) or a^2")
      ->capture_default_str();
}

void add_output(CLI::App* cmd, common_flags& f) {
  cmd->add_option("--output,-o", f.output, "write to this file instead of standard output");
}

// Standard output unless --output names a file.
class sink {
 public:
  explicit sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw parse_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<workload_record> load_workload(const std::string& path) {
  if (path == "-") return parse_workload(std::cin);
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open workload file '" + path + "'");
  return parse_workload(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grandchildren-balanced search trees: run, generate, inspect and benchmark"};
  app.require_subcommand(1);

  common_flags run_flags;
  std::string workload_path;
  std::string algo = "bu";
  std::string run_format = "json";
  auto add_run_like = [&](CLI::App* cmd) {
    cmd->add_option("workload", workload_path, "workload file ('-' for standard input)")->required();
    add_params(cmd, run_flags);
    cmd->add_option("--algorithm", algo, "bu (bottom-up) or td (top-down)")
        ->check(CLI::IsMember({"bu", "td"}))
        ->capture_default_str();
    cmd->add_option("--format", run_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    add_output(cmd, run_flags);
  };
  CLI::App* run_cmd = app.add_subcommand("run", "replay a workload and check the bounds");
  add_run_like(run_cmd);
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "run with audits, robust-balance census and potential accounting");
  add_run_like(verify_cmd);

  common_flags gen_flags;
  std::string gen_kind;
  std::uint64_t gen_n = 0;
  std::uint64_t gen_seed = 1;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write a deterministic workload");
  gen_cmd->add_option("kind", gen_kind, "random, ascending, descending, interleaved-delete or mixed")
      ->required()
      ->check(CLI::IsMember(workload_kinds()));
  gen_cmd->add_option("n", gen_n, "size")->required();
  gen_cmd->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
  add_output(gen_cmd, gen_flags);

  common_flags worst_flags;
  std::uint64_t worst_s = 0;
  std::string worst_format = "stats";
  CLI::App* worst_cmd = app.add_subcommand("worst", "build the worst-case tree T(s)");
  worst_cmd->add_option("s", worst_s, "weight of the tree (nodes + 1)")
      ->required()
      ->check(CLI::Range(std::uint64_t{1}, gcb::max_weight));
  add_params(worst_cmd, worst_flags);
  worst_cmd->add_option("--format", worst_format, "stats (JSON) or dot")
      ->check(CLI::IsMember({"stats", "dot"}))
      ->capture_default_str();
  add_output(worst_cmd, worst_flags);

  common_flags bench_flags;
  std::uint64_t bench_n = 0;
  std::uint64_t bench_seed = 1;
  std::string sweep{default_sweep};
  CLI::App* bench_cmd = app.add_subcommand("bench", "compare bu and td over parameter points");
  bench_cmd->add_option("n", bench_n, "initial insert count of the interleaved-delete workload")
      ->required();
  bench_cmd->add_option("--seed", bench_seed, "RNG seed")->capture_default_str();
  bench_cmd->add_option("--sweep", sweep, "alpha:beta pairs separated by commas")
      ->capture_default_str();
  add_output(bench_cmd, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (run_cmd->parsed() || verify_cmd->parsed()) {
      const double a = parse_alpha(run_flags.alpha);
      const double b = parse_beta(run_flags.beta, a);
      const gcb::balance_params p = gcb::derive_constants(a, b);
      const auto records = load_workload(workload_path);
      run_options o;
      o.algo = parse_algorithm(algo);
      o.verify = verify_cmd->parsed();
      const run_report r = run(records, p, o);
      sink out(run_flags.output);
      if (run_format == "csv") {
        write_csv(out.get(), r);
      } else {
        out.get() << to_json(r).dump(2) << '\n';
      }
      return r.ok() ? exit_ok : exit_failed;
    }
    if (gen_cmd->parsed()) {
      sink out(gen_flags.output);
      write_generated(out.get(), gen_kind, gen_n, gen_seed);
      return exit_ok;
    }
    if (worst_cmd->parsed()) {
      const double a = parse_alpha(worst_flags.alpha);
      const double b = parse_beta(worst_flags.beta, a);
      sink out(worst_flags.output);
      if (worst_format == "dot") {
        const auto root = gcb::worst_case_tree<gcb::cli::key_t>(worst_s, a, b);
        write_dot(out.get(), root.get());
        return exit_ok;
      }
      const worst_report r = worst(worst_s, a, b);
      out.get() << to_json(r).dump(2) << '\n';
      return r.ok() ? exit_ok : exit_failed;
    }
    if (bench_cmd->parsed()) {
      const auto rows = bench(bench_n, bench_seed, parse_sweep(sweep));
      sink out(bench_flags.output);
      write_bench_csv(out.get(), rows);
      return exit_ok;
    }
  } catch (const gcb::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return exit_domain;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const gcb::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failed;
  }
  return exit_usage;
}
