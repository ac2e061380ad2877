// SPDX-License-Identifier: Apache-2.0
//
// swt - sample-wise transducer training benchmark CLI.
//
// Subcommands:
//   bench   run one benchmark configuration and emit a csv/json report
//   sweep   run a series of configurations along one axis
//   verify  run the correctness battery (oracles, gradients, engines, memory)

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swt/bench.hpp"
#include "swt/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct BenchFlags {
  std::string mode = "batched";
  std::string precision = "f32";
  std::string format = "csv";
  std::string out;
  bool large_preset = false;
  bool dry_run = false;
};

void add_bench_options(CLI::App* cmd, swt::BenchConfig& cfg, BenchFlags& flags) {
  // --h is a real option here, so help is long-form only.
  cmd->set_help_flag("--help", "print help");
  cmd->add_option("--mode", flags.mode,
                  "batched | sample_wise | sample_wise_pr | sample_wise_pr_dp");
  cmd->add_option("--batch-size", cfg.batch_size, "samples per batch (B)");
  cmd->add_option("--t", cfg.max_frames, "max acoustic length (T)");
  cmd->add_option("--u", cfg.max_labels, "max label length (U)");
  cmd->add_option("--h", cfg.joint_dim, "joint encoding size (H)");
  cmd->add_option("--ha", cfg.acoustic_dim, "acoustic encoding size (H_A)");
  cmd->add_option("--hl", cfg.label_dim, "label encoding size (H_L)");
  cmd->add_option("--v", cfg.vocab, "vocabulary size incl. blank (V)");
  cmd->add_option("--warmup", cfg.warmup_steps, "unrecorded warmup steps");
  cmd->add_option("--steps", cfg.bench_steps, "recorded benchmark steps");
  cmd->add_option("--seed", cfg.seed, "input synthesis seed");
  cmd->add_option("--precision", flags.precision, "f32 | f64");
  cmd->add_option("--mem-budget", cfg.mem_budget_bytes,
                  "memory budget for dynamic parallelism (bytes)");
  cmd->add_option("--alloc-ceiling", cfg.alloc_ceiling_bytes,
                  "simulated allocation ceiling in bytes (0 = off)");
  cmd->add_option("--workers", cfg.worker_count,
                  "worker threads for the dynamic-parallelism mode");
  cmd->add_option("--max-parallel", cfg.max_parallel,
                  "cap on parallel iterations (power of two <= 16)");
  cmd->add_flag("--pi-literal", cfg.literal_pi_extents,
                "feed raw label counts (not allocated lattice rows) into the "
                "parallel-iterations formula");
  cmd->add_option("--format", flags.format, "csv | json");
  cmd->add_option("--out", flags.out, "report destination (default stdout)");
  cmd->add_flag("--large-preset", flags.large_preset,
                "use the large preset (T=500 U=100 H=H_A=H_L=1024 V=4096); "
                "prints analytic tensor sizes before running");
  cmd->add_flag("--dry-run", flags.dry_run,
                "print analytic tensor sizes and exit without running");
}

void apply_preset(const CLI::App* cmd, swt::BenchConfig& cfg) {
  if (cmd->count("--t") == 0) cfg.max_frames = 500;
  if (cmd->count("--u") == 0) cfg.max_labels = 100;
  if (cmd->count("--h") == 0) cfg.joint_dim = 1024;
  if (cmd->count("--ha") == 0) cfg.acoustic_dim = 1024;
  if (cmd->count("--hl") == 0) cfg.label_dim = 1024;
  if (cmd->count("--v") == 0) cfg.vocab = 4096;
}

void resolve_flags(const BenchFlags& flags, swt::BenchConfig& cfg) {
  cfg.mode = swt::parse_mode(flags.mode);
  cfg.precision = flags.precision == "f32" ? swt::Precision::f32
                  : flags.precision == "f64"
                      ? swt::Precision::f64
                      : throw swt::InvalidInputError("unknown precision '" +
                                                     flags.precision + "'");
  cfg.output_format = swt::parse_format(flags.format);
}

void print_analytic_sizes(const swt::BenchConfig& cfg) {
  const swt::LatticeDims dims{cfg.max_frames, cfg.max_labels + 1,
                              cfg.joint_dim,  cfg.acoustic_dim,
                              cfg.label_dim,  cfg.vocab};
  const std::int64_t trio = swt::lattice_trio_bytes(dims, cfg.precision);
  const std::int64_t working = swt::sample_working_bytes(dims, cfg.precision);
  const std::int64_t inputs =
      (cfg.batch_size *
           (cfg.max_frames * cfg.acoustic_dim +
            (cfg.max_labels + 1) * cfg.label_dim) +
       cfg.joint_dim * (cfg.acoustic_dim + cfg.label_dim + 1) +
       cfg.vocab * (cfg.joint_dim + 1)) *
      swt::bytes_per_element(cfg.precision);
  std::fprintf(stderr,
               "analytic sizes (%s, B=%lld T=%lld U=%lld H=%lld V=%lld):\n"
               "  inputs + parameters:              %lld bytes\n"
               "  batched joint/scores/dscores:     %lld bytes\n"
               "  per-sample working set (approx):  %lld bytes\n",
               swt::precision_name(cfg.precision),
               (long long)cfg.batch_size, (long long)cfg.max_frames,
               (long long)cfg.max_labels, (long long)cfg.joint_dim,
               (long long)cfg.vocab, (long long)inputs,
               (long long)(cfg.batch_size * trio), (long long)working);
}

void deliver_report(const std::vector<swt::BenchResult>& results,
                    swt::ReportFormat format, const std::string& out) {
  if (out.empty()) {
    std::cout << swt::emit_report(results, format);
  } else {
    swt::write_report_file(results, format, out);
  }
}

void print_summary(const swt::BenchResult& r) {
  std::fprintf(stderr, "%s B=%lld: status=%s median=%.6fs peak=%lld bytes",
               swt::mode_name(r.config.mode), (long long)r.config.batch_size,
               r.status.c_str(), r.median_step_seconds,
               (long long)r.peak_bytes);
  if (r.status == "oom") {
    std::fprintf(stderr, " (failed allocating '%s', %lld bytes)",
                 r.oom_tensor.c_str(), (long long)r.oom_bytes);
  } else {
    std::fprintf(stderr, " loss=%.9g", r.loss_checksum);
  }
  std::fprintf(stderr, "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sample-wise transducer training compute benchmark"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  swt::BenchConfig bench_cfg;
  BenchFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "run one configuration");
  add_bench_options(bench, bench_cfg, bench_flags);

  swt::BenchConfig sweep_cfg;
  BenchFlags sweep_flags;
  std::string axis = "batch-size";
  std::string values;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run a series along one axis");
  add_bench_options(sweep_cmd, sweep_cfg, sweep_flags);
  sweep_cmd->add_option("--axis", axis, "batch-size | lengths");
  sweep_cmd->add_option("--values", values,
                        "comma list; batch sizes, or TxU pairs / T values "
                        "for the lengths axis")
      ->required();

  std::string scale = "small";
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the correctness battery");
  verify_cmd->add_option("--scale", scale, "small | medium");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (bench->parsed()) {
      if (bench_flags.large_preset) apply_preset(bench, bench_cfg);
      resolve_flags(bench_flags, bench_cfg);
      swt::validate(bench_cfg);
      if (bench_flags.large_preset || bench_flags.dry_run) {
        print_analytic_sizes(bench_cfg);
        if (bench_flags.dry_run) return kExitOk;
      }
      const swt::BenchResult result = swt::run_benchmark(bench_cfg);
      print_summary(result);
      deliver_report({result}, bench_cfg.output_format, bench_flags.out);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      if (sweep_flags.large_preset) apply_preset(sweep_cmd, sweep_cfg);
      resolve_flags(sweep_flags, sweep_cfg);
      swt::validate(sweep_cfg);
      const swt::SweepAxis sweep_axis = swt::parse_axis(axis);
      const auto points =
          swt::parse_sweep_values(sweep_cfg, sweep_axis, values);
      const auto results = swt::sweep(sweep_cfg, sweep_axis, points);
      for (const auto& r : results) print_summary(r);
      deliver_report(results, sweep_cfg.output_format, sweep_flags.out);
      return kExitOk;
    }

    const swt::VerifyReport report =
        swt::run_verification(swt::parse_scale(scale));
    for (const auto& suite : report.suites) {
      std::printf("[%s] %s (%d cases)%s%s\n", suite.passed ? "PASS" : "FAIL",
                  suite.name.c_str(), suite.cases,
                  suite.detail.empty() ? "" : ": ",
                  suite.detail.c_str());
    }
    std::printf("verify: %zu/%zu suites passed\n",
                size_t(std::count_if(report.suites.begin(),
                                     report.suites.end(),
                                     [](const auto& s) { return s.passed; })),
                report.suites.size());
    return report.all_passed() ? kExitOk : kExitVerifyFailed;
  } catch (const swt::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const swt::NumericalDegeneracyError& e) {
    std::fprintf(stderr, "numeric degeneracy: %s\n", e.what());
    return kExitNumeric;
  } catch (const swt::InvalidInputError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const swt::InvalidShapeError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
