#include <cmath>
#include <cstdio>
#include <optional>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "srblab/error.hpp"
#include "srblab/experiment/config.hpp"
#include "srblab/experiment/csv.hpp"
#include "srblab/experiment/runners.hpp"
#include "srblab/parallel.hpp"

namespace ex = srblab::experiment;

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, io_error = 4 };

void print_report(const srblab::EntropyReport& r) {
  for (const auto& [name, e] : r.rows()) {
    if (e->ok())
      std::printf("%-9s %.10f  se %.3g  trunc %.3g\n", name.c_str(), e->value, e->std_error, e->truncation_bound);
    else
      std::printf("%-9s n/a  (%s)\n", name.c_str(), e->error.c_str());
  }
  if (!std::isnan(r.kac)) std::printf("kac mass  %.10f  spread mass %.10f\n", r.kac, r.spread_mass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srblab: invariant densities, towers and entropy of low-dimensional maps"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned workers = 0;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "overrides rng.seed");
  app.add_option("--out", out_dir, "overrides output.dir");
  app.add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  auto* entropy = app.add_subcommand("entropy", "every entropy estimator for one map");
  auto* induce = app.add_subcommand("induce", "build and verify the first-return tower");
  auto* density = app.add_subcommand("density", "invariant densities (one-step, tower, spread)");
  auto* tail = app.add_subcommand("tail", "expansion/recurrence tail profile and decay fits");
  auto* sweep = app.add_subcommand("sweep", "continuity sweep over one map parameter");
  auto* probe = app.add_subcommand("probe", "non-degeneracy probe of the critical set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    ex::ExperimentConfig cfg = config_path.empty() ? ex::ExperimentConfig{} : ex::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.validate();
    (void)ex::build_map(cfg.map);
    srblab::parallel::set_worker_count(workers);
    if (print_config) {
      std::cout << ex::serialize_config(cfg);
      return ok;
    }
    std::filesystem::create_directories(cfg.output_dir);

    if (entropy->parsed()) {
      print_report(ex::run_entropy(cfg));
    } else if (induce->parsed()) {
      const auto r = ex::run_induce(cfg);
      std::printf("cells %zu  deficit %.3g  kappa %.6g  K %.6g  onto %.3g  axioms %s\n", r.tower.cells().size(),
                  r.tower.deficit_mass(), r.report.kappa, r.report.K, r.report.onto_defect,
                  r.report.pass() ? "pass" : "FAIL");
    } else if (density->parsed()) {
      const auto r = ex::run_density(cfg);
      std::printf("mu_f  bins %zu  min %.6g  max %.6g  growth %.4g\n", r.mu_f.grid.size(), r.mu_f_bounds.lower,
                  r.mu_f_bounds.upper, r.mu_f_bounds.refinement_growth);
      if (r.mu_F_bounds)
        std::printf("mu_F  bins %zu  min %.6g  max %.6g  bounds %s\n", r.mu_F->grid.size(), r.mu_F_bounds->lower,
                    r.mu_F_bounds->upper, r.mu_F_bounds->pass ? "pass" : "FAIL");
    } else if (tail->parsed()) {
      const auto r = ex::run_tail(cfg);
      for (const auto* f : {&r.polynomial, &r.stretched}) {
        const char* name = f == &r.polynomial ? "polynomial" : "stretched";
        if (f->fit)
          std::printf("%-10s C %.6g  gamma %.6g  residual %.4g\n", name, f->fit->C, f->fit->gamma, f->fit->residual);
        else
          std::printf("%-10s n/a  (%s)\n", name, f->error.c_str());
      }
    } else if (sweep->parsed()) {
      const auto t = ex::run_sweep(cfg);
      for (const auto& row : t.rows)
        std::printf("%s=%.6g  %-7s  pesin %.8f  lyapunov %.8f%s%s\n", t.parameter.c_str(), row.parameter,
                    row.status.c_str(), row.report.pesin.value, row.report.lyapunov.value,
                    row.error.empty() ? "" : "  ", row.error.c_str());
    } else if (probe->parsed()) {
      const auto r = ex::run_probe(cfg);
      std::printf("c1 %.6g  c2 %.6g  c3 %.6g  skipped %zu  %s\n", r.c1.ratio, r.c2.ratio, r.c3.ratio, r.skipped,
                  r.pass() ? "consistent" : "violated");
    }
    std::printf("output in %s\n", cfg.output_dir.c_str());
    return ok;
  } catch (const srblab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const srblab::ArgumentError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const srblab::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return io_error;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return io_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return numerical_error;
  }
}
