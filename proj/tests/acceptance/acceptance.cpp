// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "srblab/entropy.hpp"
#include "srblab/experiment/config.hpp"
#include "srblab/experiment/csv.hpp"
#include "srblab/experiment/runners.hpp"
#include "srblab/misiurewicz.hpp"
#include "srblab/parallel.hpp"
#include "srblab/spread.hpp"

using namespace srblab;
using namespace srblab::experiment;
namespace fs = std::filesystem;

namespace {

const double kLog2 = std::log(2.0);

// Viana tail fixtures, pinned from the first run (seed 1).
constexpr double kVianaStretchedGamma = 0.4455680555273227;
constexpr double kVianaUnionAt1 = 0.75509999999999999;
constexpr double kVianaUnionAt200 = 0.0027000000000000001;

fs::path g_root;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      detail += " [x]";
      pass = false;
    }
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig base(const std::string& dir) {
  ExperimentConfig c;
  c.output_dir = (g_root / dir).string();
  fs::create_directories(c.output_dir);
  return c;
}

ExperimentConfig doubling_config(const std::string& dir) {
  ExperimentConfig c = base(dir);
  c.induce.exact = true;
  c.induce.tau_max = 20;
  c.ulam.bins = 4096;
  c.orbit = {100000, 64, 64};
  return c;
}

ExperimentConfig tent_config(const std::string& dir) {
  ExperimentConfig c = doubling_config(dir);
  c.map.family = MapFamily::tent;
  c.map.slope = 2.0;
  c.induce.exact = false;
  c.induce.delta_left = 0.0;
  c.induce.delta_right = 0.5;
  return c;
}

ExperimentConfig circle_sweep_config(const std::string& dir, std::size_t steps) {
  ExperimentConfig c = base(dir);
  c.map.family = MapFamily::perturbed_circle;
  c.sweep = {"t", 0.0, 0.1, steps};
  c.induce.delta_left = 0.0;
  c.induce.delta_right = 0.5;
  c.induce.tau_max = 20;
  c.orbit = {10000, 16, 64};
  c.smb = {200, 8};
  return c;
}

ExperimentConfig viana_tail_config(const std::string& dir) {
  ExperimentConfig c = base(dir);
  c.map.family = MapFamily::viana;
  c.map.a0 = misiurewicz_parameter();
  c.map.alpha = 0.01;
  c.map.d = 16;
  c.tail.sample_size = 10000;
  c.tail.n_max = 200;
  return c;
}

struct Tower {
  const char* name;
  VerifiedTower F;
};

std::vector<Tower> built_in_towers() {
  std::vector<Tower> t;
  t.push_back({"doubling", VerifiedTower::verify(doubling_first_return_exact(20))});
  t.push_back({"tent[0,1/2)", VerifiedTower::verify(first_return_map(MapSystem::tent(2.0), {0.0, 0.5}, 20))});
  t.push_back({"tent[1/3,2/3]",
               VerifiedTower::verify(first_return_map(MapSystem::tent(2.0), {1.0 / 3.0, 2.0 / 3.0}, 20))});
  t.push_back({"quadratic", VerifiedTower::verify(first_return_map(MapSystem::quadratic(2.0), {-1.0, 1.0}, 14))});
  t.push_back({"perturbed", VerifiedTower::verify(first_return_map(MapSystem::perturbed_circle(0.1), {0.0, 0.5}, 20))});
  t.push_back({"circle3", VerifiedTower::verify(first_return_map(MapSystem::linear_circle(3), {0.0, 1.0}, 1))});
  return t;
}

Outcome criterion1() {
  Outcome o;
  const EntropyReport r = run_entropy(doubling_config("c1"));
  o.check(std::abs(r.kac - 2.0) <= 1e-4, "kac %.9f", r.kac);
  o.check(std::abs(r.induced.value - 2 * kLog2) <= 1e-3, "h_induced %.9f", r.induced.value);
  o.check(std::abs(r.abramov.value - kLog2) <= 1e-3, "h_abramov %.9f", r.abramov.value);
  o.check(std::abs(r.spread_mass - r.kac) <= 1e-4, "spread mass %.9f", r.spread_mass);
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (const auto& [name, cfg] : {std::pair{"doubling", doubling_config("c2_doubling")},
                                  std::pair{"tent", tent_config("c2_tent")}}) {
    const EntropyReport r = run_entropy(cfg);
    o.check(std::abs(r.pesin.value - r.abramov.value) <= 2e-3, "%s |pesin-abramov| %.2e", name,
            std::abs(r.pesin.value - r.abramov.value));
    o.check(std::abs(r.lyapunov.value - r.abramov.value) <= 1e-2, "%s |lyapunov-abramov| %.2e", name,
            std::abs(r.lyapunov.value - r.abramov.value));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const MapSystem q = MapSystem::quadratic(2.0);
  const GridDensity rho = stationary_density(ulam_matrix(q, 1u << 14));
  double l1 = 0.0;
  for (std::size_t i = 0; i < rho.grid.nx; ++i) {
    const double a = rho.grid.x_edge(i), b = rho.grid.x_edge(i + 1);
    const double exact = (std::asin(b / 2) - std::asin(a / 2)) / std::numbers::pi;
    l1 += std::abs(rho.values[i] * (b - a) - exact);
  }
  o.check(l1 <= 1e-2, "L1 to Chebyshev %.5f", l1);
  const double pesin = entropy_pesin(q, rho).value;
  o.check(std::abs(pesin - kLog2) <= 0.02, "h_pesin %.6f", pesin);
  const MonteCarlo mc = entropy_lyapunov(q, 64, 100000, 1);
  o.check(std::abs(mc.mean - kLog2) <= 0.02, "h_lyapunov %.6f", mc.mean);
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (const auto& [name, map, F] :
       {std::tuple{"doubling", MapSystem::doubling(), doubling_first_return_exact(20)},
        std::tuple{"tent", MapSystem::tent(2.0), first_return_map(MapSystem::tent(2.0), {0.0, 0.5}, 20)}}) {
    const VerifiedTower vt = VerifiedTower::verify(F);
    const GridDensity mu = stationary_density(ulam_matrix(vt.map(), 4096));
    const QuotientCheck q = lyapunov_quotient_check(map, vt, mu, 64, 100000, 1);
    o.check(std::abs(q.quotient - q.lambda_f) <= 1e-3, "%s |lambda_F/tau - lambda_f| %.2e", name,
            std::abs(q.quotient - q.lambda_f));
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const Tower& t : built_in_towers()) {
    const GridDensity mu = stationary_density(ulam_matrix(t.F.map(), 4096));
    const GridDensity s = spread_measure(t.F.map(), mu, 4096, t.F.map().tau_max());
    const TransferCheck c = jacobian_transfer_check(t.F, mu, s);
    o.check(c.pass(), "%s gap %.2e <= %.2e", t.name, c.gap, c.bound);
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (const Tower& t : built_in_towers()) {
    const MajorantCheck m = majorant_check(t.F);
    o.check(m.worst_ratio <= 1.0 + 1e-9, "%s ratio %.12f", t.name, m.worst_ratio);
  }
  std::vector<MajorantSample> samples{{kLog2, 1}, {5 * kLog2, 5}, {2 * kLog2 * 1.001, 2}};
  o.check(!majorant_from_samples(kLog2, samples).pass, "inflated sample rejected");
  return o;
}

Outcome criterion7() {
  Outcome o;
  const InducedMarkovMap F = doubling_first_return_exact(20);
  const VerificationReport r = verify_axioms(F);
  o.check(r.kappa == 0.5 && r.K == 0.0 && r.onto_defect == 0.0 && r.pass(), "kappa %.17g K %.3g onto %.3g", r.kappa,
          r.K, r.onto_defect);
  TowerCell c = F.cells()[2];
  c.support.hi = c.support.lo + 0.99 * c.support.length();
  const VerificationReport m = verify_axioms(F.with_cell(2, c));
  o.check(!m.markov_pass && std::abs(m.onto_defect - 0.01 * 0.5) <= 1e-9, "shrunk cell onto defect %.6g",
          m.onto_defect);
  return o;
}

struct Refinement {
  double dh = 0.0;
  double drho = 0.0;
};

Refinement successive(const SweepTable& t) {
  Refinement r;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    r.dh = std::max(r.dh, std::abs(t.rows[i].report.pesin.value - t.rows[i - 1].report.pesin.value));
    r.drho = std::max(r.drho, t.rows[i].density_l1_prev);
  }
  return r;
}

Outcome criterion8() {
  Outcome o;
  ExperimentConfig tent = base("c8_tent");
  tent.map.family = MapFamily::tent;
  tent.sweep = {"slope", 1.5, 2.0, 11};
  tent.orbit = {10000, 16, 64};
  double worst = 0.0;
  for (const SweepRow& r : run_sweep(tent).rows)
    worst = r.status == "error" ? HUGE_VAL : std::max(worst, std::abs(r.report.pesin.value - std::log(r.parameter)));
  o.check(worst <= 1e-3, "tent max|h-log s| %.2e", worst);

  const Refinement coarse = successive(run_sweep(circle_sweep_config("c8_circle11", 11)));
  const Refinement fine = successive(run_sweep(circle_sweep_config("c8_circle21", 21)));
  const double rh = fine.dh / coarse.dh, rr = fine.drho / coarse.drho;
  o.check(rh >= 0.4 && rh <= 0.6, "max|dh| ratio %.4f", rh);
  o.check(rr >= 0.4 && rr <= 0.6, "max L1 drho ratio %.4f", rr);
  return o;
}

Outcome criterion9() {
  Outcome o;
  ExperimentConfig d = base("c9_doubling");
  d.tail.lambda = kLog2;
  const TailResult empty = run_tail(d);
  bool all_zero = true;
  for (const TailRow& r : empty.profile.rows) all_zero = all_zero && r.frac_union == 0.0;
  o.check(all_zero && !empty.stretched.fit, "doubling profile empty");

  ExperimentConfig s = base("c9_planted");
  const fs::path file = fs::path(s.output_dir) / "planted.csv";
  CsvTable planted({"n", "fraction"});
  for (int n = 1; n <= 200; ++n) planted.row({std::to_string(n), csv_real(0.8 * std::exp(-0.35 * std::sqrt(n)))});
  planted.write(file);
  s.tail.profile_file = file.string();
  const TailResult rec = run_tail(s);
  const double rel = rec.stretched.fit ? std::abs(rec.stretched.fit->gamma / 0.35 - 1.0) : HUGE_VAL;
  o.check(rel <= 1e-4, "planted gamma rel err %.2e", rel);

  const TailResult v = run_tail(viana_tail_config("c9_viana"));
  bool monotone = true;
  for (std::size_t i = 1; i < v.profile.rows.size(); ++i)
    monotone = monotone && v.profile.rows[i].frac_union <= v.profile.rows[i - 1].frac_union;
  o.check(monotone, "viana union non-increasing");
  const double g = v.stretched.fit ? v.stretched.fit->gamma : -1.0;
  o.check(g > 0.0, "viana gamma %.6f", g);
  o.check(std::abs(g - kVianaStretchedGamma) <= 1e-6 * kVianaStretchedGamma &&
              v.profile.rows.front().frac_union == kVianaUnionAt1 &&
              v.profile.rows.back().frac_union == kVianaUnionAt200,
          "fixtures");
  return o;
}

// Re-runs the CSV-producing criteria with another worker count and compares
// the files byte for byte.
Outcome criterion10() {
  Outcome o;
  const unsigned other = 4;
  parallel::WorkerScope scope(other);
  const std::vector<std::pair<std::string, std::function<void(const std::string&)>>> runs{
      {"c1/entropy.csv", [](const std::string& d) { run_entropy(doubling_config(d)); }},
      {"c2_tent/entropy.csv", [](const std::string& d) { run_entropy(tent_config(d)); }},
      {"c8_circle11/sweep.csv", [](const std::string& d) { run_sweep(circle_sweep_config(d, 11)); }},
      {"c9_viana/tail.csv", [](const std::string& d) { run_tail(viana_tail_config(d)); }},
  };
  for (const auto& [file, rerun] : runs) {
    const fs::path first = g_root / file;
    const std::string dir = "c10_" + first.parent_path().filename().string();
    rerun(dir);
    const bool same = slurp(first) == slurp(g_root / dir / first.filename());
    o.check(same && !slurp(first).empty(), "%s %s", file.c_str(), same ? "identical" : "differs");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "srblab_acceptance";
  fs::remove_all(g_root);
  fs::create_directories(g_root);
  parallel::set_worker_count(1);

  struct Criterion {
    int id;
    double budget_s;  // 0: no runtime requirement
    Outcome (*run)();
  };
  const Criterion criteria[] = {{1, 10, criterion1}, {2, 30, criterion2}, {3, 60, criterion3},
                                {4, 0, criterion4},  {5, 0, criterion5},  {6, 0, criterion6},
                                {7, 0, criterion7},  {8, 0, criterion8},  {9, 300, criterion9},
                                {10, 0, criterion10}};
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.check(secs < c.budget_s, "runtime %.2f s < %.0f s", secs, c.budget_s);
    else o.check(true, "runtime %.2f s", secs);
    std::printf("criterion %2d: %s  %s\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed ? 1 : 0;
}
