#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "srblab/error.hpp"
#include "srblab/experiment/config.hpp"
#include "srblab/experiment/csv.hpp"
#include "srblab/experiment/runners.hpp"
#include "srblab/experiment/svg.hpp"
#include "srblab/parallel.hpp"

using namespace srblab;
using namespace srblab::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("srblab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

ExperimentConfig quick(const std::string& dir) {
  ExperimentConfig c;
  c.output_dir = scratch(dir).string();
  c.orbit.n_iters = 2000;
  c.orbit.sample_size = 16;
  c.ulam.bins = c.ulam.ambient_bins = 1024;
  c.smb.n = 200;
  return c;
}

}  // namespace

TEST(Config, DefaultRoundTrip) {
  const ExperimentConfig c;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, NonDefaultRoundTrip) {
  ExperimentConfig c;
  c.map.family = MapFamily::viana;
  c.map.d = 7;
  c.map.a0 = 1.6000000000000001;
  c.map.alpha = 0.1 / 3.0;
  c.map.half_width = std::nextafter(1.7, 2.0);
  c.sweep = {"alpha", 0.001, 0.1, 5};
  c.orbit = {12345, 7, 3};
  c.ulam = {333, 444, 32, SolveMode::cesaro, 1e-11, 77};
  c.induce = {0.1 + 0.2, 0.7, 9, 3e-13, false};
  c.tail = {0.25, 0.03, 0.2, 150, 999, "profile,with \"quotes\".csv"};
  c.smb = {64, 8};
  c.probe = {2.0, 0.5, 10};
  c.seed = 18446744073709551615ull;
  c.output_dir = "some dir/out";
  const ExperimentConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(std::memcmp(&*back.induce.delta_left, &*c.induce.delta_left, sizeof(double)), 0);
  EXPECT_EQ(config_keys().size(), 39u);
}

TEST(Config, Errors) {
  auto line_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(line_of("map.family = tent\nmap.slop = 2\n").find("line 2"), std::string::npos);
  EXPECT_NE(line_of("# c\n\nmap.slope = two\n").find("line 3"), std::string::npos);
  EXPECT_NE(line_of("map.family = henon\n").find("unknown map family"), std::string::npos);
  EXPECT_NE(line_of("sweep.steps = 1\n").find("steps"), std::string::npos);
  EXPECT_NE(line_of("ulam.tol = 0\n").find("ulam.tol"), std::string::npos);
  EXPECT_NE(line_of("induce.delta_left = 0.2\n").find("together"), std::string::npos);
  EXPECT_NE(line_of("map.slope 2\n").find("key = value"), std::string::npos);
  EXPECT_NE(line_of("map.slope = inf\n").find("finite"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/srblab.cfg"), IoError);
}

TEST(Config, CommentsAndWhitespace) {
  const ExperimentConfig c = parse_config("  map.family=tent   # inline\n\tmap.slope =1.75\r\n");
  EXPECT_EQ(c.map.family, MapFamily::tent);
  EXPECT_EQ(c.map.slope, 1.75);
}

TEST(Config, SweepParameter) {
  MapSpec s;
  EXPECT_EQ(with_parameter(s, "slope", 1.6).slope, 1.6);
  EXPECT_EQ(with_parameter(s, "d", 3.0).d, 3);
  EXPECT_THROW(with_parameter(s, "beta", 1.0), ConfigError);
}

TEST(Csv, RealsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308, std::nextafter(1.0, 2.0)})
    EXPECT_EQ(std::strtod(csv_real(v).c_str(), nullptr), v);
  EXPECT_EQ(csv_real(std::nan("")), "nan");
}

TEST(Csv, QuotingAndReadBack) {
  const fs::path dir = scratch("csv");
  CsvTable t({"a", "b"});
  t.comment("header note");
  t.row({"plain", "has,comma"});
  t.row({"say \"hi\"", "two\nlines"});
  EXPECT_THROW(t.row({"short"}), ArgumentError);
  t.write(dir / "t.csv");
  EXPECT_NE(slurp(dir / "t.csv").find("\"say \"\"hi\"\"\""), std::string::npos);
  const auto rows = read_csv(dir / "t.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][1], "has,comma");
  EXPECT_EQ(rows[2][0], "say \"hi\"");
  EXPECT_EQ(rows[2][1], "two\nlines");
}

TEST(Svg, EmptySeriesIsAnError) {
  EXPECT_THROW(render_svg({}), ArgumentError);
  const std::vector<Series> nan_only{{"x", {1.0}, {std::nan("")}}};
  EXPECT_THROW(render_svg(nan_only), ArgumentError);
}

TEST(Svg, TwoPoints) {
  const std::vector<Series> s{{"a<b", {0.0, 1.0}, {1.0, 2.0}}};
  const std::string svg = render_svg(s, {"title & more", "x", "y"});
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_EQ(occurrences(svg, "<polyline"), 1u);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("title &amp; more"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Entropy, DoublingConfig) {
  ExperimentConfig c = quick("entropy_doubling");
  c.induce.exact = true;
  c.induce.tau_max = 20;
  const EntropyReport r = run_entropy(c);
  for (const Estimate* e : {&r.lyapunov, &r.pesin, &r.abramov, &r.smb_base}) EXPECT_NEAR(e->value, std::log(2.0), 0.02);
  const auto rows = read_csv(fs::path(c.output_dir) / "entropy.csv");
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0][0], "method");
  EXPECT_EQ(rows[0][1], "estimate");
}

TEST(Entropy, CircleThreeConfig) {
  ExperimentConfig c = quick("entropy_circle");
  c.map.family = MapFamily::linear_circle;
  c.map.d = 3;
  c.induce.delta_left = 0.0;
  c.induce.delta_right = 1.0;
  c.induce.tau_max = 1;
  const EntropyReport r = run_entropy(c);
  for (const Estimate* e : {&r.lyapunov, &r.pesin, &r.abramov}) EXPECT_NEAR(e->value, std::log(3.0), 1e-9);
}

TEST(Entropy, ShortTauCapDegradesGracefully) {
  ExperimentConfig c = quick("entropy_short");
  c.induce.exact = true;
  c.induce.tau_max = 1;
  const EntropyReport r = run_entropy(c);
  EXPECT_TRUE(r.abramov.ok());
  EXPECT_GT(r.abramov.truncation_bound, 0.1);
  EXPECT_GT(r.kac_censored, 0.4);
}

TEST(Induce, TowerCsv) {
  ExperimentConfig c = quick("induce");
  c.map.family = MapFamily::tent;
  c.induce.delta_left = 0.0;
  c.induce.delta_right = 0.5;
  c.induce.tau_max = 8;
  const InduceResult r = run_induce(c);
  EXPECT_TRUE(r.report.pass());
  const auto rows = read_csv(fs::path(c.output_dir) / "tower.csv");
  EXPECT_EQ(rows[0][0], "cell_index");
  EXPECT_EQ(rows.size(), 1 + r.tower.cells().size() + r.tower.deficit().size());
  const std::string text = slurp(fs::path(c.output_dir) / "tower.csv");
  for (const char* key : {"# delta", "# kappa", "# K ", "# deficit_mass"}) EXPECT_NE(text.find(key), std::string::npos);
  c.induce.delta_left.reset();
  c.induce.delta_right.reset();
  EXPECT_THROW(run_induce(c), ConfigError);
}

TEST(Density, Files) {
  ExperimentConfig c = quick("density");
  c.map.family = MapFamily::quadratic;
  c.induce.delta_left = -1.0;
  c.induce.delta_right = 1.0;
  c.induce.tau_max = 14;
  const DensityResult r = run_density(c);
  EXPECT_FALSE(r.mu_f_bounds.pass);  // Chebyshev density is unbounded
  ASSERT_TRUE(r.mu_F_bounds.has_value());
  EXPECT_TRUE(r.mu_F_bounds->pass);
  for (const char* f : {"density.csv", "tower_density.csv", "spread.csv", "density.svg"})
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / f)) << f;
}

TEST(Tail, DoublingIsEmpty) {
  ExperimentConfig c = quick("tail_doubling");
  c.tail.lambda = std::log(2.0);
  c.tail.sample_size = 500;
  c.tail.n_max = 40;
  const TailResult r = run_tail(c);
  for (const TailRow& row : r.profile.rows) EXPECT_EQ(row.frac_union, 0.0);
  EXPECT_FALSE(r.polynomial.fit.has_value());
  EXPECT_FALSE(r.stretched.fit.has_value());
  EXPECT_NE(r.stretched.error.find("insufficient"), std::string::npos) << r.stretched.error;
}

TEST(Tail, InjectedProfile) {
  ExperimentConfig c = quick("tail_injected");
  const fs::path file = fs::path(c.output_dir) / "planted.csv";
  CsvTable t({"n", "fraction"});
  for (int n = 1; n <= 150; ++n) t.row({std::to_string(n), csv_real(1.3 * std::exp(-0.7 * std::sqrt(double(n))))});
  t.write(file);
  c.tail.profile_file = file.string();
  const TailResult r = run_tail(c);
  ASSERT_TRUE(r.stretched.fit.has_value());
  EXPECT_NEAR(r.stretched.fit->gamma / 0.7, 1.0, 1e-4);
  EXPECT_NEAR(r.stretched.fit->C / 1.3, 1.0, 1e-4);
  EXPECT_EQ(r.preferred, TailModel::stretched_exponential);
}

TEST(Sweep, TentSlopes) {
  ExperimentConfig c = quick("sweep_tent");
  c.map.family = MapFamily::tent;
  const SweepTable t = run_sweep(c);
  ASSERT_EQ(t.rows.size(), 11u);
  for (const SweepRow& r : t.rows) {
    EXPECT_NE(r.status, "error") << r.error;
    EXPECT_NEAR(r.report.pesin.value, std::log(r.parameter), 1e-3);
  }
  EXPECT_EQ(t.rows.front().density_l1_prev, 0.0);
  EXPECT_EQ(read_csv(fs::path(c.output_dir) / "sweep.csv").size(), 12u);
  const std::string svg = slurp(fs::path(c.output_dir) / "sweep.svg");
  EXPECT_EQ(occurrences(svg, "<polyline"), 2u);  // tower-based methods are absent without Delta
}

TEST(Sweep, CircleDegrees) {
  ExperimentConfig c = quick("sweep_circle");
  c.map.family = MapFamily::linear_circle;
  c.sweep = {"d", 2, 4, 3};
  c.induce.delta_left = 0.0;
  c.induce.delta_right = 1.0;
  c.induce.tau_max = 1;
  const SweepTable t = run_sweep(c);
  for (const SweepRow& r : t.rows) {
    EXPECT_EQ(r.status, "ok") << r.note;
    EXPECT_DOUBLE_EQ(r.report.lyapunov.value, std::log(r.parameter));
    EXPECT_NEAR(r.report.pesin.value, std::log(r.parameter), 1e-12);
    EXPECT_NEAR(r.report.abramov.value, std::log(r.parameter), 1e-12);
  }
  const std::string svg = slurp(fs::path(c.output_dir) / "sweep.svg");
  EXPECT_EQ(occurrences(svg, "<polyline"), 4u);
}

TEST(Sweep, ErrorRowsCarryNoData) {
  ExperimentConfig c = quick("sweep_errors");
  c.map.family = MapFamily::tent;
  c.sweep = {"slope", 1.8, 2.4, 4};
  const SweepTable t = run_sweep(c);
  const auto rows = read_csv(fs::path(c.output_dir) / "sweep.csv");
  ASSERT_EQ(rows.size(), 5u);
  const auto& head = rows[0];
  const std::size_t err = head.size() - 1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const bool failed = rows[i][1] == "error";
    EXPECT_EQ(failed, t.rows[i - 1].parameter > 2.0);
    EXPECT_EQ(failed, !rows[i][err].empty());
    for (std::size_t k = 2; k < err; ++k)
      if (failed) EXPECT_TRUE(rows[i][k].empty()) << head[k];
  }
}

TEST(Sweep, BitIdenticalAcrossWorkerCounts) {
  ExperimentConfig c = quick("sweep_w1");
  c.map.family = MapFamily::perturbed_circle;
  c.sweep = {"t", 0.0, 0.1, 4};
  c.induce.delta_left = 0.0;
  c.induce.delta_right = 0.5;
  c.induce.tau_max = 12;
  {
    parallel::WorkerScope w(1);
    run_sweep(c);
  }
  const std::string one = slurp(fs::path(c.output_dir) / "sweep.csv");
  c.output_dir = scratch("sweep_w3").string();
  {
    parallel::WorkerScope w(3);
    run_sweep(c);
  }
  EXPECT_EQ(slurp(fs::path(c.output_dir) / "sweep.csv"), one);
}

TEST(Probe, Quadratic) {
  ExperimentConfig c = quick("probe");
  c.map.family = MapFamily::quadratic;
  c.probe = {2.0, 1.0, 500};
  const NondegeneracyReport r = run_probe(c);
  EXPECT_LE(r.c1.ratio, 1.0 + 1e-12);
  EXPECT_EQ(read_csv(fs::path(c.output_dir) / "probe.csv").size(), 4u);
}
