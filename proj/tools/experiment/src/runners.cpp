#include "srblab/experiment/runners.hpp"

#include <cmath>

#include "srblab/error.hpp"
#include "srblab/experiment/csv.hpp"
#include "srblab/experiment/svg.hpp"
#include "srblab/parallel.hpp"
#include "srblab/spread.hpp"

namespace srblab::experiment {

namespace {

std::filesystem::path out_path(const ExperimentConfig& c, const char* name) {
  return std::filesystem::path(c.output_dir) / name;
}

std::string count(std::size_t v) { return std::to_string(v); }

std::string interval_text(const Interval& i) { return "[" + csv_real(i.lo) + ", " + csv_real(i.hi) + "]"; }

void describe(CsvTable& t, const ExperimentConfig& c, const MapSystem& map) {
  std::string params;
  for (const auto& [k, v] : map.parameters()) params += " " + k + "=" + csv_real(v);
  t.comment("map " + std::string(map.name()) + params);
  t.comment("seed " + std::to_string(c.seed));
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// L1 distance between densities on the same grid, NaN otherwise.
double grid_l1(const std::optional<GridDensity>& a, const std::optional<GridDensity>& b) {
  if (!a || !b || !(a->grid == b->grid)) return nan();
  return l1_distance(*a, *b);
}

void density_rows(CsvTable& t, const GridDensity& rho) {
  const Grid& g = rho.grid;
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const std::size_t i = iy * g.nx + ix;
      std::vector<std::string> row{count(i), csv_real(g.x_edge(ix)), csv_real(g.x_edge(ix + 1))};
      if (g.dimension == 2) {
        row.push_back(csv_real(g.y_edge(iy)));
        row.push_back(csv_real(g.y_edge(iy + 1)));
      }
      row.push_back(csv_real(rho.values[i]));
      row.push_back(rho.flagged.empty() ? "0" : (rho.flagged[i] ? "1" : "0"));
      t.row(std::move(row));
    }
}

CsvTable density_table(const GridDensity& rho) {
  std::vector<std::string> cols{"bin_index", "x_left", "x_right"};
  if (rho.grid.dimension == 2) cols.insert(cols.end(), {"y_left", "y_right"});
  cols.insert(cols.end(), {"value", "flagged"});
  CsvTable t(cols);
  t.comment("provenance " + std::string(provenance_name(rho.provenance)));
  t.comment("mass " + csv_real(rho.mass()));
  t.comment("renormalized_deficit " + csv_real(rho.deficit));
  t.comment("tau_cap " + count(rho.tau_cap));
  t.comment("iterations " + count(rho.iterations));
  if (rho.truncation_bound != 0.0) t.comment("truncation_bound " + csv_real(rho.truncation_bound));
  return t;
}

void bounds_comments(CsvTable& t, const DensityBounds& b) {
  t.comment("density_lower " + csv_real(b.lower) + " at bin " + count(b.lower_bin));
  t.comment("density_upper " + csv_real(b.upper) + " at bin " + count(b.upper_bin));
  t.comment("refinement_growth " + csv_real(b.refinement_growth));
  if (b.a_priori_C0)
    t.comment("a_priori_bounds " + csv_real(b.a_priori_lower) + " " + csv_real(*b.a_priori_C0) +
              (b.within_a_priori ? " (within)" : " (violated)"));
  t.comment(std::string("bounds_check ") + (b.pass ? "pass" : "fail"));
}

Series line_series(const std::string& label, const GridDensity& rho) {
  Series s{label, {}, {}};
  const Grid& g = rho.grid;
  if (g.dimension == 2) {
    // theta-marginal
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      double m = 0.0;
      for (std::size_t iy = 0; iy < g.ny; ++iy) m += rho.values[iy * g.nx + ix] * g.dy();
      s.x.push_back(0.5 * (g.x_edge(ix) + g.x_edge(ix + 1)));
      s.y.push_back(m);
    }
    return s;
  }
  for (std::size_t ix = 0; ix < g.nx; ++ix) {
    s.x.push_back(0.5 * (g.x_edge(ix) + g.x_edge(ix + 1)));
    s.y.push_back(rho.values[ix]);
  }
  return s;
}

const char* model_name(TailModel m) {
  return m == TailModel::polynomial ? "polynomial" : "stretched_exponential";
}

FitOutcome try_fit(const TailProfile& p, TailModel m) {
  FitOutcome out;
  try {
    out.fit = fit_tail_decay(p, m);
  } catch (const InsufficientDataError& e) {
    out.error = std::string("insufficient data: ") + e.what();
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::optional<InducedMarkovMap> build_tower(const MapSystem& map, const ExperimentConfig& c) {
  if (c.induce.exact) {
    if (map.family() != MapFamily::doubling)
      throw ConfigError("induce.exact is only available for the doubling map");
    return doubling_first_return_exact(c.induce.tau_max);
  }
  if (!c.induce.delta_left) return std::nullopt;
  if (map.dimension() != 1) throw ConfigError("induced maps need a one-dimensional family");
  return first_return_map(map, {*c.induce.delta_left, *c.induce.delta_right}, c.induce.tau_max, c.induce.tol);
}

EntropyConfig entropy_config(const ExperimentConfig& c) {
  EntropyConfig e;
  e.bins = c.ulam.bins;
  e.ambient_bins = c.ulam.ambient_bins;
  e.plane_bins = c.ulam.plane_bins;
  e.mode = c.ulam.mode;
  e.tol = c.ulam.tol;
  e.max_iters = c.ulam.max_iters;
  e.sample_size = c.orbit.sample_size;
  e.n_iters = c.orbit.n_iters;
  e.retry_budget = c.orbit.retry_budget;
  e.smb_n = c.smb.n;
  e.smb_seeds = c.smb.seeds;
  e.seed = c.seed;
  return e;
}

EntropyReport run_entropy(const ExperimentConfig& c) {
  const MapSystem map = build_map(c.map);
  const std::optional<InducedMarkovMap> F = build_tower(map, c);
  EntropyReport rep = entropy_report(map, F, entropy_config(c));

  CsvTable t({"method", "estimate", "std_error", "truncation_bound", "n_orbits", "n_iters", "bins", "tau_cap",
              "error"});
  describe(t, c, map);
  t.comment("kac_mass " + csv_real(rep.kac) + " censored " + csv_real(rep.kac_censored));
  t.comment("spread_mass " + csv_real(rep.spread_mass));
  t.comment("pesin_clip " + csv_real(rep.pesin_clip));
  if (!rep.exponents.empty()) {
    std::string ex;
    for (double v : rep.exponents) ex += " " + csv_real(v);
    t.comment("lyapunov_exponents" + ex);
  }
  for (const auto& d : rep.discrepancies) t.comment("discrepancy " + d.a + "-" + d.b + " " + csv_real(d.value));
  for (const auto& [name, e] : rep.rows())
    t.row({name, csv_real(e->value), csv_real(e->std_error), csv_real(e->truncation_bound), count(e->n_orbits),
           count(e->n_iters), count(e->bins), count(e->tau_cap), e->error});
  t.write(out_path(c, "entropy.csv"));
  return rep;
}

InduceResult run_induce(const ExperimentConfig& c) {
  const MapSystem map = build_map(c.map);
  std::optional<InducedMarkovMap> F = build_tower(map, c);
  if (!F) throw ConfigError("induce needs induce.delta_left/right or induce.exact = true");
  const VerificationReport r = verify_axioms(*F);

  CsvTable t({"cell_index", "left", "right", "tau", "deriv_min", "deriv_max", "kind", "orientation", "itinerary"});
  describe(t, c, map);
  t.comment("delta " + interval_text(F->delta()));
  t.comment("tau_max " + count(F->tau_max()));
  t.comment("cells " + count(F->cells().size()) + " cell_mass " + csv_real(F->cell_mass()));
  t.comment("deficit_mass " + csv_real(F->deficit_mass()));
  t.comment("onto_defect " + csv_real(r.onto_defect) + " cell " + count(r.onto_witness));
  t.comment("kappa " + csv_real(r.kappa) + " at " + csv_real(r.kappa_witness));
  t.comment("K " + csv_real(r.K) + " at (" + csv_real(r.K_witness_x) + ", " + csv_real(r.K_witness_y) + ")");
  t.comment("K0 " + csv_real(r.K0) + " C0 " + csv_real(r.C0_a_priori));
  t.comment(std::string("axioms ") + (r.markov_pass ? "markov:pass" : "markov:FAIL") +
            (r.expansion_pass ? " expansion:pass" : " expansion:FAIL") +
            (r.distortion_pass ? " distortion:pass" : " distortion:FAIL"));
  auto itin = [](const std::vector<std::uint32_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
  };
  for (std::size_t i = 0; i < F->cells().size(); ++i) {
    const TowerCell& w = F->cells()[i];
    t.row({count(i), csv_real(w.support.lo), csv_real(w.support.hi), count(w.tau), csv_real(w.deriv_min),
           csv_real(w.deriv_max), "cell", w.increasing ? "+" : "-", itin(w.itinerary)});
  }
  for (std::size_t i = 0; i < F->deficit().size(); ++i) {
    const DeficitPiece& d = F->deficit()[i];
    t.row({count(i), csv_real(d.support.lo), csv_real(d.support.hi), "", "", "", "deficit", "", itin(d.itinerary)});
  }
  t.write(out_path(c, "tower.csv"));
  return {std::move(*F), r};
}

DensityResult run_density(const ExperimentConfig& c) {
  const MapSystem map = build_map(c.map);
  const UlamMatrix U = map.dimension() == 1 ? ulam_matrix(map, c.ulam.ambient_bins)
                                            : ulam_matrix(map, c.ulam.plane_bins, c.ulam.plane_bins);
  DensityResult res{stationary_density(U, c.ulam.mode, c.ulam.tol, c.ulam.max_iters), {}, {}, {}, {}};
  res.mu_f_bounds = density_bounds_check(res.mu_f);

  CsvTable t = density_table(res.mu_f);
  describe(t, c, map);
  bounds_comments(t, res.mu_f_bounds);
  density_rows(t, res.mu_f);
  t.write(out_path(c, "density.csv"));

  std::vector<Series> plot{line_series("one-step mu_f", res.mu_f)};
  if (std::optional<InducedMarkovMap> F = build_tower(map, c)) {
    const VerifiedTower vt = VerifiedTower::verify(std::move(*F));
    res.mu_F = stationary_density(ulam_matrix(vt.map(), c.ulam.bins), c.ulam.mode, c.ulam.tol, c.ulam.max_iters);
    res.mu_F_bounds = density_bounds_check(*res.mu_F, vt.report().C0_a_priori);
    CsvTable tf = density_table(*res.mu_F);
    describe(tf, c, map);
    tf.comment("delta " + interval_text(vt.map().delta()));
    bounds_comments(tf, *res.mu_F_bounds);
    density_rows(tf, *res.mu_F);
    tf.write(out_path(c, "tower_density.csv"));

    res.spread = spread_measure(vt.map(), *res.mu_F, c.ulam.ambient_bins, vt.map().tau_max());
    const Normalized n = normalize(*res.spread);
    CsvTable ts = density_table(*res.spread);
    describe(ts, c, map);
    ts.comment("l1_to_one_step " + csv_real(grid_l1(n.density, res.mu_f)));
    density_rows(ts, *res.spread);
    ts.write(out_path(c, "spread.csv"));
    plot.push_back(line_series("normalized spread", n.density));
  }
  emit_svg(plot, out_path(c, "density.svg"), {"invariant density, " + std::string(map.name()), "x", "density"});
  return res;
}

TailProfile read_tail_profile(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw IoError("empty tail profile " + path.string());
  std::size_t n_col = rows[0].size(), f_col = rows[0].size();
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    if (rows[0][i] == "n") n_col = i;
    if (rows[0][i] == "fraction" || rows[0][i] == "frac_union") f_col = i;
  }
  if (n_col == rows[0].size() || f_col == rows[0].size())
    throw ConfigError("tail profile " + path.string() + " needs columns n and fraction");
  TailProfile p;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() <= std::max(n_col, f_col)) throw IoError("short row in " + path.string());
    TailRow row;
    try {
      row.n = std::stoull(rows[r][n_col]);
      row.frac_union = std::stod(rows[r][f_col]);
    } catch (const std::exception&) {
      throw IoError("malformed row " + std::to_string(r) + " in " + path.string());
    }
    row.frac_expansion = row.frac_recurrence = nan();
    p.rows.push_back(row);
  }
  p.params.n_max = p.rows.empty() ? 0 : p.rows.back().n;
  return p;
}

TailResult run_tail(const ExperimentConfig& c) {
  TailResult res;
  const bool injected = !c.tail.profile_file.empty();
  std::optional<MapSystem> map;
  if (injected) {
    res.profile = read_tail_profile(c.tail.profile_file);
  } else {
    map = build_map(c.map);
    TailParams p;
    p.lambda = c.tail.lambda;
    p.delta = c.tail.delta;
    p.eps = c.tail.epsilon;
    p.n_max = c.tail.n_max;
    p.sample_size = c.tail.sample_size;
    p.seed = c.seed;
    res.profile = tail_profile(*map, p);
  }
  res.polynomial = try_fit(res.profile, TailModel::polynomial);
  res.stretched = try_fit(res.profile, TailModel::stretched_exponential);
  if (res.polynomial.fit && res.stretched.fit)
    res.preferred = res.stretched.fit->residual <= res.polynomial.fit->residual ? TailModel::stretched_exponential
                                                                                : TailModel::polynomial;

  CsvTable t({"n", "frac_expansion", "frac_recurrence", "frac_union", "censored_count"});
  if (map) describe(t, c, *map);
  if (injected) t.comment("profile injected from " + c.tail.profile_file);
  t.comment("lambda " + csv_real(c.tail.lambda) + " delta " + csv_real(c.tail.delta) + " epsilon " +
            csv_real(c.tail.epsilon) + " samples " + count(c.tail.sample_size));
  t.comment("censored " + count(res.profile.censored));
  for (const TailRow& r : res.profile.rows)
    t.row({count(r.n), csv_real(r.frac_expansion), csv_real(r.frac_recurrence), csv_real(r.frac_union),
           count(res.profile.censored)});
  t.write(out_path(c, "tail.csv"));

  CsvTable f({"model", "C", "gamma", "residual", "points", "preferred", "error"});
  for (const auto& [m, o] : {std::pair{TailModel::polynomial, &res.polynomial},
                             std::pair{TailModel::stretched_exponential, &res.stretched}}) {
    if (o->fit)
      f.row({model_name(m), csv_real(o->fit->C), csv_real(o->fit->gamma), csv_real(o->fit->residual),
             count(o->fit->points), res.preferred == m ? "1" : "0", ""});
    else
      f.row({model_name(m), "", "", "", "", "0", o->error});
  }
  f.write(out_path(c, "tail_fit.csv"));

  std::vector<Series> plot;
  Series u{"union", {}, {}};
  for (const TailRow& r : res.profile.rows) u.x.push_back(static_cast<double>(r.n)), u.y.push_back(r.frac_union);
  plot.push_back(u);
  if (!injected) {
    Series e{"expansion", {}, {}}, rr{"recurrence", {}, {}};
    for (const TailRow& r : res.profile.rows) {
      e.x.push_back(static_cast<double>(r.n)), e.y.push_back(r.frac_expansion);
      rr.x.push_back(static_cast<double>(r.n)), rr.y.push_back(r.frac_recurrence);
    }
    plot.push_back(e);
    plot.push_back(rr);
  }
  try {
    emit_svg(plot, out_path(c, "tail.svg"), {"tail profile", "n", "fraction", true});
  } catch (const ArgumentError&) {
    // all-zero profile: nothing to plot on a log axis
    emit_svg(plot, out_path(c, "tail.svg"), {"tail profile", "n", "fraction", false});
  }
  return res;
}

SweepTable run_sweep(const ExperimentConfig& c) {
  const std::size_t steps = c.sweep.steps;
  const EntropyConfig ecfg = entropy_config(c);
  SweepTable table{c.sweep.param, {}};
  // Rejects unknown parameter names up front.
  (void)with_parameter(c.map, c.sweep.param, c.sweep.from);

  table.rows = parallel::map_indices<SweepRow>(
      steps,
      [&](std::size_t i) {
        SweepRow row;
        row.parameter = i + 1 == steps ? c.sweep.to
                                       : c.sweep.from + (c.sweep.to - c.sweep.from) * static_cast<double>(i) /
                                                            static_cast<double>(steps - 1);
        try {
          const MapSystem map = build_map(with_parameter(c.map, c.sweep.param, row.parameter));
          try {
            row.tower = build_tower(map, c);
          } catch (const Error& e) {
            row.note = e.what();
          }
          row.report = entropy_report(map, row.tower, ecfg);
          if (row.report.verification) {
            row.kappa = row.report.verification->kappa;
            row.K = row.report.verification->K;
          }
          std::size_t failed = 0;
          for (const auto& [name, e] : row.report.rows())
            if (!e->ok()) {
              ++failed;
              if (row.note.empty() && row.tower) row.note = name + ": " + e->error;
            }
          if (failed == row.report.rows().size()) throw Error(row.note.empty() ? "every estimator failed" : row.note);
          row.status = failed == 0 ? "ok" : "partial";
          if (row.status == "partial" && row.note.empty()) row.note = "no induced map for this configuration";
        } catch (const std::exception& e) {
          row = SweepRow{row.parameter, "error", {}, nan(), nan(), nan(), nan(), nan(), "", e.what(), std::nullopt};
        }
        return row;
      },
      1);

  for (std::size_t i = 1; i < steps; ++i) {
    SweepRow& r = table.rows[i];
    const SweepRow& p = table.rows[i - 1];
    if (r.status == "error") continue;
    r.density_l1_prev = grid_l1(r.report.mu_F, p.report.mu_F);
    r.mu_l1_prev = grid_l1(r.report.mu_f, p.report.mu_f);
    r.tau_l1_prev = r.tower && p.tower && r.tower->delta() == p.tower->delta()
                        ? return_time_l1_distance(*r.tower, *p.tower)
                        : nan();
  }

  CsvTable t({"parameter", "status", "h_lyapunov", "h_lyapunov_se", "h_pesin", "h_pesin_clip", "h_induced",
              "h_induced_bound", "h_abramov", "h_abramov_bound", "h_smb", "h_smb_se", "kac", "kappa", "K",
              "density_l1_prev", "mu_l1_prev", "tau_l1_prev", "note", "error"});
  const MapSystem first = build_map(c.map);
  describe(t, c, first);
  t.comment("sweep " + c.sweep.param + " from " + csv_real(c.sweep.from) + " to " + csv_real(c.sweep.to) +
            " steps " + count(steps));
  t.comment("continuity diagnostics are against parameter distance, a proxy for C^k distance of maps");
  for (const SweepRow& r : table.rows) {
    if (r.status == "error") {
      std::vector<std::string> cells(20, "");
      cells[0] = csv_real(r.parameter);
      cells[1] = r.status;
      cells[19] = r.error;
      t.row(std::move(cells));
      continue;
    }
    const EntropyReport& e = r.report;
    t.row({csv_real(r.parameter), r.status, csv_real(e.lyapunov.value), csv_real(e.lyapunov.std_error),
           csv_real(e.pesin.value), csv_real(e.pesin.truncation_bound), csv_real(e.induced.value),
           csv_real(e.induced.truncation_bound), csv_real(e.abramov.value), csv_real(e.abramov.truncation_bound),
           csv_real(e.smb_base.value), csv_real(e.smb_base.std_error), csv_real(e.kac), csv_real(r.kappa),
           csv_real(r.K), csv_real(r.density_l1_prev), csv_real(r.mu_l1_prev), csv_real(r.tau_l1_prev), r.note,
           ""});
  }
  t.write(out_path(c, "sweep.csv"));

  std::vector<Series> plot;
  const std::pair<const char*, const Estimate EntropyReport::*> methods[] = {
      {"lyapunov", &EntropyReport::lyapunov},
      {"pesin", &EntropyReport::pesin},
      {"abramov", &EntropyReport::abramov},
      {"smb", &EntropyReport::smb_base}};
  for (const auto& [label, field] : methods) {
    Series s{label, {}, {}};
    for (const SweepRow& r : table.rows) {
      s.x.push_back(r.parameter);
      s.y.push_back(r.status == "error" ? nan() : (r.report.*field).value);
    }
    plot.push_back(std::move(s));
  }
  try {
    emit_svg(plot, out_path(c, "sweep.svg"), {"entropy vs " + c.sweep.param, c.sweep.param, "entropy"});
  } catch (const ArgumentError&) {
    // every row failed; the CSV carries the errors
  }
  return table;
}

NondegeneracyReport run_probe(const ExperimentConfig& c) {
  const MapSystem map = build_map(c.map);
  NondegeneracyParams params;
  params.B = c.probe.B;
  params.beta = c.probe.beta;
  params.validate();
  Rng rng(c.seed, 0x70726f62);
  std::vector<Point> sample(c.probe.samples);
  for (Point& p : sample) p = map.sample_uniform(rng);
  const NondegeneracyReport r = nondegeneracy_probe(map, params, sample, c.seed);

  CsvTable t({"condition", "ratio", "x", "x_fiber", "y", "y_fiber", "pass"});
  describe(t, c, map);
  t.comment("B " + csv_real(params.B) + " beta " + csv_real(params.beta) + " samples " + count(r.samples) +
            " skipped " + count(r.skipped));
  for (const auto& [name, w] : {std::pair{"c1", &r.c1}, std::pair{"c2", &r.c2}, std::pair{"c3", &r.c3}})
    t.row({name, csv_real(w->ratio), csv_real(w->x.x), csv_real(w->x.y), csv_real(w->y.x), csv_real(w->y.y),
           w->ratio <= 1.0 ? "1" : "0"});
  t.write(out_path(c, "probe.csv"));
  return r;
}

}  // namespace srblab::experiment
