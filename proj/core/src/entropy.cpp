#include "srblab/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "srblab/orbit.hpp"
#include "srblab/parallel.hpp"
#include "srblab/spread.hpp"

namespace srblab {

namespace {

constexpr std::array<double, 4> kGaussX{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                        0.9602898564975363};
constexpr std::array<double, 4> kGaussW{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                        0.1012285362903763};

template <class Fn>
double gauss(Fn&& fn, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGaussX.size(); ++i)
    s += kGaussW[i] * (fn(mid - half * kGaussX[i]) + fn(mid + half * kGaussX[i]));
  return s * half;
}

struct LineIntegral {
  double value = 0.0;
  double clip = 0.0;
};

// int_a^b g, where g may have a logarithmic singularity at the endpoint c
// (c == a or c == b). Pieces shrink geometrically towards c; the last piece
// inside the near-critical floor is dropped and its size estimated.
LineIntegral graded(const std::function<double(double)>& g, double a, double b, bool singular_at_a) {
  LineIntegral out;
  const double c = singular_at_a ? a : b;
  const double sign = singular_at_a ? 1.0 : -1.0;
  double outer = b - a;
  while (outer > kNearCriticalFloor) {
    const double inner = 0.5 * outer;
    const double p = c + sign * inner, q = c + sign * outer;
    out.value += gauss(g, std::min(p, q), std::max(p, q));
    outer = inner;
  }
  // int_0^r |log(k t)| dt <= r (|log(k r)| + 1) with k from g at the floor.
  const double edge = g(c + sign * outer);
  out.clip = outer * (std::abs(edge) + 1.0);
  return out;
}

// int over [a, b] of g, split at the critical levels inside.
LineIntegral line_integral(const std::function<double(double)>& g, double a, double b,
                           const std::vector<double>& critical) {
  std::vector<double> cuts{a};
  for (double c : critical)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  LineIntegral out;
  auto is_critical = [&](double v) {
    return std::any_of(critical.begin(), critical.end(), [&](double c) { return c == v; });
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (!(hi > lo)) continue;
    LineIntegral part;
    if (is_critical(lo)) {
      part = graded(g, lo, hi, true);
    } else if (is_critical(hi)) {
      part = graded(g, lo, hi, false);
    } else {
      // Split once so bins close to (but not touching) a critical level get
      // more nodes.
      const double mid = 0.5 * (lo + hi);
      part.value = gauss(g, lo, mid) + gauss(g, mid, hi);
    }
    out.value += part.value;
    out.clip += part.clip;
  }
  return out;
}

double clipped_log_jacobian(const MapSystem& map, const Point& p) {
  const double d = std::abs(map.jacobian_det(p));
  return std::log(std::max(d, 1e-300));
}

// Average of log|det Df| over ambient bin i, plus its oscillation and mean
// absolute deviation (sampled at the quadrature nodes).
struct BinStats {
  double integral = 0.0;  // int over the bin
  double clip = 0.0;
  double osc = 0.0;
  double mad = 0.0;  // int |g - mean|
};

BinStats bin_stats(const MapSystem& map, const Grid& grid, std::size_t i) {
  const auto critical = map.critical_levels();
  BinStats st;
  if (grid.dimension == 1) {
    const Interval bx = grid.x_bin(i);
    auto g = [&](double x) { return clipped_log_jacobian(map, {x, 0.0}); };
    const auto li = line_integral(g, bx.lo, bx.hi, critical);
    st.integral = li.value;
    st.clip = li.clip;
    const double mean = li.value / bx.length();
    double lo = HUGE_VAL, hi = -HUGE_VAL, dev = 0.0;
    constexpr int m = 17;
    for (int k = 0; k < m; ++k) {
      const double v = g(bx.lo + bx.length() * (k + 0.5) / m);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      dev += std::abs(v - mean);
    }
    const bool touches = std::any_of(critical.begin(), critical.end(), [&](double c) { return bx.contains(c); });
    st.osc = touches ? HUGE_VAL : hi - lo;
    st.mad = dev / m * bx.length();
    return st;
  }
  const std::size_t ix = i % grid.nx, iy = i / grid.nx;
  const Interval bx = grid.x_bin(ix), by = grid.y_bin(iy);
  double clip = 0.0;
  const double integral = gauss(
      [&](double theta) {
        const auto li = line_integral([&](double y) { return clipped_log_jacobian(map, {theta, y}); }, by.lo, by.hi,
                                      critical);
        clip = std::max(clip, li.clip);
        return li.value;
      },
      bx.lo, bx.hi);
  st.integral = integral;
  st.clip = clip * bx.length();
  return st;
}

double uniform_in(const Interval& s, Rng& rng) { return rng.uniform(s.lo, s.hi); }

}  // namespace

double log_sup_jacobian(const MapSystem& map) {
  double sup = 0.0;
  const Interval s = map.domain().span;
  if (map.dimension() == 1) {
    constexpr int n = 4096;
    for (int i = 0; i <= n; ++i) sup = std::max(sup, std::abs(map.jacobian_det({s.lo + s.length() * i / n, 0.0})));
  } else {
    constexpr int n = 256;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        sup = std::max(sup, std::abs(map.jacobian_det({static_cast<double>(i) / n, s.lo + s.length() * j / n})));
  }
  return std::log(sup);
}

Integral entropy_induced(const VerifiedTower& VT, const GridDensity& mu_F) {
  const InducedMarkovMap& F = VT.map();
  if (mu_F.grid.dimension != 1 || mu_F.grid.x != F.delta()) throw ArgumentError("mu_F grid must span Delta");
  const Grid& g = mu_F.grid;
  const auto parts = parallel::map_indices<double>(
      F.cells().size(),
      [&](std::size_t c) {
        const Interval s = F.cells()[c].support;
        CompensatedSum acc;
        const std::size_t a = g.x_index(s.lo), b = g.x_index(s.hi);
        for (std::size_t i = a; i <= b && i < g.nx; ++i) {
          const Interval bin = g.x_bin(i);
          const double lo = std::max(bin.lo, s.lo), hi = std::min(bin.hi, s.hi);
          if (!(hi > lo) || mu_F.values[i] == 0.0) continue;
          acc += mu_F.values[i] * gauss([&](double x) { return F.log_derivative(c, x); }, lo, hi);
        }
        return acc.value();
      },
      1);
  Integral out;
  out.value = compensated_total(parts);
  const double mu_def = deficit_measure(F, mu_F);
  const double r = F.tail_ratio();
  out.bound = mu_def * log_sup_jacobian(F.base()) * (static_cast<double>(F.tau_max() + 1) + r / (1.0 - r));
  return out;
}

double entropy_abramov(double h_induced, double mass) {
  if (!(mass > 0.0)) throw ArgumentError("Abramov quotient needs a positive mass");
  return h_induced / mass;
}

PesinIntegral entropy_pesin(const MapSystem& map, const GridDensity& mu_f) {
  const Grid& g = mu_f.grid;
  if (g.dimension != map.dimension()) throw ArgumentError("mu_f grid dimension does not match the map");
  const auto stats = parallel::map_indices<BinStats>(g.size(), [&](std::size_t i) {
    if (mu_f.values[i] == 0.0) return BinStats{};
    return bin_stats(map, g, i);
  });
  CompensatedSum value, clip;
  for (std::size_t i = 0; i < g.size(); ++i) {
    value += mu_f.values[i] * stats[i].integral;
    clip += mu_f.values[i] * stats[i].clip;
  }
  return {value.value(), clip.value()};
}

MonteCarlo entropy_lyapunov(const MapSystem& map, std::size_t sample_size, std::size_t n, std::uint64_t seed,
                            std::size_t retry_budget) {
  if (sample_size < 1 || n < 1) throw ArgumentError("entropy_lyapunov needs sample_size, n >= 1");
  const Rng root(seed, 0x6c79617075);
  struct Draw {
    double value = 0.0;
    std::size_t retries = 0;
    bool failed = false;
  };
  const auto draws = parallel::map_indices<Draw>(
      sample_size,
      [&](std::size_t i) {
        Rng rng = root.split(i);
        Draw d;
        for (;;) {
          const Point x = map.sample_uniform(rng);
          try {
            const auto exps = lyapunov_exponents(map, x, n, rng.next());
            for (double e : exps)
              if (e > 0.0) d.value += e;
            return d;
          } catch (const NearCriticalError&) {
            if (++d.retries > retry_budget) {
              d.failed = true;
              return d;
            }
          }
        }
      },
      1);
  MonteCarlo mc;
  mc.orbits = sample_size;
  mc.iters = n;
  CompensatedSum s;
  for (const auto& d : draws) {
    mc.resampled += d.retries;
    if (d.failed) throw NearCriticalError(0.0);
    s += d.value;
  }
  if (mc.resampled > retry_budget) {
    throw InsufficientDataError("near-critical retry budget exhausted (" + std::to_string(mc.resampled) + ")");
  }
  mc.mean = s.value() / static_cast<double>(sample_size);
  if (sample_size > 1) {
    CompensatedSum v;
    for (const auto& d : draws) v += (d.value - mc.mean) * (d.value - mc.mean);
    mc.std_error = std::sqrt(v.value() / static_cast<double>(sample_size - 1) / static_cast<double>(sample_size));
  }
  return mc;
}

namespace {

double smb_impl(const InducedMarkovMap& F, double x, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("entropy_smb needs n >= 1");
  Rng rng(seed, 0x736d62);
  std::vector<std::size_t> word;
  word.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto idx = F.locate(x);
    if (!idx) throw CensoringError("orbit entered the deficit at step " + std::to_string(k), k);
    word.push_back(*idx);
    if (k + 1 < n) x = dither_in(F.delta(), false, F.eval(*idx, x), rng);
  }

  const double tiny = 1e-9 * F.delta().length();
  Interval J = F.delta();
  bool exact = true;
  double center = 0.0, log_length = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t c = word[k];
    if (exact) {
      J = Interval::spanning(F.inverse(c, J.lo), F.inverse(c, J.hi));
      if (J.length() < tiny) {
        exact = false;
        center = J.midpoint();
        log_length = std::log(J.length());
      }
    } else {
      center = F.inverse(c, center);
      log_length -= F.log_derivative(c, center);
    }
  }
  if (exact) log_length = std::log(J.length());
  return -log_length / static_cast<double>(n);
}

}  // namespace

double entropy_smb(const InducedMarkovMap& F, double x, std::size_t n) {
  return smb_impl(F, x, n, point_seed({x, 0.0}));
}

MonteCarlo entropy_smb_median(const InducedMarkovMap& F, std::size_t n, std::size_t seeds, std::uint64_t seed) {
  if (seeds < 1) throw ArgumentError("entropy_smb_median needs at least one seed");
  const Rng root(seed, 0x736d6273);
  const auto values = parallel::map_indices<double>(
      seeds,
      [&](std::size_t i) {
        Rng rng = root.split(i);
        for (int attempt = 0; attempt < 256; ++attempt) {
          const double x = uniform_in(F.delta(), rng);
          try {
            return smb_impl(F, x, n, rng.next());
          } catch (const CensoringError&) {
          }
        }
        throw CensoringError("every SMB orbit was censored", 0);
      },
      1);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  MonteCarlo mc;
  mc.orbits = seeds;
  mc.iters = n;
  const std::size_t m = sorted.size();
  mc.mean = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  if (m > 1) {
    double avg = 0.0;
    for (double v : sorted) avg += v;
    avg /= static_cast<double>(m);
    double var = 0.0;
    for (double v : sorted) var += (v - avg) * (v - avg);
    // Asymptotic standard error of a median under normal spread.
    mc.std_error = 1.2533 * std::sqrt(var / static_cast<double>(m - 1) / static_cast<double>(m));
  }
  return mc;
}

QuotientCheck lyapunov_quotient_check(const MapSystem& map, const VerifiedTower& VT, const GridDensity& mu_F,
                                      std::size_t sample_size, std::size_t n, std::uint64_t seed) {
  const InducedMarkovMap& F = VT.map();
  if (sample_size < 1 || n < 1) throw ArgumentError("quotient check needs sample_size, n >= 1");
  const Rng root(seed, 0x71756f74);
  const auto per_orbit = parallel::map_indices<double>(
      sample_size,
      [&](std::size_t i) {
        Rng rng = root.split(i);
        double x = uniform_in(F.delta(), rng);
        CompensatedSum s;
        for (std::size_t k = 0; k < n; ++k) {
          auto idx = F.locate(x);
          while (!idx) {
            x = uniform_in(F.delta(), rng);
            idx = F.locate(x);
          }
          s += F.log_derivative(*idx, x);
          x = dither_in(F.delta(), false, F.eval(*idx, x), rng);
        }
        return s.value() / static_cast<double>(n);
      },
      1);
  QuotientCheck q;
  CompensatedSum s;
  for (double v : per_orbit) s += v;
  q.lambda_F = s.value() / static_cast<double>(sample_size);
  if (sample_size > 1) {
    double var = 0.0;
    for (double v : per_orbit) var += (v - q.lambda_F) * (v - q.lambda_F);
    q.lambda_F_se = std::sqrt(var / static_cast<double>(sample_size - 1) / static_cast<double>(sample_size));
  }
  q.tau_bar = kac_mass(F, mu_F).value;
  q.quotient = q.lambda_F / q.tau_bar;
  const MonteCarlo base = entropy_lyapunov(map, sample_size, n, seed ^ 0x9e3779b97f4a7c15ULL);
  q.lambda_f = base.mean;
  q.lambda_f_se = base.std_error;
  return q;
}

TransferCheck jacobian_transfer_check(const VerifiedTower& VT, const GridDensity& mu_F, const GridDensity& spread) {
  const InducedMarkovMap& F = VT.map();
  if (spread.provenance != Provenance::spread) throw ArgumentError("transfer check needs an un-normalized spread measure");
  if (spread.tau_cap != F.tau_max())
    throw ArgumentError("spread tau cap " + std::to_string(spread.tau_cap) + " does not match tower tau_max " +
                        std::to_string(F.tau_max()));
  const Integral lhs = entropy_induced(VT, mu_F);
  const MapSystem& map = F.base();
  const Grid& g = spread.grid;
  const auto stats = parallel::map_indices<BinStats>(g.size(), [&](std::size_t i) {
    if (spread.values[i] == 0.0) return BinStats{};
    return bin_stats(map, g, i);
  });
  CompensatedSum rhs, grid_bound;
  const double vol = g.bin_volume();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = spread.values[i];
    if (rho == 0.0) continue;
    rhs += rho * stats[i].integral;
    double local_max = rho;
    if (i > 0) local_max = std::max(local_max, spread.values[i - 1]);
    if (i + 1 < g.size()) local_max = std::max(local_max, spread.values[i + 1]);
    const double by_osc = rho * vol * stats[i].osc;
    const double by_dev = 2.0 * local_max * stats[i].mad;
    grid_bound += std::min(by_osc, by_dev) + rho * stats[i].clip;
  }
  TransferCheck t;
  t.lhs = lhs.value;
  t.rhs = rhs.value();
  t.gap = std::abs(t.lhs - t.rhs);
  t.bound = lhs.bound + grid_bound.value();
  return t;
}

MajorantCheck majorant_from_samples(double C, std::span<const MajorantSample> samples) {
  MajorantCheck m;
  m.C = C;
  if (samples.empty()) throw ArgumentError("majorant check needs samples");
  if (!(C > 0.0)) return m;
  for (const auto& s : samples)
    m.worst_ratio = std::max(m.worst_ratio, s.log_jacobian_F / (C * static_cast<double>(s.tau)));
  m.pass = m.worst_ratio <= 1.0 + 1e-9;
  return m;
}

MajorantCheck majorant_check(const VerifiedTower& VT) {
  const InducedMarkovMap& F = VT.map();
  const MapSystem& map = F.base();
  struct Local {
    std::vector<MajorantSample> samples;
    double sup = 0.0;
  };
  const auto locals = parallel::map_indices<Local>(
      F.cells().size(),
      [&](std::size_t c) {
        const TowerCell& cell = F.cells()[c];
        const std::size_t n =
            std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(cell.support.length() / 1e-4)));
        Local out;
        out.samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          double x = cell.support.lo + cell.support.length() * static_cast<double>(i) / static_cast<double>(n - 1);
          double log_j = 0.0;
          for (std::size_t k = 0; k < cell.tau; ++k) {
            const double d = std::abs(map.branch_slope(cell.itinerary[k], x));
            out.sup = std::max(out.sup, d);
            log_j += std::log(d);
            x = map.branch_value(cell.itinerary[k], x);
          }
          out.samples.push_back({log_j, cell.tau});
        }
        return out;
      },
      1);
  double sup = std::exp(log_sup_jacobian(map));
  std::vector<MajorantSample> all;
  for (const auto& l : locals) {
    sup = std::max(sup, l.sup);
    all.insert(all.end(), l.samples.begin(), l.samples.end());
  }
  return majorant_from_samples(std::log(sup), all);
}

std::vector<std::pair<std::string, const Estimate*>> EntropyReport::rows() const {
  return {{"lyapunov", &lyapunov}, {"pesin", &pesin},       {"induced", &induced},
          {"abramov", &abramov},   {"smb", &smb},           {"smb_base", &smb_base}};
}

namespace {

template <class Fn>
void guarded(Estimate& e, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& ex) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    e.error = ex.what();
  }
}

}  // namespace

EntropyReport entropy_report(const MapSystem& map, const std::optional<InducedMarkovMap>& F,
                             const EntropyConfig& cfg) {
  EntropyReport rep;
  guarded(rep.lyapunov, [&] {
    const MonteCarlo mc = entropy_lyapunov(map, cfg.sample_size, cfg.n_iters, cfg.seed, cfg.retry_budget);
    rep.lyapunov.value = mc.mean;
    rep.lyapunov.std_error = mc.std_error;
    rep.lyapunov.n_orbits = mc.orbits;
    rep.lyapunov.n_iters = mc.iters;
  });
  guarded(rep.pesin, [&] {
    GridDensity mu_f = map.dimension() == 1
                           ? stationary_density(ulam_matrix(map, cfg.ambient_bins), cfg.mode, cfg.tol, cfg.max_iters)
                           : stationary_density(ulam_matrix(map, cfg.plane_bins, cfg.plane_bins), cfg.mode, cfg.tol,
                                                cfg.max_iters);
    const PesinIntegral p = entropy_pesin(map, mu_f);
    rep.mu_f = mu_f;
    rep.pesin.value = p.value;
    rep.pesin.truncation_bound = p.clip;
    rep.pesin.bins = mu_f.grid.size();
    rep.pesin_clip = p.clip;
  });
  try {
    Rng rng(cfg.seed, 0x6578706f);
    rep.exponents = lyapunov_exponents(map, map.sample_uniform(rng), std::min<std::size_t>(cfg.n_iters, 10000),
                                       rng.next());
  } catch (const Error&) {
  }

  if (!F) {
    const std::string why = "no induced map for this configuration";
    for (Estimate* e : {&rep.induced, &rep.abramov, &rep.smb, &rep.smb_base}) e->error = why;
  } else {
    std::optional<VerifiedTower> vt;
    std::optional<GridDensity> mu_F;
    std::string failure;
    try {
      vt.emplace(VerifiedTower::verify(*F));
      rep.verification = vt->report();
      mu_F.emplace(stationary_density(ulam_matrix(vt->map(), cfg.bins), cfg.mode, cfg.tol, cfg.max_iters));
      const KacMass k = kac_mass(vt->map(), *mu_F);
      rep.kac = k.value;
      rep.kac_censored = k.censored_mass;
      rep.mu_F = *mu_F;
      rep.spread = spread_measure(vt->map(), *mu_F, cfg.ambient_bins, vt->map().tau_max());
      rep.spread_mass = rep.spread->mass();
    } catch (const std::exception& ex) {
      failure = ex.what();
    }
    const std::size_t cap = F->tau_max();
    for (Estimate* e : {&rep.induced, &rep.abramov, &rep.smb, &rep.smb_base}) {
      e->tau_cap = cap;
      e->bins = cfg.bins;
      if (!failure.empty()) e->error = failure;
    }
    if (failure.empty()) {
      const double kac_bar = deficit_error_bar(vt->map(), rep.kac_censored);
      guarded(rep.induced, [&] {
        const Integral h = entropy_induced(*vt, *mu_F);
        rep.induced.value = h.value;
        rep.induced.truncation_bound = h.bound;
      });
      guarded(rep.abramov, [&] {
        if (!rep.induced.ok()) throw Error(rep.induced.error);
        rep.abramov.value = entropy_abramov(rep.induced.value, rep.kac);
        rep.abramov.truncation_bound =
            (rep.induced.truncation_bound + std::abs(rep.abramov.value) * kac_bar) / rep.kac;
      });
      guarded(rep.smb, [&] {
        const MonteCarlo mc = entropy_smb_median(vt->map(), cfg.smb_n, cfg.smb_seeds, cfg.seed);
        rep.smb.value = mc.mean;
        rep.smb.std_error = mc.std_error;
        rep.smb.n_orbits = mc.orbits;
        rep.smb.n_iters = mc.iters;
      });
      guarded(rep.smb_base, [&] {
        if (!rep.smb.ok()) throw Error(rep.smb.error);
        rep.smb_base.value = rep.smb.value / rep.kac;
        rep.smb_base.std_error = rep.smb.std_error / rep.kac;
        rep.smb_base.truncation_bound = std::abs(rep.smb_base.value) * kac_bar / rep.kac;
        rep.smb_base.n_orbits = rep.smb.n_orbits;
        rep.smb_base.n_iters = rep.smb.n_iters;
      });
    }
  }

  const std::array<std::pair<const char*, const Estimate*>, 4> routes{
      {{"lyapunov", &rep.lyapunov}, {"pesin", &rep.pesin}, {"abramov", &rep.abramov}, {"smb_base", &rep.smb_base}}};
  for (std::size_t i = 0; i < routes.size(); ++i)
    for (std::size_t j = i + 1; j < routes.size(); ++j)
      if (routes[i].second->ok() && routes[j].second->ok())
        rep.discrepancies.push_back(
            {routes[i].first, routes[j].first, routes[i].second->value - routes[j].second->value});
  return rep;
}

}  // namespace srblab
