#include "srblab/tail.hpp"

#include <cmath>

#include "srblab/orbit.hpp"
#include "srblab/parallel.hpp"

namespace srblab {

void TailParams::validate() const {
  if (!(lambda > 0.0) || !(delta > 0.0) || !(eps > 0.0))
    throw ArgumentError("tail parameters lambda, delta, eps must be positive");
  if (n_max < 1 || sample_size < 1) throw ArgumentError("tail n_max and sample_size must be >= 1");
}

TailProfile tail_profile(const MapSystem& map, const TailParams& params) {
  params.validate();
  const Rng root(params.seed, 0x7461696c);
  const std::size_t censor = params.n_max + 1;

  struct Times {
    std::size_t e, r;
  };
  const auto times = parallel::map_indices<Times>(params.sample_size, [&](std::size_t i) {
    Rng rng = root.split(i);
    const Point x = map.sample_uniform(rng);
    try {
      const OrbitTimes t = orbit_times(map, x, params.lambda, params.delta, params.eps, params.n_max, rng.next());
      return Times{t.expansion.value_or(censor), t.recurrence.value_or(censor)};
    } catch (const NearCriticalError&) {
      return Times{censor, censor};
    }
  });

  // hist[k] counts points whose time equals k (k = censor for censored).
  std::vector<std::size_t> he(censor + 1, 0), hr(censor + 1, 0), hu(censor + 1, 0);
  TailProfile profile;
  profile.params = params;
  for (const auto& t : times) {
    ++he[t.e];
    ++hr[t.r];
    ++hu[std::max(t.e, t.r)];
    if (t.e == censor || t.r == censor) ++profile.censored;
  }

  // #(time > n) = sum_{k > n} hist[k]
  std::size_t above_e = 0, above_r = 0, above_u = 0;
  std::vector<TailRow> rows(params.n_max);
  const double total = static_cast<double>(params.sample_size);
  for (std::size_t n = censor; n-- > 1;) {
    above_e += he[n + 1];
    above_r += hr[n + 1];
    above_u += hu[n + 1];
    rows[n - 1] = {n, above_e / total, above_r / total, above_u / total};
  }
  profile.rows = std::move(rows);
  return profile;
}

TailFit fit_tail_decay(const std::vector<std::size_t>& n, const std::vector<double>& fraction, TailModel model) {
  if (n.size() != fraction.size()) throw ArgumentError("tail fit: n and fraction sizes differ");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (fraction[i] > 0.0 && n[i] >= 1) {
      const double v = static_cast<double>(n[i]);
      xs.push_back(model == TailModel::polynomial ? std::log(v) : std::sqrt(v));
      ys.push_back(std::log(fraction[i]));
    }
  }
  if (xs.size() < 5)
    throw InsufficientDataError("tail fit needs at least 5 positive fractions, got " + std::to_string(xs.size()));

  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("tail fit: abscissae are degenerate");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  return {model, std::exp(intercept), -slope, std::sqrt(ss / m), xs.size()};
}

TailFit fit_tail_decay(const TailProfile& profile, TailModel model) {
  std::vector<std::size_t> n;
  std::vector<double> f;
  for (const auto& row : profile.rows) {
    n.push_back(row.n);
    f.push_back(row.frac_union);
  }
  return fit_tail_decay(n, f, model);
}

}  // namespace srblab
