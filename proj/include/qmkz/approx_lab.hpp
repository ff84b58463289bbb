#pragma once

/// The Korovkin harness: Abel-weighted operator error norms, the
/// three-test-function criterion, the modulus of continuity, and the rate
/// machinery built on the centered-second-moment gauge
///
///   phi(y) = { (1-y) sup_x sum_{n>=start} L_n((t-x)^2; x) y^n }^{1/2}
///
/// together with the bound (1-y) || sum (L_n f - f) y^n || <= 2 w(f, phi(y)).
///
/// Sup norms over x are grid maxima and therefore lower estimates; every
/// report records the grid step alongside.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmkz/common.hpp"
#include "qmkz/functions.hpp"
#include "qmkz/operators.hpp"
#include "qmkz/summability.hpp"

namespace qmkz {

/// Grid-search lower estimate of w(f, delta) = sup{|f(s)-f(t)| : |s-t| <= delta}
/// over [0,1], via a sliding max/min window at the given resolution.
/// Converges to the true modulus from below as the resolution shrinks;
/// requires resolution <= delta/4.
inline double modulus_of_continuity(const Func1D& f, double delta, double resolution) {
  if (!(delta > 0.0)) throw std::domain_error("modulus_of_continuity: delta must be > 0");
  if (!(resolution > 0.0) || resolution > delta / 4.0 + 1e-18)
    throw std::invalid_argument("modulus_of_continuity: resolution must lie in (0, delta/4]");

  const auto points = static_cast<std::size_t>(std::ceil(1.0 / resolution)) + 1;
  const double h = 1.0 / static_cast<double>(points - 1);
  const auto window = static_cast<std::size_t>(std::floor(delta / h + 1e-12));

  std::deque<std::size_t> maxq, minq;
  std::vector<double> fv(points);
  for (std::size_t i = 0; i < points; ++i) fv[i] = f(h * static_cast<double>(i));

  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    while (!maxq.empty() && fv[maxq.back()] <= fv[i]) maxq.pop_back();
    maxq.push_back(i);
    while (!minq.empty() && fv[minq.back()] >= fv[i]) minq.pop_back();
    minq.push_back(i);
    if (i >= window) {
      if (maxq.front() + window < i) maxq.pop_front();
      if (minq.front() + window < i) minq.pop_front();
    }
    best = std::max(best, fv[maxq.front()] - fv[minq.front()]);
  }
  return best;
}

inline double modulus_of_continuity(const Func1D& f, double delta) {
  return modulus_of_continuity(f, delta, delta / 64.0);
}

/// Checks the subadditivity-type bound w(f, c*delta) <= (1 + floor(c)) w(f, delta)
/// at grid precision, with a quantization allowance on the right-hand side.
inline bool omega_subadditivity_check(const Func1D& f, double delta, double c) {
  if (!(delta > 0.0) || !(c > 0.0))
    throw std::domain_error("omega_subadditivity_check: delta and c must be > 0");
  const double res = std::min(delta, c * delta) / 64.0;
  const double lhs = modulus_of_continuity(f, c * delta, res);
  const double rhs = modulus_of_continuity(f, delta, res);
  const double factor = 1.0 + std::floor(c);
  const double dslack = std::max(8.0 * res, 1e-5);
  const double slack = factor * modulus_of_continuity(f, dslack, dslack / 4.0);
  return lhs <= factor * rhs + slack;
}

struct KorovkinPoint {
  double y = 0.0;
  double value = 0.0;      ///< (1-y) * grid max of |sum_n (L_n f - f)(x) y^n|
  double tail_bound = 0.0; ///< certified bound on the dropped n-tail plus operator tails
  std::size_t terms = 0;   ///< number of operator indices summed
  bool deficit = false;
};

struct KorovkinRun {
  std::string family;
  std::string sequence;
  std::string function;
  std::vector<double> y_schedule;
  std::vector<double> x_grid;
  std::size_t start_index = 3;
  double grid_step = 0.0;
  std::vector<KorovkinPoint> points;

  /// Consistent with Abel convergence to f: the per-y values either sit at
  /// the truncation noise floor or decrease along the schedule (and stay
  /// below the threshold when one is given).
  bool consistent(double noise_floor, std::optional<double> threshold = std::nullopt) const {
    bool all_noise = true;
    for (const auto& p : points) all_noise = all_noise && p.value <= noise_floor;
    if (all_noise) return true;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (!(points[i].value < points[i - 1].value)) return false;
    if (threshold && !(points.back().value <= *threshold)) return false;
    return true;
  }
};

namespace detail {

inline double max_grid_step(std::span<const double> grid) {
  double h = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) h = std::max(h, grid[i] - grid[i - 1]);
  return h;
}

// Number of operator terms to sum so that the weighted tail
// (1-y) sum_{n>N} per_term_bound y^n <= per_term_bound y^{N+1} drops below tol.
inline std::size_t abel_term_horizon(double y, double per_term_bound, double tol) {
  if (per_term_bound <= tol) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(tol / per_term_bound) / std::log(y)));
}

}  // namespace detail

/// Per-y Abel error norms for several functions against one family, sharing
/// both the operator weight sweeps (across functions) and the operator
/// evaluations (across the schedule). Every function needs a certified sup
/// bound.
inline std::vector<KorovkinRun> korovkin_run_multi(const OperatorFamily& fam,
                                                   std::span<const Func1D> fs,
                                                   std::span<const double> schedule,
                                                   std::span<const double> x_grid,
                                                   std::size_t start_index = 3) {
  if (fs.empty()) throw std::invalid_argument("korovkin_run: no functions");
  if (schedule.empty()) throw std::invalid_argument("korovkin_run: empty schedule");
  if (x_grid.empty()) throw std::invalid_argument("korovkin_run: empty grid");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || !(schedule[i] < 1.0))
      throw std::invalid_argument("korovkin_run: schedule values must lie in (0, 1)");
    if (i > 0 && !(schedule[i] > schedule[i - 1]))
      throw std::invalid_argument("korovkin_run: schedule must be strictly increasing");
  }
  const std::size_t nf = fs.size();
  std::vector<double> bounds(nf);
  double bound_max = 0.0;
  for (std::size_t i = 0; i < nf; ++i) {
    const detail::SupInfo si = detail::sup_info(fs[i]);
    if (si.estimated) throw std::invalid_argument("korovkin_run: every function needs a certified sup bound");
    bounds[i] = si.bound;
    bound_max = std::max(bound_max, si.bound);
  }
  const double tol = fam.policy.tail_tol;

  std::vector<KorovkinRun> runs(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    runs[i].family = family_name(fam.kind);
    runs[i].sequence = fam.qseq.name.empty() ? "-" : fam.qseq.name;
    runs[i].function = fs[i].name;
    runs[i].y_schedule.assign(schedule.begin(), schedule.end());
    runs[i].x_grid.assign(x_grid.begin(), x_grid.end());
    runs[i].start_index = start_index;
    runs[i].grid_step = detail::max_grid_step(x_grid);
  }

  // per-y horizons from the largest bound: ||L_n f - f|| <= 2 ||f|| by
  // positivity and L_n e_0 = 1
  const std::size_t ny = schedule.size();
  std::vector<std::size_t> horizon(ny);
  std::vector<bool> clipped(ny, false);
  std::size_t n_max = 0;
  for (std::size_t i = 0; i < ny; ++i) {
    std::size_t h = detail::abel_term_horizon(schedule[i], 2.0 * bound_max, tol);
    if (h > start_index + fam.policy.max_terms) {
      h = start_index + fam.policy.max_terms;
      clipped[i] = true;
    }
    horizon[i] = h;
    n_max = std::max(n_max, h);
  }

  std::vector<double> fvals(nf * x_grid.size());
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t g = 0; g < x_grid.size(); ++g) fvals[i * x_grid.size() + g] = fs[i](x_grid[g]);

  std::vector<KahanSum> acc(nf * ny * x_grid.size());
  std::vector<double> ypow(ny);
  std::vector<double> op_tail(ny, 0.0);
  std::vector<bool> deficit(ny, false);
  for (std::size_t i = 0; i < ny; ++i)
    ypow[i] = std::pow(schedule[i], static_cast<double>(start_index));

  for (std::size_t n = start_index; n <= n_max; ++n) {
    const auto vals = family_apply_grid_multi(fam, fs, n, x_grid);
    for (std::size_t i = 0; i < ny; ++i) {
      if (n > horizon[i]) continue;
      double worst_tail = 0.0;
      bool any_deficit = false;
      for (std::size_t fi = 0; fi < nf; ++fi) {
        for (std::size_t g = 0; g < x_grid.size(); ++g) {
          acc[(fi * ny + i) * x_grid.size() + g].add(
              (vals[fi][g].value - fvals[fi * x_grid.size() + g]) * ypow[i]);
          worst_tail = std::max(worst_tail, vals[fi][g].tail_bound);
          any_deficit = any_deficit || vals[fi][g].deficit;
        }
      }
      op_tail[i] += worst_tail * ypow[i];
      deficit[i] = deficit[i] || any_deficit;
      ypow[i] *= schedule[i];
    }
  }

  for (std::size_t fi = 0; fi < nf; ++fi) {
    for (std::size_t i = 0; i < ny; ++i) {
      KorovkinPoint p;
      p.y = schedule[i];
      double m = 0.0;
      for (std::size_t g = 0; g < x_grid.size(); ++g)
        m = std::max(m, std::abs(acc[(fi * ny + i) * x_grid.size() + g].value()));
      p.value = (1.0 - schedule[i]) * m;
      // dropped n-tail: 2 bound y^{N+1}; summed operator tails scaled by (1-y)
      p.tail_bound = 2.0 * bounds[fi] * ypow[i] + (1.0 - schedule[i]) * op_tail[i];
      p.terms = horizon[i] >= start_index ? horizon[i] - start_index + 1 : 0;
      p.deficit = deficit[i] || clipped[i];
      runs[fi].points.push_back(p);
    }
  }
  return runs;
}

inline KorovkinRun korovkin_run(const OperatorFamily& fam, const Func1D& f,
                                std::span<const double> schedule, std::span<const double> x_grid,
                                std::size_t start_index = 3) {
  return korovkin_run_multi(fam, std::span<const Func1D>(&f, 1), schedule, x_grid,
                            start_index)[0];
}

/// (1-y) * grid max of |sum_{n>=start} (L_n f - f)(x) y^n| at a single y.
inline double korovkin_error_norm(const OperatorFamily& fam, const Func1D& f, double y,
                                  std::span<const double> x_grid, std::size_t start_index = 3) {
  const double ys[1] = {y};
  return korovkin_run(fam, f, std::span<const double>(ys, 1), x_grid, start_index).points[0].value;
}

struct PhiPoint {
  double y = 0.0;
  double value = 0.0;  ///< phi(y)
  double tail_bound = 0.0;
  bool deficit = false;
};

/// phi(y) along a schedule, sharing the centered-second-moment sweeps. The
/// per-term envelope bounds (x/[n-1] for MKZ kinds, [2]x(1-x)(1-q^n x)/[n-1]
/// for Durrmeyer, both <= 1) certify the n-tail.
inline std::vector<PhiPoint> phi_profile(const OperatorFamily& fam, std::span<const double> schedule,
                                         std::span<const double> x_grid, std::size_t start_index = 3) {
  if (schedule.empty()) throw std::invalid_argument("phi_profile: empty schedule");
  if (x_grid.empty()) throw std::invalid_argument("phi_profile: empty grid");
  const double tol = fam.policy.tail_tol;
  const std::size_t ny = schedule.size();
  std::vector<std::size_t> horizon(ny);
  std::vector<bool> clipped(ny, false);
  std::size_t n_max = 0;
  for (std::size_t i = 0; i < ny; ++i) {
    if (!(schedule[i] > 0.0) || !(schedule[i] < 1.0))
      throw std::invalid_argument("phi_profile: schedule values must lie in (0, 1)");
    std::size_t h = detail::abel_term_horizon(schedule[i], 1.0, tol);
    if (h > start_index + fam.policy.max_terms) {
      h = start_index + fam.policy.max_terms;
      clipped[i] = true;
    }
    horizon[i] = h;
    n_max = std::max(n_max, h);
  }

  std::vector<KahanSum> acc(ny * x_grid.size());
  std::vector<double> ypow(ny);
  std::vector<bool> deficit(ny, false);
  for (std::size_t i = 0; i < ny; ++i)
    ypow[i] = std::pow(schedule[i], static_cast<double>(start_index));

  for (std::size_t n = start_index; n <= n_max; ++n) {
    std::vector<double> cm(x_grid.size());
    bool any_deficit = false;
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
      const SeriesResult r = family_apply(fam, centered_square(x_grid[g]), n, x_grid[g]);
      cm[g] = r.value;
      any_deficit = any_deficit || r.deficit;
    }
    for (std::size_t i = 0; i < ny; ++i) {
      if (n > horizon[i]) continue;
      for (std::size_t g = 0; g < x_grid.size(); ++g)
        acc[i * x_grid.size() + g].add(cm[g] * ypow[i]);
      deficit[i] = deficit[i] || any_deficit;
      ypow[i] *= schedule[i];
    }
  }

  std::vector<PhiPoint> out(ny);
  for (std::size_t i = 0; i < ny; ++i) {
    double m = 0.0;
    for (std::size_t g = 0; g < x_grid.size(); ++g)
      m = std::max(m, acc[i * x_grid.size() + g].value());
    out[i].y = schedule[i];
    out[i].value = std::sqrt(std::max(0.0, (1.0 - schedule[i]) * m));
    out[i].tail_bound = ypow[i];  // <= tol by the horizon choice unless clipped
    out[i].deficit = deficit[i] || clipped[i];
  }
  return out;
}

inline double phi(const OperatorFamily& fam, double y, std::span<const double> x_grid,
                  std::size_t start_index = 3) {
  const double ys[1] = {y};
  return phi_profile(fam, std::span<const double>(ys, 1), x_grid, start_index)[0].value;
}

// Below this delta the modulus is evaluated at the floor instead (a valid
// upper substitution, since w is nondecreasing) and the point is flagged.
inline constexpr double kOmegaDeltaFloor = 1e-5;
inline constexpr double kOmegaResolutionDivisor = 64.0;
inline constexpr double kOmegaResolutionFloor = 2.5e-6;

struct RatePoint {
  double y = 0.0;
  double lhs = 0.0;       ///< (1-y) || sum_{n>=start} (L_n f - f) y^n ||, grid estimate
  double lhs_tail = 0.0;
  double phi = 0.0;
  double phi_tail = 0.0;
  double omega = 0.0;     ///< w(f, max(phi, delta floor))
  double omega_resolution = 0.0;
  bool omega_at_floor = false;
  double margin = 0.0;    ///< 2*omega - lhs
  bool deficit = false;
  std::optional<double> mu;
  std::optional<double> lhs_over_mu;
};

struct RateReport {
  std::string family;
  std::string sequence;
  std::string function;
  std::vector<double> y_schedule;
  std::size_t start_index = 3;
  double grid_step = 0.0;
  std::vector<RatePoint> points;
};

/// Tabulates, per scheduled y, the Abel error norm against the bound
/// 2 w(f, phi(y)). An optional gauge mu(y) adds the ratio lhs/mu(y) column;
/// no verdict is attached to the ratios (a finite schedule cannot certify a
/// limit).
inline RateReport rate_report(const OperatorFamily& fam, const Func1D& f,
                              std::span<const double> schedule, std::span<const double> x_grid,
                              const std::function<double(double)>& mu = nullptr,
                              std::size_t start_index = 3) {
  const KorovkinRun lhs_run = korovkin_run(fam, f, schedule, x_grid, start_index);
  const std::vector<PhiPoint> phis = phi_profile(fam, schedule, x_grid, start_index);

  RateReport rep;
  rep.family = lhs_run.family;
  rep.sequence = lhs_run.sequence;
  rep.function = f.name;
  rep.y_schedule.assign(schedule.begin(), schedule.end());
  rep.start_index = start_index;
  rep.grid_step = lhs_run.grid_step;

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    RatePoint p;
    p.y = schedule[i];
    p.lhs = lhs_run.points[i].value;
    p.lhs_tail = lhs_run.points[i].tail_bound;
    p.phi = phis[i].value;
    p.phi_tail = phis[i].tail_bound;
    double delta = p.phi;
    if (delta < kOmegaDeltaFloor) {
      delta = kOmegaDeltaFloor;
      p.omega_at_floor = true;
    }
    p.omega_resolution = std::max(delta / kOmegaResolutionDivisor, kOmegaResolutionFloor);
    p.omega = modulus_of_continuity(f, delta, p.omega_resolution);
    p.margin = 2.0 * p.omega - p.lhs;
    p.deficit = lhs_run.points[i].deficit || phis[i].deficit;
    if (mu) {
      const double m = mu(schedule[i]);
      p.mu = m;
      p.lhs_over_mu = p.lhs / m;
    }
    rep.points.push_back(p);
  }
  return rep;
}

}  // namespace qmkz
