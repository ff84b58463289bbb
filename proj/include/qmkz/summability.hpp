#pragma once

/// Abel transform of real sequences, q-sequence generators (including the
/// counterexample sequences that vanish on perfect cubes / primes), and the
/// classical-conditions and natural-density diagnostics.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmkz/common.hpp"
#include "qmkz/qcalc.hpp"

namespace qmkz {

/// A rule n -> q_n with q_0 = 0 and q_n in [0, 1] for n >= 1. The standing
/// constraint is q_n > 0; the cube / prime counterexample sequences set
/// q_n = 0 at designated indices on purpose, and the induced quantities
/// ([n]_0 = 1 for n >= 1) follow the same case splits.
struct QSequence {
  std::string name;
  std::function<double(std::size_t)> rule;

  double operator()(std::size_t n) const { return rule(n); }
};

/// Throws unless q_0 = 0 and q_n in [0, 1] for every n <= horizon.
inline void validate_qsequence(const QSequence& seq, std::size_t horizon) {
  if (seq.rule(0) != 0.0) throw std::invalid_argument("QSequence '" + seq.name + "': q_0 must be 0");
  for (std::size_t n = 1; n <= horizon; ++n) {
    const double q = seq.rule(n);
    if (!(q >= 0.0) || q > 1.0)
      throw std::invalid_argument("QSequence '" + seq.name + "': q_" + std::to_string(n) + " outside [0, 1]");
  }
}

namespace detail {

// Write-once-then-read sieve cache; extended under a mutex when a query
// exceeds the current horizon.
class PrimeSieve {
 public:
  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    PrimeSieve& s = instance();
    std::lock_guard<std::mutex> lock(s.mu_);
    if (n >= s.flags_.size()) s.extend(n);
    return s.flags_[n];
  }

 private:
  static PrimeSieve& instance() {
    static PrimeSieve s;
    return s;
  }

  void extend(std::uint64_t need) {
    std::uint64_t lim = flags_.empty() ? 1024 : flags_.size();
    while (lim <= need) lim *= 2;
    flags_.assign(lim, true);
    flags_[0] = flags_[1] = false;
    for (std::uint64_t i = 2; i * i < lim; ++i)
      if (flags_[i])
        for (std::uint64_t j = i * i; j < lim; j += i) flags_[j] = false;
  }

  std::mutex mu_;
  std::vector<bool> flags_;
};

}  // namespace detail

inline bool is_prime(std::uint64_t n) { return detail::PrimeSieve::is_prime(n); }

inline bool is_perfect_cube(std::uint64_t n) {
  const auto r = static_cast<std::uint64_t>(std::llround(std::cbrt(static_cast<double>(n))));
  for (std::uint64_t c = (r > 1 ? r - 1 : 0); c <= r + 1; ++c)
    if (c * c * c == n) return true;
  return false;
}

/// q_n = 0 when n is a perfect cube, 1 otherwise (and q_0 = 0). Fails the
/// classical conditions, yet the induced sequence 1/[n-1] is Abel null.
inline QSequence gen_cube_qseq() {
  return {"cube", [](std::size_t n) { return (n == 0 || is_perfect_cube(n)) ? 0.0 : 1.0; }};
}

/// q_n = 0 when n is prime, 1 otherwise (and q_0 = 0).
inline QSequence gen_prime_qseq() {
  return {"prime", [](std::size_t n) { return (n == 0 || is_prime(n)) ? 0.0 : 1.0; }};
}

inline QSequence const_qseq(double q) {
  if (!(q > 0.0) || q > 1.0) throw std::domain_error("const_qseq: q must lie in (0, 1]");
  return {"const:" + format_double(q), [q](std::size_t n) { return n == 0 ? 0.0 : q; }};
}

/// q_n = 1 - 1/n^2: satisfies the classical conditions (q_n^n -> 1 and
/// [n] -> infinity). q_1 = 0 is a designated zero index.
inline QSequence one_minus_inv_sq_qseq() {
  return {"one-minus-inv-sq", [](std::size_t n) {
            if (n == 0) return 0.0;
            const double d = static_cast<double>(n);
            return 1.0 - 1.0 / (d * d);
          }};
}

/// n -> 1/[n-1]_{q_n}, defined for n >= 2. Under the cube sequence this is
/// 1 at perfect cubes and 1/(n-1) otherwise.
inline std::function<double(std::size_t)> inv_bracket_seq(const QSequence& seq) {
  return [rule = seq.rule](std::size_t n) {
    if (n < 2) throw std::domain_error("inv_bracket_seq: defined for n >= 2");
    return 1.0 / detail::q_integer_raw(n - 1, rule(n));
  };
}

/// n -> [2]_{q_n}/[n-1]_{q_n} = (1+q_n)/([n]-q_n^{n-1}), defined for n >= 2.
/// Under the prime sequence this is 1 at primes and 2/(n-1) otherwise.
inline std::function<double(std::size_t)> two_over_bracket_seq(const QSequence& seq) {
  return [rule = seq.rule](std::size_t n) {
    if (n < 2) throw std::domain_error("two_over_bracket_seq: defined for n >= 2");
    const double q = rule(n);
    return (1.0 + q) / detail::q_integer_raw(n - 1, q);
  };
}

/// Abel transform (1-y) sum_{j >= start_index} x_j y^j, truncated once the
/// certified tail bound * y^j drops below the tail tolerance. The caller
/// guarantees |x_j| <= bound for all j >= start_index.
inline SeriesResult abel_transform(const std::function<double(std::size_t)>& x, double y,
                                   std::size_t start_index, double bound,
                                   const TruncationPolicy& policy = {}) {
  policy.validate();
  if (!(y > 0.0) || !(y < 1.0)) throw std::domain_error("abel_transform: y must lie in (0, 1)");
  if (!(bound >= 0.0) || !std::isfinite(bound)) throw std::invalid_argument("abel_transform: bad bound");

  SeriesResult r;
  KahanSum sum;
  double yj = std::pow(y, static_cast<double>(start_index));
  std::size_t j = start_index;
  for (std::size_t terms = 0; terms < policy.max_terms; ++terms) {
    sum.add(x(j) * yj);
    ++j;
    yj *= y;
    r.terms_used = terms + 1;
    // (1-y) sum_{i>=j} bound y^i <= bound y^j
    r.tail_bound = bound * yj;
    if (r.tail_bound <= policy.tail_tol) {
      r.value = (1.0 - y) * sum.value();
      return r;
    }
  }
  r.value = (1.0 - y) * sum.value();
  r.deficit = true;
  if (policy.on_budget_exhausted == BudgetPolicy::kError)
    throw BudgetError("abel_transform: term budget exhausted before tail tolerance");
  return r;
}

/// One Abel transform per scheduled y. The schedule must be strictly
/// increasing inside (0, 1); limit verdicts are left to callers.
struct AbelProfile {
  std::vector<double> y_schedule;
  std::vector<SeriesResult> values;
  std::size_t start_index = 0;
};

inline AbelProfile abel_profile(const std::function<double(std::size_t)>& x,
                                const std::vector<double>& schedule, std::size_t start_index,
                                double bound, const TruncationPolicy& policy = {}) {
  if (schedule.empty()) throw std::invalid_argument("abel_profile: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || !(schedule[i] < 1.0))
      throw std::invalid_argument("abel_profile: schedule values must lie in (0, 1)");
    if (i > 0 && !(schedule[i] > schedule[i - 1]))
      throw std::invalid_argument("abel_profile: schedule must be strictly increasing");
  }
  AbelProfile p;
  p.y_schedule = schedule;
  p.start_index = start_index;
  p.values.reserve(schedule.size());
  for (double y : schedule) p.values.push_back(abel_transform(x, y, start_index, bound, policy));
  return p;
}

/// y_m = 1 - 2^{-m}, m = 1..10.
inline std::vector<double> default_y_schedule() {
  std::vector<double> ys;
  for (int m = 1; m <= 10; ++m) ys.push_back(1.0 - std::ldexp(1.0, -m));
  return ys;
}

/// Worst-case values of |1 - q_n^n| and 1/[n]_{q_n} over n in [N/2, N],
/// with a pass verdict against the supplied thresholds. The classical
/// convergence conditions are q_n^n -> 1 and 1/[n] -> 0.
struct ClassicalConditionsReport {
  std::size_t horizon = 0;
  double max_qpow_gap = 0.0;
  double max_inv_bracket = 0.0;
  double qpow_gap_tol = 0.0;
  double inv_bracket_tol = 0.0;
  bool passes = false;
};

inline ClassicalConditionsReport classical_conditions_check(const QSequence& seq, std::size_t horizon,
                                                            double qpow_gap_tol = 0.05,
                                                            double inv_bracket_tol = 0.05) {
  if (horizon < 10) throw std::invalid_argument("classical_conditions_check: horizon must be >= 10");
  ClassicalConditionsReport rep;
  rep.horizon = horizon;
  rep.qpow_gap_tol = qpow_gap_tol;
  rep.inv_bracket_tol = inv_bracket_tol;
  for (std::size_t n = horizon / 2; n <= horizon; ++n) {
    const double q = seq.rule(n);
    const double gap = std::abs(1.0 - std::pow(q, static_cast<double>(n)));
    const double inv = 1.0 / detail::q_integer_raw(n, q);
    rep.max_qpow_gap = std::max(rep.max_qpow_gap, gap);
    rep.max_inv_bracket = std::max(rep.max_inv_bracket, inv);
  }
  rep.passes = rep.max_qpow_gap <= qpow_gap_tol && rep.max_inv_bracket <= inv_bracket_tol;
  return rep;
}

/// Natural-density estimate: fraction of indices 1 <= n <= N hit by the
/// indicator.
struct DensityEstimate {
  std::size_t horizon = 0;
  std::size_t count = 0;
  double density = 0.0;
};

inline DensityEstimate density_estimate(const std::function<bool(std::size_t)>& indicator, std::size_t horizon) {
  if (horizon < 1) throw std::invalid_argument("density_estimate: horizon must be >= 1");
  DensityEstimate d;
  d.horizon = horizon;
  for (std::size_t n = 1; n <= horizon; ++n)
    if (indicator(n)) ++d.count;
  d.density = static_cast<double>(d.count) / static_cast<double>(horizon);
  return d;
}

}  // namespace qmkz
