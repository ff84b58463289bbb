#pragma once

/// q-calculus primitives: q-integers, q-factorials, q-binomial coefficients,
/// q-shifted factorials, the Jackson (Thomae) q-integral and the q-beta
/// function. Everything is built on overflow-safe recurrences; no large
/// factorial is ever formed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qmkz/common.hpp"
#include "qmkz/functions.hpp"

namespace qmkz {

/// The deformation parameter. Construction rejects anything outside (0, 1].
class QParam {
 public:
  explicit QParam(double q) : q_(q) {
    if (!(q > 0.0) || q > 1.0 || !std::isfinite(q))
      throw std::domain_error("QParam: q must lie in (0, 1]");
  }
  double value() const { return q_; }

 private:
  double q_;
};

namespace detail {

// [n]_q for q in [0, 1]. The relaxed lower end (q = 0, where [n]_0 = 1 for
// n >= 1) is what the counterexample q-sequences feed through the operator
// machinery; the public q_integer below keeps the strict (0, 1] domain.
inline double q_integer_raw(std::size_t n, double q) {
  if (n == 0) return 0.0;
  if (q == 1.0) return static_cast<double>(n);
  // The closed form cancels catastrophically once q^n is close to 1: the
  // rounding of q^n is amplified by 1/(1 - q^n). Summing directly keeps the
  // result accurate to ~1e-15 relative whenever n (1-q) is small.
  if (static_cast<double>(n) * (1.0 - q) < 0.03) {
    KahanSum s;
    double p = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      s.add(p);
      p *= q;
    }
    return s.value();
  }
  return (1.0 - std::pow(q, static_cast<double>(n))) / (1.0 - q);
}

}  // namespace detail

/// [n]_q = 1 + q + ... + q^{n-1}, with [0]_q = 0 and [n]_1 = n.
inline double q_integer(std::size_t n, QParam q) { return detail::q_integer_raw(n, q.value()); }

/// [n]_q! = [1]_q [2]_q ... [n]_q, empty product 1.
inline double q_factorial(std::size_t n, QParam q) {
  double p = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    p *= detail::q_integer_raw(k, q.value());
    if (!std::isfinite(p)) throw std::overflow_error("q_factorial: product exceeds double range");
  }
  return p;
}

/// Gaussian binomial [n choose r]_q = [n]_q! / ([r]_q! [n-r]_q!), computed by
/// the multiplicative recurrence prod_{k=1..r} [n-r+k]/[k].
inline double q_binomial(std::size_t n, std::size_t r, QParam q) {
  if (r > n) throw std::domain_error("q_binomial: requires n >= r");
  r = std::min(r, n - r);
  double p = 1.0;
  for (std::size_t k = 1; k <= r; ++k) {
    p *= detail::q_integer_raw(n - r + k, q.value()) / detail::q_integer_raw(k, q.value());
    if (!std::isfinite(p)) throw std::overflow_error("q_binomial: value exceeds double range");
  }
  return p;
}

/// q-shifted factorial (t; q)_n = prod_{j=0}^{n-1} (1 - t q^j), empty
/// product 1.
inline double q_pochhammer(double t, QParam q, std::size_t n) {
  double p = 1.0;
  double qj = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    p *= 1.0 - t * qj;
    qj *= q.value();
  }
  return p;
}

/// Shared Jackson node data for the q-beta integrand family
/// t^{m-1} (qt; q)_{n-1} at the nodes t = q^j: poch[j] = (q^{j+1}; q)_{n-1}.
/// Exposed so operator kernels can reuse one node set across many m.
struct QBetaNodes {
  double q = 0.0;
  std::size_t n = 0;
  std::vector<double> nodes;
  std::vector<double> poch;

  // Extends both arrays through index j_max using the one-step ratio
  // (q^{j+2}; q)_{n-1} / (q^{j+1}; q)_{n-1} = (1 - q^{j+n}) / (1 - q^{j+1}).
  void extend(std::size_t j_max) {
    if (nodes.empty()) {
      nodes.push_back(1.0);
      double p0 = 1.0;
      double qi = q;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        p0 *= 1.0 - qi;
        qi *= q;
      }
      poch.push_back(p0);
    }
    while (nodes.size() <= j_max) {
      const std::size_t j = nodes.size() - 1;
      const double qj1 = std::pow(q, static_cast<double>(j + 1));
      const double qjn = qj1 * std::pow(q, static_cast<double>(n - 1));
      nodes.push_back(nodes.back() * q);
      poch.push_back(poch.back() * (1.0 - qjn) / (1.0 - qj1));
    }
  }
};

namespace detail {

inline void require_jackson_q(double q, const char* who) {
  if (q >= 1.0) throw std::domain_error(std::string(who) + ": the q-integral requires q < 1");
}

}  // namespace detail

/// Jackson (Thomae) q-integral of g over [0, a]:
///   a (1-q) sum_{j>=0} g(a q^j) q^j,   0 < q < 1.
///
/// The tail after J terms is bounded by a * sup|g| * q^J. sup|g| comes from
/// g.sup_bound when present; otherwise it is estimated from the first 64
/// nodes and the result is flagged as a deficit (the bound is then not
/// certified).
inline SeriesResult q_integral(const Func1D& g, double a, QParam q, const TruncationPolicy& policy = {}) {
  policy.validate();
  if (!(a > 0.0)) throw std::domain_error("q_integral: requires a > 0");
  detail::require_jackson_q(q.value(), "q_integral");
  const double qq = q.value();

  bool estimated = false;
  double sup;
  if (g.sup_bound) {
    sup = *g.sup_bound;
  } else {
    estimated = true;
    sup = 0.0;
    double node = a;
    for (int j = 0; j < 64; ++j) {
      sup = std::max(sup, std::abs(g(node)));
      node *= qq;
    }
  }

  SeriesResult r;
  KahanSum sum;
  double node = a;
  double qj = 1.0;
  const double scale = a * (1.0 - qq);
  for (std::size_t j = 0; j < policy.max_terms; ++j) {
    sum.add(g(node) * qj);
    node *= qq;
    qj *= qq;
    r.terms_used = j + 1;
    r.tail_bound = a * sup * qj;
    if (r.tail_bound <= policy.tail_tol) {
      r.value = scale * sum.value();
      r.deficit = estimated;
      return r;
    }
  }
  r.value = scale * sum.value();
  r.deficit = true;
  if (policy.on_budget_exhausted == BudgetPolicy::kError)
    throw BudgetError("q_integral: term budget exhausted before tail tolerance");
  return r;
}

/// q-beta function B_q(m, n) = int_0^1 t^{m-1} (qt; q)_{n-1} d_q t,
/// evaluated by the Jackson sum on the shared node set. The integrand is
/// bounded by 1 on [0,1] for m, n >= 1, so the tail bound is certified.
inline SeriesResult q_beta(std::size_t m, std::size_t n, QParam q, const TruncationPolicy& policy = {}) {
  policy.validate();
  if (m < 1 || n < 1) throw std::domain_error("q_beta: requires m, n >= 1");
  detail::require_jackson_q(q.value(), "q_beta");
  const double qq = q.value();

  QBetaNodes tab{qq, n, {}, {}};
  SeriesResult r;
  KahanSum sum;
  double qjm = 1.0;  // q^{j m}
  const double qm = std::pow(qq, static_cast<double>(m));
  double qj = 1.0;
  for (std::size_t j = 0; j < policy.max_terms; ++j) {
    tab.extend(j);
    sum.add(qjm * tab.poch[j]);
    qjm *= qm;
    qj *= qq;
    r.terms_used = j + 1;
    r.tail_bound = qj;  // sup of the integrand is <= 1
    if (r.tail_bound <= policy.tail_tol) {
      r.value = (1.0 - qq) * sum.value();
      return r;
    }
  }
  r.value = (1.0 - qq) * sum.value();
  r.deficit = true;
  if (policy.on_budget_exhausted == BudgetPolicy::kError)
    throw BudgetError("q_beta: term budget exhausted before tail tolerance");
  return r;
}

}  // namespace qmkz
