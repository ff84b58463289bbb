#pragma once

/// The three operator families on C[0,1]:
///
///   classical MKZ      M_n(f;x)  = (1-x)^{n+1} sum_k f(k/(n+k)) C(n+k,k) x^k
///   q-MKZ              M_n^q(f;x) = prod_{j<=n}(1-q^j x) sum_k f([k]/[n+k]) [n+k,k]_q x^k
///   Durrmeyer q-MKZ    D_n^q(f;x) = sum_{k>=1} m_{n,k,q}(x) A_{n,k}(f) + m_{n,0,q}(x) f(0)
///
/// each with the definitional branch f(1) at x = 1. A_{n,k}(f) is the
/// q-beta-normalized inner integral (1/B_q(n,k)) int_0^1 t^{k-1}(qt;q)_{n-1} f d_q t.
///
/// All series run on the weight-ratio recurrence w_{k+1} = w_k x [n+k+1]/[k+1]
/// and stop on the cumulative-mass criterion: the weights are a probability
/// mass (L e_0 = 1), so mass >= 1 - tol certifies the truncation without any
/// a-priori term count. Weights are carried in exact power-of-two scaled form
/// so that prefactors far below double range (x near 1, large n) sweep
/// through without underflow.
///
/// The index q domain is relaxed to [0, 1] internally: the counterexample
/// q-sequences take q_n = 0 at designated indices, where [k]_0 = 1 for k >= 1
/// collapses the operators to (1-x) f(0) + x f(1). The public entry points
/// keep the strict domains.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "qmkz/common.hpp"
#include "qmkz/functions.hpp"
#include "qmkz/qcalc.hpp"
#include "qmkz/summability.hpp"

namespace qmkz {

enum class FamilyKind { kClassicalMkz, kQMkz, kDurrmeyerQMkz };

inline const char* family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kClassicalMkz: return "classical-mkz";
    case FamilyKind::kQMkz: return "q-mkz";
    case FamilyKind::kDurrmeyerQMkz: return "durrmeyer-q-mkz";
  }
  return "?";
}

/// A family together with its index sequence (q_n) and truncation policy.
/// Index 0 maps to the zero operator.
struct OperatorFamily {
  FamilyKind kind = FamilyKind::kQMkz;
  QSequence qseq;
  TruncationPolicy policy;

  double q_at(std::size_t n) const {
    return kind == FamilyKind::kClassicalMkz ? 1.0 : qseq(n);
  }
};

namespace detail {

struct SweepStatus {
  std::size_t terms_used = 0;
  double mass = 0.0;
  double tail_fraction = 0.0;  ///< certified bound on the un-summed weight mass
  bool budget_hit = false;
};

// Sweeps the MKZ weight sequence for x in [0,1), q in [0,1], n >= 1 and
// feeds each term to on_term(k, w_k, node_k, q^k, q^{n+k}). node_k is the
// sample point [k]/[n+k] (k/(n+k) at q = 1).
//
// Two certified stops: accumulated mass >= stop_mass, or — since the weight
// ratios x [n+k+1]/[k+1] decrease monotonically toward x — a geometric bound
// w r/(1-r) on the remaining mass once the ratio r drops below 1. The second
// stop matters at tight tolerances: the computed mass can plateau a hair
// below 1 from the rounding the ratio recurrence accumulates over 10^5+
// terms.
template <class TermFn>
SweepStatus mkz_weight_sweep(std::size_t n, double q, double x, double stop_mass,
                             std::size_t max_terms, TermFn&& on_term) {
  assert(n >= 1 && x >= 0.0 && x < 1.0 && q >= 0.0 && q <= 1.0);

  // log of the prefactor prod_{j=0}^{n} (1 - q^j x)
  double ln_w0 = 0.0;
  if (q == 1.0) {
    ln_w0 = static_cast<double>(n + 1) * std::log1p(-x);
  } else {
    double qj = 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
      ln_w0 += std::log1p(-qj * x);
      qj *= q;
      if (qj * x < 1e-18) break;  // remaining factors are 1 to double precision
    }
  }

  // At q = 1 the weight has the closed log form
  //   ln w_k = lgamma(n+k+1) - lgamma(k+1) - lgamma(n+1) + k ln x + (n+1) ln(1-x),
  // rising monotonically up to the mode near x(n+1)/(1-x). When the leading
  // weights sit hundreds of orders of magnitude below anything that can
  // matter, fast-forward to the first k whose weight clears 1e-218: the mass
  // skipped is under max_terms * 1e-218.
  std::size_t k = 0;
  if (q == 1.0 && ln_w0 < -500.0) {
    const auto ln_w_at = [&](double kk) {
      return std::lgamma(static_cast<double>(n) + kk + 1.0) - std::lgamma(kk + 1.0) -
             std::lgamma(static_cast<double>(n) + 1.0) + kk * std::log(x) + ln_w0;
    };
    double lo = 0.0;
    double hi = std::floor(x * static_cast<double>(n + 1) / (1.0 - x));
    if (ln_w_at(hi) >= -500.0) {
      while (hi - lo > 1.0) {
        const double mid = std::floor((lo + hi) / 2.0);
        (ln_w_at(mid) < -500.0 ? lo : hi) = mid;
      }
      k = static_cast<std::size_t>(hi);
      ln_w0 = ln_w_at(hi);
    }
  }

  ScaledWeight w;
  w.init_from_log(ln_w0);
  KahanSum mass;
  SweepStatus st;
  const double tail_target = 1.0 - stop_mass;
  double geo_tail = -1.0;
  double qk = 1.0;  // q^k
  double qnk = (q == 1.0) ? 1.0 : std::pow(q, static_cast<double>(n));  // q^{n+k}
  std::size_t evaluated = 0;
  for (;;) {
    const double wk = w.materialize();
    assert(wk >= 0.0);
    double node;
    if (k == 0)
      node = 0.0;
    else if (q == 1.0)
      node = static_cast<double>(k) / static_cast<double>(n + k);
    else
      node = (1.0 - qk) / (1.0 - qnk);
    on_term(k, wk, node, qk, qnk);
    mass.add(wk);
    ++k;
    ++evaluated;
    if (mass.value() >= stop_mass) break;
    if (evaluated >= max_terms) {
      st.budget_hit = true;
      break;
    }
    double ratio;
    if (q == 1.0) {
      ratio = x * static_cast<double>(n + k) / static_cast<double>(k);
    } else {
      qk *= q;
      qnk *= q;
      ratio = x * (1.0 - qnk) / (1.0 - qk);
    }
    w.mul(ratio);
    // ratio < 1 only happens from the mode of the weight sequence on, where
    // the weight is representable (or truly negligible), so materialize() is
    // trustworthy here.
    if (ratio < 1.0) {
      const double g = w.materialize() / (1.0 - ratio);
      if (g <= tail_target) {
        geo_tail = g;
        break;
      }
    }
  }
  st.terms_used = evaluated;
  st.mass = mass.value();
  st.tail_fraction = geo_tail >= 0.0 ? std::min(geo_tail, std::max(0.0, 1.0 - st.mass))
                                     : std::max(0.0, 1.0 - st.mass);
  return st;
}

struct SupInfo {
  double bound = 0.0;
  bool estimated = false;
};

// Certified bound on |f| over [0,1] when available; otherwise the caller
// tracks the running max over visited nodes and flags the result.
inline SupInfo sup_info(const Func1D& f) {
  if (f.sup_bound) return {*f.sup_bound, false};
  if (f.poly) {
    double s = 0.0;
    for (double c : *f.poly) s += std::abs(c);
    return {s, false};
  }
  return {0.0, true};
}

inline void check_unit_interval(double x, const char* who) {
  if (!(x >= 0.0) || x > 1.0) throw std::domain_error(std::string(who) + ": x must lie in [0, 1]");
}

inline SeriesResult mkz_eval_relaxed(const Func1D& f, std::size_t n, double q, double x,
                                     const TruncationPolicy& policy) {
  policy.validate();
  if (n < 1) throw std::domain_error("mkz: requires n >= 1");
  check_unit_interval(x, "mkz");
  if (x == 1.0) return {f(1.0), 0, 0.0, false};

  const SupInfo si = sup_info(f);
  const double scale = si.estimated ? 1.0 : std::max(1.0, si.bound);
  double fmax = 0.0;
  KahanSum val;
  const SweepStatus st =
      mkz_weight_sweep(n, q, x, 1.0 - policy.tail_tol / scale, policy.max_terms,
                       [&](std::size_t, double w, double node, double, double) {
                         const double fv = f(node);
                         if (si.estimated) fmax = std::max(fmax, std::abs(fv));
                         val.add(w * fv);
                       });

  SeriesResult r;
  r.value = val.value();
  r.terms_used = st.terms_used;
  r.tail_bound = (si.estimated ? fmax : si.bound) * st.tail_fraction;
  r.deficit = st.budget_hit || si.estimated;
  if (st.budget_hit && policy.on_budget_exhausted == BudgetPolicy::kError)
    throw BudgetError("mkz: term budget exhausted before mass criterion");
  return r;
}

// Inlined node evaluation: Horner form for polynomial-marked functions
// (skips the std::function indirection in the hot loop), plain call
// otherwise.
struct NodeEval {
  const Func1D* f = nullptr;
  const double* coef = nullptr;
  std::size_t deg = 0;

  explicit NodeEval(const Func1D& fn) : f(&fn) {
    if (fn.poly && !fn.poly->empty()) {
      coef = fn.poly->data();
      deg = fn.poly->size() - 1;
    }
  }
  double operator()(double t) const {
    if (coef == nullptr) return (*f)(t);
    double acc = coef[deg];
    for (std::size_t m = deg; m-- > 0;) acc = acc * t + coef[m];
    return acc;
  }
};

// Shared-sweep evaluation of several functions at once (the weights do not
// depend on f). All functions must carry certified bounds.
inline std::vector<SeriesResult> mkz_eval_multi(std::span<const Func1D> fs, std::size_t n, double q,
                                                double x, const TruncationPolicy& policy) {
  policy.validate();
  if (n < 1) throw std::domain_error("mkz: requires n >= 1");
  check_unit_interval(x, "mkz");
  std::vector<SeriesResult> out(fs.size());
  if (x == 1.0) {
    for (std::size_t i = 0; i < fs.size(); ++i) out[i] = {fs[i](1.0), 0, 0.0, false};
    return out;
  }
  double scale = 1.0;
  std::vector<double> bounds(fs.size());
  std::vector<NodeEval> evals;
  evals.reserve(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const SupInfo si = sup_info(fs[i]);
    if (si.estimated) throw std::invalid_argument("mkz_eval_multi: every function needs a certified bound");
    bounds[i] = si.bound;
    scale = std::max(scale, si.bound);
    evals.emplace_back(fs[i]);
  }
  std::vector<KahanSum> vals(fs.size());
  const SweepStatus st =
      mkz_weight_sweep(n, q, x, 1.0 - policy.tail_tol / scale, policy.max_terms,
                       [&](std::size_t, double w, double node, double, double) {
                         for (std::size_t i = 0; i < fs.size(); ++i) vals[i].add(w * evals[i](node));
                       });
  for (std::size_t i = 0; i < fs.size(); ++i) {
    out[i].value = vals[i].value();
    out[i].terms_used = st.terms_used;
    out[i].tail_bound = bounds[i] * st.tail_fraction;
    out[i].deficit = st.budget_hit;
  }
  if (st.budget_hit && policy.on_budget_exhausted == BudgetPolicy::kError)
    throw BudgetError("mkz: term budget exhausted before mass criterion");
  return out;
}

// Inner functional A_{n,k}(f) of the Durrmeyer family for one fixed (n, q),
// f general. Numerator and normalizer are summed over the same Jackson node
// set in the same order, so A_{n,k}(e_0) = 1 bit-exactly and A_{n,k}(f) is a
// convex combination of node values regardless of truncation depth. Values
// are cached per k; one table serves a whole x-grid.
class DurrmeyerInnerTable {
 public:
  DurrmeyerInnerTable(std::size_t n, double q, const Func1D& f, const TruncationPolicy& policy)
      : n_(n), q_(q), f_(&f), policy_(policy) {
    tab_.q = q;
    tab_.n = n;
    tab_.extend(0);
    if (!(tab_.poch[0] > 0.0))
      throw std::domain_error("durrmeyer: (q;q)_{n-1} underflows; q is too close to 1 for the Jackson kernel");
    fnodes_.push_back((*f_)(1.0));
    // truncating the normalized quadrature at relative mass rho leaves an
    // error of at most 2 sup|f| rho in A_{n,k}(f); scale rho so that stays
    // within a tail_tol/2 allowance whatever the bound on f
    const SupInfo si = sup_info(f);
    rho_ = 0.25 * policy.tail_tol / std::max(1.0, si.estimated ? 1.0 : si.bound);
  }

  double functional(std::size_t k) {
    if (k < 1) throw std::domain_error("DurrmeyerInnerTable: k >= 1");
    while (values_.size() < k) {
      qk_pow_ *= q_;
      values_.push_back(compute(qk_pow_));
    }
    return values_[k - 1];
  }

  bool budget_hit() const { return budget_hit_; }

 private:
  double compute(double qk) {
    KahanSum num, den;
    double cpow = 1.0;  // q^{jk}
    const double geo = 1.0 / (1.0 - qk);
    for (std::size_t j = 0;; ++j) {
      if (j >= tab_.nodes.size()) {
        tab_.extend(j);
        fnodes_.push_back((*f_)(tab_.nodes[j]));
      }
      const double c = cpow * tab_.poch[j];
      den.add(c);
      num.add(c * fnodes_[j]);
      cpow *= qk;
      // remaining mass <= q^{(j+1)k} / (1 - q^k) since every poch factor <= 1
      if (cpow * geo <= rho_ * den.value()) break;
      if (j + 1 >= policy_.max_terms) {
        budget_hit_ = true;
        break;
      }
    }
    return num.value() / den.value();
  }

  std::size_t n_;
  double q_;
  const Func1D* f_;
  TruncationPolicy policy_;
  QBetaNodes tab_;
  std::vector<double> fnodes_;
  std::vector<double> values_;
  double qk_pow_ = 1.0;
  double rho_ = 0.0;
  bool budget_hit_ = false;
};

// Exact inner functional for polynomial f: A_{n,k}(e_m) telescopes to
// prod_{i<m} [k+i]/[n+k+i] via the q-beta / q-factorial identity, valid for
// every q in (0, 1] (and at the relaxed q = 0).
inline double durrmeyer_poly_inner(const std::vector<double>& c, std::size_t k, std::size_t n,
                                   double q, double qk, double qnk) {
  double acc = c.empty() ? 0.0 : c[0];
  double prod = 1.0;
  double qki = qk;
  double qnki = qnk;
  for (std::size_t m = 1; m < c.size(); ++m) {
    if (q == 1.0) {
      prod *= static_cast<double>(k + m - 1) / static_cast<double>(n + k + m - 1);
    } else {
      prod *= (1.0 - qki) / (1.0 - qnki);
      qki *= q;
      qnki *= q;
    }
    acc += c[m] * prod;
  }
  return acc;
}

// Shared-sweep Durrmeyer evaluation of several functions at once. tables[i]
// supplies the Jackson inner functionals for non-polynomial fs[i] (nullptr
// for polynomial ones, which go through the exact moment-ratio route). All
// functions must carry certified bounds.
inline std::vector<SeriesResult> durrmeyer_eval_multi(std::span<const Func1D> fs, std::size_t n,
                                                      double q, double x,
                                                      const TruncationPolicy& policy,
                                                      std::span<DurrmeyerInnerTable* const> tables) {
  policy.validate();
  if (n < 1) throw std::domain_error("durrmeyer: requires n >= 1");
  check_unit_interval(x, "durrmeyer");
  std::vector<SeriesResult> out(fs.size());
  if (x == 1.0) {
    for (std::size_t i = 0; i < fs.size(); ++i) out[i] = {fs[i](1.0), 0, 0.0, false};
    return out;
  }
  double scale = 1.0;
  std::vector<double> bounds(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const SupInfo si = sup_info(fs[i]);
    if (si.estimated)
      throw std::invalid_argument("durrmeyer_eval_multi: every function needs a certified bound");
    if (!fs[i].poly.has_value()) {
      if (tables[i] == nullptr)
        throw std::invalid_argument("durrmeyer_eval_multi: non-polynomial function needs an inner table");
      if (q == 1.0)
        throw std::domain_error(
            "durrmeyer: q = 1 is only evaluable for polynomial functions (the q-integral is undefined there)");
    }
    bounds[i] = si.bound;
    scale = std::max(scale, si.bound);
  }
  std::vector<double> f0(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) f0[i] = fs[i](0.0);
  std::vector<KahanSum> vals(fs.size());
  const SweepStatus st = mkz_weight_sweep(
      n, q, x, 1.0 - policy.tail_tol / (2.0 * scale), policy.max_terms,
      [&](std::size_t k, double w, double, double qk, double qnk) {
        for (std::size_t i = 0; i < fs.size(); ++i) {
          double inner;
          if (k == 0)
            inner = f0[i];
          else if (fs[i].poly)
            inner = durrmeyer_poly_inner(*fs[i].poly, k, n, q, qk, qnk);
          else
            inner = tables[i]->functional(k);
          vals[i].add(w * inner);
        }
      });
  bool budget = st.budget_hit;
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (tables[i] != nullptr) budget = budget || tables[i]->budget_hit();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    out[i].value = vals[i].value();
    out[i].terms_used = st.terms_used;
    out[i].tail_bound = bounds[i] * st.tail_fraction;
    if (!fs[i].poly.has_value()) out[i].tail_bound += 0.5 * policy.tail_tol;
    out[i].deficit = budget;
  }
  if (budget && policy.on_budget_exhausted == BudgetPolicy::kError)
    throw BudgetError("durrmeyer: term budget exhausted before mass criterion");
  return out;
}

inline SeriesResult durrmeyer_eval_relaxed(const Func1D& f, std::size_t n, double q, double x,
                                           const TruncationPolicy& policy,
                                           DurrmeyerInnerTable* shared_table) {
  policy.validate();
  if (n < 1) throw std::domain_error("durrmeyer: requires n >= 1");
  check_unit_interval(x, "durrmeyer");
  if (x == 1.0) return {f(1.0), 0, 0.0, false};

  const bool poly_route = f.poly.has_value();
  if (q == 1.0 && !poly_route)
    throw std::domain_error(
        "durrmeyer: q = 1 is only evaluable for polynomial functions (the q-integral is undefined there)");

  std::unique_ptr<DurrmeyerInnerTable> local;
  DurrmeyerInnerTable* table = shared_table;
  if (!poly_route && table == nullptr) {
    local = std::make_unique<DurrmeyerInnerTable>(n, q, f, policy);
    table = local.get();
  }

  const SupInfo si = sup_info(f);
  const double scale = si.estimated ? 1.0 : std::max(1.0, si.bound);
  double fmax = std::abs(f(0.0));
  KahanSum val;
  const SweepStatus st = mkz_weight_sweep(
      n, q, x, 1.0 - policy.tail_tol / (2.0 * scale), policy.max_terms,
      [&](std::size_t k, double w, double node, double qk, double qnk) {
        double inner;
        if (k == 0)
          inner = f(0.0);
        else if (poly_route)
          inner = durrmeyer_poly_inner(*f.poly, k, n, q, qk, qnk);
        else
          inner = table->functional(k);
        if (si.estimated) fmax = std::max(fmax, std::abs(inner));
        (void)node;
        val.add(w * inner);
      });

  SeriesResult r;
  r.value = val.value();
  r.terms_used = st.terms_used;
  const double bound = si.estimated ? fmax : si.bound;
  r.tail_bound = bound * st.tail_fraction;
  if (!poly_route) r.tail_bound += 0.5 * policy.tail_tol;  // inner-truncation allowance
  const bool budget = st.budget_hit || (table != nullptr && table->budget_hit());
  r.deficit = budget || si.estimated;
  if (budget && policy.on_budget_exhausted == BudgetPolicy::kError)
    throw BudgetError("durrmeyer: term budget exhausted before mass criterion");
  return r;
}

}  // namespace detail

/// Classical MKZ operator M_n(f; x); f(1) at x = 1.
inline SeriesResult mkz_classical(const Func1D& f, std::size_t n, double x,
                                  const TruncationPolicy& policy = {}) {
  return detail::mkz_eval_relaxed(f, n, 1.0, x, policy);
}

/// q-MKZ operator M_n^q(f; x); f(1) at x = 1.
inline SeriesResult mkz_q(const Func1D& f, std::size_t n, QParam q, double x,
                          const TruncationPolicy& policy = {}) {
  return detail::mkz_eval_relaxed(f, n, q.value(), x, policy);
}

/// Durrmeyer q-MKZ operator D_n^q(f; x); f(1) at x = 1. Requires q < 1.
inline SeriesResult durrmeyer_q(const Func1D& f, std::size_t n, QParam q, double x,
                                const TruncationPolicy& policy = {}) {
  if (q.value() == 1.0) throw std::domain_error("durrmeyer_q: requires q < 1");
  return detail::durrmeyer_eval_relaxed(f, n, q.value(), x, policy, nullptr);
}

/// Applies the family member of index n (index 0 is the zero operator).
inline SeriesResult family_apply(const OperatorFamily& fam, const Func1D& f, std::size_t n, double x) {
  if (n == 0) return {0.0, 0, 0.0, false};
  switch (fam.kind) {
    case FamilyKind::kClassicalMkz:
      return detail::mkz_eval_relaxed(f, n, 1.0, x, fam.policy);
    case FamilyKind::kQMkz:
      return detail::mkz_eval_relaxed(f, n, fam.q_at(n), x, fam.policy);
    case FamilyKind::kDurrmeyerQMkz:
      return detail::durrmeyer_eval_relaxed(f, n, fam.q_at(n), x, fam.policy, nullptr);
  }
  throw std::logic_error("family_apply: bad kind");
}

/// Grid evaluation; for the Durrmeyer family the inner functionals are
/// computed once per (n, k) and shared across the whole grid.
inline std::vector<SeriesResult> family_apply_grid(const OperatorFamily& fam, const Func1D& f,
                                                   std::size_t n, std::span<const double> xs) {
  std::vector<SeriesResult> out;
  out.reserve(xs.size());
  if (n == 0) {
    out.assign(xs.size(), SeriesResult{});
    return out;
  }
  if (fam.kind == FamilyKind::kDurrmeyerQMkz && !f.poly.has_value()) {
    const double q = fam.q_at(n);
    if (q == 1.0)
      throw std::domain_error(
          "durrmeyer: q = 1 is only evaluable for polynomial functions (the q-integral is undefined there)");
    detail::DurrmeyerInnerTable table(n, q, f, fam.policy);
    for (double x : xs) out.push_back(detail::durrmeyer_eval_relaxed(f, n, q, x, fam.policy, &table));
    return out;
  }
  for (double x : xs) out.push_back(family_apply(fam, f, n, x));
  return out;
}

/// Evaluates several functions against the same family member over a grid in
/// one weight sweep per grid point (the weights are f-independent). Result
/// is indexed [function][grid point]. Every function needs a certified
/// bound.
inline std::vector<std::vector<SeriesResult>> family_apply_grid_multi(const OperatorFamily& fam,
                                                                      std::span<const Func1D> fs,
                                                                      std::size_t n,
                                                                      std::span<const double> xs) {
  std::vector<std::vector<SeriesResult>> out(fs.size());
  if (n == 0) {
    for (auto& per_f : out) per_f.assign(xs.size(), SeriesResult{});
    return out;
  }
  for (auto& per_f : out) per_f.reserve(xs.size());
  const double q = fam.q_at(n);
  if (fam.kind == FamilyKind::kDurrmeyerQMkz) {
    std::vector<std::unique_ptr<detail::DurrmeyerInnerTable>> owned(fs.size());
    std::vector<detail::DurrmeyerInnerTable*> tables(fs.size(), nullptr);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (!fs[i].poly.has_value()) {
        if (q == 1.0)
          throw std::domain_error(
              "durrmeyer: q = 1 is only evaluable for polynomial functions (the q-integral is undefined "
              "there)");
        owned[i] = std::make_unique<detail::DurrmeyerInnerTable>(n, q, fs[i], fam.policy);
        tables[i] = owned[i].get();
      }
    }
    for (double x : xs) {
      auto vals = detail::durrmeyer_eval_multi(fs, n, q, x, fam.policy, tables);
      for (std::size_t i = 0; i < fs.size(); ++i) out[i].push_back(vals[i]);
    }
    return out;
  }
  for (double x : xs) {
    auto vals = detail::mkz_eval_multi(fs, n, q, x, fam.policy);
    for (std::size_t i = 0; i < fs.size(); ++i) out[i].push_back(vals[i]);
  }
  return out;
}

/// Bounds on the centered second moment L((t-x)^2; x) = L(e_2; x) - x^2:
/// [0, x/[n-1]] for the MKZ kinds and the two-sided kernel-moment envelope
/// for the Durrmeyer family. Requires n >= 3.
struct SecondMomentEnvelope {
  double lo = 0.0;
  double hi = 0.0;
};

inline SecondMomentEnvelope second_moment_envelope(FamilyKind kind, std::size_t n, double q, double x) {
  if (n < 3) throw std::domain_error("second_moment_envelope: requires n >= 3");
  const double br_n1 = detail::q_integer_raw(n - 1, q);
  if (kind != FamilyKind::kDurrmeyerQMkz) return {0.0, x / br_n1};
  const double br_n2 = detail::q_integer_raw(n - 2, q);
  const double two = 1.0 + q;            // [2]_q
  const double three = 1.0 + q + q * q;  // [3]_q
  const double qn1 = std::pow(q, static_cast<double>(n - 1));
  const double qn = qn1 * q;
  const double hi = two * x * (1.0 - x) * (1.0 - qn * x) / br_n1;
  const double lo =
      hi - x * two * three * qn1 * (1.0 - x) * (1.0 - q * x) * (1.0 - qn * x) / (br_n1 * br_n2);
  return {lo, hi};
}

/// Per-grid-point moment data plus the aggregate deviations asserted by the
/// moment identities (L e_0 = 1, L e_1 = x) and envelope checks on L e_2.
struct MomentRow {
  double x = 0.0;
  double e0 = 0.0, e1 = 0.0, e2 = 0.0;
  double e0_tail = 0.0, e1_tail = 0.0, e2_tail = 0.0;
  double env_lo = 0.0, env_hi = 0.0;  // bounds on e2 itself (x^2 + envelope)
};

struct MomentReport {
  std::size_t n = 0;
  double q = 1.0;
  std::vector<double> grid;
  std::vector<MomentRow> rows;
  double e0_err = 0.0;
  double e1_err = 0.0;
  double e2_lower_violation = 0.0;
  double e2_upper_violation = 0.0;
  bool deficit = false;
};

inline MomentReport moment_report(const OperatorFamily& fam, std::size_t n, std::span<const double> grid) {
  if (n < 3) throw std::domain_error("moment_report: the envelope checks require n >= 3");
  MomentReport rep;
  rep.n = n;
  rep.q = fam.q_at(n);
  rep.grid.assign(grid.begin(), grid.end());
  const Func1D fs[3] = {e0(), e1(), e2()};
  for (double x : grid) {
    std::vector<SeriesResult> m;
    if (fam.kind == FamilyKind::kDurrmeyerQMkz) {
      m.reserve(3);
      for (const auto& f : fs)
        m.push_back(detail::durrmeyer_eval_relaxed(f, n, rep.q, x, fam.policy, nullptr));
    } else {
      m = detail::mkz_eval_multi(std::span<const Func1D>(fs, 3), n, rep.q, x, fam.policy);
    }
    const SecondMomentEnvelope env = second_moment_envelope(fam.kind, n, rep.q, x);
    MomentRow row;
    row.x = x;
    row.e0 = m[0].value;
    row.e1 = m[1].value;
    row.e2 = m[2].value;
    row.e0_tail = m[0].tail_bound;
    row.e1_tail = m[1].tail_bound;
    row.e2_tail = m[2].tail_bound;
    row.env_lo = x * x + env.lo;
    row.env_hi = x * x + env.hi;
    rep.rows.push_back(row);
    rep.e0_err = std::max(rep.e0_err, std::abs(row.e0 - 1.0));
    rep.e1_err = std::max(rep.e1_err, std::abs(row.e1 - x));
    rep.e2_lower_violation = std::max(rep.e2_lower_violation, row.env_lo - row.e2);
    rep.e2_upper_violation = std::max(rep.e2_upper_violation, row.e2 - row.env_hi);
    rep.deficit = rep.deficit || m[0].deficit || m[1].deficit || m[2].deficit;
  }
  rep.e2_lower_violation = std::max(rep.e2_lower_violation, 0.0);
  rep.e2_upper_violation = std::max(rep.e2_upper_violation, 0.0);
  return rep;
}

/// (t - x)^2 as a polynomial-marked Func1D; drives the centered second
/// moment through one operator application.
inline Func1D centered_square(double x) {
  return {"sqdiff", [x](double t) { return (t - x) * (t - x); },
          std::max(x * x, (1.0 - x) * (1.0 - x)), std::vector<double>{x * x, -2.0 * x, 1.0}};
}

/// L_n((t-x)^2; x), assembled from the moments of e_0, e_1, e_2 by
/// linearity. Nonnegative up to truncation tolerance.
inline double central_second_moment(const OperatorFamily& fam, std::size_t n, double x) {
  if (n == 0) return 0.0;
  return family_apply(fam, centered_square(x), n, x).value;
}

}  // namespace qmkz
