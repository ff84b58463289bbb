#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmkz {

/// Shortest round-trip decimal form of a double (stable across runs).
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// What to do when a series evaluation reaches its term budget before the
/// requested tail tolerance is certified.
enum class BudgetPolicy {
  kError,              ///< throw BudgetError
  kReturnWithDeficit,  ///< return the partial result with deficit = true
};

/// Truncation control for every infinite series and q-integral evaluation.
struct TruncationPolicy {
  double tail_tol = 1e-12;
  std::size_t max_terms = 1'000'000;
  BudgetPolicy on_budget_exhausted = BudgetPolicy::kReturnWithDeficit;

  void validate() const {
    if (!(tail_tol > 0.0)) throw std::invalid_argument("TruncationPolicy: tail_tol must be > 0");
    if (max_terms < 1) throw std::invalid_argument("TruncationPolicy: max_terms must be >= 1");
  }
};

/// Outcome of a truncated series evaluation. When deficit is false the
/// reported tail_bound is a certified bound on the truncation error and is
/// at most the policy's tail_tol. deficit is set when the term budget ran
/// out first, or when the tail bound had to rely on a sampled (uncertified)
/// estimate of sup|f|.
struct SeriesResult {
  double value = 0.0;
  std::size_t terms_used = 0;
  double tail_bound = 0.0;
  bool deficit = false;
};

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Compensated (Kahan) accumulator. Fixed ascending summation order makes
/// every series result bit-reproducible across runs.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

/// count uniformly spaced points covering [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(std::size_t count, double lo, double hi) {
  if (count < 2 || !(lo < hi)) throw std::invalid_argument("uniform_grid: need count >= 2 and lo < hi");
  std::vector<double> g(count);
  const double h = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + h * static_cast<double>(i);
  g.back() = hi;
  return g;
}

namespace detail {

// Weight carried as mantissa * 2^exp2 so that series whose leading weights
// underflow double range (e.g. (1-x)^{n+1} at x near 1 with n in the
// thousands) still sweep correctly. Scaling by powers of two is exact.
struct ScaledWeight {
  double mantissa = 0.0;
  long exp2 = 0;

  void init_from_log(double ln_w) {
    if (ln_w == 0.0) {
      mantissa = 1.0;
      exp2 = 0;
      return;
    }
    const double e = std::floor(ln_w / 0.6931471805599453);
    exp2 = static_cast<long>(e);
    mantissa = std::exp(ln_w - e * 0.6931471805599453);
    normalize();
  }

  void mul(double r) {
    mantissa *= r;
    normalize();
  }

  void normalize() {
    while (mantissa >= 0x1p512) {
      mantissa *= 0x1p-512;
      exp2 += 512;
    }
    while (mantissa > 0.0 && mantissa < 0x1p-512 && exp2 != 0) {
      mantissa *= 0x1p512;
      exp2 -= 512;
    }
  }

  // True weight as a double; vanishes quietly when still far below range.
  double materialize() const {
    if (exp2 == 0) return mantissa;
    if (exp2 < -1100) return 0.0;
    return std::ldexp(mantissa, static_cast<int>(exp2));
  }
};

}  // namespace detail

}  // namespace qmkz
