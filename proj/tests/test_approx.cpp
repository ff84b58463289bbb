#include <doctest.h>

#include <cmath>
#include <vector>

#include "qmkz/approx_lab.hpp"

using namespace qmkz;

namespace {

OperatorFamily make_family(FamilyKind kind, QSequence seq) {
  return {kind, std::move(seq), TruncationPolicy{}};
}

}  // namespace

TEST_CASE("modulus of continuity") {
  SUBCASE("identity: w(e1, delta) = delta at grid precision") {
    const double res = 0.1 / 64.0;
    const double w = modulus_of_continuity(e1(), 0.1, res);
    CHECK(std::abs(w - 0.1) <= res);
    CHECK(w <= 0.1 + 1e-15);
  }
  SUBCASE("constants have zero modulus") {
    CHECK(modulus_of_continuity(constant(3.25), 0.2) == 0.0);
  }
  SUBCASE("abshalf is Lipschitz-1: w(f, 0.2) = 0.2") {
    const double res = 0.2 / 64.0;
    const double w = modulus_of_continuity(abshalf(), 0.2, res);
    CHECK(std::abs(w - 0.2) <= res);
  }
  SUBCASE("sinpi: w(f, delta) = sin(pi delta) for delta <= 1/2") {
    const double res = 0.3 / 256.0;
    const double w = modulus_of_continuity(sinpi(), 0.3, res);
    const double exact = std::sin(3.14159265358979323846 * 0.3);
    CHECK(std::abs(w - exact) <= 4.0 * res);
  }
  SUBCASE("resolution precondition") {
    CHECK_THROWS_AS(modulus_of_continuity(e1(), 0.1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(modulus_of_continuity(e1(), -0.1, 0.01), std::domain_error);
  }
}

TEST_CASE("modulus is nondecreasing in delta") {
  const std::vector<Func1D> fs = {e1(), e2(), sinpi(), abshalf(), constant(1.0)};
  const double res = 1.0 / 4096.0;
  for (const auto& f : fs) {
    double prev = -1.0;
    for (int i = 1; i <= 10; ++i) {
      const double delta = 0.05 * static_cast<double>(i);
      const double w = modulus_of_continuity(f, delta, res);
      CHECK(w >= prev - 1e-15);
      prev = w;
    }
  }
}

TEST_CASE("modulus vanishes as delta -> 0") {
  const std::vector<Func1D> fs = {e1(), e2(), sinpi(), abshalf()};
  for (const auto& f : fs) {
    double prev = 10.0;
    for (int k = 1; k <= 10; ++k) {
      const double delta = std::ldexp(1.0, -k);
      const double w = modulus_of_continuity(f, delta, delta / 64.0);
      CHECK(w <= prev + 1e-15);
      prev = w;
    }
    CHECK(prev <= 2.0 * std::ldexp(1.0, -10) * 3.2);  // ~Lipschitz decay to 0
  }
}

TEST_CASE("subadditivity-type bound w(f, c delta) <= (1 + floor(c)) w(f, delta)") {
  CHECK(omega_subadditivity_check(e2(), 0.05, 3.5));
  CHECK(omega_subadditivity_check(e1(), 0.1, 1.0));
  CHECK(omega_subadditivity_check(sinpi(), 0.1, 2.7));
  CHECK(omega_subadditivity_check(abshalf(), 0.07, 4.2));
  CHECK(omega_subadditivity_check(constant(2.0), 0.1, 9.9));
}

TEST_CASE("korovkin error norm vanishes on e0 and e1") {
  const auto grid = uniform_grid(21, 0.0, 0.99);
  const TruncationPolicy pol;
  SUBCASE("q-MKZ") {
    const OperatorFamily fam = make_family(FamilyKind::kQMkz, const_qseq(0.8));
    CHECK(korovkin_error_norm(fam, e0(), 0.9, grid) <= pol.tail_tol);
    CHECK(korovkin_error_norm(fam, e1(), 0.9, grid) <= pol.tail_tol);
  }
  SUBCASE("Durrmeyer") {
    const OperatorFamily fam = make_family(FamilyKind::kDurrmeyerQMkz, const_qseq(0.5));
    CHECK(korovkin_error_norm(fam, e0(), 0.9, grid) <= pol.tail_tol);
    CHECK(korovkin_error_norm(fam, e1(), 0.9, grid) <= pol.tail_tol);
  }
  SUBCASE("classical") {
    const OperatorFamily fam = make_family(FamilyKind::kClassicalMkz, const_qseq(1.0));
    CHECK(korovkin_error_norm(fam, e0(), 0.9, grid) <= pol.tail_tol);
    CHECK(korovkin_error_norm(fam, e1(), 0.9, grid) <= pol.tail_tol);
  }
}

TEST_CASE("korovkin run: q-MKZ with q = 1 on sinpi decays toward 1") {
  // The error norm is not monotone from small y (the Abel weight on
  // n >= start has not saturated there); the decrease sets in once y is
  // large. Frozen from direct evaluation: values at 0.5, 0.9, 0.99 are
  // about 0.0188, 0.0585, 0.0195.
  const auto grid = uniform_grid(11, 0.0, 0.99);
  const std::vector<double> ys = {0.5, 0.9, 0.99};
  const OperatorFamily fam = make_family(FamilyKind::kQMkz, const_qseq(1.0));
  const KorovkinRun run = korovkin_run(fam, sinpi(), ys, grid);
  REQUIRE(run.points.size() == 3);
  CHECK(run.points[1].value > run.points[2].value);
  CHECK(run.points[2].value < run.points[1].value * 0.5);
  for (const auto& p : run.points) CHECK_FALSE(p.deficit);
}

TEST_CASE("korovkin run: cube q-sequence on e2 tracks the majorant chain") {
  const auto grid = uniform_grid(11, 0.0, 0.99);
  const std::vector<double> ys = {0.9, 0.99};
  const OperatorFamily fam = make_family(FamilyKind::kQMkz, gen_cube_qseq());
  const KorovkinRun run = korovkin_run(fam, e2(), ys, grid);
  CHECK(run.points[0].value > run.points[1].value);
  // 0 <= M_n^q(e2;x) - x^2 <= x/[n-1] gives the scalar majorant
  // (1-y) sum y^n / [n-1]; frozen oracle values from the Abel profile.
  const double majorant[] = {0.168837388210609, 0.060544308391758};
  for (int i = 0; i < 2; ++i) {
    CHECK(run.points[i].value <= majorant[i] + run.points[i].tail_bound + 1e-8);
    CHECK(run.points[i].value >= 0.0);
  }
}

TEST_CASE("korovkin run: Durrmeyer with the prime q-sequence on e2 decreases") {
  // q_n = 1 off the primes: the inner functionals go through the exact
  // moment-ratio route there.
  const auto grid = uniform_grid(11, 0.0, 0.99);
  const std::vector<double> ys = {0.9, 0.99};
  const OperatorFamily fam = make_family(FamilyKind::kDurrmeyerQMkz, gen_prime_qseq());
  const KorovkinRun run = korovkin_run(fam, e2(), ys, grid);
  CHECK(run.points[0].value > run.points[1].value);
  CHECK(run.points[0].value < 1.0);
}

TEST_CASE("korovkin run rejects non-polynomial f when the sequence reaches q = 1") {
  const auto grid = uniform_grid(5, 0.0, 0.9);
  const std::vector<double> ys = {0.5};
  const OperatorFamily fam = make_family(FamilyKind::kDurrmeyerQMkz, gen_prime_qseq());
  CHECK_THROWS_AS(korovkin_run(fam, sinpi(), ys, grid), std::domain_error);
}

TEST_CASE("korovkin error norm is bounded by its term-wise majorant") {
  const auto grid = uniform_grid(9, 0.0, 0.96);
  const double y = 0.8;
  const std::vector<OperatorFamily> fams = {
      make_family(FamilyKind::kQMkz, const_qseq(0.7)),
      make_family(FamilyKind::kClassicalMkz, const_qseq(1.0)),
      make_family(FamilyKind::kDurrmeyerQMkz, const_qseq(0.6)),
  };
  for (const auto& fam : fams) {
    const Func1D f = sinpi();
    const double assembled = korovkin_error_norm(fam, f, y, grid, 3);
    // term-wise: (1-y) sum_n ||L_n f - f||_grid y^n
    double termwise = 0.0;
    double yn = std::pow(y, 3.0);
    for (std::size_t n = 3; n <= 140; ++n) {  // y^140 ~ 3e-14
      const auto vals = family_apply_grid(fam, f, n, grid);
      double sup = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g)
        sup = std::max(sup, std::abs(vals[g].value - f(grid[g])));
      termwise += sup * yn;
      yn *= y;
    }
    termwise *= (1.0 - y);
    CHECK(assembled <= termwise + 1e-9);
  }
}

TEST_CASE("phi") {
  const auto grid = uniform_grid(11, 0.0, 0.99);
  SUBCASE("vanishes on the degenerate grid {0}") {
    const std::vector<double> origin = {0.0};
    const OperatorFamily fam = make_family(FamilyKind::kQMkz, const_qseq(0.5));
    CHECK(phi(fam, 0.9, origin) == 0.0);
  }
  SUBCASE("grows with y for q = 1") {
    const OperatorFamily fam = make_family(FamilyKind::kQMkz, const_qseq(1.0));
    CHECK(phi(fam, 0.1, grid) < phi(fam, 0.9, grid));
  }
  SUBCASE("q-MKZ at q = 1 is below the scalar majorant") {
    const OperatorFamily fam = make_family(FamilyKind::kQMkz, const_qseq(1.0));
    const double p = phi(fam, 0.9, grid);
    double major = 0.0;
    double yn = std::pow(0.9, 3.0);
    for (std::size_t n = 3; n <= 700; ++n) {  // 0.9^700 ~ 1e-32
      major += yn / static_cast<double>(n - 1);
      yn *= 0.9;
    }
    major = std::sqrt(0.1 * major);
    CHECK(p <= major + 1e-10);
    CHECK(p > 0.0);
  }
}

TEST_CASE("rate report") {
  const auto grid = uniform_grid(11, 0.0, 0.99);
  SUBCASE("Durrmeyer q = 0.5 on e1: lhs at noise level, margin >= 0") {
    const OperatorFamily fam = make_family(FamilyKind::kDurrmeyerQMkz, const_qseq(0.5));
    const std::vector<double> ys = {0.5, 0.9};
    const RateReport rep = rate_report(fam, e1(), ys, grid);
    for (const auto& p : rep.points) {
      CHECK(p.lhs <= 2.0 * fam.policy.tail_tol);
      CHECK(p.margin >= 0.0);
    }
  }
  SUBCASE("Durrmeyer q = 0.9 on abshalf: rate-bound margin nonnegative") {
    const OperatorFamily fam = make_family(FamilyKind::kDurrmeyerQMkz, const_qseq(0.9));
    const std::vector<double> ys = {0.5, 0.9};
    const RateReport rep = rate_report(fam, abshalf(), ys, grid);
    for (const auto& p : rep.points) {
      CHECK(p.margin >= -1e-6);
      CHECK(p.phi > 0.0);
      CHECK_FALSE(p.deficit);
    }
  }
  SUBCASE("constants are fixed points: everything vanishes") {
    const OperatorFamily fam = make_family(FamilyKind::kQMkz, const_qseq(0.7));
    const std::vector<double> ys = {0.9};
    const RateReport rep = rate_report(fam, constant(2.0), ys, grid);
    CHECK(rep.points[0].lhs <= 2.0 * 2.0 * fam.policy.tail_tol);
    CHECK(rep.points[0].omega == 0.0);
    CHECK(std::abs(rep.points[0].margin) <= 4.0 * fam.policy.tail_tol);
  }
  SUBCASE("mu gauge ratios are tabulated") {
    const OperatorFamily fam = make_family(FamilyKind::kDurrmeyerQMkz, const_qseq(0.9));
    const std::vector<double> ys = {0.9};
    const RateReport rep =
        rate_report(fam, e1(), ys, grid, [](double y) { return 1.0 - y; });
    REQUIRE(rep.points[0].mu.has_value());
    CHECK(*rep.points[0].mu == doctest::Approx(0.1).epsilon(1e-12));
    REQUIRE(rep.points[0].lhs_over_mu.has_value());
    CHECK(*rep.points[0].lhs_over_mu <= 1e-10);  // lhs vanishes on e1
  }
}

TEST_CASE("rate-bound margin holds across families and sequences") {
  const auto grid = uniform_grid(11, 0.0, 0.99);
  const std::vector<double> ys = {0.5, 0.75};
  const std::vector<Func1D> fs = {e2(), sinpi(), abshalf()};
  const std::vector<OperatorFamily> fams = {
      make_family(FamilyKind::kQMkz, const_qseq(0.8)),
      make_family(FamilyKind::kQMkz, gen_cube_qseq()),
      make_family(FamilyKind::kDurrmeyerQMkz, const_qseq(0.7)),
  };
  for (const auto& fam : fams) {
    for (const auto& f : fs) {
      const RateReport rep = rate_report(fam, f, ys, grid);
      for (const auto& p : rep.points) CHECK(p.margin >= -1e-6);
    }
  }
}
