// Minimal library tour: evaluate the operators, check a moment identity,
// and watch an Abel profile of the cube-sequence counterexample decay.

#include <cstdio>

#include "qmkz/qmkz.hpp"

int main() {
  using namespace qmkz;

  // A single q-MKZ evaluation with a certified truncation tail.
  const SeriesResult r = mkz_q(sinpi(), 10, QParam(0.8), 0.4);
  std::printf("M_10^0.8(sin(pi x); 0.4) = %.12f  (tail <= %.1e, %zu terms)\n", r.value,
              r.tail_bound, r.terms_used);

  // The first moment is exactly x.
  const SeriesResult m1 = mkz_q(e1(), 10, QParam(0.8), 0.4);
  std::printf("M_10^0.8(e1; 0.4)        = %.12f  (identity: 0.4)\n", m1.value);

  // Durrmeyer variant, inner integrals on the shared Jackson nodes.
  const SeriesResult d = durrmeyer_q(abshalf(), 8, QParam(0.7), 0.4);
  std::printf("D_8^0.7(|x-1/2|; 0.4)    = %.12f\n", d.value);

  // The cube q-sequence fails the classical conditions...
  const QSequence cube = gen_cube_qseq();
  const auto check = classical_conditions_check(cube, 1000);
  std::printf("cube sequence classical conditions: %s\n", check.passes ? "pass" : "fail");

  // ...yet the induced sequence 1/[n-1] is Abel null.
  const AbelProfile prof = abel_profile(inv_bracket_seq(cube), {0.9, 0.99, 0.999}, 3, 1.0);
  for (std::size_t i = 0; i < prof.y_schedule.size(); ++i)
    std::printf("  (1-y) sum 1/[n-1] y^n at y=%.3f: %.6f\n", prof.y_schedule[i],
                prof.values[i].value);

  // Korovkin harness: Abel error norms decay for every continuous function.
  const auto grid = uniform_grid(51, 0.0, 0.99);
  OperatorFamily fam{FamilyKind::kQMkz, cube, TruncationPolicy{}};
  const KorovkinRun run = korovkin_run(fam, sinpi(), std::vector<double>{0.9, 0.99}, grid);
  std::printf("Korovkin error norms for sin(pi x): %.6f -> %.6f\n", run.points[0].value,
              run.points[1].value);
  return 0;
}
