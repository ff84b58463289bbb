#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmkz/common.hpp"

namespace qmkz {

/// A named, evaluable real function on [0,1].
///
/// sup_bound, when present, is a caller-certified bound on |f| over [0,1];
/// series evaluators use it to certify truncation tails. poly, when present,
/// holds monomial coefficients c_0 + c_1 t + c_2 t^2 + ... and marks the
/// function as exactly integrable by the q-beta moment identities.
struct Func1D {
  std::string name;
  std::function<double(double)> eval;
  std::optional<double> sup_bound;
  std::optional<std::vector<double>> poly;

  double operator()(double x) const { return eval(x); }
};

inline Func1D e0() {
  return {"e0", [](double) { return 1.0; }, 1.0, std::vector<double>{1.0}};
}

inline Func1D e1() {
  return {"e1", [](double x) { return x; }, 1.0, std::vector<double>{0.0, 1.0}};
}

inline Func1D e2() {
  return {"e2", [](double x) { return x * x; }, 1.0, std::vector<double>{0.0, 0.0, 1.0}};
}

inline Func1D sinpi() {
  return {"sinpi", [](double x) { return std::sin(3.14159265358979323846 * x); }, 1.0, std::nullopt};
}

/// |x - 1/2|: Lipschitz-1 and not differentiable at 1/2.
inline Func1D abshalf() {
  return {"abshalf", [](double x) { return std::abs(x - 0.5); }, 0.5, std::nullopt};
}

inline Func1D constant(double c) {
  return {"const:" + format_double(c), [c](double) { return c; }, std::abs(c), std::vector<double>{c}};
}

/// Same function with the polynomial marker stripped; evaluators that
/// dispatch on the marker then take their general-function path.
inline Func1D without_poly_marker(Func1D f) {
  f.poly.reset();
  return f;
}

/// Resolve one of the bundled function names: e0 | e1 | e2 | sinpi |
/// abshalf | const:<value>.
inline Func1D parse_function(const std::string& name) {
  if (name == "e0") return e0();
  if (name == "e1") return e1();
  if (name == "e2") return e2();
  if (name == "sinpi") return sinpi();
  if (name == "abshalf") return abshalf();
  if (name.rfind("const:", 0) == 0) {
    std::size_t pos = 0;
    const std::string body = name.substr(6);
    double c;
    try {
      c = std::stod(body, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_function: bad constant in '" + name + "'");
    }
    if (pos != body.size()) throw std::invalid_argument("parse_function: bad constant in '" + name + "'");
    return constant(c);
  }
  throw std::invalid_argument("parse_function: unknown function '" + name + "'");
}

}  // namespace qmkz
