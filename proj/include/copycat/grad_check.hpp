#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "copycat/ndiff.hpp"
#include "copycat/parameters.hpp"

namespace copycat::nd {

// f must be deterministic given the store: any noise it uses has to be
// frozen by the caller.
using ScalarFunction = std::function<Var(Tape&, ParameterStore&)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
  bool finite = true;
};

enum class Stencil {
  ThreePoint,  // (f(p+h) - f(p-h)) / 2h, truncation O(h^2)
  FivePoint,   // (-f(p+2h) + 8f(p+h) - 8f(p-h) + f(p-2h)) / 12h, O(h^4)
};

struct GradCheckOptions {
  double step = 2e-3;
  Stencil stencil = Stencil::FivePoint;
};

// Compares reverse-mode gradients against central differences over every
// coordinate of the store. Relative error per coordinate is
// |a - n| / max(|a|, |n|, 1e-8).
GradCheckReport grad_check(const ScalarFunction& f, ParameterStore& store, const GradCheckOptions& options = {});

}  // namespace copycat::nd
