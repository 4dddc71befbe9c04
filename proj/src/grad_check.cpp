#include "copycat/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace copycat::nd {

namespace {

double evaluate(const ScalarFunction& f, ParameterStore& store) {
  Tape tape(false);
  return f(tape, store).scalar();
}

}  // namespace

GradCheckReport grad_check(const ScalarFunction& f, ParameterStore& store, const GradCheckOptions& options) {
  const double h = options.step;
  GradCheckReport report;
  store.zero_grad();
  {
    Tape tape(true);
    Var out = f(tape, store);
    if (!std::isfinite(out.scalar())) {
      report.finite = false;
      report.max_relative_error = std::numeric_limits<double>::infinity();
      return report;
    }
    tape.backward(out);
  }

  for (auto& e : store.entries()) {
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const double saved = e.value[i];
      auto at = [&](double offset) {
        e.value[i] = saved + offset;
        return evaluate(f, store);
      };
      double numeric = 0.0;
      if (options.stencil == Stencil::ThreePoint) {
        numeric = (at(h) - at(-h)) / (2.0 * h);
      } else {
        const double near = at(h) - at(-h);
        const double far = at(2 * h) - at(-2 * h);
        numeric = (8.0 * near - far) / (12.0 * h);
      }
      e.value[i] = saved;
      ++report.coordinates;

      const double analytic = e.grad[i];
      if (!std::isfinite(numeric) || !std::isfinite(analytic)) {
        report.finite = false;
        report.max_relative_error = std::numeric_limits<double>::infinity();
        report.worst_parameter = e.name;
        report.worst_index = i;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
        return report;
      }
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      if (rel > report.max_relative_error || report.worst_parameter.empty()) {
        report.max_relative_error = rel;
        report.worst_parameter = e.name;
        report.worst_index = i;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace copycat::nd
