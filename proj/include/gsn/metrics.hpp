#pragma once

#include <cmath>
#include <limits>

#include "gsn/core.hpp"

namespace gsn {

struct ErrorSet {
  double abs_l2 = 0.0;
  double rmse = 0.0;
  /// NaN when the targets are identically zero.
  double rel_l2 = 0.0;

  bool rel_defined() const noexcept { return !std::isnan(rel_l2); }
};

inline ErrorSet errors_from(const Vector& predictions, const Vector& targets) {
  if (targets.size() == 0) throw InvalidArgument("compute_errors: empty test set");
  if (predictions.size() != targets.size()) throw InvalidArgument("compute_errors: size mismatch");
  ErrorSet e;
  e.abs_l2 = (predictions - targets).norm();
  e.rmse = e.abs_l2 / std::sqrt(static_cast<double>(targets.size()));
  const double tn = targets.norm();
  e.rel_l2 = tn > 0.0 ? e.abs_l2 / tn : std::numeric_limits<double>::quiet_NaN();
  return e;
}

inline ErrorSet compute_errors(const ShallowNetwork& net, const Dataset& test) {
  return errors_from(batch_eval(net, test.inputs()), test.targets());
}

}  // namespace gsn
