#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gsn/core.hpp"

namespace gsn {

struct TargetFunction {
  std::string id;
  Eigen::Index dim;
  std::vector<Interval> bounds;
  std::function<double(const Vector&)> eval;

  double operator()(const Vector& x) const { return eval(x); }
};

namespace detail {

inline std::vector<Interval> cube(Eigen::Index d, double lo, double hi) {
  return std::vector<Interval>(static_cast<std::size_t>(d), Interval{lo, hi});
}

}  // namespace detail

/// The six benchmark targets, ex1..ex6.
inline std::vector<TargetFunction> target_registry() {
  using std::numbers::pi;
  std::vector<TargetFunction> out;
  out.push_back({"ex1", 1, detail::cube(1, -1, 1),
                 [](const Vector& x) { return std::cos(2 * pi * x(0)) * std::exp(x(0)); }});
  out.push_back({"ex2", 1, detail::cube(1, -1, 1), [](const Vector& x) {
                   return std::sin(2 * pi * x(0)) * std::exp(-x(0) * x(0)) + std::cos(17 * x(0)) * std::exp(x(0));
                 }});
  out.push_back({"ex3", 2, detail::cube(2, -1, 1), [](const Vector& x) {
                   return std::sin(pi * x(0)) * std::cos(pi * x(1)) * std::exp(-(x(0) * x(0) + x(1) * x(1)));
                 }});
  out.push_back({"ex4", 2, detail::cube(2, -1, 1), [](const Vector& x) {
                   return std::cos(5 * (x(0) + x(1))) * std::sin(3 * (x(0) - x(1))) *
                          std::exp(-(x(0) * x(0) + x(1) * x(1)));
                 }});
  out.push_back({"ex5", 4, detail::cube(4, -1, 1), [](const Vector& x) { return std::sin(2 * pi * x.sum()); }});
  out.push_back({"ex6", 5, detail::cube(5, 0, 1),
                 [](const Vector& x) { return std::cos(x.squaredNorm()) / std::exp(x.sum()); }});
  return out;
}

inline TargetFunction find_target(const std::string& id) {
  for (auto& t : target_registry()) {
    if (t.id == id) return t;
  }
  throw InvalidArgument("unknown target '" + id + "' (expected ex1..ex6)");
}

}  // namespace gsn
