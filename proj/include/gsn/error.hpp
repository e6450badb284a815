#pragma once

#include <stdexcept>
#include <string>

namespace gsn {

/// Malformed input: dimension mismatches, invalid configuration values,
/// schema problems in artifact files.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced something unusable (non-finite values, an empty
/// dictionary, a degenerate factorization).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps an error raised inside one stage of the pipeline so callers can
/// report where it happened.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what, bool numerical)
      : std::runtime_error(stage + ": " + what),
        stage_(std::move(stage)),
        numerical_(numerical) {}

  const std::string& stage() const noexcept { return stage_; }
  bool numerical() const noexcept { return numerical_; }

 private:
  std::string stage_;
  bool numerical_;
};

/// Runs `fn` and rethrows any gsn error tagged with `stage`.
template <typename Fn>
decltype(auto) with_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw StageError(stage, e.what(), false);
  } catch (const NumericalError& e) {
    throw StageError(stage, e.what(), true);
  }
}

}  // namespace gsn
