#ifndef MPFC_ERRORS_HPP
#define MPFC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace mpfc {

/// Base class for all solver-domain failures.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input to a mean-zero-only operation had a non-negligible mean.
struct NonZeroMean : Error {
  explicit NonZeroMean(const std::string& what) : Error(what) {}
};

/// Iterative solve failed to reach its residual target.
struct NoConvergence : Error {
  NoConvergence(const std::string& what, std::vector<double> history,
                long step_index = -1)
      : Error(what), residual_history(std::move(history)), step(step_index) {}
  std::vector<double> residual_history;
  long step = -1;  // time-step index when raised inside an integrator, else -1
};

/// Local 3x3 smoother block was numerically singular (corrupted state).
struct SingularLocalSystem : Error {
  explicit SingularLocalSystem(const std::string& what) : Error(what) {}
};

/// A field or config was built on a domain the operation does not accept.
struct DomainMismatch : Error {
  explicit DomainMismatch(const std::string& what) : Error(what) {}
};

/// Two fields expected on the same grid were not.
struct GridMismatch : Error {
  explicit GridMismatch(const std::string& what) : Error(what) {}
};

/// Single-mode amplitude radicand went negative.
struct ComplexAmplitude : Error {
  explicit ComplexAmplitude(const std::string& what) : Error(what) {}
};

/// Bad configuration value (CLI/config-file level).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Filesystem failure, annotated with the path involved.
struct IoError : Error {
  IoError(const std::string& what, const std::string& path)
      : Error(what + ": " + path) {}
};

}  // namespace mpfc

#endif  // MPFC_ERRORS_HPP
