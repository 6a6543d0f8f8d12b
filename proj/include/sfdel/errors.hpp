#pragma once

#include <stdexcept>
#include <string>

namespace sfdel {

// Base of all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument combinations / contract violations.
struct UsageError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (files, CSV rows, dimensions).
struct DataError : Error {
  using Error::Error;
};

// Field simulation failure (covariance not factorizable even with jitter,
// rejection-sampling cap exhausted, ...).
struct SimulationError : Error {
  using Error::Error;
};

// Frequency grid invalid or over the size cap.
struct GridError : Error {
  using Error::Error;
};

// Requested compute kernel unavailable on this machine.
struct KernelError : Error {
  using Error::Error;
};

// No searched parameter value was accepted at the requested level.
struct EmptyRegionError : Error {
  using Error::Error;
};

// Every probed parameter value had an infeasible EL problem.
struct AllInfeasibleError : Error {
  using Error::Error;
};

// One-line diagnostic on stderr; never touches serialized outputs.
void warn(const std::string& message);

}  // namespace sfdel
