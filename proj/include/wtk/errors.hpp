#pragma once

#include <stdexcept>
#include <string>

namespace wtk {

// Base class for every failure the toolkit can raise on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- numeric kernels ------------------------------------------------------
struct Singular : Error {
  using Error::Error;
};
struct NotAnEigenvalue : Error {
  using Error::Error;
};
struct DegenerateEigenspace : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct BadSampleCount : Error {
  using Error::Error;
};

// --- wavelet construction --------------------------------------------------
struct UnsupportedSpec : Error {
  using Error::Error;
};
struct ResolutionTooLow : Error {
  using Error::Error;
};

// --- time integration --------------------------------------------------------
struct MissingSeeds : Error {
  using Error::Error;
};
struct NewtonDivergence : Error {
  using Error::Error;
};
struct SingularIteration : Error {
  using Error::Error;
};

// --- stability ---------------------------------------------------------------
struct PoleOnCircle : Error {
  using Error::Error;
};
struct RootfindingFailure : Error {
  using Error::Error;
};

// --- discretization / benchmarks ---------------------------------------------
struct QuadratureNotConverged : Error {
  using Error::Error;
};
struct UnsupportedBc : Error {
  using Error::Error;
};
struct UnknownBenchmark : Error {
  using Error::Error;
};
struct SeriesNotConverged : Error {
  using Error::Error;
};
struct ModulusOutOfRange : Error {
  using Error::Error;
};

}  // namespace wtk
