#pragma once

#include <stdexcept>
#include <string>

namespace perron {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonStationaryModel : Error {
  using Error::Error;
};

struct InvalidModel : Error {
  using Error::Error;
};

struct NegativeSDF : Error {
  using Error::Error;
};

struct ZeroWeight : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

struct NonPositiveIterate : Error {
  using Error::Error;
};

struct TooLarge : Error {
  using Error::Error;
};

struct ZeroBondPrice : Error {
  using Error::Error;
};

struct NonStochasticKernel : Error {
  using Error::Error;
};

struct UniquenessFailed : Error {
  using Error::Error;
};

struct PathOffGrid : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace perron
