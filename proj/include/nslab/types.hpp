#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace nslab {

// Dense field containers. Scalar fields hold one value per cell, vector
// fields one row per cell with `dim` used columns. All math goes through
// Eigen; no other numeric dependency is used.
using Field = Eigen::ArrayXd;
using VecField = Eigen::ArrayXXd;            // cells x dim
using TensorField = Eigen::ArrayXXd;         // cells x (dim*dim), (a*dim+b) = d_a u_b
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad run configuration (extents, cell counts, parameter constraints).
struct ConfigError : Error {
  using Error::Error;
};

// Missing or inconsistent boundary/initial data.
struct DataError : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Linear solver failure or non-finite values.
struct NumericError : Error {
  using Error::Error;
};

// A discrete structural guarantee (positivity, envelope floor) was broken.
struct SchemeError : Error {
  using Error::Error;
};

// Boundary-lifting divergence audit failed.
struct ExtensionError : Error {
  using Error::Error;
};

// Operation requires a hypothesis (monotonicity, growth condition) the law
// does not satisfy.
struct HypothesisError : Error {
  using Error::Error;
};

// Test field or test pair outside its admissible class.
struct TestConfigError : Error {
  using Error::Error;
};

}  // namespace nslab
