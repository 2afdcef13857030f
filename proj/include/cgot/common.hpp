#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cgot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error categories map one-to-one onto CLI exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

class InfeasibleError : public Error {
  public:
    using Error::Error;
};

class NumericError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

}  // namespace cgot
