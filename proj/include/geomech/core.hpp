// Common value types and error classes shared by every geomech module.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace geomech {

using Vec3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Vector field on a coordinate space: point -> tangent coordinates.
using VectorField = std::function<VecX(const VecX&)>;

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand sizes disagree with the declared dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input lies outside the operation's domain (singular value, bad parameter, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative solve did not converge within its iteration budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

inline bool all_finite(const VecX& v) { return v.allFinite(); }

}  // namespace geomech
