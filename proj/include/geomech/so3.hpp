// Vector calculus on an oriented Euclidean 3-space and the identification
// so(3) ~ so(3)* ~ R^3 through the hat map.
#pragma once

#include "geomech/core.hpp"

#include <cmath>

namespace geomech::so3 {

inline constexpr double kUnhatTolerance = 1e-10;
inline constexpr double kSmallAngle = 1e-4;
inline constexpr double kOrthonormalDrift = 1e-9;

inline Vec3 cross(const Vec3& u, const Vec3& v) { return u.cross(v); }

/// Skew matrix of X: hat(X) v = X x v.
inline Matrix3 hat(const Vec3& X) {
    Matrix3 m;
    m << 0.0, -X.z(), X.y(),
         X.z(), 0.0, -X.x(),
         -X.y(), X.x(), 0.0;
    return m;
}

/// Inverse of hat. Rejects matrices that are not antisymmetric to 1e-10.
inline Vec3 unhat(const Matrix3& M) {
    const double asym = (M + M.transpose()).cwiseAbs().maxCoeff();
    if (asym > kUnhatTolerance) {
        throw DomainError("unhat: matrix is not antisymmetric (|M + M^T|_max = " +
                          std::to_string(asym) + ")");
    }
    return Vec3(0.5 * (M(2, 1) - M(1, 2)), 0.5 * (M(0, 2) - M(2, 0)), 0.5 * (M(1, 0) - M(0, 1)));
}

/// Mixed product u . (v x w).
inline double mixed(const Vec3& u, const Vec3& v, const Vec3& w) { return u.dot(v.cross(w)); }

/// Coadjoint action ad*_X xi = xi x X.
inline Vec3 coad(const Vec3& X, const Vec3& xi) { return xi.cross(X); }

/// Rotation exp(hat(X)) by the Rodrigues formula. Below |X| = 1e-4 the
/// coefficients switch to their Taylor series.
inline Matrix3 exp_so3(const Vec3& X) {
    const double theta2 = X.squaredNorm();
    const double theta = std::sqrt(theta2);
    double a;  // sin(t)/t
    double b;  // (1 - cos(t))/t^2
    if (theta < kSmallAngle) {
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    const Matrix3 K = hat(X);
    return Matrix3::Identity() + a * K + b * (K * K);
}

/// max |R^T R - I|.
inline double orthogonality_defect(const Matrix3& R) {
    return (R.transpose() * R - Matrix3::Identity()).cwiseAbs().maxCoeff();
}

/// One Newton step of the polar projection, R <- R (3I - R^T R) / 2.
inline Matrix3 orthonormalize_step(const Matrix3& R) {
    return 0.5 * R * (3.0 * Matrix3::Identity() - R.transpose() * R);
}

/// Re-orthonormalizes R only when its drift from SO(3) exceeds 1e-9.
inline Matrix3 keep_on_group(const Matrix3& R) {
    return orthogonality_defect(R) > kOrthonormalDrift ? orthonormalize_step(R) : R;
}

}  // namespace geomech::so3
