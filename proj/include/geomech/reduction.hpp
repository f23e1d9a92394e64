// Euler-Poincare residuals, rigid body and heavy top reduced equations,
// reconstruction on SO(3), and reduced dynamics for Kepler and the
// spherical pendulum.
#pragma once

#include "geomech/core.hpp"
#include "geomech/momentum.hpp"
#include "geomech/so3.hpp"
#include "geomech/trajectory.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace geomech {

/// Values of a curve on a time grid.
struct SampledCurve {
    std::vector<double> t;
    std::vector<VecX> values;

    std::size_t size() const { return t.size(); }
};

/// Samples f(state) at every recorded time of a trajectory.
inline SampledCurve sample(const Trajectory& traj, const std::function<VecX(const VecX&)>& f) {
    SampledCurve c;
    c.t = traj.times();
    c.values.reserve(traj.size());
    for (const auto& z : traj.states()) c.values.push_back(f(z));
    return c;
}

namespace detail {

inline void check_grids(const SampledCurve& a, const SampledCurve& b, const char* what) {
    if (a.t.size() != a.values.size() || b.t.size() != b.values.size()) {
        throw DimensionError(std::string(what) + ": curve has mismatched times and values");
    }
    if (a.size() != b.size()) throw DimensionError(std::string(what) + ": curves have different sample counts");
    if (a.size() < 3) throw DomainError(std::string(what) + ": need at least 3 samples");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::abs(a.t[k] - b.t[k]) > 1e-12 * std::max(1.0, std::abs(a.t[k]))) {
            throw DomainError(std::string(what) + ": sample times differ");
        }
    }
}

inline VecX central_difference(const std::vector<VecX>& y, const std::vector<double>& t, std::size_t k) {
    return (y[k + 1] - y[k - 1]) / (t[k + 1] - t[k - 1]);
}

}  // namespace detail

/// max over interior samples of |dgamma/dt - phi(V)(gamma)|.
inline double compatibility_residual(const LieAlgebraAction& action, const SampledCurve& gamma, const SampledCurve& V) {
    detail::check_grids(gamma, V, "compatibility_residual");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < gamma.size(); ++k) {
        const VecX r = detail::central_difference(gamma.values, gamma.t, k) - action(V.values[k], gamma.values[k]);
        worst = std::max(worst, r.norm());
    }
    return worst;
}

/// Lagrangian data of a reduced variational problem on N with an algebra
/// action: the partial differentials of Lbar(x, V) = L(phi(V)(x)).
struct EPProblem {
    LieAlgebraAction action;
    std::function<VecX(const VecX& x, const VecX& V)> d1Lbar;  // covector on N
    std::function<VecX(const VecX& x, const VecX& V)> d2Lbar;  // element of g*

    /// Momentum of a covector c at x.
    VecX J(const VecX& x, const VecX& c) const { return lift_momentum(action, x, c); }
};

/// Per-component max over interior samples of
/// d/dt d2Lbar - ad*_V d2Lbar - J(d1Lbar).
inline VecX ep_residual_components(const EPProblem& prob, const SampledCurve& gamma, const SampledCurve& V) {
    detail::check_grids(gamma, V, "ep_residual");
    std::vector<VecX> m;
    m.reserve(gamma.size());
    for (std::size_t k = 0; k < gamma.size(); ++k) m.push_back(prob.d2Lbar(gamma.values[k], V.values[k]));
    VecX worst = VecX::Zero(m.front().size());
    for (std::size_t k = 1; k + 1 < gamma.size(); ++k) {
        const VecX& x = gamma.values[k];
        const VecX r = detail::central_difference(m, gamma.t, k) - prob.action.coadjoint(V.values[k], m[k]) -
                       prob.J(x, prob.d1Lbar(x, V.values[k]));
        worst = worst.cwiseMax(r.cwiseAbs());
    }
    return worst;
}

inline double ep_residual(const EPProblem& prob, const SampledCurve& gamma, const SampledCurve& V) {
    return ep_residual_components(prob, gamma, V).maxCoeff();
}

// ---------------------------------------------------------------------------
// Rigid body
// ---------------------------------------------------------------------------

/// Inertia (body frame), its inverse, the fixed point -> centre of mass
/// vector a (body frame) and the weight P (spatial frame).
struct RigidBodyParams {
    Matrix3 inertia;
    Matrix3 inertia_inv;
    Vec3 a_vec;
    Vec3 P_vec;

    RigidBodyParams(const Matrix3& I, const Vec3& a = Vec3::Zero(), const Vec3& P = Vec3::Zero())
        : inertia(I), a_vec(a), P_vec(P) {
        if ((I - I.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, I.cwiseAbs().maxCoeff())) {
            throw DomainError("RigidBodyParams: inertia is not symmetric");
        }
        const Eigen::SelfAdjointEigenSolver<Matrix3> eig(I);
        if (!(eig.eigenvalues().minCoeff() > 0.0)) throw DomainError("RigidBodyParams: inertia is not positive definite");
        inertia_inv = I.inverse();
        if ((I * inertia_inv - Matrix3::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
            throw DomainError("RigidBodyParams: inertia is too ill-conditioned to invert");
        }
    }

    static RigidBodyParams diagonal(const Vec3& moments, const Vec3& a = Vec3::Zero(), const Vec3& P = Vec3::Zero()) {
        return RigidBodyParams(moments.asDiagonal().toDenseMatrix(), a, P);
    }
};

struct HeavyTopRate {
    Vec3 dPi;
    Vec3 dP_S;
};

/// dPi/dt = Pi x X + a x P_S, dP_S/dt = -X x P_S, X = I# Pi.
inline HeavyTopRate heavy_top_rhs(const RigidBodyParams& params, const Vec3& Pi, const Vec3& P_S) {
    const Vec3 X = params.inertia_inv * Pi;
    return {Pi.cross(X) + params.a_vec.cross(P_S), -X.cross(P_S)};
}

/// x_{k+1} = x_k exp(dt Xbar_k), Xbar_k the mean of the neighbouring samples
/// (the midpoint value to second order).
inline std::vector<Matrix3> reconstruct(const Matrix3& x0, const std::vector<Vec3>& X, double dt) {
    if (so3::orthogonality_defect(x0) > 1e-9 || x0.determinant() < 0.0) {
        throw DomainError("reconstruct: x0 is not a rotation");
    }
    std::vector<Matrix3> out;
    out.reserve(X.size());
    if (X.empty()) return out;
    out.push_back(x0);
    for (std::size_t k = 0; k + 1 < X.size(); ++k) {
        const Vec3 mid = 0.5 * (X[k] + X[k + 1]);
        out.push_back(so3::keep_on_group(out.back() * so3::exp_so3(dt * mid)));
    }
    return out;
}

/// Reduced problem of the rigid body: N = Isom(S, E) as row-major 9-vectors,
/// right action of so(3), Lbar(x, X) = 1/2 <X, I X> + P . x(a).
inline EPProblem rigid_body_ep_problem(const RigidBodyParams& params) {
    const Matrix3 I = params.inertia;
    const Vec3 a = params.a_vec, P = params.P_vec;
    return {actions::body_rotations(), [P, a](const VecX&, const VecX&) { return actions::flatten(P * a.transpose()); },
            [I](const VecX&, const VecX& X) { return VecX(I * Vec3(X)); }};
}

// ---------------------------------------------------------------------------
// Spherical pendulum
// ---------------------------------------------------------------------------

/// Lbar(x, V) = m/2 |V x x|^2 + m g . x on the sphere, with the rotation action.
inline EPProblem pendulum_ep_problem(double m, const Vec3& g_vec) {
    return {actions::rotations(),
            [m, g_vec](const VecX& xv, const VecX& Vv) {
                const Vec3 x = xv, V = Vv;
                return VecX(m * (V.squaredNorm() * x - V.dot(x) * V) + m * g_vec);
            },
            [m](const VecX& xv, const VecX& Vv) {
                const Vec3 x = xv, V = Vv;
                return VecX(m * (x.squaredNorm() * V - x.dot(V) * x));
            }};
}

/// Angular velocity x x xdot / |x|^2 with xdot = p/m.
inline VecX pendulum_velocity(const VecX& z, double m) {
    const Vec3 x = z.head<3>(), v = Vec3(z.tail<3>()) / m;
    return VecX(x.cross(v) / x.squaredNorm());
}

/// Rotation-invariant observables (e_g . x, e_g . p).
inline std::pair<double, double> pendulum_reduced_observables(const Vec3& x, const Vec3& p, const Vec3& e_g) {
    if (std::abs(e_g.norm() - 1.0) > 1e-12) throw DomainError("pendulum_reduced_observables: e_g must be a unit vector");
    return {e_g.dot(x), e_g.dot(p)};
}

// ---------------------------------------------------------------------------
// Kepler
// ---------------------------------------------------------------------------

/// Lbar(x, (X, l)) = m/2 |X x x + l x|^2 + m k / |x| with the action of
/// rotations and dilations.
inline EPProblem kepler_ep_problem(double m, double k) {
    return {actions::rotations_and_dilations(),
            [m, k](const VecX& xv, const VecX& V) {
                const Vec3 x = xv, X = V.head<3>();
                const double l = V[3], r = x.norm();
                return VecX((m * (X.squaredNorm() + l * l) - m * k / (r * r * r)) * x - m * X.dot(x) * X);
            },
            [m](const VecX& xv, const VecX& V) {
                const Vec3 x = xv, X = V.head<3>();
                const double r2 = x.squaredNorm();
                VecX out(4);
                out.head<3>() = m * (r2 * X - X.dot(x) * x);
                out[3] = m * r2 * V[3];
                return out;
            }};
}

/// Algebra velocity in the gauge X . x = 0: X = x x xdot / r^2, l = x . xdot / r^2.
inline VecX kepler_velocity(const VecX& z, double m) {
    const Vec3 x = z.head<3>(), v = Vec3(z.tail<3>()) / m;
    const double r2 = x.squaredNorm();
    VecX out(4);
    out.head<3>() = x.cross(v) / r2;
    out[3] = x.dot(v) / r2;
    return out;
}

struct KeplerReduced {
    double r;
    double lambda;
    double Omega;
};

/// (|x|, x . p, |x x p|). Collinear x and p (Omega = 0) are rejected.
inline KeplerReduced kepler_reduce(const Vec3& x, const Vec3& p) {
    const double r = x.norm();
    if (r == 0.0) throw DomainError("kepler_reduce: x = 0");
    const double Omega = x.cross(p).norm();
    if (Omega <= 1e-14 * r * p.norm() || Omega == 0.0) {
        throw DomainError("kepler_reduce: x and p are collinear (Omega = 0 is singular)");
    }
    return {r, x.dot(p), Omega};
}

/// H_Omega(r, l) = (Omega^2 + l^2) / (2 m r^2) - m k / r
inline double reduced_kepler_hamiltonian(double m, double k, double Omega, double r, double lambda) {
    if (!(r > 0.0)) throw DomainError("reduced_kepler_hamiltonian: r must be positive");
    return (Omega * Omega + lambda * lambda) / (2.0 * m * r * r) - m * k / r;
}

/// dr/dt = r dH/dl, dl/dt = -r dH/dr for the reduced form (1/r) dl ^ dr.
inline Eigen::Vector2d reduced_kepler_rhs(double m, double k, double Omega, const Eigen::Vector2d& state) {
    const double r = state[0], lambda = state[1];
    if (!(r > 0.0)) throw DomainError("reduced_kepler_rhs: r must be positive");
    return {lambda / (m * r), (Omega * Omega + lambda * lambda) / (m * r * r) - m * k / r};
}

}  // namespace geomech
