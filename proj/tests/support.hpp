// Shared test helpers: seeded sampling, random cubic polynomials with
// independently coded derivatives, log-log slopes and the Kepler reference
// orbit.
#pragma once

#include "geomech/integrators.hpp"
#include "geomech/poisson.hpp"
#include "geomech/reduction.hpp"
#include "geomech/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <vector>

namespace testsupport {

using geomech::Matrix3;
using geomech::MatX;
using geomech::SmoothFunction;
using geomech::Vec3;
using geomech::VecX;

class Sampler {
public:
    explicit Sampler(unsigned seed = 20240611u) : rng_(seed) {}

    double uniform(double a = -1.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng_); }

    VecX vec(int n, double a = -1.0, double b = 1.0) {
        VecX v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(a, b);
        return v;
    }

    Vec3 vec3(double a = -1.0, double b = 1.0) { return vec(3, a, b); }

    /// Uniform rotation from a normalized Gaussian quaternion.
    Matrix3 rotation() {
        std::normal_distribution<double> n(0.0, 1.0);
        Eigen::Quaterniond q(n(rng_), n(rng_), n(rng_), n(rng_));
        q.normalize();
        return q.toRotationMatrix();
    }

    /// Phase point (x, p) of T*(R^3 minus a ball of radius 0.5).
    VecX phase_point3() {
        VecX z(6);
        Vec3 x;
        do {
            x = vec3(-2.0, 2.0);
        } while (x.norm() < 0.5);
        z << x, vec3(-2.0, 2.0);
        return z;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// c0 + sum_i a_i x_i + sum_ij B_ij x_i x_j + sum_ijk C_ijk x_i x_j x_k with
/// random coefficients; gradient and Hessian coded directly from the
/// monomials.
inline SmoothFunction random_cubic(int n, Sampler& s) {
    const double c0 = s.uniform();
    const VecX a = s.vec(n);
    const MatX B = MatX::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) { return s.uniform(); });
    std::vector<double> C(static_cast<std::size_t>(n) * n * n);
    for (auto& c : C) c = s.uniform() / 3.0;
    auto Cat = [C, n](int i, int j, int k) { return C[(static_cast<std::size_t>(i) * n + j) * n + k]; };

    SmoothFunction f;
    f.value = [=](const VecX& x) {
        double v = c0 + a.dot(x) + x.dot(B * x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) v += Cat(i, j, k) * x[i] * x[j] * x[k];
        return v;
    };
    f.gradient = [=](const VecX& x) {
        VecX g = a + (B + B.transpose()) * x;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const double c = Cat(i, j, k);
                    g[i] += c * x[j] * x[k];
                    g[j] += c * x[i] * x[k];
                    g[k] += c * x[i] * x[j];
                }
        return g;
    };
    f.hessian_fn = [=](const VecX& x) {
        MatX H = B + B.transpose();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const double c = Cat(i, j, k);
                    H(i, j) += c * x[k];
                    H(j, i) += c * x[k];
                    H(i, k) += c * x[j];
                    H(k, i) += c * x[j];
                    H(j, k) += c * x[i];
                    H(k, j) += c * x[i];
                }
        return H;
    };
    return f;
}

/// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
    const std::size_t n = h.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(h[i]);
        my += std::log(err[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (std::log(h[i]) - mx) * (std::log(err[i]) - my);
        sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
    }
    return sxy / sxx;
}

/// Circular Kepler orbit m = k = 1, r = 1: x(t) = (cos t, sin t, 0), p = dx/dt.
inline VecX circular_kepler(double t) {
    VecX z(6);
    z << std::cos(t), std::sin(t), 0.0, -std::sin(t), std::cos(t), 0.0;
    return z;
}

/// Reference eccentric orbit used across the Kepler tests.
inline VecX eccentric_kepler0() {
    VecX z(6);
    z << 1.0, 0.0, 0.0, 0.0, 1.2, 0.0;
    return z;
}

/// Free or heavy rigid body integrated with `method`, the attitude
/// reconstructed from x0 = identity, and the EP curves (flattened attitude,
/// body angular velocity) sampled at every step.
struct RigidBodyRun {
    geomech::Trajectory traj;
    std::vector<Matrix3> attitude;
    geomech::SampledCurve gamma, V;
};

inline RigidBodyRun rigid_body_run(const geomech::RigidBodyParams& rb, const Vec3& Pi0, const Vec3& PS0, double dt,
                                   double t_end, geomech::Method method) {
    using namespace geomech;
    const VectorField f = [rb](const VecX& z) {
        const auto r = heavy_top_rhs(rb, z.head<3>(), z.tail<3>());
        VecX out(6);
        out << r.dPi, r.dP_S;
        return out;
    };
    VecX z0(6);
    z0 << Pi0, PS0;
    RigidBodyRun run;
    run.traj = integrate(f, z0, {method, dt, t_end});
    std::vector<Vec3> X;
    for (const auto& z : run.traj.states()) X.push_back(rb.inertia_inv * Vec3(z.head<3>()));
    run.attitude = reconstruct(Matrix3::Identity(), X, dt);
    run.gamma.t = run.V.t = run.traj.times();
    for (std::size_t k = 0; k < X.size(); ++k) {
        run.gamma.values.push_back(actions::flatten(run.attitude[k]));
        run.V.values.push_back(X[k]);
    }
    return run;
}

/// Distance of closest approach of the polyline (u, w)(t_k), k past the
/// first exit from the start's `leave` neighbourhood, to the start point.
inline double closest_return(const std::vector<double>& u, const std::vector<double>& w, double leave) {
    using V2 = Eigen::Vector2d;
    const V2 s(u.front(), w.front());
    std::size_t k = 0;
    while (k < u.size() && (V2(u[k], w[k]) - s).norm() < leave) ++k;
    double best = std::numeric_limits<double>::infinity();
    for (; k + 1 < u.size(); ++k) {
        const V2 a(u[k], w[k]), b(u[k + 1], w[k + 1]);
        const V2 d = b - a;
        const double len2 = d.squaredNorm();
        const double tau = len2 > 0.0 ? std::clamp((s - a).dot(d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (a + tau * d - s).norm());
    }
    return best;
}

/// 30-term power series of exp(M).
inline Matrix3 exp_series(const Matrix3& M) {
    Matrix3 sum = Matrix3::Identity(), term = Matrix3::Identity();
    for (int k = 1; k <= 30; ++k) {
        term = term * M / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

}  // namespace testsupport
