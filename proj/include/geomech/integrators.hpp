// Fixed-step integrators (RK4, Stormer-Verlet, RATTLE, implicit midpoint)
// and the trajectory driver.
#pragma once

#include "geomech/core.hpp"
#include "geomech/poisson.hpp"
#include "geomech/trajectory.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace geomech {

enum class Method { RK4, Verlet, Rattle, Midpoint };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::RK4: return "rk4";
        case Method::Verlet: return "verlet";
        case Method::Rattle: return "rattle";
        case Method::Midpoint: return "midpoint";
    }
    return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
    if (s == "rk4") return Method::RK4;
    if (s == "verlet") return Method::Verlet;
    if (s == "rattle") return Method::Rattle;
    if (s == "midpoint") return Method::Midpoint;
    return std::nullopt;
}

struct IntegratorConfig {
    Method method = Method::RK4;
    double dt = 1e-3;
    double t_end = 1.0;
    int record_stride = 1;
    double solver_tol = 1e-12;
    int solver_max_iter = 50;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrator: dt must be positive");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("integrator: t_end must be positive");
        if (dt > t_end * (1.0 + 1e-12)) throw DomainError("integrator: dt must not exceed t_end");
        if (record_stride < 1) throw DomainError("integrator: record_stride must be >= 1");
        if (!(solver_tol > 0.0)) throw DomainError("integrator: solver_tol must be positive");
        if (solver_max_iter < 2) throw DomainError("integrator: solver_max_iter must be >= 2");
    }

    /// Number of fixed steps; t_end is rounded down to a whole number of steps.
    long long steps() const { return static_cast<long long>(std::floor(t_end / dt + 1e-9)); }
};

/// A stage or step produced non-finite coordinates.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Step failure raised by integrate(), carrying the failure time and the
/// samples recorded before it.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time, Trajectory partial)
        : Error(what + " at t = " + std::to_string(time)), time_(time), partial_(std::move(partial)) {}

    double time() const { return time_; }
    const Trajectory& partial() const { return partial_; }

private:
    double time_;
    Trajectory partial_;
};

// ---------------------------------------------------------------------------
// Single steps
// ---------------------------------------------------------------------------

inline VecX rk4_step(const VectorField& f, const VecX& x, double dt) {
    auto checked = [](VecX v) {
        if (!v.allFinite()) throw NonFiniteError("rk4: non-finite stage value");
        return v;
    };
    const VecX k1 = checked(f(x));
    const VecX k2 = checked(f(x + 0.5 * dt * k1));
    const VecX k3 = checked(f(x + 0.5 * dt * k2));
    const VecX k4 = checked(f(x + dt * k3));
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// H = |p|^2 / 2m + V(q).
struct SeparableHamiltonian {
    double mass;
    std::function<VecX(const VecX&)> grad_potential;
};

/// Scalar holonomic constraint g(q) = 0 with its gradient.
struct HolonomicConstraint {
    std::function<double(const VecX&)> value;
    std::function<VecX(const VecX&)> gradient;
};

struct PhasePoint {
    VecX q;
    VecX p;
};

/// Kick-drift-kick Stormer-Verlet.
inline PhasePoint verlet_step(const std::function<VecX(const VecX&)>& grad_potential, double mass, const PhasePoint& s,
                              double dt) {
    const VecX p_half = s.p - 0.5 * dt * grad_potential(s.q);
    const VecX q1 = s.q + (dt / mass) * p_half;
    const VecX p1 = p_half - 0.5 * dt * grad_potential(q1);
    return {q1, p1};
}

/// RATTLE for one scalar constraint. The position multiplier is found by
/// scalar Newton on g(q1) = 0; the velocity multiplier enforcing
/// grad g(q1) . p1 = 0 is linear and solved in closed form.
inline PhasePoint rattle_step(const std::function<VecX(const VecX&)>& grad_potential, double mass,
                              const HolonomicConstraint& constraint, const PhasePoint& s, double dt, double tol = 1e-12,
                              int max_iter = 50) {
    const VecX G0 = constraint.gradient(s.q);
    const VecX p_free = s.p - 0.5 * dt * grad_potential(s.q);
    const double c = dt * dt / (2.0 * mass);
    const VecX q_free = s.q + (dt / mass) * p_free;

    double lambda = 0.0;
    VecX q1 = q_free;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        const double g = constraint.value(q1);
        if (!std::isfinite(g)) throw NonFiniteError("rattle: non-finite constraint value");
        if (std::abs(g) <= tol) {
            converged = true;
            break;
        }
        const double dg = -c * constraint.gradient(q1).dot(G0);
        if (dg == 0.0) throw ConvergenceError("rattle: singular constraint Jacobian");
        lambda -= g / dg;
        q1 = q_free - c * lambda * G0;
    }
    if (!converged) throw ConvergenceError("rattle: position multiplier did not converge (dt too large?)");

    const VecX p_half = p_free - 0.5 * dt * lambda * G0;
    const VecX G1 = constraint.gradient(q1);
    const VecX p_kick = p_half - 0.5 * dt * grad_potential(q1);
    const double mu = G1.dot(p_kick) / (0.5 * dt * G1.squaredNorm());
    const VecX p1 = p_kick - 0.5 * dt * mu * G1;
    return {q1, p1};
}

/// Implicit midpoint x1 = x + dt f((x + x1)/2). Fixed-point iteration first;
/// if it has not converged after max_iter/2 sweeps, Newton with a
/// finite-difference Jacobian takes over for the remaining budget.
inline VecX midpoint_step(const VectorField& f, const VecX& x, double dt, double tol = 1e-12, int max_iter = 50) {
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    VecX x1 = x + dt * f(x);
    const int fixed_point_budget = max_iter / 2;
    for (int it = 0; it < fixed_point_budget; ++it) {
        const VecX next = x + dt * f(0.5 * (x + x1));
        if (!next.allFinite()) throw NonFiniteError("midpoint: non-finite iterate");
        const double change = (next - x1).cwiseAbs().maxCoeff();
        x1 = next;
        if (change <= tol * scale) return x + dt * f(0.5 * (x + x1));
    }
    const Eigen::Index n = x.size();
    auto residual = [&](const VecX& y) { return VecX(y - x - dt * f(0.5 * (x + y))); };
    const VecX predictor = x + dt * f(x);
    if (!(residual(x1).norm() < residual(predictor).norm())) x1 = predictor;
    for (int it = fixed_point_budget; it < max_iter; ++it) {
        const VecX r = residual(x1);
        if (!r.allFinite()) throw NonFiniteError("midpoint: non-finite residual");
        if (r.cwiseAbs().maxCoeff() <= tol * scale) return x1;
        MatX Jac(n, n);
        const double h = 1e-7 * std::max(scale, x1.cwiseAbs().maxCoeff());
        for (Eigen::Index k = 0; k < n; ++k) {
            VecX yp = x1, ym = x1;
            yp[k] += h;
            ym[k] -= h;
            Jac.col(k) = (residual(yp) - residual(ym)) / (2.0 * h);
        }
        x1 -= Jac.partialPivLu().solve(r);
    }
    throw ConvergenceError("midpoint: implicit solve did not converge (dt too large?)");
}

/// Implicit midpoint for the Lie-Poisson flow of H on g*.
inline VecX midpoint_lie_poisson_step(const LieAlgebra& alg, const SmoothFunction& H, const VecX& mu, double dt,
                                      double tol = 1e-12, int max_iter = 50) {
    require_dim(mu.size(), alg.dim(), "midpoint_lie_poisson_step");
    const auto P = PoissonStructure::lie_poisson(alg);
    return midpoint_step(ham_vector_field(P, H), mu, dt, tol, max_iter);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

/// What a system offers to the integrators: its vector field, plus the
/// separable form and constraint used by the symplectic schemes.
struct Dynamics {
    VectorField vector_field;
    std::optional<SeparableHamiltonian> separable;
    std::optional<HolonomicConstraint> constraint;
};

inline void check_method_supported(const Dynamics& dyn, Method method) {
    switch (method) {
        case Method::RK4:
        case Method::Midpoint:
            if (!dyn.vector_field) throw DomainError("integrate: system has no vector field");
            break;
        case Method::Verlet:
            if (!dyn.separable) throw DomainError("integrate: verlet needs a separable cotangent Hamiltonian");
            if (dyn.constraint) throw DomainError("integrate: verlet ignores constraints; use rattle");
            break;
        case Method::Rattle:
            if (!dyn.separable || !dyn.constraint) {
                throw DomainError("integrate: rattle needs a separable Hamiltonian with a holonomic constraint");
            }
            break;
    }
}

/// Advances x0 with the configured method, recording every record_stride
/// steps (and always the final state).
inline Trajectory integrate(const Dynamics& dyn, const VecX& x0, const IntegratorConfig& config,
                            const std::vector<Observable>& observables = {}) {
    config.validate();
    check_method_supported(dyn, config.method);
    if ((config.method == Method::Verlet || config.method == Method::Rattle) && x0.size() % 2 != 0) {
        throw DimensionError("integrate: cotangent state must have even dimension");
    }
    const Eigen::Index n = x0.size() / 2;

    auto step = [&](const VecX& x) -> VecX {
        switch (config.method) {
            case Method::RK4: return rk4_step(dyn.vector_field, x, config.dt);
            case Method::Midpoint:
                return midpoint_step(dyn.vector_field, x, config.dt, config.solver_tol, config.solver_max_iter);
            case Method::Verlet: {
                const auto s = verlet_step(dyn.separable->grad_potential, dyn.separable->mass, {x.head(n), x.tail(n)},
                                           config.dt);
                VecX out(x.size());
                out << s.q, s.p;
                return out;
            }
            case Method::Rattle: {
                const auto s = rattle_step(dyn.separable->grad_potential, dyn.separable->mass, *dyn.constraint,
                                           {x.head(n), x.tail(n)}, config.dt, config.solver_tol, config.solver_max_iter);
                VecX out(x.size());
                out << s.q, s.p;
                return out;
            }
        }
        return x;
    };

    Trajectory traj(observables);
    traj.record(0.0, x0);
    const long long steps = config.steps();
    VecX x = x0;
    for (long long k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;
        try {
            x = step(x);
        } catch (const Error& e) {
            throw IntegrationError(e.what(), t, std::move(traj));
        }
        if (!x.allFinite()) throw IntegrationError("non-finite state", t, std::move(traj));
        if (k % config.record_stride == 0 || k == steps) traj.record(t, x);
    }
    return traj;
}

inline Trajectory integrate(const VectorField& f, const VecX& x0, const IntegratorConfig& config,
                            const std::vector<Observable>& observables = {}) {
    return integrate(Dynamics{f, std::nullopt, std::nullopt}, x0, config, observables);
}

}  // namespace geomech
