// Built-in Hamiltonian systems (spherical pendulum, free rigid body, heavy
// top, Kepler) and their diagnostics.
#pragma once

#include "geomech/core.hpp"
#include "geomech/integrators.hpp"
#include "geomech/momentum.hpp"
#include "geomech/poisson.hpp"
#include "geomech/reduction.hpp"
#include "geomech/so3.hpp"
#include "geomech/trajectory.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace geomech {

using ParamMap = std::map<std::string, std::vector<double>>;

/// Vector-valued conserved quantity monitored by name.
struct Invariant {
    std::string name;
    std::function<VecX(const VecX&)> eval;
};

struct Symmetry {
    std::string name;
    LieAlgebraAction action;
    std::function<VecX(const VecX&)> momentum;
    std::vector<int> invariant_components;
};

class HamiltonianSystem {
public:
    HamiltonianSystem(std::string name, int phase_dim, SmoothFunction hamiltonian, PoissonStructure poisson)
        : name(std::move(name)), phase_dim(phase_dim), hamiltonian(std::move(hamiltonian)), poisson(std::move(poisson)) {}

    std::string name;
    int phase_dim;
    std::vector<std::string> state_names;
    SmoothFunction hamiltonian;
    PoissonStructure poisson;
    std::optional<SeparableHamiltonian> separable;
    std::optional<HolonomicConstraint> constraint;
    std::function<double(const VecX&)> hidden_constraint;  // d/dt g along motions, empty when unconstrained
    std::vector<Symmetry> symmetries;
    VectorField vector_field;
    std::vector<Observable> observables;
    std::vector<Invariant> invariants;

    Dynamics dynamics() const { return {vector_field, separable, constraint}; }

    const Observable* find_observable(const std::string& n) const {
        for (const auto& o : observables)
            if (o.name == n) return &o;
        return nullptr;
    }

    const Invariant* find_invariant(const std::string& n) const {
        for (const auto& i : invariants)
            if (i.name == n) return &i;
        return nullptr;
    }

    /// max(|g|, |hidden g|) at z; 0 for unconstrained systems.
    double constraint_violation(const VecX& z) const {
        if (!constraint) return 0.0;
        const int n = phase_dim / 2;
        double v = std::abs(constraint->value(z.head(n)));
        if (hidden_constraint) v = std::max(v, std::abs(hidden_constraint(z)));
        return v;
    }
};

// ---------------------------------------------------------------------------
// Closed-form quantities
// ---------------------------------------------------------------------------

/// J1 = e_g . (x x p), the momentum of rotations about the vertical.
inline double pendulum_j1(const Vec3& x, const Vec3& p, const Vec3& e_g) { return e_g.dot(x.cross(p)); }

/// eps = (|p|^2/(m^2 k) - 1/|x|) x - ((p . x)/(m^2 k)) p
inline Vec3 eccentricity_vector(const Vec3& x, const Vec3& p, double m, double k) {
    const double r = x.norm();
    if (r == 0.0) throw DomainError("eccentricity_vector: x = 0");
    const double s = m * m * k;
    return (p.squaredNorm() / s - 1.0 / r) * x - (p.dot(x) / s) * p;
}

/// Same vector as -x/|x| + p x (x x p) / (m^2 k).
inline Vec3 eccentricity_vector_cross(const Vec3& x, const Vec3& p, double m, double k) {
    const double r = x.norm();
    if (r == 0.0) throw DomainError("eccentricity_vector: x = 0");
    return -x / r + p.cross(x.cross(p)) / (m * m * k);
}

inline double kepler_hamiltonian(const Vec3& x, const Vec3& p, double m, double k) {
    return p.squaredNorm() / (2.0 * m) - m * k / x.norm();
}

inline Vec3 body_spatial(const Matrix3& x, const Vec3& body_vec) { return x * body_vec; }

/// 1/2 <Omega_S, I Omega_S>
inline double kinetic_energy(const RigidBodyParams& params, const Vec3& Omega_S) {
    return 0.5 * Omega_S.dot(params.inertia * Omega_S);
}

inline Vec3 body_momentum(const RigidBodyParams& params, const Vec3& Omega_S) { return params.inertia * Omega_S; }

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace detail {

class ParamReader {
public:
    ParamReader(const ParamMap& p, std::string system) : p_(p), system_(std::move(system)) {}

    double scalar(const std::string& key, double fallback) {
        used_.insert(key);
        auto it = p_.find(key);
        if (it == p_.end()) return fallback;
        if (it->second.size() != 1) throw DomainError(system_ + ": parameter '" + key + "' must be a scalar");
        return it->second[0];
    }

    double positive(const std::string& key, double fallback) {
        const double v = scalar(key, fallback);
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(system_ + ": parameter '" + key + "' must be positive");
        return v;
    }

    Vec3 vec3(const std::string& key, const Vec3& fallback) {
        used_.insert(key);
        auto it = p_.find(key);
        if (it == p_.end()) return fallback;
        if (it->second.size() != 3) throw DomainError(system_ + ": parameter '" + key + "' must have 3 entries");
        return Vec3(it->second[0], it->second[1], it->second[2]);
    }

    /// 3 entries (principal moments) or 9 (row-major matrix).
    Matrix3 inertia(const std::string& key, const Vec3& fallback) {
        used_.insert(key);
        auto it = p_.find(key);
        if (it == p_.end()) return fallback.asDiagonal().toDenseMatrix();
        const auto& v = it->second;
        if (v.size() == 3) return Vec3(v[0], v[1], v[2]).asDiagonal().toDenseMatrix();
        if (v.size() == 9) return actions::unflatten(Eigen::Map<const VecX>(v.data(), 9));
        throw DomainError(system_ + ": parameter '" + key + "' must have 3 or 9 entries");
    }

    void reject_unknown() const {
        for (const auto& [k, v] : p_)
            if (!used_.count(k)) throw DomainError(system_ + ": unknown parameter '" + k + "'");
    }

private:
    const ParamMap& p_;
    std::string system_;
    std::set<std::string> used_;
};

inline std::vector<Observable> scalar_components(const Invariant& inv, const std::vector<std::string>& names) {
    std::vector<Observable> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto f = inv.eval;
        out.push_back({names[i], [f, i](const VecX& z) { return f(z)[static_cast<Eigen::Index>(i)]; }});
    }
    return out;
}

inline VecX scalar_vec(double v) { return VecX::Constant(1, v); }

}  // namespace detail

inline HamiltonianSystem build_kepler(const ParamMap& params) {
    detail::ParamReader rd(params, "kepler");
    const double m = rd.positive("m", 1.0), k = rd.positive("k", 1.0);
    rd.reject_unknown();

    SmoothFunction H;
    H.value = [m, k](const VecX& z) { return kepler_hamiltonian(z.head<3>(), z.tail<3>(), m, k); };
    H.gradient = [m, k](const VecX& z) {
        const Vec3 x = z.head<3>();
        const double r = x.norm();
        VecX g(6);
        g.head<3>() = m * k * x / (r * r * r);
        g.tail<3>() = z.tail<3>() / m;
        return g;
    };

    HamiltonianSystem sys("kepler", 6, H, PoissonStructure::canonical(3));
    sys.state_names = {"x1", "x2", "x3", "p1", "p2", "p3"};
    sys.separable = SeparableHamiltonian{m, [m, k](const VecX& x) {
                                             const double r = x.norm();
                                             return VecX(m * k * x / (r * r * r));
                                         }};
    sys.vector_field = [m, k](const VecX& z) {
        const Vec3 x = z.head<3>();
        const double r = x.norm();
        VecX f(6);
        f.head<3>() = z.tail<3>() / m;
        f.tail<3>() = -m * k * x / (r * r * r);
        return f;
    };
    const auto rot = actions::rotations();
    sys.symmetries.push_back({"rotations", rot, [rot](const VecX& z) { return lift_momentum(rot, z.head(3), z.tail(3)); },
                              {0, 1, 2}});

    const Invariant energy{"energy", [H](const VecX& z) { return detail::scalar_vec(H(z)); }};
    const Invariant L{"angular_momentum", [](const VecX& z) { return VecX(Vec3(z.head<3>()).cross(Vec3(z.tail<3>()))); }};
    const Invariant eps{"eccentricity_vector",
                        [m, k](const VecX& z) { return VecX(eccentricity_vector(z.head<3>(), z.tail<3>(), m, k)); }};
    sys.invariants = {energy, L, eps};
    sys.observables.push_back({"energy", H.value});
    for (auto& o : detail::scalar_components(L, {"L1", "L2", "L3"})) sys.observables.push_back(o);
    for (auto& o : detail::scalar_components(eps, {"eps1", "eps2", "eps3"})) sys.observables.push_back(o);
    sys.observables.push_back({"r", [](const VecX& z) { return z.head<3>().norm(); }});
    sys.observables.push_back({"lambda", [](const VecX& z) { return z.head<3>().dot(z.tail<3>()); }});
    return sys;
}

inline HamiltonianSystem build_spherical_pendulum(const ParamMap& params) {
    detail::ParamReader rd(params, "spherical_pendulum");
    const double m = rd.positive("m", 1.0), R = rd.positive("R", 1.0), g = rd.positive("g", 1.0);
    Vec3 e_g = rd.vec3("e_g", Vec3(0.0, 0.0, -1.0));
    rd.reject_unknown();
    if (std::abs(e_g.norm() - 1.0) > 1e-12) throw DomainError("spherical_pendulum: parameter 'e_g' must be a unit vector");
    const Vec3 gv = g * e_g;

    SmoothFunction H;
    H.value = [m, gv](const VecX& z) { return z.tail<3>().squaredNorm() / (2.0 * m) - m * gv.dot(Vec3(z.head<3>())); };
    H.gradient = [m, gv](const VecX& z) {
        VecX d(6);
        d.head<3>() = -m * gv;
        d.tail<3>() = z.tail<3>() / m;
        return d;
    };

    HamiltonianSystem sys("spherical_pendulum", 6, H, PoissonStructure::canonical(3));
    sys.state_names = {"x1", "x2", "x3", "p1", "p2", "p3"};
    sys.separable = SeparableHamiltonian{m, [m, gv](const VecX&) { return VecX(-m * gv); }};
    sys.constraint = HolonomicConstraint{[R](const VecX& x) { return x.squaredNorm() - R * R; },
                                         [](const VecX& x) { return VecX(2.0 * x); }};
    sys.hidden_constraint = [](const VecX& z) { return z.head<3>().dot(z.tail<3>()); };
    sys.vector_field = [m, gv](const VecX& z) {
        const Vec3 x = z.head<3>(), p = z.tail<3>();
        VecX f(6);
        f.head<3>() = p / m;
        f.tail<3>() = m * gv - x * (p.squaredNorm() / m + m * gv.dot(x)) / x.squaredNorm();
        return f;
    };

    LieAlgebraAction vertical{algebras::abelian(1), 3, ActionSide::Left,
                              [e_g](const VecX& X, const VecX& x) { return VecX(X[0] * e_g.cross(Vec3(x))); },
                              [e_g](const VecX& X, const VecX&) { return MatX(X[0] * so3::hat(e_g)); }};
    sys.symmetries.push_back({"vertical_rotations", vertical,
                              [e_g](const VecX& z) { return detail::scalar_vec(pendulum_j1(z.head<3>(), z.tail<3>(), e_g)); },
                              {0}});

    auto j1 = [e_g](const VecX& z) { return pendulum_j1(z.head<3>(), z.tail<3>(), e_g); };
    auto cons = [R](const VecX& z) { return z.head<3>().squaredNorm() - R * R; };
    auto hidden = sys.hidden_constraint;
    sys.invariants = {{"energy", [H](const VecX& z) { return detail::scalar_vec(H(z)); }},
                      {"j1", [j1](const VecX& z) { return detail::scalar_vec(j1(z)); }},
                      {"constraint", [cons](const VecX& z) { return detail::scalar_vec(cons(z)); }},
                      {"hidden_constraint", [hidden](const VecX& z) { return detail::scalar_vec(hidden(z)); }}};
    sys.observables = {{"energy", H.value},
                       {"j1", j1},
                       {"constraint", cons},
                       {"hidden_constraint", hidden},
                       {"u", [e_g](const VecX& z) { return e_g.dot(Vec3(z.head<3>())); }},
                       {"w", [e_g](const VecX& z) { return e_g.dot(Vec3(z.tail<3>())); }}};
    return sys;
}

/// State (Pi, P_S) on se(3)*; the dynamics are the heavy-top equations, which
/// coincide with the Lie-Poisson flow of H = 1/2 <Pi, I# Pi> - P_S . a.
inline HamiltonianSystem build_rigid_body(const std::string& name, const RigidBodyParams& rb) {
    SmoothFunction H;
    H.value = [rb](const VecX& z) {
        const Vec3 Pi = z.head<3>();
        return 0.5 * Pi.dot(rb.inertia_inv * Pi) - Vec3(z.tail<3>()).dot(rb.a_vec);
    };
    H.gradient = [rb](const VecX& z) {
        VecX g(6);
        g.head<3>() = rb.inertia_inv * Vec3(z.head<3>());
        g.tail<3>() = -rb.a_vec;
        return g;
    };

    HamiltonianSystem sys(name, 6, H, PoissonStructure::lie_poisson(algebras::se3()));
    sys.state_names = {"Pi1", "Pi2", "Pi3", "PS1", "PS2", "PS3"};
    sys.vector_field = [rb](const VecX& z) {
        const auto r = heavy_top_rhs(rb, z.head<3>(), z.tail<3>());
        VecX f(6);
        f << r.dPi, r.dP_S;
        return f;
    };

    auto ps2 = [](const VecX& z) { return z.tail<3>().squaredNorm(); };
    auto cross = [](const VecX& z) { return z.head<3>().dot(z.tail<3>()); };
    auto pi2 = [](const VecX& z) { return z.head<3>().squaredNorm(); };
    sys.invariants = {{"energy", [H](const VecX& z) { return detail::scalar_vec(H(z)); }},
                      {"ps_norm2", [ps2](const VecX& z) { return detail::scalar_vec(ps2(z)); }},
                      {"pi_dot_ps", [cross](const VecX& z) { return detail::scalar_vec(cross(z)); }}};
    sys.observables = {{"energy", H.value}, {"ps_norm2", ps2}, {"pi_dot_ps", cross}, {"pi_norm2", pi2}};
    if (rb.a_vec.squaredNorm() == 0.0) {
        sys.invariants.push_back({"pi_norm2", [pi2](const VecX& z) { return detail::scalar_vec(pi2(z)); }});
    }
    // Axisymmetric body with a on the symmetry axis: the axial body momentum is conserved.
    const Matrix3& I = rb.inertia;
    const bool diagonal = (I - Matrix3(I.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    if (diagonal && I(0, 0) == I(1, 1) && rb.a_vec.x() == 0.0 && rb.a_vec.y() == 0.0) {
        auto axial = [](const VecX& z) { return z[2]; };
        sys.observables.push_back({"axial_momentum", axial});
        sys.invariants.push_back({"axial_momentum", [axial](const VecX& z) { return detail::scalar_vec(axial(z)); }});
    }
    return sys;
}

inline HamiltonianSystem build_system(const std::string& name, const ParamMap& params = {}) {
    if (name == "kepler") return build_kepler(params);
    if (name == "spherical_pendulum") return build_spherical_pendulum(params);
    if (name == "free_rigid_body" || name == "heavy_top") {
        detail::ParamReader rd(params, name);
        const Matrix3 I = rd.inertia("inertia", Vec3(1.0, 2.0, 3.0));
        Vec3 a = Vec3::Zero(), P = Vec3::Zero();
        if (name == "heavy_top") {
            a = rd.vec3("a_vec", Vec3(0.0, 0.0, 0.1));
            P = rd.vec3("P_vec", Vec3(0.0, 0.0, -1.0));
        }
        rd.reject_unknown();
        return build_rigid_body(name, RigidBodyParams(I, a, P));
    }
    throw DomainError("unknown system '" + name + "'");
}

struct SystemInfo {
    std::string name;
    std::string description;
};

inline std::vector<SystemInfo> list_systems() {
    return {{"spherical_pendulum", "point mass on a sphere |x| = R under gravity g e_g; params m, R, g, e_g"},
            {"free_rigid_body", "torque-free rigid body, state (Pi, P_S); params inertia"},
            {"heavy_top", "rigid body about a fixed point under gravity, state (Pi, P_S); params inertia, a_vec, P_vec"},
            {"kepler", "H = |p|^2/2m - m k/|x|; params m, k"}};
}

// ---------------------------------------------------------------------------
// Kepler diagnostics
// ---------------------------------------------------------------------------

/// Orthonormal frame (e1, e2, n) of the orbital plane of x0 x p0, e1 along x0.
struct OrbitalPlane {
    Vec3 e1, e2, n;

    static OrbitalPlane of(const Vec3& x0, const Vec3& p0) {
        const Vec3 L = x0.cross(p0);
        if (L.norm() == 0.0) throw DomainError("orbital plane: x and p are collinear");
        OrbitalPlane pl;
        pl.n = L.normalized();
        pl.e1 = (x0 - x0.dot(pl.n) * pl.n).normalized();
        pl.e2 = pl.n.cross(pl.e1);
        return pl;
    }

    Eigen::Vector2d project(const Vec3& v) const { return {v.dot(e1), v.dot(e2)}; }
};

struct CircleFit {
    Eigen::Vector2d center;
    double radius;
    double max_residual;  // max | |q - c| - radius |
};

/// Algebraic (Kasa) least-squares circle through planar points.
inline CircleFit fit_circle(const std::vector<Eigen::Vector2d>& pts) {
    if (pts.size() < 3) throw DomainError("fit_circle: need at least 3 points");
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& q : pts) mean += q;
    mean /= static_cast<double>(pts.size());
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    MatX A(n, 3);
    VecX b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d q = pts[static_cast<std::size_t>(i)] - mean;
        A(i, 0) = q.x();
        A(i, 1) = q.y();
        A(i, 2) = 1.0;
        b[i] = -q.squaredNorm();
    }
    const VecX s = A.colPivHouseholderQr().solve(b);
    const Eigen::Vector2d c(-0.5 * s[0], -0.5 * s[1]);
    const double r2 = c.squaredNorm() - s[2];
    if (!(r2 > 0.0)) throw DomainError("fit_circle: degenerate point set");
    CircleFit fit{c + mean, std::sqrt(r2), 0.0};
    for (const auto& q : pts) fit.max_residual = std::max(fit.max_residual, std::abs((q - fit.center).norm() - fit.radius));
    return fit;
}

struct ConicFit {
    double semi_latus;
    double eps;
    double max_rel_residual;  // max |r - r_fit| / r
};

/// Least squares for 1/r = A + B cos(theta) + C sin(theta) in the orbital
/// plane; semi_latus = 1/A, eps = sqrt(B^2 + C^2)/A.
inline ConicFit fit_orbit_conic(const Trajectory& traj) {
    if (traj.size() < 3) throw DomainError("fit_orbit_conic: need at least 3 samples");
    const auto& z0 = traj.states().front();
    const OrbitalPlane pl = OrbitalPlane::of(z0.head<3>(), z0.tail<3>());
    const Eigen::Index n = static_cast<Eigen::Index>(traj.size());
    MatX A(n, 3);
    VecX b(n);
    std::vector<double> r(traj.size()), th(traj.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d q = pl.project(traj.states()[static_cast<std::size_t>(i)].head<3>());
        r[i] = q.norm();
        th[i] = std::atan2(q.y(), q.x());
        A(i, 0) = 1.0;
        A(i, 1) = std::cos(th[i]);
        A(i, 2) = std::sin(th[i]);
        b[i] = 1.0 / r[i];
    }
    const VecX s = A.colPivHouseholderQr().solve(b);
    ConicFit fit{1.0 / s[0], std::hypot(s[1], s[2]) / s[0], 0.0};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rf = 1.0 / (s[0] + s[1] * std::cos(th[i]) + s[2] * std::sin(th[i]));
        fit.max_rel_residual = std::max(fit.max_rel_residual, std::abs(r[i] - rf) / r[i]);
    }
    return fit;
}

/// m r^2 dtheta/dt per sample; with dx/dt = p/m this is n . (x x p), n the
/// initial orbit normal.
inline std::vector<double> areal_velocity_series(const Trajectory& traj, [[maybe_unused]] double m) {
    if (traj.empty()) throw DomainError("areal_velocity_series: empty trajectory");
    const auto& z0 = traj.states().front();
    const Vec3 L0 = Vec3(z0.head<3>()).cross(Vec3(z0.tail<3>()));
    const double Omega = L0.norm();
    if (Omega == 0.0) throw DomainError("areal_velocity_series: Omega = 0 (radial motion)");
    const Vec3 n = L0 / Omega;
    std::vector<double> out;
    out.reserve(traj.size());
    for (const auto& z : traj.states()) {
        const Vec3 L = Vec3(z.head<3>()).cross(Vec3(z.tail<3>()));
        const double along = L.dot(n);
        if ((L - along * n).norm() > 1e-8 * Omega) throw DomainError("areal_velocity_series: trajectory is not planar");
        out.push_back(along);
    }
    return out;
}

struct KeplerDiagnostics {
    double Omega = 0.0;
    double H = 0.0;
    Vec3 eps_vec = Vec3::Zero();
    double eps = 0.0;
    double semi_latus = 0.0;
    std::optional<double> a_semi;
    std::optional<double> period;
    Vec3 hodograph_center = Vec3::Zero();
    double hodograph_radius = 0.0;
    double hodograph_fit_residual = 0.0;
    double out_of_plane = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    int perihelion_passages = 0;
};

/// Below this eccentricity the orbit is treated as a circle for period timing.
inline constexpr double kCircularEps = 1e-6;

namespace detail {

/// Extremum of the parabola through (t-h, a), (t, b), (t+h, c).
inline std::pair<double, double> parabolic_vertex(double t, double h, double a, double b, double c) {
    const double den = a - 2.0 * b + c;
    if (den == 0.0) return {t, b};
    const double s = 0.5 * (a - c) / den;
    return {t + s * h, b - 0.25 * (a - c) * s};
}

}  // namespace detail

/// Orbital elements at t = 0 and measured quantities along the trajectory.
/// With `elliptic` the period, semi-major axis and extremal radii are
/// required: H < 0 and at least three perihelion passages.
inline KeplerDiagnostics kepler_diagnostics(const Trajectory& traj, double m, double k, bool elliptic = true) {
    if (traj.size() < 3) throw DomainError("kepler_diagnostics: need at least 3 samples");
    const auto& states = traj.states();
    const auto& t = traj.times();
    const Vec3 x0 = states.front().head<3>(), p0 = states.front().tail<3>();

    KeplerDiagnostics d;
    d.Omega = x0.cross(p0).norm();
    d.H = kepler_hamiltonian(x0, p0, m, k);
    d.eps_vec = eccentricity_vector(x0, p0, m, k);
    d.eps = d.eps_vec.norm();
    d.semi_latus = d.Omega * d.Omega / (m * m * k);
    if (elliptic && !(d.H < 0.0)) {
        throw DomainError("kepler_diagnostics: initial data is not elliptic (H >= 0); period and axis are undefined");
    }

    const OrbitalPlane pl = OrbitalPlane::of(x0, p0);
    std::vector<Eigen::Vector2d> hod;
    hod.reserve(states.size());
    std::vector<double> r(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Vec3 x = states[i].head<3>(), p = states[i].tail<3>();
        d.out_of_plane = std::max({d.out_of_plane, std::abs(x.dot(pl.n)), std::abs(p.dot(pl.n))});
        hod.push_back(pl.project(p));
        r[i] = x.norm();
    }
    const CircleFit circle = fit_circle(hod);
    d.hodograph_center = circle.center.x() * pl.e1 + circle.center.y() * pl.e2;
    d.hodograph_radius = circle.radius;
    d.hodograph_fit_residual = circle.max_residual;

    d.r_min = *std::min_element(r.begin(), r.end());
    d.r_max = *std::max_element(r.begin(), r.end());
    std::vector<double> passages;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        const double h = t[i + 1] - t[i];
        if (r[i - 1] > r[i] && r[i] <= r[i + 1]) {
            const auto [tv, rv] = detail::parabolic_vertex(t[i], h, r[i - 1], r[i], r[i + 1]);
            passages.push_back(tv);
            d.r_min = std::min(d.r_min, rv);
        } else if (r[i - 1] < r[i] && r[i] >= r[i + 1]) {
            d.r_max = std::max(d.r_max, detail::parabolic_vertex(t[i], h, r[i - 1], r[i], r[i + 1]).second);
        }
    }
    d.perihelion_passages = static_cast<int>(passages.size());
    if (elliptic && d.eps < kCircularEps) {
        // No perihelion on a circle: time the returns of the polar angle instead.
        passages.clear();
        double unwrapped = 0.0, prev = 0.0;
        int turns = 1;
        for (std::size_t i = 1; i < states.size(); ++i) {
            const Eigen::Vector2d q = pl.project(states[i].head<3>());
            const double ang = std::atan2(q.y(), q.x());
            double step = ang - prev;
            if (step > std::numbers::pi) step -= 2.0 * std::numbers::pi;
            if (step < -std::numbers::pi) step += 2.0 * std::numbers::pi;
            const double next = unwrapped + step;
            const double target = 2.0 * std::numbers::pi * turns;
            if (next >= target) {
                passages.push_back(t[i - 1] + (t[i] - t[i - 1]) * (target - unwrapped) / step);
                ++turns;
            }
            unwrapped = next;
            prev = ang;
        }
        d.perihelion_passages = static_cast<int>(passages.size());
    }
    if (elliptic) {
        if (passages.size() < 3) {
            throw DomainError("kepler_diagnostics: fewer than 3 perihelion passages recorded; extend t_end");
        }
        d.period = (passages.back() - passages.front()) / static_cast<double>(passages.size() - 1);
        d.a_semi = 0.5 * (d.r_min + d.r_max);
    }
    return d;
}

/// |T^2 k / (4 pi^2 a^3) - 1|
inline double third_law_residual(double T, double a, double k) {
    return std::abs(T * T * k / (4.0 * std::numbers::pi * std::numbers::pi * a * a * a) - 1.0);
}

}  // namespace geomech
