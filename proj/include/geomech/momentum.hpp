// Lie algebra actions on configuration spaces, cotangent-lift momentum maps,
// algebra and group symplectic cocycles and Noether drift monitoring.
//
// Phase-space points of T*N are stored as z = (x, p) in Darboux order, so the
// canonical structure is PoissonStructure::canonical(config_dim).
#pragma once

#include "geomech/core.hpp"
#include "geomech/poisson.hpp"
#include "geomech/so3.hpp"
#include "geomech/trajectory.hpp"

#include <optional>
#include <vector>

namespace geomech {

/// Fundamental fields of a left action are an anti-homomorphism for the
/// structure bracket; the algebra carried by a left action is therefore the
/// opposite one. Right actions use the structure bracket as is.
enum class ActionSide { Left, Right };

struct LieAlgebraAction {
    using Field = std::function<VecX(const VecX& X, const VecX& x)>;
    using FieldJacobian = std::function<MatX(const VecX& X, const VecX& x)>;

    LieAlgebra algebra;
    int config_dim;
    ActionSide side;
    Field field;                   // phi(X)(x), linear in X
    FieldJacobian field_jacobian;  // d phi(X)(x) / dx; optional

    VecX operator()(const VecX& X, const VecX& x) const {
        require_dim(X.size(), algebra.dim(), "LieAlgebraAction algebra element");
        require_dim(x.size(), config_dim, "LieAlgebraAction configuration");
        return field(X, x);
    }

    VecX basis_field(int k, const VecX& x) const { return (*this)(algebra.basis(k), x); }

    MatX jacobian(const VecX& X, const VecX& x) const {
        if (field_jacobian) return field_jacobian(X, x);
        const double h = 1e-6 * std::max(1.0, x.norm());
        MatX J(config_dim, config_dim);
        for (int k = 0; k < config_dim; ++k) {
            VecX xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            J.col(k) = (field(X, xp) - field(X, xm)) / (2.0 * h);
        }
        return J;
    }

    /// Bracket for which X -> phi(X) is a homomorphism.
    VecX bracket(const VecX& X, const VecX& Y) const {
        const VecX b = algebra.bracket(X, Y);
        return side == ActionSide::Right ? b : VecX(-b);
    }

    /// <ad*_V xi, Y> = <xi, [V, Y]> with the action bracket.
    VecX coadjoint(const VecX& V, const VecX& xi) const {
        const VecX c = algebra.coadjoint(V, xi);
        return side == ActionSide::Right ? c : VecX(-c);
    }
};

namespace actions {

/// SO(3) acting on R^3 (or the sphere, or R^3 minus the origin): phi(X)(x) = X x x.
inline LieAlgebraAction rotations() {
    return {algebras::so3(), 3, ActionSide::Left,
            [](const VecX& X, const VecX& x) { return VecX(Vec3(X).cross(Vec3(x))); },
            [](const VecX& X, const VecX&) { return MatX(so3::hat(Vec3(X))); }};
}

/// SO(3) x ]0, inf[ acting on R^3 minus the origin: phi(X, l)(x) = X x x + l x.
inline LieAlgebraAction rotations_and_dilations() {
    return {algebras::so3_plus_r(), 3, ActionSide::Left,
            [](const VecX& V, const VecX& x) {
                const Vec3 X = V.head<3>();
                return VecX(X.cross(Vec3(x)) + V[3] * Vec3(x));
            },
            [](const VecX& V, const VecX&) { return MatX(so3::hat(Vec3(V.head<3>())) + V[3] * Matrix3::Identity()); }};
}

/// Translations of R^n: phi(X)(x) = X.
inline LieAlgebraAction translations(int n) {
    return {algebras::abelian(n), n, ActionSide::Left, [](const VecX& X, const VecX&) { return X; },
            [n](const VecX&, const VecX&) { return MatX(MatX::Zero(n, n)); }};
}

/// Row-major 9-vector of a 3x3 matrix, the coordinates used for Isom(S, E).
inline VecX flatten(const Matrix3& m) {
    VecX v(9);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) v[3 * a + b] = m(a, b);
    return v;
}

inline Matrix3 unflatten(const VecX& v) {
    require_dim(v.size(), 9, "unflatten");
    Matrix3 m;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a, b) = v[3 * a + b];
    return m;
}

/// SO(S) acting on the right on rigid-body configurations x: S -> E,
/// phi(X)(x) = x hat(X) (body angular velocity X).
inline LieAlgebraAction body_rotations() {
    return {algebras::so3(), 9, ActionSide::Right,
            [](const VecX& X, const VecX& x) { return flatten(unflatten(x) * so3::hat(Vec3(X))); },
            [](const VecX& X, const VecX&) {
                const Matrix3 K = so3::hat(Vec3(X));
                MatX J = MatX::Zero(9, 9);
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        for (int c = 0; c < 3; ++c) J(3 * a + b, 3 * a + c) = K(c, b);
                return J;
            }};
}

}  // namespace actions

// ---------------------------------------------------------------------------
// Momentum maps
// ---------------------------------------------------------------------------

/// <J(x, p), e_k> = <p, phi(e_k)(x)>
inline VecX lift_momentum(const LieAlgebraAction& action, const VecX& x, const VecX& p) {
    require_dim(x.size(), action.config_dim, "lift_momentum x");
    require_dim(p.size(), action.config_dim, "lift_momentum p");
    VecX J(action.algebra.dim());
    for (int k = 0; k < action.algebra.dim(); ++k) J[k] = p.dot(action.basis_field(k, x));
    return J;
}

/// g*-valued map on a phase space with access to each component J_X as a
/// smooth function.
struct MomentumMap {
    int phase_dim;
    int algebra_dim;
    std::function<VecX(const VecX& z)> value;
    std::function<SmoothFunction(const VecX& X)> component;

    VecX operator()(const VecX& z) const { return value(z); }
};

/// Momentum map of the cotangent lift, J_X(x, p) = <p, phi(X)(x)>.
inline MomentumMap cotangent_momentum_map(const LieAlgebraAction& action) {
    const int n = action.config_dim;
    MomentumMap J;
    J.phase_dim = 2 * n;
    J.algebra_dim = action.algebra.dim();
    J.value = [action, n](const VecX& z) { return lift_momentum(action, z.head(n), z.tail(n)); };
    J.component = [action, n](const VecX& X) {
        SmoothFunction f;
        f.value = [action, X, n](const VecX& z) { return z.tail(n).dot(action(X, z.head(n))); };
        f.gradient = [action, X, n](const VecX& z) {
            VecX g(2 * n);
            g.head(n) = action.jacobian(X, z.head(n)).transpose() * z.tail(n);
            g.tail(n) = action(X, z.head(n));
            return g;
        };
        return f;
    };
    return J;
}

/// Cotangent lift of a fundamental field: (phi(X)(x), -Dphi(X)(x)^T p).
inline VecX lifted_field(const LieAlgebraAction& action, const VecX& X, const VecX& z) {
    const int n = action.config_dim;
    VecX u(2 * n);
    u.head(n) = action(X, z.head(n));
    u.tail(n) = -action.jacobian(X, z.head(n)).transpose() * z.tail(n);
    return u;
}

struct CocycleEstimate {
    double value;
    double spread;
};

/// Theta~(e_i, e_j) = {J_{e_i}, J_{e_j}} - J_{[e_i, e_j]} averaged over the
/// sample, with its maximal deviation from the mean. The bracket is the
/// action bracket (see ActionSide).
inline CocycleEstimate momentum_cocycle(const PoissonStructure& P, const LieAlgebraAction& action, const MomentumMap& J,
                                        int i, int j, const std::vector<VecX>& points) {
    if (points.empty()) throw DomainError("momentum_cocycle: empty point list");
    const VecX ei = action.algebra.basis(i), ej = action.algebra.basis(j);
    const VecX eij = action.bracket(ei, ej);
    const SmoothFunction Ji = J.component(ei), Jj = J.component(ej);
    std::vector<double> values;
    values.reserve(points.size());
    for (const auto& z : points) values.push_back(poisson_bracket(P, Ji, Jj, z) - J(z).dot(eij));
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double spread = 0.0;
    for (double v : values) spread = std::max(spread, std::abs(v - mean));
    return {mean, spread};
}

/// Full Theta~ matrix over all basis pairs (value part only).
inline MatX momentum_cocycle_matrix(const PoissonStructure& P, const LieAlgebraAction& action, const MomentumMap& J,
                                    const std::vector<VecX>& points) {
    const int d = action.algebra.dim();
    MatX t(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) t(i, j) = momentum_cocycle(P, action, J, i, j, points).value;
    return t;
}

/// Per-component max |J_k(t) - J_k(0)| along the trajectory, restricted to
/// `components` when given.
inline VecX noether_drift(const Trajectory& traj, const std::function<VecX(const VecX&)>& J,
                          const std::optional<std::vector<int>>& components = std::nullopt) {
    if (traj.empty()) throw DomainError("noether_drift: empty trajectory");
    const VecX J0 = J(traj.states().front());
    std::vector<int> idx;
    if (components) {
        idx = *components;
    } else {
        for (int k = 0; k < J0.size(); ++k) idx.push_back(k);
    }
    VecX drift = VecX::Zero(static_cast<Eigen::Index>(idx.size()));
    for (const auto& z : traj.states()) {
        const VecX Jz = J(z);
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const int k = idx[a];
            if (k < 0 || k >= J0.size()) throw DimensionError("noether_drift: component index out of range");
            drift[static_cast<Eigen::Index>(a)] = std::max(drift[static_cast<Eigen::Index>(a)], std::abs(Jz[k] - J0[k]));
        }
    }
    return drift;
}

// ---------------------------------------------------------------------------
// Group actions of SO(3) on phase space
// ---------------------------------------------------------------------------

using GroupAction = std::function<VecX(const Matrix3& g, const VecX& z)>;

/// Cotangent lift of the rotation action on R^3: (x, p) -> (g x, g p).
inline GroupAction rotation_cotangent_lift() {
    return [](const Matrix3& g, const VecX& z) {
        require_dim(z.size(), 6, "rotation_cotangent_lift");
        VecX out(6);
        out.head<3>() = g * Vec3(z.head<3>());
        out.tail<3>() = g * Vec3(z.tail<3>());
        return out;
    };
}

struct GroupCocycleEstimate {
    Vec3 theta;
    double spread;
};

/// theta(g) = J(Phi_g(z)) - Ad*_{g^-1} J(z), where Ad*_{g^-1} acts on so(3)* ~ R^3
/// as the rotation g itself. Averaged over points with the max deviation.
inline GroupCocycleEstimate group_cocycle(const GroupAction& phi, const std::function<VecX(const VecX&)>& J,
                                          const Matrix3& g, const std::vector<VecX>& points) {
    if (points.empty()) throw DomainError("group_cocycle: empty point list");
    std::vector<Vec3> values;
    values.reserve(points.size());
    for (const auto& z : points) {
        const VecX Jz = J(z);
        require_dim(Jz.size(), 3, "group_cocycle momentum");
        values.emplace_back(Vec3(J(phi(g, z))) - g * Vec3(Jz));
    }
    Vec3 mean = Vec3::Zero();
    for (const auto& v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double spread = 0.0;
    for (const auto& v : values) spread = std::max(spread, (v - mean).norm());
    return {mean, spread};
}

/// Proxy for the symplectic orthogonality of group orbits and level sets of J:
/// max |omega(u, w)| for u a lifted fundamental field and w a unit vector in the
/// kernel of dJ (central differences, h = 1e-6; kernel by singular values
/// below 1e-8 sigma_max).
inline double symplectic_orthogonality_residual(const LieAlgebraAction& action, const VecX& z) {
    const int n = action.config_dim;
    const MomentumMap J = cotangent_momentum_map(action);
    const int d = action.algebra.dim();
    const double h = 1e-6;
    MatX DJ(d, 2 * n);
    for (int k = 0; k < 2 * n; ++k) {
        VecX zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        DJ.col(k) = (J(zp) - J(zm)) / (2.0 * h);
    }
    Eigen::JacobiSVD<MatX> svd(DJ, Eigen::ComputeFullV);
    const VecX sigma = svd.singularValues();
    const double cutoff = 1e-8 * (sigma.size() ? sigma.maxCoeff() : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma[i] > cutoff) ++rank;
    const MatX kernel = svd.matrixV().rightCols(2 * n - rank);

    const MatX L = PoissonStructure::canonical(n).matrix(VecX::Zero(2 * n));
    const MatX omega = -L.inverse();
    double worst = 0.0;
    for (int k = 0; k < d; ++k) {
        const VecX u = lifted_field(action, action.algebra.basis(k), z);
        for (Eigen::Index c = 0; c < kernel.cols(); ++c) worst = std::max(worst, std::abs(u.dot(omega * kernel.col(c))));
    }
    return worst;
}

}  // namespace geomech
