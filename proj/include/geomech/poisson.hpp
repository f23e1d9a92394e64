// Poisson structures in coordinates: Lie algebras by structure constants,
// (cocycle-modified) Lie-Poisson structures, canonical Darboux structures,
// brackets, Hamiltonian vector fields, Jacobiator and Casimir checks.
//
// Sign conventions:
//   L_ij(x) = {x^i, x^j}(x),   {f, g} = sum_ij d_i f L_ij d_j g,
//   (X_H)^j = sum_i d_i H L_ij.
// Darboux coordinates are ordered (q^1..q^n, p_1..p_n) with L_{n+i,i} = 1,
// which yields dq/dt = dH/dp and dp/dt = -dH/dq.
#pragma once

#include "geomech/core.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geomech {

// ---------------------------------------------------------------------------
// Lie algebras
// ---------------------------------------------------------------------------

/// Finite-dimensional Lie algebra given by structure constants
/// [e_i, e_j] = sum_k c^k_ij e_k.
class LieAlgebra {
public:
    static constexpr double kTolerance = 1e-12;

    /// `constants` is indexed as constants[(k * dim + i) * dim + j] = c^k_ij.
    LieAlgebra(int dim, std::vector<double> constants, std::vector<std::string> basis_names = {})
        : dim_(dim), c_(std::move(constants)), names_(std::move(basis_names)) {
        if (dim_ <= 0) throw DomainError("LieAlgebra: dimension must be positive");
        if (c_.size() != static_cast<std::size_t>(dim_) * dim_ * dim_) {
            throw DimensionError("LieAlgebra: expected dim^3 structure constants");
        }
        if (names_.empty()) {
            for (int i = 0; i < dim_; ++i) names_.push_back("e" + std::to_string(i + 1));
        }
        if (static_cast<int>(names_.size()) != dim_) {
            throw DimensionError("LieAlgebra: basis_names size must equal dim");
        }
        validate();
    }

    int dim() const { return dim_; }
    const std::vector<std::string>& basis_names() const { return names_; }

    double constant(int k, int i, int j) const { return c_[(static_cast<std::size_t>(k) * dim_ + i) * dim_ + j]; }

    VecX basis(int i) const { return VecX::Unit(dim_, i); }

    /// ([X,Y])_k = sum_ij c^k_ij X_i Y_j
    VecX bracket(const VecX& X, const VecX& Y) const {
        require_dim(X.size(), dim_, "LieAlgebra::bracket X");
        require_dim(Y.size(), dim_, "LieAlgebra::bracket Y");
        VecX out = VecX::Zero(dim_);
        for (int k = 0; k < dim_; ++k) {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                if (X[i] == 0.0) continue;
                for (int j = 0; j < dim_; ++j) s += constant(k, i, j) * X[i] * Y[j];
            }
            out[k] = s;
        }
        return out;
    }

    /// <ad*_V xi, Y> = <xi, [V, Y]>, i.e. (ad*_V xi)_j = sum_ik V_i c^k_ij xi_k.
    VecX coadjoint(const VecX& V, const VecX& xi) const {
        require_dim(V.size(), dim_, "LieAlgebra::coadjoint V");
        require_dim(xi.size(), dim_, "LieAlgebra::coadjoint xi");
        VecX out = VecX::Zero(dim_);
        for (int j = 0; j < dim_; ++j) {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < dim_; ++k) s += V[i] * constant(k, i, j) * xi[k];
            out[j] = s;
        }
        return out;
    }

    /// max over i,j,k,l of the Jacobi cyclic sum of structure constants.
    double jacobi_defect() const {
        double worst = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                for (int k = 0; k < dim_; ++k)
                    for (int l = 0; l < dim_; ++l) {
                        double s = 0.0;
                        for (int m = 0; m < dim_; ++m) {
                            s += constant(m, i, j) * constant(l, m, k) + constant(m, j, k) * constant(l, m, i) +
                                 constant(m, k, i) * constant(l, m, j);
                        }
                        worst = std::max(worst, std::abs(s));
                    }
        return worst;
    }

private:
    void validate() const {
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j) {
                    if (std::abs(constant(k, i, j) + constant(k, j, i)) > kTolerance) {
                        throw DomainError("LieAlgebra: structure constants are not antisymmetric");
                    }
                }
        if (jacobi_defect() > kTolerance) throw DomainError("LieAlgebra: structure constants violate Jacobi");
    }

    int dim_;
    std::vector<double> c_;
    std::vector<std::string> names_;
};

namespace algebras {

inline std::vector<double> zero_constants(int dim) { return std::vector<double>(static_cast<std::size_t>(dim) * dim * dim, 0.0); }

inline void set_bracket(std::vector<double>& c, int dim, int i, int j, int k, double value) {
    c[(static_cast<std::size_t>(k) * dim + i) * dim + j] = value;
    c[(static_cast<std::size_t>(k) * dim + j) * dim + i] = -value;
}

/// so(3) with [e_i, e_j] = e_i x e_j.
inline LieAlgebra so3() {
    auto c = zero_constants(3);
    set_bracket(c, 3, 0, 1, 2, 1.0);
    set_bracket(c, 3, 1, 2, 0, 1.0);
    set_bracket(c, 3, 2, 0, 1, 1.0);
    return LieAlgebra(3, std::move(c), {"R1", "R2", "R3"});
}

inline LieAlgebra abelian(int dim) {
    std::vector<std::string> names;
    for (int i = 0; i < dim; ++i) names.push_back("T" + std::to_string(i + 1));
    return LieAlgebra(dim, zero_constants(dim), std::move(names));
}

/// se(3) = so(3) x| R^3, coordinates (X, u): [(X,u),(Y,v)] = (X x Y, X x v - Y x u).
inline LieAlgebra se3() {
    auto c = zero_constants(6);
    const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
    for (const auto& t : cyc) {
        set_bracket(c, 6, t[0], t[1], t[2], 1.0);          // rotations
        set_bracket(c, 6, t[0], 3 + t[1], 3 + t[2], 1.0);  // e_a x f_b
        set_bracket(c, 6, t[1], 3 + t[0], 3 + t[2], -1.0);
    }
    return LieAlgebra(6, std::move(c), {"R1", "R2", "R3", "T1", "T2", "T3"});
}

/// Direct sum a (+) b; coordinates of a first.
inline LieAlgebra direct_sum(const LieAlgebra& a, const LieAlgebra& b) {
    const int n = a.dim() + b.dim();
    auto c = zero_constants(n);
    for (int k = 0; k < a.dim(); ++k)
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j) c[(static_cast<std::size_t>(k) * n + i) * n + j] = a.constant(k, i, j);
    const int o = a.dim();
    for (int k = 0; k < b.dim(); ++k)
        for (int i = 0; i < b.dim(); ++i)
            for (int j = 0; j < b.dim(); ++j)
                c[(static_cast<std::size_t>(k + o) * n + i + o) * n + j + o] = b.constant(k, i, j);
    auto names = a.basis_names();
    names.insert(names.end(), b.basis_names().begin(), b.basis_names().end());
    return LieAlgebra(n, std::move(c), std::move(names));
}

/// so(3) (+) R, the algebra of rotations and dilations.
inline LieAlgebra so3_plus_r() {
    return direct_sum(so3(), LieAlgebra(1, {0.0}, {"D"}));
}

}  // namespace algebras

inline VecX structure_bracket(const LieAlgebra& alg, const VecX& X, const VecX& Y) { return alg.bracket(X, Y); }

// ---------------------------------------------------------------------------
// Cocycles
// ---------------------------------------------------------------------------

/// Antisymmetric bilinear form Theta~ on a Lie algebra, stored as a matrix
/// Theta~_ij = Theta~(e_i, e_j).
struct CocycleForm {
    MatX theta_tilde;

    explicit CocycleForm(MatX theta) : theta_tilde(std::move(theta)) {
        if (theta_tilde.rows() != theta_tilde.cols()) throw DimensionError("CocycleForm: matrix must be square");
        if ((theta_tilde + theta_tilde.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw DomainError("CocycleForm: matrix is not antisymmetric");
        }
    }

    double operator()(const VecX& X, const VecX& Y) const { return X.dot(theta_tilde * Y); }

    /// Theta(X) is the row Theta~(X, .).
    VecX theta(const VecX& X) const { return theta_tilde.transpose() * X; }
};

/// max over basis triples of |Theta~([X,Y],Z) + Theta~([Y,Z],X) + Theta~([Z,X],Y)|.
inline double cocycle_identity_residual(const LieAlgebra& alg, const CocycleForm& theta) {
    require_dim(theta.theta_tilde.rows(), alg.dim(), "cocycle_identity_residual");
    double worst = 0.0;
    for (int i = 0; i < alg.dim(); ++i)
        for (int j = 0; j < alg.dim(); ++j)
            for (int k = 0; k < alg.dim(); ++k) {
                const VecX X = alg.basis(i), Y = alg.basis(j), Z = alg.basis(k);
                const double s = theta(alg.bracket(X, Y), Z) + theta(alg.bracket(Y, Z), X) + theta(alg.bracket(Z, X), Y);
                worst = std::max(worst, std::abs(s));
            }
    return worst;
}

/// Coboundary Theta~(X, Y) = <c, [X, Y]>.
inline CocycleForm coboundary_cocycle(const LieAlgebra& alg, const VecX& c) {
    require_dim(c.size(), alg.dim(), "coboundary_cocycle");
    MatX t(alg.dim(), alg.dim());
    for (int i = 0; i < alg.dim(); ++i)
        for (int j = 0; j < alg.dim(); ++j) t(i, j) = c.dot(alg.bracket(alg.basis(i), alg.basis(j)));
    return CocycleForm(t);
}

// ---------------------------------------------------------------------------
// Smooth functions
// ---------------------------------------------------------------------------

/// Real function with an analytic gradient and optional analytic Hessian.
/// A missing Hessian is replaced by central differences of the gradient.
struct SmoothFunction {
    std::function<double(const VecX&)> value;
    std::function<VecX(const VecX&)> gradient;
    std::function<MatX(const VecX&)> hessian_fn;

    double operator()(const VecX& x) const { return value(x); }
    VecX grad(const VecX& x) const { return gradient(x); }

    MatX hessian(const VecX& x) const {
        if (hessian_fn) return hessian_fn(x);
        const Eigen::Index n = x.size();
        const double h = 1e-5 * std::max(1.0, x.norm());
        MatX H(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            VecX xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            H.col(k) = (gradient(xp) - gradient(xm)) / (2.0 * h);
        }
        return 0.5 * (H + H.transpose());
    }
};

/// Largest relative mismatch between the analytic gradient and central
/// differences of the value (self-check mode).
inline double gradient_check(const SmoothFunction& f, const VecX& x) {
    const VecX g = f.grad(x);
    const double h = 1e-6 * std::max(1.0, x.norm());
    double worst = 0.0;
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        VecX xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const double fd = (f(xp) - f(xm)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - g[k]) / scale);
    }
    return worst;
}

namespace functions {

/// x -> <a, x> + b
inline SmoothFunction linear(VecX a, double b = 0.0) {
    return {[a, b](const VecX& x) { return a.dot(x) + b; }, [a](const VecX&) { return a; },
            [a](const VecX&) { return MatX::Zero(a.size(), a.size()); }};
}

/// x -> x^i
inline SmoothFunction coordinate(int n, int i) { return linear(VecX::Unit(n, i)); }

/// x -> 1/2 x^T Q x with Q symmetric.
inline SmoothFunction quadratic(MatX Q) {
    return {[Q](const VecX& x) { return 0.5 * x.dot(Q * x); }, [Q](const VecX& x) { return VecX(Q * x); },
            [Q](const VecX&) { return Q; }};
}

inline SmoothFunction product(const SmoothFunction& f, const SmoothFunction& g) {
    SmoothFunction out;
    out.value = [f, g](const VecX& x) { return f(x) * g(x); };
    out.gradient = [f, g](const VecX& x) { return VecX(f.grad(x) * g(x) + g.grad(x) * f(x)); };
    out.hessian_fn = [f, g](const VecX& x) {
        const VecX df = f.grad(x), dg = g.grad(x);
        return MatX(f.hessian(x) * g(x) + g.hessian(x) * f(x) + df * dg.transpose() + dg * df.transpose());
    };
    return out;
}

inline SmoothFunction scaled(const SmoothFunction& f, double s) {
    SmoothFunction out;
    out.value = [f, s](const VecX& x) { return s * f(x); };
    out.gradient = [f, s](const VecX& x) { return VecX(s * f.grad(x)); };
    out.hessian_fn = [f, s](const VecX& x) { return MatX(s * f.hessian(x)); };
    return out;
}

}  // namespace functions

// ---------------------------------------------------------------------------
// Poisson structures
// ---------------------------------------------------------------------------

enum class PoissonKind { CanonicalDarboux, LiePoisson, ModifiedLiePoisson, Custom };

/// Bivector field as a point-dependent antisymmetric matrix L(x).
class PoissonStructure {
public:
    using MatrixFn = std::function<MatX(const VecX&)>;
    using DerivativeFn = std::function<std::vector<MatX>(const VecX&)>;

    /// Canonical structure on R^{2n}.
    static PoissonStructure canonical(int n) {
        if (n < 0) throw DomainError("canonical: negative degree of freedom count");
        MatX L = MatX::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            L(n + i, i) = 1.0;
            L(i, n + i) = -1.0;
        }
        PoissonStructure P(2 * n, PoissonKind::CanonicalDarboux);
        P.matrix_ = [L](const VecX&) { return L; };
        P.derivative_ = [n](const VecX&) { return std::vector<MatX>(2 * n, MatX::Zero(2 * n, 2 * n)); };
        return P;
    }

    /// Lie-Poisson structure on g*, optionally modified by a symplectic cocycle:
    /// L_ij(mu) = sum_k c^k_ij mu_k - Theta~_ij.
    static PoissonStructure lie_poisson(const LieAlgebra& alg, std::optional<CocycleForm> cocycle = std::nullopt) {
        const int n = alg.dim();
        if (cocycle) require_dim(cocycle->theta_tilde.rows(), n, "lie_poisson cocycle");
        PoissonStructure P(n, cocycle ? PoissonKind::ModifiedLiePoisson : PoissonKind::LiePoisson);
        std::vector<MatX> dL(n, MatX::Zero(n, n));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) dL[k](i, j) = alg.constant(k, i, j);
        const MatX theta = cocycle ? cocycle->theta_tilde : MatX::Zero(n, n);
        P.matrix_ = [dL, theta, n](const VecX& mu) {
            MatX L = -theta;
            for (int k = 0; k < n; ++k)
                if (mu[k] != 0.0) L += mu[k] * dL[k];
            return L;
        };
        P.derivative_ = [dL](const VecX&) { return dL; };
        return P;
    }

    /// User-supplied bivector. Without `derivative` the Jacobiator uses central
    /// differences with h = 1e-5 max(1, |x|).
    static PoissonStructure custom(int dim, MatrixFn matrix, DerivativeFn derivative = {}) {
        if (dim < 0) throw DomainError("custom: negative dimension");
        PoissonStructure P(dim, PoissonKind::Custom);
        P.matrix_ = [dim, matrix = std::move(matrix)](const VecX& x) {
            MatX L = matrix(x);
            if (L.rows() != dim || L.cols() != dim) throw DimensionError("custom Poisson matrix has wrong shape");
            const double scale = 1.0 + (L.size() ? L.cwiseAbs().maxCoeff() : 0.0);
            if (L.size() && (L + L.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
                throw DomainError("custom Poisson matrix is not antisymmetric");
            }
            return L;
        };
        if (derivative) {
            P.derivative_ = std::move(derivative);
        } else {
            auto m = P.matrix_;
            P.derivative_ = [m, dim](const VecX& x) {
                const double h = 1e-5 * std::max(1.0, x.norm());
                std::vector<MatX> dL(dim);
                for (int k = 0; k < dim; ++k) {
                    VecX xp = x, xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    dL[k] = (m(xp) - m(xm)) / (2.0 * h);
                }
                return dL;
            };
        }
        return P;
    }

    int dim() const { return dim_; }
    PoissonKind kind() const { return kind_; }

    MatX matrix(const VecX& x) const {
        require_dim(x.size(), dim_, "PoissonStructure::matrix");
        return matrix_(x);
    }

    /// dL/dx^k for k = 0..dim-1.
    std::vector<MatX> derivative(const VecX& x) const {
        require_dim(x.size(), dim_, "PoissonStructure::derivative");
        return derivative_(x);
    }

private:
    PoissonStructure(int dim, PoissonKind kind) : dim_(dim), kind_(kind) {}

    int dim_;
    PoissonKind kind_;
    MatrixFn matrix_;
    DerivativeFn derivative_;
};

/// L_ij(mu) = sum_k c^k_ij mu_k - Theta~_ij
inline MatX lie_poisson_matrix(const LieAlgebra& alg, const VecX& mu, const std::optional<CocycleForm>& cocycle = std::nullopt) {
    require_dim(mu.size(), alg.dim(), "lie_poisson_matrix");
    return PoissonStructure::lie_poisson(alg, cocycle).matrix(mu);
}

/// {f, g}(x) = df^T L(x) dg
inline double poisson_bracket(const PoissonStructure& P, const SmoothFunction& f, const SmoothFunction& g, const VecX& x) {
    return f.grad(x).dot(P.matrix(x) * g.grad(x));
}

/// X_H(x) = L(x)^T dH(x)
inline VecX ham_vector_field(const PoissonStructure& P, const SmoothFunction& H, const VecX& x) {
    return P.matrix(x).transpose() * H.grad(x);
}

inline VectorField ham_vector_field(const PoissonStructure& P, const SmoothFunction& H) {
    return [P, H](const VecX& x) { return ham_vector_field(P, H, x); };
}

namespace detail {

/// Gradient of {f,g} at x: H_f L dg - H_g L df + (df^T dL_k dg)_k.
inline VecX bracket_gradient(const MatX& L, const std::vector<MatX>& dL, const VecX& df, const VecX& dg,
                             const MatX& Hf, const MatX& Hg) {
    VecX grad = Hf * (L * dg) - Hg * (L * df);
    for (std::size_t k = 0; k < dL.size(); ++k) grad[static_cast<Eigen::Index>(k)] += df.dot(dL[k] * dg);
    return grad;
}

}  // namespace detail

/// Cyclic sum {{f,g},h} + {{g,h},f} + {{h,f},g} at x.
inline double jacobiator(const PoissonStructure& P, const SmoothFunction& f, const SmoothFunction& g,
                         const SmoothFunction& h, const VecX& x) {
    const MatX L = P.matrix(x);
    const auto dL = P.derivative(x);
    const VecX df = f.grad(x), dg = g.grad(x), dh = h.grad(x);
    const MatX Hf = f.hessian(x), Hg = g.hessian(x), Hh = h.hessian(x);
    const VecX gfg = detail::bracket_gradient(L, dL, df, dg, Hf, Hg);
    const VecX ggh = detail::bracket_gradient(L, dL, dg, dh, Hg, Hh);
    const VecX ghf = detail::bracket_gradient(L, dL, dh, df, Hh, Hf);
    return gfg.dot(L * dh) + ggh.dot(L * df) + ghf.dot(L * dg);
}

/// First-order form of the Jacobiator: only dL enters, second derivatives of
/// f, g, h cancel in the cyclic sum. Equals jacobiator() in exact arithmetic.
inline double jacobi_tensor(const PoissonStructure& P, const VecX& a, const VecX& b, const VecX& c, const VecX& x) {
    const MatX L = P.matrix(x);
    const auto dL = P.derivative(x);
    auto term = [&](const VecX& u, const VecX& v, const VecX& w) {
        VecX d(static_cast<Eigen::Index>(dL.size()));
        for (std::size_t k = 0; k < dL.size(); ++k) d[static_cast<Eigen::Index>(k)] = u.dot(dL[k] * v);
        return d.dot(L * w);
    };
    return term(a, b, c) + term(b, c, a) + term(c, a, b);
}

/// max over points of |X_f(x)|; near zero certifies f as a Casimir on the sample.
inline double casimir_residual(const PoissonStructure& P, const SmoothFunction& f, const std::vector<VecX>& points) {
    if (points.empty()) throw DomainError("casimir_residual: empty point list");
    double worst = 0.0;
    for (const auto& x : points) worst = std::max(worst, ham_vector_field(P, f, x).norm());
    return worst;
}

}  // namespace geomech
