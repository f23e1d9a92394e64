#include "geomech/integrators.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace geomech;
using testsupport::circular_kepler;
using testsupport::loglog_slope;

namespace {

VecX oscillator(const VecX& z) { return Eigen::Vector2d(z[1], -z[0]); }

VecX kepler_field(const VecX& z) {
    const Vec3 x = z.head<3>();
    const double r = x.norm();
    VecX f(6);
    f << z.tail<3>(), -x / (r * r * r);
    return f;
}

Dynamics kepler_dynamics() {
    Dynamics d;
    d.vector_field = kepler_field;
    d.separable = SeparableHamiltonian{1.0, [](const VecX& x) {
                                           const double r = x.norm();
                                           return VecX(x / (r * r * r));
                                       }};
    return d;
}

Dynamics sphere_dynamics(const Vec3& g) {
    Dynamics d;
    d.separable = SeparableHamiltonian{1.0, [g](const VecX&) { return VecX(-g); }};
    d.constraint = HolonomicConstraint{[](const VecX& q) { return q.squaredNorm() - 1.0; },
                                       [](const VecX& q) { return VecX(2.0 * q); }};
    return d;
}

}  // namespace

TEST(Rk4, ZeroFieldAndExponential) {
    const VecX x = Eigen::Vector3d(1, -2, 3);
    EXPECT_EQ(rk4_step([](const VecX& v) { return VecX(VecX::Zero(v.size())); }, x, 0.1), x);
    VecX y = VecX::Ones(1);
    for (int i = 0; i < 1000; ++i) y = rk4_step([](const VecX& v) { return v; }, y, 1e-3);
    EXPECT_NEAR(y[0], std::exp(1.0), 1e-9);
}

TEST(Rk4, OscillatorPeriod) {
    VecX z = Eigen::Vector2d(1, 0);
    const auto traj = integrate(oscillator, z, {Method::RK4, 2 * std::numbers::pi / 6283, 2 * std::numbers::pi});
    EXPECT_LT((traj.states().back() - z).norm(), 1e-7);
}

TEST(Rk4, NonFiniteStageThrows) {
    const VectorField f = [](const VecX& v) { return VecX(v.array() / (1.0 - v.array())); };
    EXPECT_THROW(rk4_step(f, VecX::Ones(1), 0.1), NonFiniteError);
}

TEST(Verlet, FreeDriftAndReversibility) {
    const auto zero = [](const VecX& q) { return VecX(VecX::Zero(q.size())); };
    const PhasePoint s{Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(0.5, -1, 2)};
    const auto d = verlet_step(zero, 2.0, s, 0.1);
    EXPECT_LT((d.q - (s.q + 0.05 * s.p)).norm(), 1e-15);
    EXPECT_EQ(d.p, s.p);

    const auto grad = [](const VecX& q) {
        const double r = q.norm();
        return VecX(q / (r * r * r));
    };
    const auto f = verlet_step(grad, 1.0, s, 1e-2);
    const auto b = verlet_step(grad, 1.0, f, -1e-2);
    EXPECT_LT((b.q - s.q).norm(), 1e-13);
    EXPECT_LT((b.p - s.p).norm(), 1e-13);
}

TEST(Verlet, OscillatorEnergyBounded) {
    const auto grad = [](const VecX& q) { return q; };
    PhasePoint s{VecX::Ones(1), VecX::Zero(1)};
    const double dt = 1e-2;
    double worst_first = 0.0, worst_last = 0.0;
    const int steps = 1000000;
    for (int i = 0; i < steps; ++i) {
        s = verlet_step(grad, 1.0, s, dt);
        const double err = std::abs(0.5 * (s.p[0] * s.p[0] + s.q[0] * s.q[0]) - 0.5);
        double& worst = i < steps / 10 ? worst_first : worst_last;
        worst = std::max(worst, err);
    }
    // Modified-energy oscillation of size dt^2/8, no secular growth.
    EXPECT_LT(worst_first, dt * dt / 4);
    EXPECT_LT(worst_last, 1.1 * worst_first);
}

TEST(Rattle, ConstraintsHeldToSolverTolerance) {
    const auto dyn = sphere_dynamics(Vec3(0, 0, -1));
    VecX z0(6);
    z0 << std::sin(0.7), 0, -std::cos(0.7), 0.3 * std::cos(0.7), 0.9, 0.3 * std::sin(0.7);
    const auto traj = integrate(dyn, z0, {Method::Rattle, 1e-3, 100.0, 10});
    double g = 0, h = 0;
    for (const auto& z : traj.states()) {
        g = std::max(g, std::abs(z.head<3>().squaredNorm() - 1.0));
        h = std::max(h, std::abs(z.head<3>().dot(z.tail<3>())));
    }
    EXPECT_LT(g, 1e-11);
    EXPECT_LT(h, 1e-11);
}

TEST(Rattle, GreatCircleStaysPlanar) {
    const auto dyn = sphere_dynamics(Vec3(0, 0, -1));
    VecX z0(6);
    z0 << std::sin(1.2), 0, -std::cos(1.2), 0.5 * std::cos(1.2), 0, 0.5 * std::sin(1.2);
    const auto traj = integrate(dyn, z0, {Method::Rattle, 1e-3, 50.0, 10});
    double off = 0;
    for (const auto& z : traj.states()) off = std::max({off, std::abs(z[1]), std::abs(z[4])});
    EXPECT_LT(off, 1e-10);
}

TEST(Rattle, ConvergenceFailureReported) {
    const auto dyn = sphere_dynamics(Vec3(0, 0, -1));
    const PhasePoint s{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 50, 0)};
    EXPECT_THROW(rattle_step(dyn.separable->grad_potential, 1.0, *dyn.constraint, s, 1.0, 1e-12, 3), ConvergenceError);
}

TEST(Midpoint, EquilibriumAndCasimir) {
    const auto so3 = algebras::so3();
    const auto H = functions::quadratic(MatX(Eigen::Vector3d(1.0, 0.5, 1.0 / 3.0).asDiagonal()));
    const VecX e1 = Eigen::Vector3d(1, 0, 0);
    EXPECT_LT((midpoint_lie_poisson_step(so3, H, e1, 1e-2) - e1).norm(), 1e-15);

    VecX mu = Eigen::Vector3d(0.6, -0.8, 0.4);
    const double c0 = mu.squaredNorm();
    double drift = 0.0;
    for (int i = 0; i < 100000; ++i) {
        mu = midpoint_lie_poisson_step(so3, H, mu, 1e-3);
        drift = std::max(drift, std::abs(mu.squaredNorm() - c0));
    }
    EXPECT_LT(drift, 1e-10);
}

TEST(Midpoint, AgreesWithRk4ToThirdOrder) {
    const auto f = kepler_field;
    const VecX z = testsupport::eccentric_kepler0();
    std::vector<double> hs, errs;
    for (double dt : {4e-2, 2e-2, 1e-2}) {
        hs.push_back(dt);
        errs.push_back((midpoint_step(f, z, dt) - rk4_step(f, z, dt)).norm());
    }
    EXPECT_NEAR(loglog_slope(hs, errs), 3.0, 0.3);
}

TEST(Midpoint, NewtonFallbackConverges) {
    // Stiff linear decay: fixed-point iteration diverges for dt * 50 > 2.
    const VectorField f = [](const VecX& v) { return VecX(-50.0 * v); };
    const VecX y = midpoint_step(f, VecX::Ones(1), 0.1, 1e-12, 50);
    EXPECT_NEAR(y[0], (1 - 2.5) / (1 + 2.5), 1e-12);
}

TEST(Integrate, RecordsAndStride) {
    const auto zero = [](const VecX& v) { return VecX(VecX::Zero(v.size())); };
    const VecX x0 = Eigen::Vector2d(1, 2);
    const auto two = integrate(zero, x0, {Method::RK4, 0.5, 0.5});
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two.states()[1], x0);
    const auto strided = integrate(zero, x0, {Method::RK4, 0.1, 1.05, 3});
    // 10 steps: records at 0, 3, 6, 9 and the final step 10.
    ASSERT_EQ(strided.size(), 5u);
    EXPECT_NEAR(strided.times().back(), 1.0, 1e-15);
    const std::vector<Observable> obs = {{"sum", [](const VecX& v) { return v.sum(); }}};
    const auto withobs = integrate(zero, x0, {Method::Midpoint, 0.25, 1.0}, obs);
    EXPECT_EQ(withobs.series("sum").size(), withobs.size());
    EXPECT_EQ(withobs.series("sum").back(), 3.0);
    EXPECT_THROW(withobs.series("nope"), DomainError);
}

TEST(Integrate, ConfigValidation) {
    const auto zero = [](const VecX& v) { return VecX(VecX::Zero(v.size())); };
    const VecX x0 = VecX::Ones(2);
    EXPECT_THROW(integrate(zero, x0, {Method::RK4, 0.0, 1.0}), DomainError);
    EXPECT_THROW(integrate(zero, x0, {Method::RK4, 2.0, 1.0}), DomainError);
    EXPECT_THROW(integrate(zero, x0, {Method::RK4, 0.1, 1.0, 0}), DomainError);
    EXPECT_THROW(integrate(zero, x0, {Method::Verlet, 0.1, 1.0}), DomainError);
    EXPECT_THROW(integrate(sphere_dynamics(Vec3(0, 0, -1)), VecX::Zero(6), {Method::Verlet, 0.1, 1.0}), DomainError);
    EXPECT_EQ(parse_method("rattle"), Method::Rattle);
    EXPECT_FALSE(parse_method("euler"));
}

TEST(Integrate, BlowUpCarriesTimeAndPartialTrajectory) {
    const VectorField f = [](const VecX& v) { return VecX(v.array().square()); };  // y' = y^2 blows up at t = 1
    try {
        integrate(f, VecX::Ones(1), {Method::RK4, 1e-2, 2.0});
        FAIL() << "expected blow-up";
    } catch (const IntegrationError& e) {
        EXPECT_GT(e.time(), 0.9);
        EXPECT_LT(e.time(), 2.0);
        EXPECT_GT(e.partial().size(), 10u);
        EXPECT_LT(e.partial().times().back(), e.time());
    }
}

TEST(Integrate, CircularKeplerRadius) {
    const auto traj = integrate(kepler_dynamics(), circular_kepler(0.0), {Method::RK4, 1e-3, 2 * std::numbers::pi});
    double worst = 0;
    for (const auto& z : traj.states()) worst = std::max(worst, std::abs(z.head<3>().norm() - 1.0));
    EXPECT_LT(worst, 1e-9);
}

TEST(Integrate, ConvergenceOrdersOnCircularOrbit) {
    const double T = 2 * std::numbers::pi;
    auto error = [&](const Dynamics& d, Method m, double dt) {
        const auto traj = integrate(d, circular_kepler(0.0), {m, dt, T});
        return (traj.states().back() - circular_kepler(traj.times().back())).norm();
    };
    struct Case {
        Method m;
        double order;
        double dt0;
    };
    for (const auto& c : {Case{Method::RK4, 4, T / 100}, Case{Method::Verlet, 2, T / 400}, Case{Method::Midpoint, 2, T / 400}}) {
        std::vector<double> hs, errs;
        for (int k = 0; k < 4; ++k) {
            const double dt = c.dt0 / std::pow(2.0, k);
            hs.push_back(dt);
            errs.push_back(error(kepler_dynamics(), c.m, dt));
        }
        EXPECT_NEAR(loglog_slope(hs, errs), c.order, 0.3) << to_string(c.m);
    }
}
