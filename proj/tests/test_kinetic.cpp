// Particle ensemble, deposition, and velocity-recovery tests. Deposit
// expectations are computed by hand or by an independent histogram; totals
// must be conserved exactly in the power-of-two-volume construction.

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "riskflow/kinetic.hpp"

using namespace riskflow;

namespace {

EParticle make_particle(std::vector<double> x, std::vector<double> v,
                        std::vector<double> u) {
    return EParticle{std::move(x), std::move(v), std::move(u)};
}

} // namespace

TEST(Ensemble, ValidatesArity) {
    EXPECT_THROW(Ensemble(0, 1), std::invalid_argument);
    EXPECT_THROW(Ensemble(1, 0), std::invalid_argument);
    Ensemble e(2, 1);
    EXPECT_NO_THROW(e.add(make_particle({0.1, 0.2}, {1.0, -1.0}, {2.0})));
    EXPECT_THROW(e.add(make_particle({0.1}, {1.0, -1.0}, {2.0})), std::invalid_argument);
    EXPECT_THROW(e.add(make_particle({0.1, 0.2}, {1.0}, {2.0})), std::invalid_argument);
    EXPECT_THROW(e.add(make_particle({0.1, 0.2}, {1.0, -1.0}, {2.0, 3.0})),
                 std::invalid_argument);
    EXPECT_EQ(e.size(), 1u);
}

TEST(Kinetic, ParticleImpulseIsVariableTimesVelocity) {
    const std::vector<double> p = particle_impulse(2.5, {1.0, -2.0, 0.5});
    ASSERT_EQ(p.size(), 3u);
    EXPECT_DOUBLE_EQ(p[0], 2.5);
    EXPECT_DOUBLE_EQ(p[1], -5.0);
    EXPECT_DOUBLE_EQ(p[2], 1.25);
}

TEST(Deposit, SingleParticleByHand) {
    const RiskGrid g(RiskDomain({1.0, 2.0}), {4, 4});
    Ensemble e(2, 2);
    // cell of (0.30, 1.10): ix = floor(0.30/0.25) = 1, iy = floor(1.10/0.5) = 2
    e.add(make_particle({0.30, 1.10}, {0.7, -0.3}, {5.0, 1.0}));
    const DepositResult d = deposit(e, g, 0);
    const std::size_t cell = g.flat({1, 2});
    const double inv_vol = 1.0 / g.cell_volume();
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        if (c == cell) {
            EXPECT_DOUBLE_EQ(d.density(c), 5.0 * inv_vol);
            EXPECT_DOUBLE_EQ(d.impulse(c, 0), 5.0 * 0.7 * inv_vol);
            EXPECT_DOUBLE_EQ(d.impulse(c, 1), 5.0 * -0.3 * inv_vol);
        } else {
            EXPECT_DOUBLE_EQ(d.density(c), 0.0);
            EXPECT_DOUBLE_EQ(d.impulse(c, 0), 0.0);
            EXPECT_DOUBLE_EQ(d.impulse(c, 1), 0.0);
        }
    }
    // second variable deposits independently
    const DepositResult d2 = deposit(e, g, 1);
    EXPECT_DOUBLE_EQ(d2.density(cell), 1.0 * inv_vol);
}

TEST(Deposit, MatchesIndependentHistogram) {
    const RiskGrid g(RiskDomain({1.0}), {10});
    Ensemble e(1, 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(1e-6, 1.0 - 1e-6);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    std::vector<double> mass(10, 0.0), mom(10, 0.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = ux(rng), v = uv(rng), u = 0.5 + (k % 3);
        e.add(make_particle({x}, {v}, {u}));
        int i = static_cast<int>(std::floor(x / 0.1));
        if (i > 9) i = 9;
        mass[static_cast<std::size_t>(i)] += u;
        mom[static_cast<std::size_t>(i)] += u * v;
    }
    const DepositResult d = deposit(e, g, 0);
    for (std::size_t c = 0; c < 10; ++c) {
        EXPECT_NEAR(d.density(c) * g.cell_volume(), mass[c], 1e-12 * std::fabs(mass[c]));
        EXPECT_NEAR(d.impulse(c, 0) * g.cell_volume(), mom[c],
                    1e-12 * std::max(1.0, std::fabs(mom[c])));
    }
}

TEST(Deposit, ConservesUnitWeightsExactly) {
    // 64 cells on [0,1]: the cell volume is a power of two, so dividing and
    // re-multiplying by it is exact and the deposited total equals the
    // particle count bit for bit.
    const RiskGrid g(RiskDomain({1.0}), {64});
    Ensemble e(1, 1);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ux(1e-9, 1.0 - 1e-9);
    const int n = 4096;
    for (int k = 0; k < n; ++k)
        e.add(make_particle({ux(rng)}, {0.25}, {1.0}));
    const DepositResult d = deposit(e, g, 0);
    EXPECT_EQ(integrate(d.density), static_cast<double>(n));
    // impulse total: every particle contributes exactly 0.25
    double ptotal = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) ptotal += d.impulse(c, 0);
    EXPECT_EQ(ptotal * g.cell_volume(), 0.25 * n);
}

TEST(Deposit, RejectsBadInput) {
    const RiskGrid g(RiskDomain({1.0}), {4});
    const RiskGrid g2(RiskDomain({1.0, 1.0}), {4, 4});
    Ensemble e(1, 1);
    e.add(make_particle({0.5}, {0.0}, {1.0}));
    EXPECT_THROW(deposit(e, g2, 0), std::invalid_argument);
    EXPECT_THROW(deposit(e, g, -1), std::invalid_argument);
    EXPECT_THROW(deposit(e, g, 1), std::invalid_argument);

    Ensemble outside(1, 1);
    outside.add(make_particle({1.5}, {0.0}, {1.0}));
    EXPECT_THROW(deposit(outside, g, 0), std::invalid_argument);
}

TEST(VelocityField, DividesWhereMassExists) {
    const RiskGrid g(RiskDomain({1.0}), {4});
    Field rho = Field::scalar(g);
    Field p = Field::vector(g);
    rho(0) = 2.0;
    p(0, 0) = 1.0; // v = 0.5
    rho(1) = 0.0;
    p(1, 0) = 0.0; // empty cell: v = 0 (0 / eps)
    rho(2) = 4.0;
    p(2, 0) = -6.0; // v = -1.5
    const Field v = velocity_field(rho, p);
    EXPECT_DOUBLE_EQ(v(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(v(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(v(2, 0), -1.5);
    EXPECT_DOUBLE_EQ(v(3, 0), 0.0);
}

TEST(VelocityField, EpsilonFloorsTinyMass) {
    const RiskGrid g(RiskDomain({1.0}), {2});
    Field rho = Field::scalar(g);
    Field p = Field::vector(g);
    rho(0) = 100.0;
    rho(1) = 1e-30; // far below the floor
    p(1, 0) = 1e-30;
    const double eps = default_velocity_epsilon(rho);
    EXPECT_DOUBLE_EQ(eps, 1e-12 * 100.0);
    const Field v = velocity_field(rho, p, eps);
    EXPECT_DOUBLE_EQ(v(1, 0), 1e-30 / eps); // tiny, not 1.0
    EXPECT_THROW(velocity_field(rho, p, 0.0), std::invalid_argument);
    EXPECT_THROW(velocity_field(rho, p, -1.0), std::invalid_argument);
}

TEST(EnsembleIo, RoundTripsBitExactly) {
    Ensemble e(2, 2);
    e.add(make_particle({0.123456789012345678, 1.9999999999999998},
                        {-3.0000000000000004e-7, 2.5}, {1.0 / 3.0, 7.0}));
    e.add(make_particle({1e-300, 0.5}, {0.0, -0.0}, {-2.5, 1e300}));
    std::ostringstream os;
    save_ensemble(os, e);
    std::istringstream is(os.str());
    const Ensemble r = load_ensemble(is, 2, 2);
    ASSERT_EQ(r.size(), e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
        for (int i = 0; i < 2; ++i) {
            EXPECT_EQ(r[k].position[static_cast<std::size_t>(i)],
                      e[k].position[static_cast<std::size_t>(i)]);
            EXPECT_EQ(r[k].velocity[static_cast<std::size_t>(i)],
                      e[k].velocity[static_cast<std::size_t>(i)]);
            EXPECT_EQ(r[k].variables[static_cast<std::size_t>(i)],
                      e[k].variables[static_cast<std::size_t>(i)]);
        }
    }
}

TEST(EnsembleIo, LoadReportsBadLines) {
    {
        std::istringstream is("# comment\n0.5 1.0 2.0\n0.25 0.5\n");
        try {
            load_ensemble(is, 1, 1);
            FAIL() << "short line must throw";
        } catch (const std::runtime_error& e) {
            EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
        }
    }
    {
        std::istringstream is("0.5 oops 2.0\n");
        EXPECT_THROW(load_ensemble(is, 1, 1), std::runtime_error);
    }
    {
        // comments and blank lines are fine anywhere
        std::istringstream is("\n# header\n0.5 1.0 2.0 # trailing note\n\n");
        const Ensemble e = load_ensemble(is, 1, 1);
        EXPECT_EQ(e.size(), 1u);
        EXPECT_DOUBLE_EQ(e[0].variables[0], 2.0);
    }
}
