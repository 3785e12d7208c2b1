// Aggregate measurement and CSV schema tests. measure() is checked against
// independently coded integrals on a random state; the CSV layer is checked
// for byte determinism, exact round trips, and strict error reporting.

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "riskflow/aggregates.hpp"

using namespace riskflow;

namespace {

HydroState random_state(const RiskGrid& g, std::uint64_t seed) {
    Field A = Field::scalar(g), B = Field::scalar(g);
    Field PA = Field::vector(g), PB = Field::vector(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.3, 2.0);
    std::uniform_real_distribution<double> sym(-0.4, 0.4);
    for (double& x : A.values()) x = pos(rng);
    for (double& x : B.values()) x = pos(rng);
    for (double& x : PA.values()) x = sym(rng);
    for (double& x : PB.values()) x = sym(rng);
    return make_state(A, B, PA, PB, 2.25);
}

} // namespace

TEST(Measure, MatchesIndependentIntegralsIn2d) {
    const RiskGrid g(RiskDomain({1.0, 1.5}), {7, 6});
    const HydroState s = random_state(g, 31);
    const AggregateRecord r = measure(s);
    const double vol = g.cell_volume();
    const int n = 2;

    // independent accumulation, written against the definitions
    double A = 0, B = 0, XPA = 0, EA = 0, X2A = 0, XPAX2 = 0, X2EA = 0;
    double XVA = 0, XPEA = 0, V4A = 0;
    std::vector<double> PA(2, 0.0), XP(2, 0.0), XE(2, 0.0), VXPA(2, 0.0),
        PEA(2, 0.0), XA(2, 0.0);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        double xdotpa = 0, r2 = 0, xdotpea = 0;
        for (int ax = 0; ax < n; ++ax) {
            const double x = g.center(c, ax);
            xdotpa += x * s.PA(c, ax);
            xdotpea += x * s.PEA(c, ax);
            r2 += x * x;
        }
        A += s.A(c);
        B += s.B(c);
        XPA += xdotpa;
        EA += s.EA(c);
        X2A += r2 * s.A(c);
        XPAX2 += r2 * xdotpa;
        X2EA += r2 * s.EA(c);
        XVA += s.XVA(c);
        XPEA += xdotpea;
        V4A += s.V4A(c);
        for (int ax = 0; ax < n; ++ax) {
            const double x = g.center(c, ax);
            PA[static_cast<std::size_t>(ax)] += s.PA(c, ax);
            XP[static_cast<std::size_t>(ax)] += x * xdotpa;
            XE[static_cast<std::size_t>(ax)] += x * s.EA(c);
            VXPA[static_cast<std::size_t>(ax)] += s.VXPA(c, ax);
            PEA[static_cast<std::size_t>(ax)] += s.PEA(c, ax);
            XA[static_cast<std::size_t>(ax)] += x * s.A(c);
        }
    }

    EXPECT_DOUBLE_EQ(*r.A, A * vol);
    EXPECT_DOUBLE_EQ(*r.B, B * vol);
    EXPECT_DOUBLE_EQ(*r.XPA, XPA * vol);
    EXPECT_DOUBLE_EQ(*r.EA, EA * vol);
    EXPECT_DOUBLE_EQ(*r.X2A, X2A * vol);
    EXPECT_DOUBLE_EQ(*r.XPAX2, XPAX2 * vol);
    EXPECT_DOUBLE_EQ(*r.X2EA, X2EA * vol);
    EXPECT_DOUBLE_EQ(*r.XVA, XVA * vol);
    EXPECT_DOUBLE_EQ(*r.XPEA, XPEA * vol);
    EXPECT_DOUBLE_EQ(*r.V4A, V4A * vol);
    for (std::size_t ax = 0; ax < 2; ++ax) {
        EXPECT_DOUBLE_EQ((*r.PA)[ax], PA[ax] * vol);
        EXPECT_DOUBLE_EQ((*r.XP)[ax], XP[ax] * vol);
        EXPECT_DOUBLE_EQ((*r.XE)[ax], XE[ax] * vol);
        EXPECT_DOUBLE_EQ((*r.VXPA)[ax], VXPA[ax] * vol);
        EXPECT_DOUBLE_EQ((*r.PEA)[ax], PEA[ax] * vol);
        EXPECT_DOUBLE_EQ((*r.XA)[ax], XA[ax] * vol);
    }

    // mean risks follow from the raw moments
    ASSERT_TRUE(r.X && r.X2 && r.sigma2);
    EXPECT_DOUBLE_EQ((*r.X)[0], (*r.XA)[0] / *r.A);
    EXPECT_DOUBLE_EQ((*r.X)[1], (*r.XA)[1] / *r.A);
    EXPECT_DOUBLE_EQ(*r.X2, *r.X2A / *r.A);
    const double xnorm2 = (*r.X)[0] * (*r.X)[0] + (*r.X)[1] * (*r.X)[1];
    EXPECT_DOUBLE_EQ(*r.sigma2, *r.X2 - xnorm2);
    EXPECT_DOUBLE_EQ(r.t, 2.25);
}

TEST(Measure, MeanRiskStaysInsideTheBox) {
    const RiskGrid g(RiskDomain({2.0}), {64});
    const HydroState s = random_state(g, 77);
    const AggregateRecord r = measure(s);
    ASSERT_TRUE(r.X);
    EXPECT_GT((*r.X)[0], 0.0);
    EXPECT_LT((*r.X)[0], 2.0);
    ASSERT_TRUE(r.sigma2);
    EXPECT_GE(*r.sigma2, 0.0); // variance of a positive density
}

TEST(DeriveMeanRisks, HandlesMissingAndZeroMass) {
    AggregateRecord r;
    r.A = 2.0;
    r.XA = std::vector<double>{1.0};
    r.X2A = 1.0;
    derive_mean_risks(r);
    ASSERT_TRUE(r.X);
    EXPECT_DOUBLE_EQ((*r.X)[0], 0.5);
    EXPECT_DOUBLE_EQ(*r.X2, 0.5);
    EXPECT_DOUBLE_EQ(*r.sigma2, 0.25);

    AggregateRecord zero;
    zero.A = 0.0;
    zero.XA = std::vector<double>{1.0};
    derive_mean_risks(zero);
    EXPECT_FALSE(zero.X.has_value());
    EXPECT_FALSE(zero.sigma2.has_value());
}

TEST(ProbabilityView, NormalizesOrRefuses) {
    const RiskGrid g(RiskDomain({1.0}), {16});
    Field f = Field::scalar(g);
    for (std::size_t c = 0; c < g.cell_count(); ++c) f(c) = 1.0 + (c % 3);
    const Field p = probability_view(f);
    EXPECT_NEAR(integrate(p), 1.0, 1e-14);
    // shape preserved
    EXPECT_DOUBLE_EQ(p(4) / p(3), f(4) / f(3));

    Field zero = Field::scalar(g);
    EXPECT_THROW(probability_view(zero), NumericalError);
    zero.fill(-1.0);
    EXPECT_THROW(probability_view(zero), NumericalError);
}

TEST(Series, EnforcesIncreasingTimeAndDetectsUniformity) {
    AggregateSeries s;
    AggregateRecord r;
    r.t = 0.0;
    s.add(r);
    r.t = 0.5;
    s.add(r);
    r.t = 0.5;
    EXPECT_THROW(s.add(r), std::invalid_argument);
    r.t = 1.0;
    s.add(r);
    EXPECT_TRUE(s.uniform_spacing());
    r.t = 2.0;
    s.add(r);
    EXPECT_FALSE(s.uniform_spacing());
    EXPECT_EQ(s.times().size(), 4u);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

TEST(Csv, HeaderLayoutPerDimension) {
    const std::string h1 = csv_header(1);
    EXPECT_EQ(h1.substr(0, 10), "t,A,B,XPA,");
    EXPECT_NE(h1.find(",PA,"), std::string::npos);
    EXPECT_NE(h1.find(",sigma2"), std::string::npos);
    EXPECT_EQ(h1.find("PA_1"), std::string::npos);

    const std::string h2 = csv_header(2);
    EXPECT_NE(h2.find(",PA_1,PA_2,"), std::string::npos);
    EXPECT_NE(h2.find(",X_1,X_2,"), std::string::npos);
    EXPECT_EQ(h2.find(",PA,"), std::string::npos);
}

TEST(Csv, RoundTripsBitExactValues) {
    const RiskGrid g(RiskDomain({1.0}), {32});
    AggregateSeries series;
    for (int i = 0; i < 3; ++i) {
        HydroState s = random_state(g, 100 + static_cast<std::uint64_t>(i));
        s.time = 0.1 * i;
        series.add(measure(s));
    }
    std::ostringstream os;
    write_csv(os, series, 1);
    std::istringstream is(os.str());
    const CsvTable t = read_csv(is);

    EXPECT_EQ(t.columns.front(), "t");
    const std::vector<double>& a = t.column("A");
    const std::vector<double>& sig = t.column("sigma2");
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a[i], *series[i].A) << "shortest round-trip formatting must re-read exactly";
        EXPECT_EQ(sig[i], *series[i].sigma2);
    }
    EXPECT_THROW(t.column("nope"), ConfigError);
}

TEST(Csv, AbsentEntriesStayEmpty) {
    AggregateSeries series;
    AggregateRecord r;
    r.t = 0.0;
    r.A = 1.5; // everything else absent
    series.add(r);
    std::ostringstream os;
    write_csv(os, series, 1);
    const std::string text = os.str();
    // row: t,A then empty cells; find the row and count that B's cell is empty
    const std::size_t row_start = text.find('\n') + 1;
    const std::string row = text.substr(row_start, text.find('\n', row_start) - row_start);
    EXPECT_EQ(row.substr(0, 7), "0,1.5,,");

    std::istringstream is(text);
    const CsvTable t = read_csv(is);
    EXPECT_TRUE(std::isnan(t.column("B")[0]));
    EXPECT_DOUBLE_EQ(t.column("A")[0], 1.5);
}

TEST(Csv, WritingIsByteDeterministic) {
    const RiskGrid g(RiskDomain({1.0, 1.0}), {5, 5});
    AggregateSeries series;
    HydroState s = random_state(g, 9);
    series.add(measure(s));
    std::ostringstream a, b;
    write_csv(a, series, 2);
    write_csv(b, series, 2);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str().find("PA_2"), std::string::npos);
}

TEST(Csv, ReadRejectsMalformedInput) {
    {
        std::istringstream is("");
        EXPECT_THROW(read_csv(is), ConfigError);
    }
    {
        std::istringstream is("t,A\n0,1\n0.5,oops\n");
        try {
            read_csv(is);
            FAIL() << "bad number must throw";
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
            EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos) << e.what();
        }
    }
    {
        std::istringstream is("t,A\n0,1,7\n");
        try {
            read_csv(is);
            FAIL() << "extra cells must throw";
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find("expected 2 cells, got 3"),
                      std::string::npos)
                << e.what();
        }
    }
    {
        std::istringstream is("t,A\n0\n");
        EXPECT_THROW(read_csv(is), ConfigError);
    }
}

TEST(Csv, WriteRejectsWrongArity) {
    AggregateSeries series;
    AggregateRecord r;
    r.t = 0.0;
    r.PA = std::vector<double>{1.0}; // arity 1
    series.add(r);
    std::ostringstream os;
    EXPECT_THROW(write_csv(os, series, 2), std::invalid_argument);
}
