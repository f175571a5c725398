#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "orlicz/laminate.hpp"

using namespace orlicz;

TEST(Rational, ArithmeticAndNormalization) {
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(2, -4), Rational(-1, 2));
    EXPECT_EQ(Rational(3, 4) * Rational(2, 3), Rational(1, 2));
    EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    EXPECT_EQ(Rational(-3, 7).abs(), Rational(3, 7));
    EXPECT_EQ(Rational(6, 8).str(), "3/4");
    EXPECT_THROW(Rational(1, 0), ConsistencyError);
}

TEST(Rational, OverflowIsDetected) {
    Rational big(std::numeric_limits<std::int64_t>::max() / 2);
    EXPECT_THROW(big * Rational(4), ConsistencyError);
}

TEST(Matrix, SymSkewAndNorms) {
    Matrix2 g = Matrix2::G(1.0, 3.0);
    EXPECT_TRUE(is_symmetric(g.sym()));
    EXPECT_TRUE(is_skew(g - g.sym()));
    EXPECT_NEAR(frobenius(g), std::sqrt(10.0), 1e-15);
    EXPECT_EQ(entry_l1(RMatrix2::G(Rational(1, 2), Rational(-1, 3))), Rational(5, 6));
}

TEST(Laminate, FirstOrderAtoms) {
    // 1/2 at G(t,t), 1/3 at G(t/2,-t/2), 1/6 at G(-t,t): barycenter G(t/2,t/2).
    Laminate l = canonical(build_laminate(1, 2.0));
    ASSERT_EQ(l.atoms.size(), 3u);
    std::vector<std::pair<Rational, RMatrix2>> want{
        {Rational(1, 2), RMatrix2::G(Rational(1), Rational(1))},
        {Rational(1, 3), RMatrix2::G(Rational(1, 2), Rational(-1, 2))},
        {Rational(1, 6), RMatrix2::G(Rational(-1), Rational(1))},
    };
    for (const auto& [w, x] : want) {
        bool found = false;
        for (const auto& a : l.atoms) found = found || (a.weight == w && a.unit == x);
        EXPECT_TRUE(found) << w.str();
    }
    Matrix2 bar = l.barycenter();
    EXPECT_DOUBLE_EQ(bar.m[0][1], 1.0);
    EXPECT_DOUBLE_EQ(bar.m[1][0], 1.0);
}

TEST(Laminate, ExactIdentitiesUpToOrderTwelve) {
    for (int m = 0; m <= 12; ++m) {
        Laminate l = build_laminate(m, 1.0);
        Rational u(1, std::int64_t{1} << m);
        EXPECT_EQ(l.mass(), Rational(1)) << m;
        EXPECT_EQ(l.barycenter_unit(), RMatrix2::G(u, u)) << m;
        EXPECT_EQ(l.atoms.size(), static_cast<std::size_t>(2 * m + 1)) << m;
        Laminate x = canonical(l), y = canonical(build_laminate_recursive(m, 1.0));
        ASSERT_EQ(x.atoms.size(), y.atoms.size());
        for (std::size_t i = 0; i < x.atoms.size(); ++i) {
            EXPECT_EQ(x.atoms[i].weight, y.atoms[i].weight);
            EXPECT_EQ(x.atoms[i].unit, y.atoms[i].unit);
        }
    }
}

TEST(Laminate, FirstMomentsMatchDirectSum) {
    // Independent double evaluation of sum w |X - avg|_1 from the closed-form atoms.
    for (int m = 1; m <= 12; ++m) {
        double avg = std::ldexp(1.0, -m), full = 0.0, sym = 0.0;
        auto add = [&](double w, double a, double b) {
            full += w * (std::fabs(a - avg) + std::fabs(b - avg));
            double s = 0.5 * (a + b);
            sym += w * 2.0 * std::fabs(s - avg);
        };
        add(std::ldexp(1.0, -m), 1.0, 1.0);
        for (int k = 1; k <= m; ++k) {
            double w = std::ldexp(1.0, k - m);
            add(w / 3.0, std::ldexp(1.0, -k), -std::ldexp(1.0, -k));
            add(w / 6.0, -std::ldexp(1.0, 1 - k), std::ldexp(1.0, 1 - k));
        }
        Laminate l = build_laminate(m, 1.0);
        EXPECT_NEAR(first_moment_exact(l, false).to_double(), full, 1e-14) << m;
        EXPECT_NEAR(first_moment_exact(l, true).to_double(), sym, 1e-14) << m;
    }
}

TEST(Laminate, InvalidOrders) {
    EXPECT_THROW(build_laminate(-1, 1.0), DomainError);
    EXPECT_THROW(build_laminate(2, 0.0), DomainError);
}

TEST(Blowup, L1RatioIncreasesAndL2StaysFlat) {
    auto p1 = YoungFunction::power(1.0), p2 = YoungFunction::power(2.0);
    auto rows = blowup_curve(p1, p1, 8, 1.0);
    ASSERT_EQ(rows.size(), 9u);
    for (int m = 2; m <= 8; ++m) EXPECT_GT(rows[m].ratio, rows[m - 1].ratio);
    for (const auto& r : blowup_curve(p2, p2, 8, 1.0))
        if (r.m > 0) EXPECT_NEAR(r.ratio, 2.0, 0.05);
}

TEST(Blowup, ScaleSolvesMassEquation) {
    // r^2 2^-m A(2 |G(t,t)|) = 1/2 with |G(t,t)| = sqrt2 t.
    auto p2 = YoungFunction::power(2.0);
    for (const auto& row : blowup_curve(p2, p2, 5, 1.5)) {
        double lhs = 1.5 * 1.5 * std::ldexp(1.0, -row.m) * std::pow(2 * std::sqrt(2.0) * row.t_m, 2);
        EXPECT_NEAR(lhs, 0.5, 1e-9) << row.m;
    }
}

TEST(Blowup, OrderZeroIsSingleDefinedRow) {
    auto p1 = YoungFunction::power(1.0);
    auto rows = blowup_curve(p1, p1, 0, 1.0);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].ratio, 1.0);
    EXPECT_THROW(blowup_curve(YoungFunction::indicator(1.0), p1, 3, 1.0), DomainError);
}

TEST(Realization, BoundaryValuesVanish) {
    LaminateRealization real(build_laminate(3, 1.0), 1.0, 8);
    for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        for (auto p : {std::array{s, 0.0}, std::array{s, 1.0}, std::array{0.0, s}, std::array{1.0, s}}) {
            auto v = real.fluctuation(p[0], p[1]);
            EXPECT_NEAR(v[0], 0.0, 1e-12);
            EXPECT_NEAR(v[1], 0.0, 1e-12);
        }
    }
}

TEST(Realization, MomentsConvergeWithDepth) {
    for (int m = 1; m <= 3; ++m) {
        Laminate l = build_laminate(m, 1.0);
        LaminateRealization real(l, 1.0, 64);
        auto phi = [](const Matrix2& x) { return frobenius(x); };
        double exact = moment(l, phi);
        EXPECT_NEAR(real.realized_moment(phi, 1 << 16, 3), exact, 0.05 * exact) << m;
    }
}

TEST(Realization, SampledKornRatioGrowsForL1) {
    auto p1 = YoungFunction::power(1.0);
    double prev = 0.0;
    for (int m = 1; m <= 5; ++m) {
        LaminateRealization real(build_laminate(m, 1.0), 1.0, 16);
        double r = real.korn_ratio(p1, p1, 1 << 14, 1);
        EXPECT_GT(r, prev) << m;
        prev = r;
    }
}

TEST(Realization, GridFieldHasZeroTraces) {
    auto u = realize_field(build_laminate(2, 1.0), 1.0, 4, 32);
    EXPECT_TRUE(u.zero_bc);
    EXPECT_EQ(u.boundary_max(), 0.0);
    EXPECT_EQ(u.grid.dim, 2);
}
