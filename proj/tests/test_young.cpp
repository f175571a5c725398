#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "orlicz/catalog.hpp"
#include "orlicz/young.hpp"

using namespace orlicz;

namespace {

// sup_r (r s - A(r)) by a coarse log scan followed by golden-section refinement.
// Sets *at_edge when the maximizer is at the top of the scan (value is then a lower bound).
double brute_conjugate(const YoungFunction& a, double s, bool* at_edge = nullptr) {
    auto f = [&](double r) {
        double v = a(r);
        return std::isinf(v) ? -kInf : r * s - v;
    };
    double best_r = 0.0, best = 0.0;
    for (double r : log_grid(1e-9, 1e9, 4000))
        if (f(r) > best) best = f(r), best_r = r;
    if (at_edge) *at_edge = best_r >= 1e8;
    if (best_r == 0.0) return 0.0;
    double lo = best_r / 1.02, hi = best_r * 1.02;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
        double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
        if (f(m1) < f(m2)) lo = m1;
        else hi = m2;
    }
    return std::max(best, f(0.5 * (lo + hi)));
}

bool same(double x, double y, double rel) {
    if (std::isinf(x) || std::isinf(y)) return x == y;
    return std::fabs(x - y) <= rel * std::max({std::fabs(x), std::fabs(y), 1e-300});
}

}  // namespace

TEST(Young, PowerEvaluationAndInverse) {
    auto a = YoungFunction::power(3.0, 2.0);
    EXPECT_DOUBLE_EQ(a(2.0), 16.0);
    EXPECT_DOUBLE_EQ(a.density(2.0), 24.0);
    EXPECT_NEAR(a.inverse(16.0), 2.0, 1e-12);
    EXPECT_EQ(a(0.0), 0.0);
}

TEST(Young, PowerConjugateClosedForm) {
    // (t^p)~(s) = (p-1) p^{-q} s^q with q = p/(p-1).
    for (double p : {1.5, 2.0, 3.0}) {
        auto c = conjugate(YoungFunction::power(p));
        double q = p / (p - 1.0);
        for (double s : {0.1, 1.0, 7.0})
            EXPECT_NEAR(c(s), (p - 1.0) * std::pow(p, -q) * std::pow(s, q), 1e-12 * (1 + c(s))) << p;
    }
}

TEST(Young, L1ConjugateIsIndicatorOfUnitInterval) {
    auto c = conjugate(YoungFunction::power(1.0));
    EXPECT_EQ(c(0.5), 0.0);
    EXPECT_EQ(c(1.0), 0.0);
    EXPECT_TRUE(std::isinf(c(1.0001)));
}

TEST(Young, IndicatorConjugateIsLinear) {
    auto c = conjugate(YoungFunction::indicator(2.5));
    EXPECT_DOUBLE_EQ(c(4.0), 10.0);
}

TEST(Young, ConjugateMatchesBruteForceOnCatalog) {
    for (const auto& e : Catalog::builtin().entries()) {
        auto c = conjugate(e.fn);
        for (double s : {0.3, 1.7, 6.0, 40.0}) {
            bool edge = false;
            double want = brute_conjugate(e.fn, s, &edge);
            if (edge)
                EXPECT_GE(c(s), want * (1 - 1e-9)) << e.name << " s=" << s;
            else
                EXPECT_TRUE(same(c(s), want, 1e-6)) << e.name << " s=" << s << " got " << c(s) << " want " << want;
        }
    }
}

TEST(Young, YoungInequalityHoldsOnCatalog) {
    for (const auto& e : Catalog::builtin().entries()) {
        auto c = conjugate(e.fn);
        for (double r : log_grid(1e-3, 1e3, 25))
            for (double s : log_grid(1e-3, 1e3, 25)) {
                double rhs = e.fn(r) + c(s);
                EXPECT_TRUE(ext_le(r * s, rhs, 1e-12)) << e.name << " r=" << r << " s=" << s;
            }
    }
}

TEST(Young, CatalogFunctionsAreConvexAndIncreasing) {
    for (const auto& e : Catalog::builtin().entries()) {
        auto ts = log_grid(1e-4, 1e4, 120);
        for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
            double x = ts[i - 1], y = ts[i + 1], m = 0.5 * (x + y);
            double ax = e.fn(x), ay = e.fn(y), am = e.fn(m);
            EXPECT_TRUE(ext_le(e.fn(x), e.fn(ts[i]))) << e.name;
            EXPECT_TRUE(ext_le(am, 0.5 * (ax + ay), 1e-10)) << e.name << " at " << m;
        }
        EXPECT_EQ(e.fn(0.0), 0.0) << e.name;
    }
}

TEST(Young, InverseSandwichWithConjugate) {
    // t <= A^{-1}(t) A~^{-1}(t) <= 2t.
    for (const auto& e : Catalog::builtin().entries()) {
        auto c = conjugate(e.fn);
        for (double t : log_grid(1e-3, 1e6, 60)) {
            double prod = e.fn.inverse(t) * c.inverse(t);
            EXPECT_GE(prod, t * (1 - 1e-9)) << e.name << " t=" << t;
            EXPECT_LE(prod, 2 * t * (1 + 1e-9)) << e.name << " t=" << t;
        }
    }
}

TEST(Young, DoubleConjugateIsIdentity) {
    for (const auto& e : Catalog::builtin().entries()) {
        auto cc = conjugate(conjugate(e.fn));
        for (double t : log_grid(1e-3, 1e3, 30)) EXPECT_TRUE(same(cc(t), e.fn(t), 1e-9)) << e.name << " t=" << t;
    }
}

TEST(Young, TabulatedRoundTripThroughGridTransform) {
    auto a = Catalog::builtin().get("tab-demo");
    auto back = conjugate(legendre_tabulate(a));
    for (double t : log_grid(1e-3, 1e6, 200)) EXPECT_TRUE(same(back(t), a(t), 1e-3)) << t;
}

TEST(Young, TabulatedValidation) {
    EXPECT_THROW(YoungFunction::tabulated({0.0, 1.0}, {2.0, 1.0}), DomainError);  // slopes must increase
    EXPECT_THROW(YoungFunction::tabulated({0.5, 1.0}, {1.0, 2.0}), DomainError);  // must start at 0
    EXPECT_THROW(YoungFunction::tabulated({0.0, 1.0}, {1.0}), DomainError);       // length mismatch
}

TEST(Young, TabulatedInfiniteSlopeMeansInfiniteValue) {
    auto a = YoungFunction::tabulated({0.0, 1.0}, {1.0, kInf});
    EXPECT_FALSE(a.finite_valued());
    EXPECT_DOUBLE_EQ(a.finite_bound(), 1.0);
    EXPECT_DOUBLE_EQ(a(1.0), 1.0);
    EXPECT_TRUE(std::isinf(a(1.5)));
}

TEST(Young, InvalidParametersAreRejected) {
    EXPECT_THROW(YoungFunction::power(0.5), DomainError);
    EXPECT_THROW(YoungFunction::indicator(0.0), DomainError);
    EXPECT_THROW(YoungFunction::exp_power(-1.0), DomainError);
}

TEST(Young, JsonRoundTrip) {
    for (const auto& e : Catalog::builtin().entries()) {
        auto b = YoungFunction::from_json(e.fn.to_json());
        for (double t : {0.01, 0.7, 3.0, 50.0}) EXPECT_TRUE(same(b(t), e.fn(t), 1e-15)) << e.name;
    }
}

TEST(Young, ScaledCalculus) {
    auto base = YoungFunction::power(2.0);
    auto s = YoungFunction::scaled(4.0, 3.0, base);  // (3t)^2 / 4
    EXPECT_DOUBLE_EQ(s(2.0), 9.0);
    auto c = conjugate(s);
    EXPECT_NEAR(c(1.5), brute_conjugate(s, 1.5), 1e-9);
}

TEST(Young, Delta2AndNabla2OnPowers) {
    auto p2 = YoungFunction::power(2.0), p1 = YoungFunction::power(1.0);
    EXPECT_TRUE(check_delta2(p2, false).holds);
    EXPECT_TRUE(check_nabla2(p2, false).holds);
    EXPECT_TRUE(check_delta2(p1, false).holds);
    EXPECT_FALSE(check_nabla2(p1, false).holds);
    EXPECT_FALSE(check_delta2(YoungFunction::exp_power(1.0), true).holds);
    EXPECT_TRUE(check_nabla2(YoungFunction::exp_power(1.0), true).holds);
    EXPECT_FALSE(check_nabla2(YoungFunction::linear_log(), true).holds);
    EXPECT_TRUE(check_delta2(YoungFunction::linear_log(), true).holds);
}

TEST(Young, Delta2DualToNabla2OnCatalog) {
    for (const auto& e : Catalog::builtin().entries()) {
        auto c = conjugate(e.fn);
        for (bool inf : {false, true}) {
            EXPECT_EQ(check_delta2(e.fn, inf).holds, check_nabla2(c, inf).holds) << e.name << " inf=" << inf;
            EXPECT_EQ(check_nabla2(e.fn, inf).holds, check_delta2(c, inf).holds) << e.name << " inf=" << inf;
        }
    }
}

TEST(Young, IndexOneAtZeroBreaksGlobalNabla2) {
    // exp t - 1 ~ t near 0, so A(2t)/A(t) -> 2.
    auto a = YoungFunction::exp_power(1.0);
    EXPECT_FALSE(check_nabla2(a, false).holds);
    EXPECT_TRUE(check_nabla2(a, true).holds);
}

TEST(Young, DominatesNearInfinity) {
    auto v = dominates(YoungFunction::linear_log(), YoungFunction::power(1.0), true);
    EXPECT_TRUE(v.holds);
    ASSERT_TRUE(v.threshold_t0.has_value());
    double c = v.witness_constant, t0 = *v.threshold_t0;
    for (double t : log_grid(std::max(t0, 1e-3), 1e8, 50))
        EXPECT_LE(t, YoungFunction::linear_log()(c * t) * (1 + 1e-12)) << t;
    EXPECT_FALSE(dominates(YoungFunction::power(1.0), YoungFunction::power(2.0), true).holds);
}

TEST(Young, EquivalenceNearInfinity) {
    auto a = YoungFunction::power_log(1.0, 1.0);
    EXPECT_TRUE(equivalent(a, YoungFunction::linear_log(), true));
    EXPECT_FALSE(equivalent(YoungFunction::power(2.0), YoungFunction::power(3.0), true));
}

TEST(Catalog, UnknownNameListsCatalog) {
    try {
        Catalog::builtin().get("no-such-function");
        FAIL();
    } catch (const UnknownYoungFunction& e) {
        EXPECT_NE(std::string(e.what()).find("L2"), std::string::npos);
    }
}

TEST(Catalog, ResolvesInlineJson) {
    auto a = Catalog::builtin().resolve(R"({"kind": "Power", "params": {"p": 4}})");
    EXPECT_DOUBLE_EQ(a(2.0), 16.0);
    EXPECT_THROW(Catalog::builtin().resolve("{not json"), ConfigurationError);
}
