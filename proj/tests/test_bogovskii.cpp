#include <gtest/gtest.h>

#include <cmath>

#include "orlicz/bogovskii.hpp"

using namespace orlicz;

namespace {

double weighted_mean(const GridField& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.grid.node_count(); ++i) s += f.grid.node_weight(i) * f.comp[0][i];
    return s;
}

}  // namespace

TEST(Bogovskii, WeightHasUnitMass) {
    for (int dim : {2, 3}) {
        auto cfg = BogovskiiConfig::for_grid(Grid::cube(dim, 16));
        EXPECT_NEAR(cfg.omega_grid_integral(), 1.0, 1e-6) << dim;
        EXPECT_EQ(cfg.omega({0.95, 0.95, 0.5}), 0.0);
        EXPECT_GT(cfg.omega(cfg.center), 0.0);
    }
}

TEST(Bogovskii, RayIntegralMatchesAdaptiveQuadrature) {
    for (int dim : {2, 3}) {
        auto cfg = BogovskiiConfig::for_grid(Grid::cube(dim, 16));
        std::vector<std::pair<Point, Point>> cases{
            {{0.9, 0.2, 0.5}, {0.4, 0.45, 0.5}},
            {{0.1, 0.1, 0.1}, {0.6, 0.5, 0.55}},
            {{0.5, 0.52, 0.48}, {0.5, 0.5, 0.5}},
            {{0.05, 0.9, 0.3}, {0.95, 0.1, 0.7}},
        };
        for (auto [x, y] : cases) {
            if (dim == 2) x[2] = y[2] = 0.5;
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) d2 += (x[a] - y[a]) * (x[a] - y[a]);
            double d = std::sqrt(d2);
            auto integrand = [&](double r) {
                Point z = y;
                for (int a = 0; a < dim; ++a) z[a] = y[a] + r * (x[a] - y[a]) / d;
                return cfg.omega(z) * std::pow(r, dim - 1);
            };
            // The ball sits inside the unit box, so the ray leaves the support before r = 2.
            double want = adaptive_simpson(integrand, d, 2.0, {1e-12, 1e-15, 60});
            EXPECT_NEAR(bogovskii_ray_integral(cfg, x, y), want, 1e-9 * (1.0 + std::fabs(want))) << dim;
        }
    }
}

TEST(Bogovskii, RejectsNonZeroMean) {
    Grid g = Grid::cube(2, 8);
    auto cfg = BogovskiiConfig::for_grid(g);
    auto f = GridField::from_function(g, 1, [](const Point&) { return Point{1.0, 0.0, 0.0}; });
    EXPECT_THROW(bogovskii_apply(cfg, f), DomainError);
    EXPECT_THROW(bogovskii_spike(g, -1.0), DomainError);
}

TEST(Bogovskii, OperatorIsLinear) {
    Grid g = Grid::cube(2, 16);
    auto cfg = BogovskiiConfig::for_grid(g);
    auto suite = bogovskii_smooth_suite(g);
    ASSERT_EQ(suite.size(), 5u);
    auto a = bogovskii_apply(cfg, suite[0]), b = bogovskii_apply(cfg, suite[1]);
    auto ab = bogovskii_apply(cfg, suite[0].scaled(2.0) + suite[1].scaled(-3.0));
    auto lin = a.scaled(2.0) + b.scaled(-3.0);
    double scale = 0.0, err = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            scale = std::max(scale, std::fabs(lin.comp[c][i]));
            err = std::max(err, std::fabs(lin.comp[c][i] - ab.comp[c][i]));
        }
    EXPECT_LE(err, 1e-12 * scale);
}

TEST(Bogovskii, SmoothSuiteSolvesDivergenceEquation) {
    Grid g = Grid::cube(2, 32);
    auto cfg = BogovskiiConfig::for_grid(g);
    for (const auto& f : bogovskii_smooth_suite(g)) {
        EXPECT_NEAR(weighted_mean(f), 0.0, 1e-12);
        auto bf = bogovskii_apply(cfg, f);
        EXPECT_TRUE(bf.zero_bc);
        EXPECT_LE(bf.boundary_max(), 1e-12);
        EXPECT_LT(divergence_residual(bf, f), 0.05);
    }
}

TEST(Bogovskii, RatioFiniteOnSmoothData) {
    Grid g = Grid::cube(2, 16);
    auto cfg = BogovskiiConfig::for_grid(g);
    auto p2 = YoungFunction::power(2.0);
    auto r = norm_bound_ratio(cfg, p2, p2, bogovskii_smooth_suite(g)[2]);
    EXPECT_TRUE(std::isfinite(r.ratio));
    EXPECT_GT(r.ratio, 0.0);
    EXPECT_NEAR(r.ratio, r.grad_norm / r.f_norm, 1e-12 * r.ratio);
}

TEST(Bogovskii, SpikeHasExactlyZeroMean) {
    Grid g = Grid::cube(2, 32);
    for (double delta : {0.2, 0.1}) {
        auto f = bogovskii_spike(g, delta);
        EXPECT_NEAR(weighted_mean(f), 0.0, 1e-13);
    }
}

TEST(Bogovskii, ZeroDataGivesDegenerateResidual) {
    Grid g = Grid::cube(2, 8);
    auto z = GridField::zeros(g, 1);
    EXPECT_THROW(divergence_residual(GridField::zeros(g, 2), z), DegenerateInput);
}
