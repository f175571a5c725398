#pragma once

#include <string>
#include <vector>

#include "orlicz/catalog.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct BalanceOptions {
    std::vector<double> c_grid = default_c_grid();
    std::vector<double> t0_grid{0.0, 1.0, 10.0, 100.0, 1000.0};
    double t_lo = 1e-6;        // lower end of the scan when t0 = 0
    double t_dense = 1e12;     // log-spaced grid up to here
    double t_max = 1e300;      // log-log spaced beyond t_dense
    int points_per_decade = 16;
    double loglog_step = 0.0125;
    double tail_growth_tol = 0.05;
    QuadratureOptions quad{};
    bool global_only = false;  // restrict to t0 = 0

    static std::vector<double> default_c_grid();
};

// (t, LHS(t) / A(c t)) along the scan for the best constant c.
struct DivergencePoint {
    double t;
    double ratio;
};

struct ConditionResult {
    GrowthVerdict verdict;
    double c = 0.0;   // witness or best (least violating) constant
    double t0 = 0.0;  // witness threshold or the threshold used for the diagnostic
    std::vector<DivergencePoint> diagnostic;
};

struct BalanceReport {
    GrowthVerdict cond_1_1;
    GrowthVerdict cond_1_2;
    double witness_c = 0.0;
    double threshold_t0 = 0.0;
    std::vector<DivergencePoint> diagnostic_1_1;
    std::vector<DivergencePoint> diagnostic_1_2;
};

// t * int_{t0}^t B(s)/s^2 ds.
double lhs_integral_1_1(const YoungFunction& b, double t0, double t, const QuadratureOptions& quad = {});

// Cumulative LHS on an increasing grid ts (all >= t0).
std::vector<double> lhs_profile(const YoungFunction& b, double t0, const std::vector<double>& ts,
                                const QuadratureOptions& quad = {});

std::vector<double> balance_grid(double start, const BalanceOptions& opt);

// t * int_{t0}^t B(s)/s^2 ds <= A(c t) searched over (t0, c).
ConditionResult check_condition(const YoungFunction& a, const YoungFunction& b,
                                const BalanceOptions& opt = {});

BalanceReport check_balance(const YoungFunction& a, const YoungFunction& b,
                            const BalanceOptions& opt = {});

struct ClassifiedPair {
    CatalogPair pair;
    BalanceReport report;
    bool matches_expectation = false;
};

std::vector<ClassifiedPair> classify_catalog_pairs(const Catalog& cat = Catalog::builtin(),
                                                   bool include_controls = false,
                                                   const BalanceOptions& opt = {});

}  // namespace orlicz
