#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace orlicz {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error taxonomy shared by all modules.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

// Extended-real comparison: inf <= inf is true, nan never compares.
inline bool ext_le(double a, double b, double rel = 0.0) {
    if (std::isinf(b) && b > 0) return true;
    if (std::isinf(a) && a > 0) return false;
    return a <= b + rel * std::fabs(b);
}

// Saturating product for extended reals with 0 * inf = 0.
inline double ext_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

// Deterministic pairwise summation; the reduction tree depends only on size.
double pairwise_sum(std::span<const double> xs);

// Weighted sum w_i * x_i with the same reduction tree.
double pairwise_dot(std::span<const double> w, std::span<const double> x);

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_depth = 48;
};

// Adaptive Simpson on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt = {});

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule with n points (Golub-Welsch free Newton iteration).
const GaussRule& gauss_legendre(int n);

// Log-spaced points lo..hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

// Bisection for the largest x in [lo, hi] with pred(x) true, assuming pred is
// monotone (true then false). Returns lo if pred(lo) is false.
double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi,
                        int iterations = 200);

// Number of worker threads: ORLICZ_KORN_THREADS if set, else hardware concurrency.
unsigned worker_threads();

// Runs body(i) for i in [0, n) split into contiguous chunks across threads.
// Results must be written to per-index slots so the outcome is deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace orlicz
