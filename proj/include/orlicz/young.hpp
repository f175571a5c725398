#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace orlicz {

enum class YoungKind {
    Power,
    PowerLog,
    PowerLogLog,
    ExpPower,
    ExpLogPower,
    LinearLog,
    Indicator,
    Tabulated,
    Conjugate,
    Scaled,
};

std::string to_string(YoungKind kind);

namespace detail {
class Profile;
}

// Convex Young function A : [0, inf) -> [0, inf] with A(0) = 0.
// Immutable; copies share the underlying representation.
class YoungFunction {
public:
    // c * t^p, p >= 1.
    static YoungFunction power(double p, double coef = 1.0);
    // t^p * log(1+t)^alpha, convexified near 0 when needed.
    static YoungFunction power_log(double p, double alpha);
    // t^p * log(e+t)^alpha * log(e+log(1+t))^gamma.
    static YoungFunction power_log_log(double p, double alpha, double gamma);
    // exp(t^beta) - 1.
    static YoungFunction exp_power(double beta);
    // exp(a*u^beta) - exp(a), u = log(e+t) + shift*(beta-1)*log(log(e+t)).
    static YoungFunction exp_log_power(double a, double beta, double shift = 0.0);
    // t * log(1+t).
    static YoungFunction linear_log();
    // 0 on [0, t1], +inf beyond.
    static YoungFunction indicator(double t1);
    // Piecewise linear: slopes[i] on (breakpoints[i], breakpoints[i+1]], the last
    // slope extends to infinity and may be +inf. breakpoints[0] must be 0.
    static YoungFunction tabulated(std::vector<double> breakpoints, std::vector<double> slopes);
    // A(k t) / m.
    static YoungFunction scaled(double m, double k, const YoungFunction& base);

    static YoungFunction from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    double operator()(double t) const;
    // Left-continuous density a(t); a(0) is the right limit at 0.
    double density(double t) const;
    // Generalized inverse sup{t : A(t) <= r}.
    double inverse(double r) const;
    // Largest r with a(r) <= s (maximizer of r s - A(r)).
    double density_inverse(double s) const;

    YoungKind kind() const;
    bool finite_valued() const;
    // sup{t : A(t) < inf}.
    double finite_bound() const;
    // lim_{t -> inf} a(t).
    double density_limit() const;
    // lim t a(t) / A(t) at infinity and at 0 when known analytically.
    std::optional<double> index_at_infinity() const;
    std::optional<double> index_at_zero() const;

    std::string describe() const;
    // Wrapped function for Conjugate and Scaled kinds.
    const YoungFunction* base() const;
    // Tabulated data (breakpoints, slopes); empty otherwise.
    std::pair<std::vector<double>, std::vector<double>> table() const;
    // Power parameters (p, coef) for Power kind.
    std::pair<double, double> power_params() const;
    // Scaling (m, k) for Scaled kind.
    std::pair<double, double> scale_params() const;
    double indicator_level() const;

    // Wraps an implementation object; used by the factories.
    explicit YoungFunction(std::shared_ptr<const detail::Profile> impl) : impl_(std::move(impl)) {}
    const detail::Profile& impl() const { return *impl_; }

private:
    std::shared_ptr<const detail::Profile> impl_;
};

// Free-function spellings of the core operations.
double evaluate(const YoungFunction& a, double t);
double inverse(const YoungFunction& a, double r);
YoungFunction conjugate(const YoungFunction& a);

// sup_r (r s - A(r)) computed from the maximizer a^{-1}(s).
double legendre_at(const YoungFunction& a, double s);

// Numerical Legendre transform: A is replaced by its piecewise-linear
// interpolant on a log grid of `points` nodes in [lo, hi] (plus r = 0) and the
// exact conjugate of that interpolant is returned as Tabulated.
YoungFunction legendre_tabulate(const YoungFunction& a, std::size_t points = 2048,
                                double lo = 1e-6, double hi = 1e9);

struct GrowthVerdict {
    bool holds = false;
    std::optional<double> threshold_t0;  // empty means global
    double witness_constant = 0.0;
    std::vector<double> failure_certificate;
    std::string note;
};

struct GrowthScanOptions {
    double t_min = 1e-8;
    double t_max = 1e12;
    int points_per_decade = 24;
    std::vector<double> thresholds{1.0, 10.0, 100.0, 1000.0};
};

GrowthVerdict check_delta2(const YoungFunction& a, bool near_infinity,
                           const GrowthScanOptions& opt = {});
GrowthVerdict check_nabla2(const YoungFunction& a, bool near_infinity,
                           const GrowthScanOptions& opt = {});
// B(t) <= A(C t) for t >= t0.
GrowthVerdict dominates(const YoungFunction& a, const YoungFunction& b, bool near_infinity,
                        const GrowthScanOptions& opt = {});
bool equivalent(const YoungFunction& a, const YoungFunction& b, bool near_infinity,
                const GrowthScanOptions& opt = {});

}  // namespace orlicz
