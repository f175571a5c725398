#include "orlicz/balance.hpp"

#include <algorithm>
#include <cmath>

namespace orlicz {

std::vector<double> BalanceOptions::default_c_grid() {
    std::vector<double> g;
    for (int k = -10; k <= 10; ++k) g.push_back(std::ldexp(1.0, k));
    return g;
}

namespace {

bool is_power(const YoungFunction& b) { return b.kind() == YoungKind::Power; }

// int_{t0}^{t} c s^{p-2} ds.
double power_integral(const YoungFunction& b, double t0, double t) {
    auto [p, c] = b.power_params();
    if (t == t0) return 0.0;
    if (p == 1.0) return t0 == 0.0 ? kInf : c * std::log(t / t0);
    return c * (std::pow(t, p - 1.0) - std::pow(t0, p - 1.0)) / (p - 1.0);
}

// int_{a}^{b} B(s)/s^2 ds in the variable x = log s.
double piece(const YoungFunction& b, double lo, double hi, const QuadratureOptions& quad) {
    if (hi <= lo) return 0.0;
    if (b(hi) == kInf) return kInf;
    auto f = [&](double x) {
        double s = std::exp(x);
        return b(s) / s;
    };
    return adaptive_simpson(f, std::log(lo), std::log(hi), quad);
}

// int_0^{s} B(r)/r^2 dr from the power-law behaviour at 0.
double near_zero(const YoungFunction& b, double s) {
    double bs = b(s);
    if (bs == 0.0) return 0.0;
    std::optional<double> q = b.index_at_zero();
    if (!q) {
        double b2 = b(0.5 * s);
        q = b2 > 0.0 ? std::log(bs / b2) / std::log(2.0) : kInf;
    }
    if (*q <= 1.0) return kInf;
    if (std::isinf(*q)) return 0.0;
    return bs / (s * (*q - 1.0));
}

double ratio(double lhs, double rhs) {
    if (lhs == 0.0) return 0.0;
    if (std::isinf(rhs)) return 0.0;
    if (std::isinf(lhs)) return kInf;
    if (rhs == 0.0) return kInf;
    return lhs / rhs;
}

}  // namespace

std::vector<double> lhs_profile(const YoungFunction& b, double t0, const std::vector<double>& ts,
                                const QuadratureOptions& quad) {
    std::vector<double> out(ts.size());
    if (is_power(b)) {
        for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[i] * power_integral(b, t0, ts[i]);
        return out;
    }
    double acc = 0.0;
    double prev = t0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double t = ts[i];
        if (t < prev) throw DomainError("lhs_profile: grid must be increasing and >= t0");
        if (std::isfinite(acc)) {
            if (prev == 0.0) {
                acc = near_zero(b, t);
            } else {
                acc += piece(b, prev, t, quad);
            }
        }
        prev = t;
        out[i] = acc == 0.0 ? 0.0 : ext_mul(t, acc);
    }
    return out;
}

double lhs_integral_1_1(const YoungFunction& b, double t0, double t, const QuadratureOptions& quad) {
    if (t0 < 0.0 || t < t0) throw DomainError("lhs_integral_1_1 requires 0 <= t0 <= t");
    if (t == t0) return 0.0;
    if (is_power(b)) return t * power_integral(b, t0, t);
    double acc;
    if (t0 == 0.0) {
        // Exact near-zero extrapolation below a small cut, quadrature above it.
        double cut = std::min(t, 1e-6);
        acc = near_zero(b, cut);
        if (std::isfinite(acc)) acc += piece(b, cut, t, quad);
    } else {
        acc = piece(b, t0, t, quad);
    }
    return acc == 0.0 ? 0.0 : ext_mul(t, acc);
}

std::vector<double> balance_grid(double start, const BalanceOptions& opt) {
    // Log-spaced up to opt.t_dense, then uniform in log(log t) up to opt.t_max.
    std::vector<double> ts;
    double dense_end = std::max(start, std::min(opt.t_dense, opt.t_max));
    double decades = std::log10(dense_end / start);
    std::size_t n = static_cast<std::size_t>(std::ceil(decades * opt.points_per_decade)) * 2 + 1;
    if (dense_end > start) ts = log_grid(start, dense_end, n);
    else ts = {start};
    if (opt.t_max > dense_end) {
        double v0 = std::log(std::log(dense_end)), v1 = std::log(std::log(opt.t_max));
        std::size_t m = static_cast<std::size_t>(std::ceil((v1 - v0) / opt.loglog_step));
        if (m % 2 == 1) ++m;
        for (std::size_t k = 1; k <= m; ++k) {
            double v = v0 + (v1 - v0) * static_cast<double>(k) / static_cast<double>(m);
            ts.push_back(std::exp(std::exp(v)));
        }
        ts.back() = opt.t_max;
    }
    return ts;
}

ConditionResult check_condition(const YoungFunction& a, const YoungFunction& b, const BalanceOptions& opt) {
    ConditionResult res;
    const double tol = 1.0 + 1e-7;
    double best_score = kInf;
    std::vector<double> best_ts, best_rho;
    std::vector<double> t0s = opt.global_only ? std::vector<double>{0.0} : opt.t0_grid;
    for (double t0 : t0s) {
        double start = t0 == 0.0 ? opt.t_lo : t0;
        auto ts = balance_grid(start, opt);
        std::size_t n = ts.size();
        auto lhs = lhs_profile(b, t0, ts, opt.quad);
        for (double c : opt.c_grid) {
            std::vector<double> rho(n);
            double max_fine = 0.0, max_coarse = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                rho[i] = ratio(lhs[i], a(c * ts[i]));
                max_fine = std::max(max_fine, rho[i]);
                if (i % 2 == 0) max_coarse = std::max(max_coarse, rho[i]);
            }
            // Tail test on the range where both sides are finite and positive,
            // comparing the windows log(t/t_ref) in [U/2, U] and [U/4, U/2).
            std::size_t lo_i = n, hi_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (rho[i] > 0.0 && std::isfinite(rho[i])) {
                    lo_i = std::min(lo_i, i);
                    hi_i = i;
                }
            }
            bool tail_ok = true;
            double tail_growth = 1.0;
            if (lo_i < hi_i) {
                double t_ref = std::max(ts[lo_i], 1.0);
                double u_max = std::log(ts[hi_i] / t_ref);
                double last = 0.0, prevw = 0.0;
                if (u_max > 2.0) {
                    for (std::size_t i = lo_i; i <= hi_i; ++i) {
                        if (!(rho[i] > 0.0) || !std::isfinite(rho[i])) continue;
                        double u = std::log(ts[i] / t_ref);
                        if (u >= 0.5 * u_max) last = std::max(last, rho[i]);
                        else if (u >= 0.25 * u_max) prevw = std::max(prevw, rho[i]);
                    }
                }
                if (prevw > 0.0) {
                    tail_growth = last / prevw;
                    tail_ok = last <= (1.0 + opt.tail_growth_tol) * prevw;
                }
            }
    bool drift_ok = max_fine == 0.0 || std::fabs(max_fine - max_coarse) <= 0.05 * max_fine;
            bool ok = max_fine <= tol && tail_ok && drift_ok;
            if (ok) {
                res.verdict.holds = true;
                res.verdict.witness_constant = c;
                res.verdict.threshold_t0 = t0;
                res.verdict.note = "max LHS/A(ct) = " + std::to_string(max_fine);
                res.c = c;
                res.t0 = t0;
                return res;
            }
            // Keep the least violating constant for the diagnostic.
            double score = std::isfinite(max_fine) ? max_fine * tail_growth : kInf;
            if (best_ts.empty() || score < best_score) {
                best_score = score;
                best_ts = ts;
                best_rho = rho;
                res.c = c;
                res.t0 = t0;
            }
        }
    }
    res.verdict.holds = false;
    res.verdict.witness_constant = res.c;
    res.verdict.threshold_t0 = res.t0;
    res.verdict.note = "no (c, t0) on the search grid certifies the bound";
    // Diagnostic: ratio at increasing t (one point per ~2 decades) for the best c.
    std::size_t stride = std::max<std::size_t>(1, best_ts.size() / 16);
    for (std::size_t i = 0; i < best_ts.size(); i += stride) {
        res.diagnostic.push_back({best_ts[i], best_rho[i]});
    }
    if (!best_ts.empty() && res.diagnostic.back().t != best_ts.back())
        res.diagnostic.push_back({best_ts.back(), best_rho.back()});
    for (std::size_t i = 0; i < best_ts.size(); ++i) {
        if (best_rho[i] > tol) res.verdict.failure_certificate.push_back(best_ts[i]);
    }
    if (res.verdict.failure_certificate.empty()) {
        // Bounded on the scan but still growing at its end: report the growth points.
        double rec = 0.0;
        for (std::size_t i = 0; i < best_ts.size(); ++i) {
            if (std::isfinite(best_rho[i]) && best_rho[i] > rec) {
                rec = best_rho[i];
                res.verdict.failure_certificate.push_back(best_ts[i]);
            }
        }
        res.verdict.note += "; ratio still increasing at the end of the scan";
    }
    if (res.verdict.failure_certificate.size() > 12) {
        auto& fc = res.verdict.failure_certificate;
        fc.erase(fc.begin(), fc.end() - 12);
    }
    return res;
}

BalanceReport check_balance(const YoungFunction& a, const YoungFunction& b, const BalanceOptions& opt) {
    BalanceReport rep;
    auto r11 = check_condition(a, b, opt);
    auto r12 = check_condition(conjugate(b), conjugate(a), opt);
    rep.cond_1_1 = r11.verdict;
    rep.cond_1_2 = r12.verdict;
    rep.diagnostic_1_1 = r11.diagnostic;
    rep.diagnostic_1_2 = r12.diagnostic;
    if (r11.verdict.holds && r12.verdict.holds) {
        rep.witness_c = std::max(r11.c, r12.c);
        rep.threshold_t0 = std::max(r11.t0, r12.t0);
    } else if (r11.verdict.holds) {
        rep.witness_c = r11.c;
        rep.threshold_t0 = r11.t0;
    } else if (r12.verdict.holds) {
        rep.witness_c = r12.c;
        rep.threshold_t0 = r12.t0;
    } else {
        rep.witness_c = r11.c;
        rep.threshold_t0 = r11.t0;
    }
    return rep;
}

std::vector<ClassifiedPair> classify_catalog_pairs(const Catalog& cat, bool include_controls,
                                                   const BalanceOptions& opt) {
    std::vector<CatalogPair> pairs = cat.examples();
    if (include_controls) pairs.insert(pairs.end(), cat.controls().begin(), cat.controls().end());
    std::vector<ClassifiedPair> out(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        out[i].pair = pairs[i];
        out[i].report = check_balance(cat.get(pairs[i].a), cat.get(pairs[i].b), opt);
        out[i].matches_expectation = out[i].report.cond_1_1.holds == pairs[i].expect_11 &&
                                     out[i].report.cond_1_2.holds == pairs[i].expect_12;
    });
    return out;
}

}  // namespace orlicz
