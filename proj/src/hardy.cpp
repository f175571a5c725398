#include "orlicz/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "orlicz/balance.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

SampledFunction step_function(const std::vector<double>& breakpoints, const std::vector<double>& values) {
    if (breakpoints.size() != values.size() + 1 || breakpoints.front() != 0.0)
        throw DomainError("step_function: need values.size()+1 breakpoints starting at 0");
    SampledFunction f;
    f.values = values;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        double w = breakpoints[i + 1] - breakpoints[i];
        if (!(w > 0.0)) throw DomainError("step_function: breakpoints must increase");
        f.weights.push_back(w);
    }
    return f;
}

std::vector<double> cell_edges(const SampledFunction& f) {
    std::vector<double> e(f.size() + 1, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) e[i + 1] = e[i] + f.weights[i];
    return e;
}

std::vector<double> hardy_breakpoints(double L, double lo, int cells_per_decade, int head) {
    if (!(L > 0.0) || !(lo > 0.0 && lo < 1.0) || cells_per_decade < 1 || head < 1)
        throw DomainError("hardy_breakpoints: bad parameters");
    std::vector<double> bp{0.0};
    double first = L * lo;
    for (int i = 1; i < head; ++i) bp.push_back(first * i / head);
    int n = static_cast<int>(std::ceil(-std::log10(lo) * cells_per_decade - 1e-9));
    for (int i = 0; i < n; ++i) bp.push_back(first * std::pow(10.0, static_cast<double>(i) / cells_per_decade));
    bp.push_back(L);
    return bp;
}

SampledFunction averaging_operator(const SampledFunction& f) {
    f.validate();
    SampledFunction out = f;
    double left = 0.0, prefix = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double half = 0.5 * f.weights[i];
        double mid = left + half;
        out.values[i] = (prefix + f.values[i] * half) / mid;
        prefix += f.weights[i] * f.values[i];
        left += f.weights[i];
    }
    return out;
}

SampledFunction dual_operator(const SampledFunction& f) {
    f.validate();
    std::vector<double> e = cell_edges(f);
    SampledFunction out = f;
    double suffix = 0.0;
    for (std::size_t k = f.size(); k-- > 0;) {
        double mid = 0.5 * (e[k] + e[k + 1]);
        out.values[k] = f.values[k] * std::log(e[k + 1] / mid) + suffix;
        if (e[k] > 0.0) suffix += f.values[k] * std::log(e[k + 1] / e[k]);
    }
    return out;
}

HardyTrial evaluate_trial(const YoungFunction& a, const YoungFunction& b, std::string label,
                          SampledFunction f, double L) {
    HardyTrial t;
    t.label = std::move(label);
    t.L = L;
    double nf = luxemburg(a, f).value;
    if (nf > 0.0 && std::isfinite(nf)) {
        t.ratio_avg = luxemburg(b, averaging_operator(f)).value / nf;
        t.ratio_dual = luxemburg(b, dual_operator(f)).value / nf;
    }
    t.f = std::move(f);
    return t;
}

namespace {

using CellAverage = std::function<double(double, double)>;

struct Shape {
    std::string label;
    CellAverage avg;
};

SampledFunction sample(const Shape& s, const std::vector<double>& bp) {
    std::vector<double> v(bp.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) v[i] = s.avg(bp[i], bp[i + 1]);
    return step_function(bp, v);
}

double gauss_average(const std::function<double(double)>& g, double a, double b) {
    const GaussRule& r = gauss_legendre(16);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * g(0.5 * (a + b) + 0.5 * (b - a) * r.nodes[i]);
    return 0.5 * acc;
}

// Height t on (0, delta).
Shape plateau(std::string label, double t, double delta) {
    return {std::move(label), [t, delta](double a, double b) {
                double overlap = std::max(0.0, std::min(b, delta) - a);
                return t * overlap / (b - a);
            }};
}

std::vector<Shape> family_shapes(const YoungFunction& a, const YoungFunction& b, double L,
                                 int random_trials, const HardyOptions& opt, bool& balance_holds) {
    std::vector<Shape> shapes;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double decades = -std::log10(opt.resolution);
    // Random steps on quarter-decade blocks, so every resolution with a multiple
    // of 4 cells per decade sees the same function.
    int blocks = static_cast<int>(std::round(decades * 4));
    for (int k = 0; k < random_trials; ++k) {
        double sigma = 0.5 + 2.5 * uni(rng);
        int keep = 1 + static_cast<int>(uni(rng) * blocks);
        std::normal_distribution<double> nd(0.0, sigma);
        std::vector<double> vals(blocks + 1);
        for (double& v : vals) v = std::exp(nd(rng));
        for (int j = keep; j <= blocks; ++j) vals[j] = 0.0;
        double first = L * opt.resolution;
        shapes.push_back({"random-" + std::to_string(k), [vals, first, blocks](double lo, double hi) {
                              double mid = 0.5 * (lo + hi);
                              if (mid <= first) return vals[0];
                              int j = 1 + static_cast<int>(std::floor(std::log10(mid / first) * 4));
                              return vals[std::clamp(j, 1, blocks)];
                          }});
    }
    for (int k = 1; k <= 16; ++k) {
        double theta = k / 17.0;
        shapes.push_back({"power-" + std::to_string(k), [theta](double lo, double hi) {
                              double e = 1.0 - theta;
                              return (std::pow(hi, e) - std::pow(lo, e)) / (e * (hi - lo));
                          }});
    }
    for (int j = 1; j <= 8; ++j) {
        double q = 0.5 * j;
        shapes.push_back({"log-" + std::to_string(j), [q, L](double lo, double hi) {
                              return gauss_average([&](double s) { return std::pow(std::log(std::exp(1.0) * L / s), q); },
                                                   lo, hi);
                          }});
    }
    BalanceReport rep = check_balance(a, b);
    balance_holds = rep.cond_1_1.holds && rep.cond_1_2.holds;
    if (!balance_holds) {
        // Plateaus of unit modular at the heights where the balance ratio is worst.
        std::vector<DivergencePoint> pts = rep.diagnostic_1_1;
        pts.insert(pts.end(), rep.diagnostic_1_2.begin(), rep.diagnostic_1_2.end());
        std::sort(pts.begin(), pts.end(), [](auto& x, auto& y) { return x.ratio > y.ratio; });
        int added = 0;
        for (const auto& p : pts) {
            if (added == 8) break;
            double at = a(p.t);
            if (!(at > 0.0) || !std::isfinite(at)) continue;
            double delta = 1.0 / at;
            if (delta < L * opt.resolution || delta > L) continue;
            shapes.push_back(plateau("certificate-" + std::to_string(added), p.t, delta));
            ++added;
        }
    }
    return shapes;
}

std::vector<HardyTrial> run_shapes(const YoungFunction& a, const YoungFunction& b, double L,
                                   const std::vector<Shape>& shapes, const std::vector<double>& bp) {
    std::vector<HardyTrial> out(shapes.size());
    parallel_for(shapes.size(), [&](std::size_t i) {
        out[i] = evaluate_trial(a, b, shapes[i].label, sample(shapes[i], bp), L);
    });
    return out;
}

std::pair<double, double> worst(const std::vector<HardyTrial>& ts) {
    double wa = 0.0, wd = 0.0;
    for (const auto& t : ts) {
        wa = std::max(wa, t.ratio_avg);
        wd = std::max(wd, t.ratio_dual);
    }
    return {wa, wd};
}

}  // namespace

std::vector<std::pair<std::string, SampledFunction>> hardy_trial_family(
    const YoungFunction& a, const YoungFunction& b, double L, int random_trials, const HardyOptions& opt) {
    bool holds = false;
    auto shapes = family_shapes(a, b, L, random_trials, opt, holds);
    auto bp = hardy_breakpoints(L, opt.resolution, opt.cells_per_decade);
    std::vector<std::pair<std::string, SampledFunction>> out;
    for (const auto& s : shapes) out.emplace_back(s.label, sample(s, bp));
    return out;
}

HardyReport verify_hardy(const YoungFunction& a, const YoungFunction& b, double L, int trials,
                         const HardyOptions& opt) {
    if (trials < 1) throw DomainError("verify_hardy: trials must be >= 1");
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("verify_hardy: L must be positive");
    if (opt.cells_per_decade % 4 != 0) throw DomainError("verify_hardy: cells_per_decade must be a multiple of 4");
    HardyReport rep;
    auto shapes = family_shapes(a, b, L, trials, opt, rep.balance_holds);
    rep.trials = run_shapes(a, b, L, shapes, hardy_breakpoints(L, opt.resolution, opt.cells_per_decade));
    auto fine = run_shapes(a, b, L, shapes, hardy_breakpoints(L, opt.resolution, 2 * opt.cells_per_decade, 8));
    rep.worst_avg = *std::max_element(rep.trials.begin(), rep.trials.end(),
                                      [](auto& x, auto& y) { return x.ratio_avg < y.ratio_avg; });
    rep.worst_dual = *std::max_element(rep.trials.begin(), rep.trials.end(),
                                       [](auto& x, auto& y) { return x.ratio_dual < y.ratio_dual; });
    auto [ca, cd] = worst(rep.trials);
    auto [fa, fd] = worst(fine);
    rep.refinement_drift = std::max(ca > 0 ? std::fabs(fa / ca - 1.0) : 0.0, cd > 0 ? std::fabs(fd / cd - 1.0) : 0.0);

    auto bp = hardy_breakpoints(L, std::min(opt.resolution, 1e-2 * *std::min_element(opt.spike_deltas.begin(), opt.spike_deltas.end())),
                                opt.cells_per_decade);
    for (double d : opt.spike_deltas) {
        double delta = d * L;
        HardyTrial t = evaluate_trial(a, b, "spike", sample(plateau("spike", 1.0 / delta, delta), bp), L);
        rep.sweep.push_back({d, t.ratio_avg, t.ratio_dual});
    }
    if (rep.sweep.size() >= 2 && rep.sweep.front().ratio_avg > 0.0)
        rep.sweep_growth = rep.sweep.back().ratio_avg / rep.sweep.front().ratio_avg;
    return rep;
}

ReductionCheck rearrangement_reduction_check(const YoungFunction& a, const YoungFunction& b,
                                             const SampledFunction& psi, int levels, double tol) {
    psi.validate();
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (psi.values[i] < 0.0) throw DomainError("rearrangement_reduction_check: psi must be non-negative");
        if (i > 0 && psi.values[i] > psi.values[i - 1])
            throw DomainError("rearrangement_reduction_check: psi must be non-increasing");
    }
    if (levels < 2) throw DomainError("rearrangement_reduction_check: need at least 2 levels");
    ReductionCheck out;
    BalanceReport rep = check_balance(a, b);
    out.balance_holds = rep.cond_1_1.holds && rep.cond_1_2.holds;
    std::vector<double> e = cell_edges(psi);
    double L = e.back();
    out.ratios.resize(levels + 1);
    parallel_for(out.ratios.size(), [&](std::size_t k) {
        double scale = std::ldexp(1.0, -static_cast<int>(k));
        std::vector<double> bp, vals;
        for (double x : e) bp.push_back(x * scale);
        for (double v : psi.values) vals.push_back(v / scale);
        if (k > 0) {
            // Zero tail on (L 2^-k, L), 16 cells per decade.
            double top = bp.back();
            int n = static_cast<int>(std::ceil(std::log10(L / top) * 16));
            for (int i = 1; i <= n; ++i) {
                bp.push_back(i == n ? L : top * std::pow(10.0, i / 16.0));
                vals.push_back(0.0);
            }
        }
        SampledFunction f = step_function(bp, vals);
        double nf = luxemburg(a, f).value;
        SampledFunction g = averaging_operator(f), h = dual_operator(f);
        for (std::size_t i = 0; i < g.size(); ++i) g.values[i] += h.values[i];
        out.ratios[k] = nf > 0.0 ? luxemburg(b, g).value / nf : 0.0;
    });
    // Unbounded ratios keep rising by a fixed amount per dilation (log growth);
    // bounded ones flatten, so the second-half rise is compared with the first.
    double first = out.ratios.front(), mid = out.ratios[levels / 2], last = out.ratios.back();
    double rise1 = mid - first, rise2 = last - mid;
    out.growth = rise1 > 0.0 ? rise2 / rise1 : (rise2 > 0.0 ? kInf : 0.0);
    out.holds = std::isfinite(last) && rise2 <= tol * std::max(rise1, 0.0) + 1e-3 * std::fabs(mid);
    return out;
}

}  // namespace orlicz
