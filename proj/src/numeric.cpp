#include "orlicz/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace orlicz {

namespace {

double pairwise_block(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_block(x, half) + pairwise_block(x + half, n - half);
}

double pairwise_dot_block(const double* w, const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += ext_mul(w[i], x[i]);
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_dot_block(w, x, half) + pairwise_dot_block(w + half, x + half, n - half);
}

double simpson_step(const std::function<double(double)>& f, double a, double fa, double m,
                    double fm, double b, double fb, double whole, double eps, int depth,
                    double abs_tol) {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double total = left + right;
    if (!std::isfinite(total)) return total;
    double err = total - whole;
    if (depth <= 0 || std::fabs(err) <= 15.0 * std::max(eps * std::fabs(total), abs_tol)) {
        return total + err / 15.0;
    }
    return simpson_step(f, a, fa, lm, flm, m, fm, left, eps, depth - 1, abs_tol * 0.5) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, eps, depth - 1, abs_tol * 0.5);
}

GaussRule make_gauss(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise_block(xs.data(), xs.size()); }

double pairwise_dot(std::span<const double> w, std::span<const double> x) {
    if (w.size() != x.size()) throw DomainError("pairwise_dot: length mismatch");
    return pairwise_dot_block(w.data(), x.data(), w.size());
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b);
    double m = 0.5 * (a + b);
    double fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    if (!std::isfinite(whole)) return whole;
    return simpson_step(f, a, fa, m, fm, b, fb, whole, opt.rel_tol, opt.max_depth, opt.abs_tol);
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    auto it = cache.find(n);
    if (it == cache.end()) {
        GaussRule rule = n == 1 ? GaussRule{{0.0}, {2.0}} : make_gauss(n);
        it = cache.emplace(n, std::move(rule)).first;
    }
    return it->second;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi,
                        int iterations) {
    if (!pred(lo)) return lo;
    if (pred(hi)) return hi;
    for (int i = 0; i < iterations; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid)) lo = mid;
        else hi = mid;
    }
    return lo;
}

unsigned worker_threads() {
    if (const char* env = std::getenv("ORLICZ_KORN_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned threads = std::min<std::size_t>(worker_threads(), std::max<std::size_t>(n, 1));
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t begin = t * chunk, end = std::min(n, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace orlicz
