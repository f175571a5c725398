#include "orlicz/bogovskii.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orlicz/numeric.hpp"
#include "orlicz/rearrange.hpp"

namespace orlicz {

BogovskiiConfig BogovskiiConfig::for_grid(const Grid& g) {
    g.validate();
    BogovskiiConfig cfg;
    cfg.grid = g;
    cfg.center = g.center();
    double side = kInf;
    for (int d = 0; d < g.dim; ++d) side = std::min(side, g.cells[d] * g.h[d]);
    cfg.radius = 0.3 * side;
    return cfg;
}

void BogovskiiConfig::validate() const {
    grid.validate();
    if (!(radius > 0.0)) throw ConfigurationError("bogovskii: radius must be positive");
    for (int d = 0; d < grid.dim; ++d) {
        double lo = grid.origin[d], hi = lo + grid.cells[d] * grid.h[d];
        if (center[d] - radius < lo || center[d] + radius > hi)
            throw ConfigurationError("bogovskii: the ball must lie inside the box");
    }
    if (near_radial < 1 || near_angular < 1 || far_order < 1 || close_order < 1)
        throw ConfigurationError("bogovskii: quadrature orders must be positive");
}

double BogovskiiConfig::omega_scale() const {
    // |S^{n-1}| R^n int_0^1 (1 - s^2)^4 s^{n-1} ds
    const int n = grid.dim;
    const GaussRule& r = gauss_legendre(8);
    double in = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        double s = 0.5 * (r.nodes[i] + 1.0);
        in += 0.5 * r.weights[i] * std::pow(1.0 - s * s, 4) * std::pow(s, n - 1);
    }
    double sphere = n * unit_ball_volume(n);
    return 1.0 / (sphere * std::pow(radius, n) * in);
}

double BogovskiiConfig::omega(const Point& z) const {
    double r2 = 0.0;
    for (int d = 0; d < grid.dim; ++d) r2 += (z[d] - center[d]) * (z[d] - center[d]);
    double q = 1.0 - r2 / (radius * radius);
    return q > 0.0 ? omega_scale() * q * q * q * q : 0.0;
}

double BogovskiiConfig::omega_grid_integral() const {
    const GaussRule& r = gauss_legendre(6);
    const int n = grid.dim;
    double c = omega_scale();
    std::vector<double> per_cell(grid.cell_count(), 0.0);
    parallel_for(grid.cell_count(), [&](std::size_t cell) {
        auto cc = grid.cell_coords(cell);
        std::size_t pts = 1;
        for (int d = 0; d < n; ++d) pts *= r.nodes.size();
        double acc = 0.0;
        for (std::size_t p = 0; p < pts; ++p) {
            std::size_t q = p;
            Point z{0.0, 0.0, 0.0};
            double w = 1.0;
            for (int d = 0; d < n; ++d) {
                std::size_t i = q % r.nodes.size();
                q /= r.nodes.size();
                z[d] = grid.origin[d] + (cc[d] + 0.5 + 0.5 * r.nodes[i]) * grid.h[d];
                w *= 0.5 * r.weights[i] * grid.h[d];
            }
            double r2 = 0.0;
            for (int d = 0; d < n; ++d) r2 += (z[d] - center[d]) * (z[d] - center[d]);
            double s = 1.0 - r2 / (radius * radius);
            if (s > 0.0) acc += w * c * s * s * s * s;
        }
        per_cell[cell] = acc;
    });
    return pairwise_sum(per_cell);
}

namespace {

struct Kernel {
    const BogovskiiConfig& cfg;
    int n;
    double scale, r2;
    const GaussRule& rule;

    explicit Kernel(const BogovskiiConfig& c)
        : cfg(c), n(c.grid.dim), scale(c.omega_scale()), r2(c.radius * c.radius), rule(gauss_legendre(6)) {}

    double ray(const Point& x, const Point& y, std::array<double, 3>& xi, double& rho) const {
        double d2 = 0.0;
        for (int d = 0; d < n; ++d) {
            xi[d] = x[d] - y[d];
            d2 += xi[d] * xi[d];
        }
        rho = std::sqrt(d2);
        double beta = 0.0, gamma = 0.0;
        for (int d = 0; d < n; ++d) {
            xi[d] /= rho;
            double yc = y[d] - cfg.center[d];
            beta += xi[d] * yc;
            gamma += yc * yc;
        }
        double disc = beta * beta - gamma + r2;
        if (disc <= 0.0) return 0.0;
        double sq = std::sqrt(disc);
        double hi = -beta + sq, lo = std::max(rho, -beta - sq);
        if (hi <= lo) return 0.0;
        // Polynomial of degree 8 + n - 1 along the ray: 6-point Gauss is exact.
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
            double q = 1.0 - (r * r + 2.0 * beta * r + gamma) / r2;
            if (q <= 0.0) continue;
            double q2 = q * q;
            acc += rule.weights[i] * q2 * q2 * (n == 3 ? r * r : r);
        }
        return 0.5 * (hi - lo) * scale * acc;
    }

    // Adds w f K(x, y) to out.
    void add(const Point& x, const Point& y, double wf, std::array<double, 3>& out) const {
        std::array<double, 3> xi{0.0, 0.0, 0.0};
        double rho;
        double in = ray(x, y, xi, rho);
        if (in == 0.0) return;
        double k = wf * in / (n == 3 ? rho * rho : rho);
        for (int d = 0; d < n; ++d) out[d] += k * xi[d];
    }
};

// Q1 interpolation of a scalar node field inside cell cc.
double q1(const Grid& g, const std::vector<double>& f, const std::array<int, 3>& cc, const Point& y) {
    std::array<double, 3> t{0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim; ++d) t[d] = std::clamp((y[d] - g.origin[d]) / g.h[d] - cc[d], 0.0, 1.0);
    double acc = 0.0;
    for (int corner = 0; corner < (1 << g.dim); ++corner) {
        double w = 1.0;
        std::array<int, 3> p{cc[0], cc[1], cc[2]};
        for (int d = 0; d < g.dim; ++d) {
            int bit = (corner >> d) & 1;
            p[d] += bit;
            w *= bit ? t[d] : 1.0 - t[d];
        }
        if (w != 0.0) acc += w * f[g.node_index(p[0], p[1], g.dim == 3 ? p[2] : 0)];
    }
    return acc;
}

bool cell_is_zero(const Grid& g, const std::vector<double>& f, std::size_t cell) {
    auto cc = g.cell_coords(cell);
    for (int corner = 0; corner < (1 << g.dim); ++corner) {
        std::array<int, 3> p{cc[0] + (corner & 1), cc[1] + ((corner >> 1) & 1), g.dim == 3 ? cc[2] + ((corner >> 2) & 1) : 0};
        if (f[g.node_index(p[0], p[1], p[2])] != 0.0) return false;
    }
    return true;
}

}  // namespace

double bogovskii_ray_integral(const BogovskiiConfig& cfg, const Point& x, const Point& y) {
    Kernel k(cfg);
    std::array<double, 3> xi{};
    double rho;
    return k.ray(x, y, xi, rho);
}

GridField bogovskii_apply(const BogovskiiConfig& cfg, const GridField& f) {
    cfg.validate();
    if (!(f.grid == cfg.grid) || f.components() != 1) throw DomainError("bogovskii: f must be a scalar field on the config grid");
    f.validate();
    const Grid& g = cfg.grid;
    const int n = g.dim;
    std::vector<double> w(g.node_count()), absf(g.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = g.node_weight(i);
        absf[i] = std::fabs(f.comp[0][i]);
    }
    double mean = pairwise_dot(w, f.comp[0]), l1 = pairwise_dot(w, absf);
    if (std::fabs(mean) > 1e-8 * l1) throw DomainError("bogovskii: f must have vanishing mean");

    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        if (!cell_is_zero(g, f.comp[0], c)) active.push_back(c);

    Kernel kernel(cfg);
    const GaussRule& far = gauss_legendre(cfg.far_order);
    const GaussRule& close = gauss_legendre(cfg.close_order);
    const GaussRule& ang = gauss_legendre(cfg.near_angular);
    const GaussRule& rad = gauss_legendre(cfg.near_radial);
    GridField out = GridField::zeros(g, n);

    parallel_for(g.node_count(), [&](std::size_t node) {
        if (g.is_boundary_node(node)) return;  // the kernel vanishes there on convex boxes
        auto xc = g.node_coords(node);
        Point x = g.node_position(node);
        std::array<double, 3> acc{0.0, 0.0, 0.0};
        for (std::size_t cell : active) {
            auto cc = g.cell_coords(cell);
            int cheb = 0;
            bool in_block = true;
            for (int d = 0; d < n; ++d) {
                int off = cc[d] - xc[d];  // block cells have off in {-1, 0}
                int dist = off >= 0 ? off : -off - 1;
                cheb = std::max(cheb, dist);
                if (off < -1 || off > 0) in_block = false;
            }
            if (in_block) continue;
            const GaussRule& r = cheb <= 1 ? close : far;
            std::size_t m = r.nodes.size(), pts = 1;
            for (int d = 0; d < n; ++d) pts *= m;
            for (std::size_t p = 0; p < pts; ++p) {
                std::size_t q = p;
                Point y{0.0, 0.0, 0.0};
                double wt = 1.0;
                for (int d = 0; d < n; ++d) {
                    std::size_t i = q % m;
                    q /= m;
                    y[d] = g.origin[d] + (cc[d] + 0.5 + 0.5 * r.nodes[i]) * g.h[d];
                    wt *= 0.5 * r.weights[i] * g.h[d];
                }
                double fy = q1(g, f.comp[0], cc, y);
                if (fy != 0.0) kernel.add(x, y, wt * fy, acc);
            }
        }
        // Polar block: pyramids with apex x over the 2n faces of [x - h, x + h]^n,
        // y = x + s (sigma h_d e_d + zeta), dy = h_d s^{n-1} ds dzeta.
        for (int d = 0; d < n; ++d)
            for (int sigma = -1; sigma <= 1; sigma += 2) {
                int others[2] = {0, 0}, no = 0;
                for (int e = 0; e < n; ++e)
                    if (e != d) others[no++] = e;
                int halves = 1 << no;
                for (int hv = 0; hv < halves; ++hv) {
                    std::size_t na = ang.nodes.size(), pts = 1;
                    for (int e = 0; e < no; ++e) pts *= na;
                    for (std::size_t p = 0; p < pts; ++p) {
                        std::size_t q = p;
                        std::array<double, 3> dir{0.0, 0.0, 0.0};
                        dir[d] = sigma * g.h[d];
                        double wz = 1.0;
                        for (int e = 0; e < no; ++e) {
                            std::size_t i = q % na;
                            q /= na;
                            int ax = others[e];
                            double sgn = ((hv >> e) & 1) ? 1.0 : -1.0;
                            dir[ax] = sgn * 0.5 * g.h[ax] * (1.0 + ang.nodes[i]);
                            wz *= 0.5 * g.h[ax] * ang.weights[i];
                        }
                        for (std::size_t k = 0; k < rad.nodes.size(); ++k) {
                            double s = 0.5 * (1.0 + rad.nodes[k]);
                            double ws = 0.5 * rad.weights[k];
                            Point y{0.0, 0.0, 0.0};
                            std::array<int, 3> cc{0, 0, 0};
                            for (int e = 0; e < n; ++e) {
                                y[e] = x[e] + s * dir[e];
                                cc[e] = dir[e] > 0.0 ? xc[e] : xc[e] - 1;
                            }
                            double fy = q1(g, f.comp[0], cc, y);
                            if (fy == 0.0) continue;
                            double jac = g.h[d] * std::pow(s, n - 1);
                            kernel.add(x, y, ws * wz * jac * fy, acc);
                        }
                    }
                }
            }
        for (int d = 0; d < n; ++d) out.comp[d][node] = acc[d];
    });
    out.zero_bc = out.boundary_max() == 0.0;
    return out;
}

SampledFunction divergence_residual_field(const GridField& bf, const GridField& f) {
    if (!(bf.grid == f.grid)) throw DomainError("divergence_residual: grid mismatch");
    TensorField grad = gradient(bf);
    SampledFunction r = cell_values(f);
    for (std::size_t c = 0; c < r.size(); ++c) {
        double div = 0.0;
        for (int d = 0; d < grad.n; ++d) div += grad.at(c, d, d);
        r.values[c] = div - r.values[c];
    }
    return r;
}

double divergence_residual(const GridField& bf, const GridField& f) {
    SampledFunction fc = cell_values(f);
    SampledFunction r = divergence_residual_field(bf, f);
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < fc.size(); ++c) {
        num = std::max(num, std::fabs(r.values[c]));
        den = std::max(den, std::fabs(fc.values[c]));
    }
    if (den == 0.0) throw DegenerateInput("divergence_residual: f vanishes");
    return num / den;
}

BogovskiiRatio norm_bound_ratio(const YoungFunction& a, const YoungFunction& b, const GridField& bf,
                                const GridField& f) {
    BogovskiiRatio r;
    r.grad_norm = luxemburg(b, gradient(bf).pointwise_norm()).value;
    r.f_norm = luxemburg(a, cell_values(f)).value;
    if (r.f_norm == 0.0) throw DegenerateInput("norm_bound_ratio: f vanishes");
    r.ratio = r.grad_norm / r.f_norm;
    return r;
}

BogovskiiRatio norm_bound_ratio(const BogovskiiConfig& cfg, const YoungFunction& a, const YoungFunction& b,
                                const GridField& f) {
    return norm_bound_ratio(a, b, bogovskii_apply(cfg, f), f);
}

std::vector<GridField> bogovskii_smooth_suite(const Grid& g) {
    using std::numbers::pi;
    std::vector<std::function<double(const Point&)>> fns{
        [](const Point& y) { return std::cos(pi * y[0]); },
        [](const Point& y) { return std::cos(pi * y[0]) * std::cos(2 * pi * y[1]); },
        [](const Point& y) { return std::sin(2 * pi * y[0]) * std::sin(2 * pi * y[1]) + 0.5 * std::cos(pi * y[1]); },
        [](const Point& y) { return (y[0] - 0.5) * (y[1] - 0.5) * 8.0 + std::sin(pi * y[0]); },
        [](const Point& y) { return std::exp(y[0] + 0.5 * y[1]); },
    };
    // Compact support in [0.1, 0.9]^n; the constant c makes the mean vanish.
    auto cutoff = [&](const Point& y) {
        double b = 1.0;
        for (int d = 0; d < g.dim; ++d) {
            double s = (y[d] - 0.1) * (0.9 - y[d]) / 0.16;
            b *= s > 0.0 ? s * s * s : 0.0;
        }
        return b;
    };
    auto unit = [&](const Point& x) {
        Point y{0.0, 0.0, 0.0};
        for (int d = 0; d < g.dim; ++d) y[d] = (x[d] - g.origin[d]) / (g.cells[d] * g.h[d]);
        return y;
    };
    std::vector<double> w(g.node_count()), bump(g.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = g.node_weight(i);
        bump[i] = cutoff(unit(g.node_position(i)));
    }
    double mass = pairwise_dot(w, bump);
    if (!(mass > 0.0)) throw DomainError("bogovskii_smooth_suite: grid too coarse");
    std::vector<GridField> out;
    for (auto& fn : fns) {
        GridField f = GridField::zeros(g, 1);
        std::vector<double> prod(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            f.comp[0][i] = fn(unit(g.node_position(i)));
            prod[i] = f.comp[0][i] * bump[i];
        }
        double c = pairwise_dot(w, prod) / mass;
        for (std::size_t i = 0; i < w.size(); ++i) f.comp[0][i] = (f.comp[0][i] - c) * bump[i];
        out.push_back(std::move(f));
    }
    return out;
}

GridField bogovskii_spike(const Grid& g, double delta) {
    g.validate();
    if (!(delta > 0.0)) throw DomainError("bogovskii_spike: delta must be positive");
    std::array<int, 3> p{0, 0, 0}, q{0, 0, 0};
    for (int d = 0; d < g.dim; ++d) p[d] = q[d] = g.cells[d] / 2;
    p[0] = static_cast<int>(std::lround(0.3 * g.cells[0]));
    q[0] = g.cells[0] - p[0];
    for (int d = 0; d < g.dim; ++d)
        if (p[d] * g.h[d] < delta || (g.cells[d] - q[d]) * g.h[d] < delta)
            throw DomainError("bogovskii_spike: bumps must stay inside the box");
    auto bump = [&](const std::array<int, 3>& c, std::size_t node) {
        auto nc = g.node_coords(node);
        double r2 = 0.0;
        for (int d = 0; d < g.dim; ++d) {
            double dx = (nc[d] - c[d]) * g.h[d];
            r2 += dx * dx;
        }
        double s = 1.0 - r2 / (delta * delta);
        return s > 0.0 ? s * s * s * s : 0.0;
    };
    GridField f = GridField::zeros(g, 1);
    std::vector<double> w(g.node_count()), bp(g.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = g.node_weight(i);
        bp[i] = bump(p, i);
    }
    double mass = pairwise_dot(w, bp);
    if (!(mass > 0.0)) throw DomainError("bogovskii_spike: delta below the grid resolution");
    for (std::size_t i = 0; i < w.size(); ++i) f.comp[0][i] = (bp[i] - bump(q, i)) / mass;
    return f;
}

}  // namespace orlicz
