#include "orlicz/fields.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace orlicz {

// ---------------------------------------------------------------- Grid

Grid Grid::cube(int dim, int cells_per_axis, double length, double origin) {
    Grid g;
    g.dim = dim;
    g.cells = {cells_per_axis, cells_per_axis, dim == 3 ? cells_per_axis : 1};
    double h = length / cells_per_axis;
    g.h = {h, h, dim == 3 ? h : 1.0};
    g.origin = {origin, origin, dim == 3 ? origin : 0.0};
    g.validate();
    return g;
}

void Grid::validate() const {
    if (dim != 2 && dim != 3) throw ConfigurationError("Grid: dimension must be 2 or 3");
    for (int d = 0; d < dim; ++d) {
        if (cells[d] < 1) throw ConfigurationError("Grid: need at least one cell per axis");
        if (!(h[d] > 0.0) || !std::isfinite(h[d])) throw ConfigurationError("Grid: spacing must be positive");
    }
}

std::array<int, 3> Grid::nodes() const {
    return {cells[0] + 1, cells[1] + 1, dim == 3 ? cells[2] + 1 : 1};
}

std::size_t Grid::node_count() const {
    auto n = nodes();
    return static_cast<std::size_t>(n[0]) * n[1] * n[2];
}

std::size_t Grid::cell_count() const {
    return static_cast<std::size_t>(cells[0]) * cells[1] * (dim == 3 ? cells[2] : 1);
}

std::size_t Grid::node_index(int i, int j, int k) const {
    auto n = nodes();
    return static_cast<std::size_t>(i) + n[0] * (static_cast<std::size_t>(j) + n[1] * static_cast<std::size_t>(k));
}

std::size_t Grid::cell_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + cells[0] * (static_cast<std::size_t>(j) + cells[1] * static_cast<std::size_t>(k));
}

std::array<int, 3> Grid::node_coords(std::size_t idx) const {
    auto n = nodes();
    int i = static_cast<int>(idx % n[0]);
    idx /= n[0];
    int j = static_cast<int>(idx % n[1]);
    return {i, j, static_cast<int>(idx / n[1])};
}

std::array<int, 3> Grid::cell_coords(std::size_t idx) const {
    int i = static_cast<int>(idx % cells[0]);
    idx /= cells[0];
    int j = static_cast<int>(idx % cells[1]);
    return {i, j, static_cast<int>(idx / cells[1])};
}

Point Grid::node_position(std::size_t idx) const {
    auto c = node_coords(idx);
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) p[d] = origin[d] + c[d] * h[d];
    return p;
}

Point Grid::cell_center(std::size_t idx) const {
    auto c = cell_coords(idx);
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) p[d] = origin[d] + (c[d] + 0.5) * h[d];
    return p;
}

Point Grid::center() const {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) p[d] = origin[d] + 0.5 * cells[d] * h[d];
    return p;
}

double Grid::cell_measure() const {
    double m = 1.0;
    for (int d = 0; d < dim; ++d) m *= h[d];
    return m;
}

double Grid::measure() const { return cell_measure() * static_cast<double>(cell_count()); }

bool Grid::is_boundary_node(std::size_t idx) const {
    auto c = node_coords(idx);
    for (int d = 0; d < dim; ++d)
        if (c[d] == 0 || c[d] == cells[d]) return true;
    return false;
}

double Grid::node_weight(std::size_t idx) const {
    auto c = node_coords(idx);
    double w = cell_measure();
    for (int d = 0; d < dim; ++d)
        if (c[d] == 0 || c[d] == cells[d]) w *= 0.5;
    return w;
}

// ---------------------------------------------------------------- GridField

GridField GridField::zeros(const Grid& g, int components) {
    g.validate();
    GridField f;
    f.grid = g;
    f.comp.assign(components, std::vector<double>(g.node_count(), 0.0));
    return f;
}

GridField GridField::from_function(const Grid& g, int components, const std::function<Point(const Point&)>& fn,
                                   bool zero_bc) {
    GridField f = zeros(g, components);
    f.zero_bc = zero_bc;
    parallel_for(g.node_count(), [&](std::size_t i) {
        if (zero_bc && g.is_boundary_node(i)) return;
        Point v = fn(g.node_position(i));
        for (int c = 0; c < components; ++c) f.comp[c][i] = v[c];
    });
    return f;
}

void GridField::validate() const {
    grid.validate();
    for (const auto& c : comp) {
        if (c.size() != grid.node_count()) throw DomainError("GridField: component size does not match the grid");
        for (double v : c)
            if (!std::isfinite(v)) throw DomainError("GridField: non-finite value");
    }
    if (zero_bc && boundary_max() != 0.0) throw DomainError("GridField: zero_bc field is nonzero on the boundary");
}

double GridField::boundary_max() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i)
        if (grid.is_boundary_node(i))
            for (const auto& c : comp) m = std::max(m, std::fabs(c[i]));
    return m;
}

GridField GridField::operator-(const GridField& o) const {
    if (!(grid == o.grid) || comp.size() != o.comp.size()) throw DomainError("GridField: shape mismatch");
    GridField r = *this;
    for (std::size_t c = 0; c < comp.size(); ++c)
        for (std::size_t i = 0; i < comp[c].size(); ++i) r.comp[c][i] -= o.comp[c][i];
    r.zero_bc = zero_bc && o.zero_bc;
    return r;
}

GridField GridField::operator+(const GridField& o) const { return *this - o.scaled(-1.0); }

GridField GridField::scaled(double s) const {
    GridField r = *this;
    for (auto& c : r.comp)
        for (double& v : c) v *= s;
    return r;
}

// ---------------------------------------------------------------- tensors

double TensorField::frobenius(std::size_t cell) const {
    double s = 0.0;
    for (int k = 0; k < n * n; ++k) {
        double v = data[cell * n * n + k];
        s += v * v;
    }
    return std::sqrt(s);
}

double TensorField::max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::fabs(v));
    return m;
}

bool TensorField::check_symmetric(double tol) const {
    double scale = std::max(1.0, max_abs());
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (std::fabs(at(c, a, b) - at(c, b, a)) > tol * scale) return false;
    return true;
}

bool TensorField::check_trace_free(double tol) const {
    double scale = std::max(1.0, max_abs());
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        double tr = 0.0;
        for (int a = 0; a < n; ++a) tr += at(c, a, a);
        if (std::fabs(tr) > tol * scale) return false;
    }
    return true;
}

SampledFunction TensorField::pointwise_norm() const {
    std::vector<double> v(grid.cell_count());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = frobenius(c);
    return SampledFunction::uniform(std::move(v), grid.cell_measure());
}

namespace {

void require_vector_field(const GridField& u) {
    u.grid.validate();
    if (u.components() != u.grid.dim) throw DomainError("expected a vector field with dim components");
    for (const auto& c : u.comp)
        if (c.size() != u.grid.node_count()) throw DomainError("GridField: component size does not match the grid");
}

}  // namespace

TensorField gradient(const GridField& u) {
    require_vector_field(u);
    const Grid& g = u.grid;
    const int n = g.dim;
    TensorField t;
    t.grid = g;
    t.n = n;
    t.data.assign(g.cell_count() * n * n, 0.0);
    const int corners = 1 << n;
    const double edges = static_cast<double>(1 << (n - 1));
    parallel_for(g.cell_count(), [&](std::size_t cell) {
        auto cc = g.cell_coords(cell);
        for (int b = 0; b < n; ++b) {
            for (int corner = 0; corner < corners; ++corner) {
                if (corner & (1 << b)) continue;
                std::array<int, 3> p{cc[0] + (corner & 1), cc[1] + ((corner >> 1) & 1),
                                     n == 3 ? cc[2] + ((corner >> 2) & 1) : 0};
                std::array<int, 3> q = p;
                q[b] += 1;
                std::size_t ip = g.node_index(p[0], p[1], p[2]), iq = g.node_index(q[0], q[1], q[2]);
                for (int a = 0; a < n; ++a) t.at(cell, a, b) += (u.comp[a][iq] - u.comp[a][ip]) / g.h[b];
            }
            for (int a = 0; a < n; ++a) t.at(cell, a, b) /= edges;
        }
    });
    return t;
}

TensorField sym_part(const TensorField& m) {
    TensorField s = m;
    for (std::size_t c = 0; c < m.grid.cell_count(); ++c)
        for (int a = 0; a < m.n; ++a)
            for (int b = a; b < m.n; ++b) {
                double v = 0.5 * (m.at(c, a, b) + m.at(c, b, a));
                s.at(c, a, b) = v;
                s.at(c, b, a) = v;
            }
    s.symmetric = true;
    return s;
}

TensorField dev_part(const TensorField& m) {
    TensorField s = sym_part(m);
    for (std::size_t c = 0; c < m.grid.cell_count(); ++c) {
        double tr = 0.0;
        for (int a = 0; a < m.n; ++a) tr += s.at(c, a, a);
        for (int a = 0; a < m.n; ++a) s.at(c, a, a) -= tr / m.n;
    }
    s.trace_free = true;
    return s;
}

TensorField sym_gradient(const GridField& u) { return sym_part(gradient(u)); }
TensorField dev_sym_gradient(const GridField& u) { return dev_part(gradient(u)); }

namespace {

template <class F>
void for_corners(const Grid& g, std::size_t cell, F&& f) {
    auto cc = g.cell_coords(cell);
    for (int corner = 0; corner < (1 << g.dim); ++corner)
        f(g.node_index(cc[0] + (corner & 1), cc[1] + ((corner >> 1) & 1), g.dim == 3 ? cc[2] + ((corner >> 2) & 1) : 0));
}

}  // namespace

SampledFunction cell_magnitude(const GridField& u) {
    const Grid& g = u.grid;
    std::vector<double> v(g.cell_count());
    const double inv = 1.0 / (1 << g.dim);
    for (std::size_t cell = 0; cell < v.size(); ++cell) {
        double s = 0.0;
        for (const auto& comp : u.comp) {
            double avg = 0.0;
            for_corners(g, cell, [&](std::size_t i) { avg += comp[i]; });
            avg *= inv;
            s += avg * avg;
        }
        v[cell] = std::sqrt(s);
    }
    return SampledFunction::uniform(std::move(v), g.cell_measure());
}

SampledFunction cell_values(const GridField& u, int component) {
    const Grid& g = u.grid;
    std::vector<double> v(g.cell_count());
    const double inv = 1.0 / (1 << g.dim);
    for (std::size_t cell = 0; cell < v.size(); ++cell) {
        double avg = 0.0;
        for_corners(g, cell, [&](std::size_t i) { avg += u.comp[component][i]; });
        v[cell] = avg * inv;
    }
    return SampledFunction::uniform(std::move(v), g.cell_measure());
}

// ---------------------------------------------------------------- kernels

KernelBasis KernelBasis::build(const Grid& g, KernelKind kind) {
    g.validate();
    const int n = g.dim;
    Point c = g.center();
    double s = 0.0;
    for (int d = 0; d < n; ++d) s = std::max(s, 0.5 * g.cells[d] * g.h[d]);
    auto local = [=](const Point& x) {
        Point y{0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) y[d] = (x[d] - c[d]) / s;
        return y;
    };
    KernelBasis kb;
    kb.grid = g;
    kb.kind = kind;
    auto add = [&](std::string label, std::function<Point(const Point&)> fn) {
        kb.generators.push_back(GridField::from_function(g, n, [&](const Point& x) { return fn(local(x)); }));
        kb.labels.push_back(std::move(label));
    };
    for (int a = 0; a < n; ++a)
        add("const-" + std::to_string(a), [a](const Point&) {
            Point v{0.0, 0.0, 0.0};
            v[a] = 1.0;
            return v;
        });
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            add("skew-" + std::to_string(a) + std::to_string(b), [a, b](const Point& y) {
                Point v{0.0, 0.0, 0.0};
                v[a] = -y[b];
                v[b] = y[a];
                return v;
            });
    if (kind == KernelKind::Sigma) {
        if (n < 3) throw ConfigurationError("Sigma kernel needs n >= 3");
        add("dilation", [](const Point& y) { return y; });
        for (int a = 0; a < n; ++a)
            add("special-" + std::to_string(a), [a, n](const Point& y) {
                double r2 = 0.0;
                for (int d = 0; d < n; ++d) r2 += y[d] * y[d];
                Point v{0.0, 0.0, 0.0};
                for (int d = 0; d < n; ++d) v[d] = 2.0 * y[a] * y[d];
                v[a] -= r2;
                return v;
            });
    }
    return kb;
}

namespace {

double l2_inner(const GridField& f, const GridField& g) {
    const Grid& gr = f.grid;
    std::vector<double> w(gr.node_count()), x(gr.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = gr.node_weight(i);
        double s = 0.0;
        for (std::size_t c = 0; c < f.comp.size(); ++c) s += f.comp[c][i] * g.comp[c][i];
        x[i] = s;
    }
    return pairwise_dot(w, x);
}

double node_l1(const GridField& f) {
    const Grid& gr = f.grid;
    std::vector<double> w(gr.node_count()), x(gr.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = gr.node_weight(i);
        double s = 0.0;
        for (const auto& c : f.comp) s += c[i] * c[i];
        x[i] = std::sqrt(s);
    }
    return pairwise_dot(w, x);
}

double node_sup(const GridField& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.grid.node_count(); ++i) {
        double s = 0.0;
        for (const auto& c : f.comp) s += c[i] * c[i];
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

}  // namespace

KernelProjector::KernelProjector(const Grid& g, KernelKind kind) : basis_(KernelBasis::build(g, kind)) {
    const std::size_t k = basis_.size();
    Eigen::MatrixXd gram(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            double v = l2_inner(basis_.generators[i], basis_.generators[j]);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    double lmax = es.eigenvalues().maxCoeff(), lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 1e-12 * lmax)) throw ConfigurationError("kernel Gram matrix is rank deficient; grid too coarse");
    condition_ = lmax / lmin;
    Eigen::MatrixXd inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    gram_inverse_.assign(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) gram_inverse_[i * k + j] = inv(i, j);
    std::vector<double> l1(k), sup(k);
    for (std::size_t i = 0; i < k; ++i) {
        l1[i] = node_l1(basis_.generators[i]);
        sup[i] = node_sup(basis_.generators[i]);
    }
    for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) row += std::fabs(gram_inverse_[i * k + j]) * sup[j];
        l1_constant_ += l1[i] * row;
    }
}

GridField KernelProjector::project(const GridField& u) const {
    require_vector_field(u);
    if (!(u.grid == basis_.grid)) throw DomainError("project: grid mismatch");
    const std::size_t k = basis_.size();
    std::vector<double> rhs(k);
    for (std::size_t i = 0; i < k; ++i) rhs[i] = l2_inner(basis_.generators[i], u);
    GridField out = GridField::zeros(u.grid, u.components());
    for (std::size_t i = 0; i < k; ++i) {
        double c = 0.0;
        for (std::size_t j = 0; j < k; ++j) c += gram_inverse_[i * k + j] * rhs[j];
        for (std::size_t d = 0; d < out.comp.size(); ++d)
            for (std::size_t p = 0; p < out.comp[d].size(); ++p) out.comp[d][p] += c * basis_.generators[i].comp[d][p];
    }
    return out;
}

GridField project_sigma(const GridField& u) { return KernelProjector(u.grid, KernelKind::Sigma).project(u); }
GridField project_rigid(const GridField& u) { return KernelProjector(u.grid, KernelKind::Rigid).project(u); }

// ---------------------------------------------------------------- harness

std::string to_string(KornMode m) { return m == KornMode::ZeroBc ? "zero_bc" : "full_domain"; }
std::string to_string(KornOperator o) { return o == KornOperator::E ? "E" : "ED"; }

KornMode parse_korn_mode(const std::string& s) {
    if (s == "zero_bc") return KornMode::ZeroBc;
    if (s == "full" || s == "full_domain") return KornMode::FullDomain;
    throw ConfigurationError("unknown mode '" + s + "' (zero_bc|full_domain)");
}

KornOperator parse_korn_operator(const std::string& s) {
    if (s == "E") return KornOperator::E;
    if (s == "ED" || s == "E_D") return KornOperator::ED;
    throw ConfigurationError("unknown operator '" + s + "' (E|ED)");
}

namespace {

// u minus its kernel projection; throws when u is (numerically) in the kernel.
GridField remove_kernel(const GridField& u, KornMode mode, KornOperator op) {
    if (mode == KornMode::ZeroBc) {
        if (!u.zero_bc) throw DomainError("zero_bc mode needs a field flagged zero_bc");
        if (u.boundary_max() != 0.0) throw DomainError("zero_bc field is nonzero on the boundary");
        return u;
    }
    KernelProjector p(u.grid, op == KornOperator::ED ? KernelKind::Sigma : KernelKind::Rigid);
    GridField w = u - p.project(u);
    double nu = std::sqrt(l2_inner(u, u)), nw = std::sqrt(l2_inner(w, w));
    if (nu == 0.0 || nw <= 1e-10 * nu) throw KernelMembership("field lies in the kernel of the operator");
    return w;
}

TensorField denominator_tensor(const GridField& u, KornOperator op, const TensorField& grad) {
    if (op == KornOperator::ED && u.grid.dim < 3)
        throw ConfigurationError("trace-free operator needs n >= 3; use operator E on 2-D grids");
    TensorField d = op == KornOperator::ED ? dev_part(grad) : sym_part(grad);
    if (d.max_abs() <= 1e-11 * grad.max_abs() || grad.max_abs() == 0.0)
        throw KernelMembership("field lies in the kernel of the operator");
    return d;
}

}  // namespace

double korn_ratio(const YoungFunction& a, const YoungFunction& b, const GridField& u, KornMode mode,
                  KornOperator op) {
    require_vector_field(u);
    TensorField grad = gradient(u);
    TensorField den = denominator_tensor(u, op, grad);
    GridField w = remove_kernel(u, mode, op);
    double bottom = luxemburg(a, den.pointwise_norm()).value;
    if (bottom == 0.0) throw KernelMembership("zero denominator");
    return luxemburg(b, gradient(w).pointwise_norm()).value / bottom;
}

double poincare_ratio(const YoungFunction& a, const GridField& u, KornMode mode) {
    require_vector_field(u);
    TensorField grad = gradient(u);
    TensorField den = denominator_tensor(u, KornOperator::ED, grad);
    GridField w = remove_kernel(u, mode, KornOperator::ED);
    double bottom = luxemburg(a, den.pointwise_norm()).value;
    if (bottom == 0.0) throw KernelMembership("zero denominator");
    return luxemburg(a, cell_magnitude(w)).value / bottom;
}

// ---------------------------------------------------------------- radial fields

double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

namespace {

std::vector<double> radial_breaks(const SampledFunction& h, int n) {
    double w = unit_ball_volume(n);
    std::vector<double> t{0.0};
    double e = 0.0;
    for (double wt : h.weights) {
        e += wt;
        t.push_back(std::pow(std::min(e, w) / w, 1.0 / n));
    }
    return t;
}

}  // namespace

double radial_profile(const SampledFunction& h, int n, double r) {
    if (r >= 1.0) return 0.0;
    auto t = radial_breaks(h, n);
    double rho = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        double lo = std::max(t[j], r), hi = std::min(t[j + 1], 1.0);
        if (hi > lo && h.values[j] != 0.0) rho += h.values[j] * std::log(hi / lo);
    }
    return rho;
}

RadialField radial_test_field(const SampledFunction& h, const Grid& g) {
    h.validate();
    for (double v : h.values)
        if (v < 0.0) throw DomainError("radial_test_field: h must be non-negative");
    g.validate();
    Point c = g.center();
    for (int d = 0; d < g.dim; ++d)
        if (0.5 * g.cells[d] * g.h[d] < 1.0) throw DomainError("radial_test_field: grid must contain the unit ball");
    const int n = g.dim;
    auto t = radial_breaks(h, n);
    RadialField out;
    out.omega_n = unit_ball_volume(n);
    const double q = 1.0 / std::numbers::sqrt2;
    auto radius = [&](const Point& x) {
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
        return std::sqrt(r2);
    };
    out.u = GridField::from_function(g, n, [&](const Point& x) {
        Point v{0.0, 0.0, 0.0};
        double r = radius(x);
        if (r == 0.0 || r >= 1.0) return v;
        double rho = radial_profile(h, n, r);
        v[0] = -q * (x[1] - c[1]) * rho;
        v[1] = q * (x[0] - c[0]) * rho;
        return v;
    }, true);
    out.v = GridField::from_function(g, n, [&](const Point& x) {
        Point v{0.0, 0.0, 0.0};
        double r = radius(x);
        for (std::size_t j = 0; j < h.size(); ++j) {
            double lo = std::max(t[j], r), hi = std::min(t[j + 1], 1.0);
            if (hi > lo) v[0] += h.values[j] * (hi - lo);
        }
        return v;
    }, true);
    return out;
}

std::vector<GridField> radial_suite(const Grid& g, const std::vector<double>& spikes) {
    double w = unit_ball_volume(g.dim);
    std::vector<GridField> out;
    for (double s : spikes) {
        if (!(s > 0.0) || s > w) throw DomainError("radial_suite: spike width must be in (0, w_n]");
        SampledFunction h;
        h.values.push_back(1.0 / s);
        h.weights.push_back(s);
        if (s < w) {
            h.values.push_back(0.0);
            h.weights.push_back(w - s);
        }
        out.push_back(radial_test_field(h, g).u);
    }
    return out;
}

// ---------------------------------------------------------------- negative norm

NegativeNormResult negative_norm_lower_bound(const YoungFunction& a, const GridField& u) {
    u.grid.validate();
    if (u.components() != 1) throw DomainError("negative_norm_lower_bound: expected a scalar field");
    const Grid& g = u.grid;
    const int n = g.dim;
    SampledFunction uc = cell_values(u);
    double mean = pairwise_dot(uc.weights, uc.values) / g.measure();
    for (double& v : uc.values) v -= mean;

    NegativeNormResult res;
    res.upper_bound = 2.0 * std::sqrt(static_cast<double>(n)) * luxemburg(a, uc).value;
    YoungFunction conj = conjugate(a);

    double ext = kInf;
    for (int d = 0; d < n; ++d) ext = std::min(ext, g.cells[d] * g.h[d]);
    auto bump = [](double s) { return s * s < 1.0 ? (1.0 - s * s) * (1.0 - s * s) : 0.0; };
    auto dbump = [](double s) { return s * s < 1.0 ? -4.0 * s * (1.0 - s * s) : 0.0; };

    struct Element {
        int scale;
        Point center;
    };
    std::vector<Element> dict;
    for (int sc = 0; sc < 3; ++sc) {
        double r = ext / (4 << sc);
        std::array<std::vector<double>, 3> cs;
        for (int d = 0; d < 3; ++d) {
            if (d >= n) {
                cs[d] = {0.0};
                continue;
            }
            double top = g.origin[d] + g.cells[d] * g.h[d] - r;
            for (double x = g.origin[d] + r; x <= top + 1e-12 * r; x += r) cs[d].push_back(x);
        }
        for (double x : cs[0])
            for (double y : cs[1])
                for (double z : cs[2]) dict.push_back({sc, {x, y, z}});
    }
    res.dictionary_size = dict.size() * n;

    std::vector<double> best(dict.size(), 0.0);
    std::vector<int> best_dir(dict.size(), 0);
    std::vector<std::string> keys(dict.size());
    std::map<std::string, double> norm_cache;
    // The gradient norm depends only on the scale and the offset of the centre
    // relative to the grid lattice.
    for (std::size_t e = 0; e < dict.size(); ++e) {
        std::string key = std::to_string(dict[e].scale);
        for (int d = 0; d < n; ++d) {
            double off = std::fmod((dict[e].center[d] - g.origin[d]) / g.h[d], 1.0);
            key += ":" + std::to_string(std::llround(off * 1e6) % 1000000);
        }
        keys[e] = key;
    }
    auto support = [&](const Element& el, auto&& visit) {
        double r = ext / (4 << el.scale);
        std::array<int, 3> lo{0, 0, 0}, hi{1, 1, 1};
        for (int d = 0; d < n; ++d) {
            lo[d] = std::max(0, static_cast<int>(std::floor((el.center[d] - r - g.origin[d]) / g.h[d])));
            hi[d] = std::min(g.cells[d], static_cast<int>(std::ceil((el.center[d] + r - g.origin[d]) / g.h[d])));
        }
        for (int k = lo[2]; k < hi[2]; ++k)
            for (int j = lo[1]; j < hi[1]; ++j)
                for (int i = lo[0]; i < hi[0]; ++i) {
                    std::size_t cell = g.cell_index(i, j, n == 3 ? k : 0);
                    Point x = g.cell_center(cell);
                    std::array<double, 3> s{0.0, 0.0, 0.0}, b{1.0, 1.0, 1.0}, db{0.0, 0.0, 0.0};
                    for (int d = 0; d < n; ++d) {
                        s[d] = (x[d] - el.center[d]) / r;
                        b[d] = bump(s[d]);
                        db[d] = dbump(s[d]) / r;
                    }
                    std::array<double, 3> grad{0.0, 0.0, 0.0};
                    for (int d = 0; d < n; ++d) {
                        double v = db[d];
                        for (int e = 0; e < n; ++e)
                            if (e != d) v *= b[e];
                        grad[d] = v;
                    }
                    visit(cell, grad);
                }
    };
    for (std::size_t e = 0; e < dict.size(); ++e) {
        if (norm_cache.count(keys[e])) continue;
        SampledFunction gn;
        support(dict[e], [&](std::size_t, const std::array<double, 3>& gr) {
            double m = std::sqrt(gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]);
            if (m > 0.0) {
                gn.values.push_back(m);
                gn.weights.push_back(g.cell_measure());
            }
        });
        norm_cache[keys[e]] = gn.size() ? luxemburg(conj, gn).value : 0.0;
    }
    parallel_for(dict.size(), [&](std::size_t e) {
        double nrm = norm_cache.at(keys[e]);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) return;
        std::array<std::vector<double>, 3> terms;
        std::vector<double> w;
        support(dict[e], [&](std::size_t cell, const std::array<double, 3>& gr) {
            for (int d = 0; d < n; ++d) terms[d].push_back(uc.values[cell] * gr[d]);
            w.push_back(g.cell_measure());
        });
        for (int d = 0; d < n; ++d) {
            double r = std::fabs(pairwise_dot(w, terms[d])) / nrm;
            if (r > best[e]) {
                best[e] = r;
                best_dir[e] = d;
            }
        }
    });
    for (std::size_t e = 0; e < dict.size(); ++e)
        if (best[e] > res.lower_bound) {
            res.lower_bound = best[e];
            res.best = "scale" + std::to_string(dict[e].scale) + "/dir" + std::to_string(best_dir[e]) + "/" +
                       std::to_string(e);
        }
    return res;
}

// ---------------------------------------------------------------- suites

namespace {

Point unit_coords(const Grid& g, const Point& x) {
    Point y{0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim; ++d) y[d] = (x[d] - g.origin[d]) / (g.cells[d] * g.h[d]);
    return y;
}

}  // namespace

std::vector<GridField> smooth_suite(const Grid& g, bool zero_bc) {
    using std::numbers::pi;
    const int n = g.dim;
    std::vector<std::function<Point(const Point&)>> fns;
    if (zero_bc) {
        auto bubble = [n](const Point& y) {
            double b = 1.0;
            for (int d = 0; d < n; ++d) b *= y[d] * (1.0 - y[d]);
            return b;
        };
        auto s = [](double k, double y) { return std::sin(k * pi * y); };
        fns.push_back([=](const Point& y) { return Point{64.0 * bubble(y), 0.0, 0.0}; });
        fns.push_back([=](const Point& y) {
            double b = 64.0 * bubble(y);
            return Point{b * y[1], -b * y[0], n == 3 ? b * y[0] * y[1] : 0.0};
        });
        fns.push_back([=](const Point& y) {
            double z = n == 3 ? s(1, y[2]) : 1.0;
            return Point{s(1, y[0]) * s(2, y[1]) * z, s(2, y[0]) * s(1, y[1]) * z, n == 3 ? s(1, y[0]) * s(1, y[1]) * s(2, y[2]) : 0.0};
        });
        fns.push_back([=](const Point& y) {
            double z = n == 3 ? s(3, y[2]) : 1.0;
            return Point{s(3, y[0]) * s(1, y[1]) * z, 0.5 * s(1, y[0]) * s(2, y[1]) * z, 0.0};
        });
        fns.push_back([=](const Point& y) {
            double b = 64.0 * bubble(y);
            return Point{b * std::cos(pi * y[1]), b * std::sin(2 * pi * y[0]), n == 3 ? b : 0.0};
        });
    } else {
        fns.push_back([=](const Point& y) { return Point{std::sin(pi * y[1]), 0.0, 0.0}; });
        fns.push_back([=](const Point& y) {
            return Point{y[0] * y[0] * y[1], std::cos(pi * y[0]) * y[2], n == 3 ? std::exp(y[0]) * y[1] : 0.0};
        });
        fns.push_back([=](const Point& y) {
            return Point{std::cos(2 * pi * y[0]) * std::cos(pi * y[1]), std::sin(pi * (y[0] + y[2])), n == 3 ? y[0] * y[1] * y[2] : 0.0};
        });
        fns.push_back([=](const Point& y) {
            return Point{y[1] * y[1] * y[1], y[0] * y[0] * y[2] + y[1], n == 3 ? std::sin(2 * pi * y[1]) : 0.0};
        });
        fns.push_back([=](const Point& y) {
            double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
            return Point{std::exp(-r2) , std::sin(pi * y[0] * y[1]), n == 3 ? std::cos(pi * y[2]) * y[0] : 0.0};
        });
    }
    std::vector<GridField> out;
    for (auto& f : fns)
        out.push_back(GridField::from_function(g, n, [&](const Point& x) { return f(unit_coords(g, x)); }, zero_bc));
    return out;
}

std::vector<GridField> random_suite(const Grid& g, int count, std::uint64_t seed, bool zero_bc) {
    using std::numbers::pi;
    const int n = g.dim;
    struct Mode {
        int comp;
        std::array<int, 3> k;
        std::array<double, 3> phase;
        double coef;
    };
    std::vector<GridField> out;
    for (int f = 0; f < count; ++f) {
        std::mt19937_64 rng(seed + 7919ull * static_cast<std::uint64_t>(f));
        std::uniform_int_distribution<int> kd(zero_bc ? 1 : 0, zero_bc ? 3 : 2);
        std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::vector<Mode> modes;
        for (int c = 0; c < n; ++c)
            for (int m = 0; m < 4; ++m) {
                Mode md{c, {kd(rng), kd(rng), kd(rng)}, {ph(rng), ph(rng), ph(rng)}, nd(rng)};
                modes.push_back(md);
            }
        out.push_back(GridField::from_function(g, n, [&](const Point& x) {
            Point y = unit_coords(g, x);
            Point v{0.0, 0.0, 0.0};
            for (const auto& md : modes) {
                double t = md.coef;
                for (int d = 0; d < n; ++d)
                    t *= zero_bc ? std::sin(md.k[d] * pi * y[d]) : std::cos(md.k[d] * pi * y[d] + md.phase[d]);
                v[md.comp] += t;
            }
            return v;
        }, zero_bc));
    }
    return out;
}

}  // namespace orlicz
