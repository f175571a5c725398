#include "orlicz/laminate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "orlicz/numeric.hpp"
#include "orlicz/rearrange.hpp"

namespace orlicz {

// ---------------------------------------------------------------- Rational

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make(i128 num, i128 den) {
    if (den == 0) throw ConsistencyError("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
    if (num > lim || num < -lim || den > lim) throw ConsistencyError("Rational: overflow");
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw ConsistencyError("Rational: zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    std::int64_t a = num_ < 0 ? -num_ : num_, b = den_;
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num_ /= a;
        den_ /= a;
    }
}

std::string Rational::str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

Rational operator+(const Rational& x, const Rational& y) {
    return make(i128(x.num_) * y.den_ + i128(y.num_) * x.den_, i128(x.den_) * y.den_);
}
Rational operator-(const Rational& x, const Rational& y) { return x + (-y); }
Rational operator*(const Rational& x, const Rational& y) {
    return make(i128(x.num_) * y.num_, i128(x.den_) * y.den_);
}
Rational operator/(const Rational& x, const Rational& y) {
    return make(i128(x.num_) * y.den_, i128(x.den_) * y.num_);
}
std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
    i128 l = i128(x.num_) * y.den_, r = i128(y.num_) * x.den_;
    return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
}

// ---------------------------------------------------------------- matrices

double frobenius(const Matrix2& x) {
    return std::sqrt(x.m[0][0] * x.m[0][0] + x.m[0][1] * x.m[0][1] + x.m[1][0] * x.m[1][0] + x.m[1][1] * x.m[1][1]);
}
bool is_symmetric(const Matrix2& x) { return x.m[0][1] == x.m[1][0]; }
bool is_skew(const Matrix2& x) { return x.m[0][0] == 0.0 && x.m[1][1] == 0.0 && x.m[0][1] == -x.m[1][0]; }

Rational entry_l1(const RMatrix2& x) {
    Rational s;
    for (const auto& row : x.m)
        for (const auto& v : row) s += v.abs();
    return s;
}

namespace {

Matrix2 to_double(const RMatrix2& x, double t) {
    Matrix2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = x.m[i][j].to_double() * t;
    return r;
}

Rational pow2(int e) {
    return e >= 0 ? Rational(std::int64_t{1} << e) : Rational(1, std::int64_t{1} << -e);
}

auto matrix_key(const RMatrix2& x) {
    return std::array<Rational, 4>{x.m[0][0], x.m[0][1], x.m[1][0], x.m[1][1]};
}

// Atoms T_m, M_m, S_m, C_m of the split tree, in units of t.
RMatrix2 T_(int m) { return RMatrix2::G(pow2(-m), pow2(-m)); }
RMatrix2 S_(int m) { return RMatrix2::G(pow2(-m), -pow2(-m)); }
RMatrix2 C_(int m) { return RMatrix2::G(-pow2(1 - m), pow2(1 - m)); }
RMatrix2 M_(int m) { return RMatrix2::G(pow2(-m), pow2(1 - m)); }

Rational det(const RMatrix2& x) { return x.m[0][0] * x.m[1][1] - x.m[0][1] * x.m[1][0]; }

// Both splits of level k are rank-one with the stated barycenters.
void check_splits(int k) {
    RMatrix2 mid = C_(k).scaled(Rational(1, 4)) + T_(k - 1).scaled(Rational(3, 4));
    RMatrix2 top = M_(k).scaled(Rational(2, 3)) + S_(k).scaled(Rational(1, 3));
    if (!(mid == M_(k)) || !(top == T_(k)) || !(det(C_(k) - T_(k - 1)) == Rational(0)) ||
        !(det(M_(k) - S_(k)) == Rational(0)))
        throw ConsistencyError("laminate split is not rank-one compatible");
}

void check_order(int m) {
    if (m < 0) throw DomainError("laminate order must be >= 0");
    if (m > 40) throw DomainError("laminate order too large for exact arithmetic");
}

}  // namespace

Matrix2 Laminate::matrix(std::size_t i) const { return to_double(atoms.at(i).unit, t); }

Rational Laminate::mass() const {
    Rational s;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

RMatrix2 Laminate::barycenter_unit() const {
    RMatrix2 s = RMatrix2::G(Rational(0), Rational(0));
    for (const auto& a : atoms) s = s + a.unit.scaled(a.weight);
    return s;
}

Matrix2 Laminate::barycenter() const { return to_double(barycenter_unit(), t); }

Laminate build_laminate(int m, double t) {
    check_order(m);
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("laminate scale t must be positive");
    Laminate l;
    l.order = m;
    l.t = t;
    l.atoms.push_back({pow2(-m), RMatrix2::G(Rational(1), Rational(1))});
    for (int k = 1; k <= m; ++k) {
        l.atoms.push_back({Rational(1, 3) * pow2(k - m), S_(k)});
        l.atoms.push_back({Rational(1, 6) * pow2(k - m), C_(k)});
    }
    return l;
}

Laminate canonical(const Laminate& l) {
    std::map<std::array<Rational, 4>, Rational> acc;
    std::map<std::array<Rational, 4>, RMatrix2> mats;
    for (const auto& a : l.atoms) {
        auto key = matrix_key(a.unit);
        acc[key] += a.weight;
        mats[key] = a.unit;
    }
    Laminate out = l;
    out.atoms.clear();
    for (const auto& [key, w] : acc) out.atoms.push_back({w, mats[key]});
    return out;
}

Laminate build_laminate_recursive(int m, double t) {
    check_order(m);
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("laminate scale t must be positive");
    Laminate cur;
    cur.order = 0;
    cur.t = t;
    cur.atoms.push_back({Rational(1), T_(0)});
    for (int k = 1; k <= m; ++k) {
        check_splits(k);
        // M_k = 1/4 C_k + 3/4 T_(k-1)
        std::vector<LaminateAtom> mid{{Rational(1, 4), C_(k)}};
        for (const auto& a : cur.atoms) mid.push_back({Rational(3, 4) * a.weight, a.unit});
        // T_k = 2/3 M_k + 1/3 S_k
        Laminate next;
        next.order = k;
        next.t = t;
        for (const auto& a : mid) next.atoms.push_back({Rational(2, 3) * a.weight, a.unit});
        next.atoms.push_back({Rational(1, 3), S_(k)});
        cur = canonical(next);
    }
    return cur;
}

double moment(const Laminate& l, const std::function<double(const Matrix2&)>& phi) {
    std::vector<double> w, v;
    for (std::size_t i = 0; i < l.atoms.size(); ++i) {
        w.push_back(l.atoms[i].weight.to_double());
        v.push_back(phi(l.matrix(i)));
    }
    return pairwise_dot(w, v);
}

Rational first_moment_exact(const Laminate& l, bool symmetric_part) {
    RMatrix2 avg = l.barycenter_unit();
    if (symmetric_part) avg = avg.sym();
    Rational s;
    for (const auto& a : l.atoms) {
        RMatrix2 x = symmetric_part ? a.unit.sym() : a.unit;
        s += a.weight * entry_l1(x - avg);
    }
    return s;
}

std::vector<BlowupRow> blowup_curve(const YoungFunction& a, const YoungFunction& b, int m_max, double r) {
    if (m_max < 0) throw DomainError("blowup_curve: m_max must be >= 0");
    if (!(r > 0.0)) throw DomainError("blowup_curve: r must be positive");
    if (a.kind() == YoungKind::Indicator || !a.finite_valued())
        throw DomainError("blowup_curve: A must be finite-valued (the balance test is trivial otherwise)");
    std::vector<BlowupRow> rows;
    const double g_norm = 2.0 * std::numbers::sqrt2;  // 2 |G(1,1)|
    for (int m = 0; m <= m_max; ++m) {
        double target = std::ldexp(0.5, m) / (r * r);
        double tm = a.inverse(target) / g_norm;
        if (!(tm > 0.0) || !std::isfinite(tm)) throw DomainError("blowup_curve: cannot solve for t_m");
        Laminate l = build_laminate(m, tm);
        Matrix2 avg = l.barycenter();
        Matrix2 avg_sym = avg.sym();
        BlowupRow row;
        row.m = m;
        row.t_m = tm;
        row.sym_moment = moment(l, [&](const Matrix2& x) { return a(frobenius(x.sym() - avg_sym)); });
        row.full_moment = moment(l, [&](const Matrix2& x) { return b(frobenius(x - avg)); });
        // A single atom has no oscillation; the ratio is taken as 1.
        row.ratio = row.sym_moment > 0.0 ? row.full_moment / row.sym_moment : 1.0;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------- realization

struct LaminateRealization::Node {
    bool leaf = true;
    Matrix2 avg;
    double lambda = 1.0;  // fraction carrying child_a
    int axis = 0;         // lamination normal
    std::array<double, 2> a{0.0, 0.0};
    std::shared_ptr<const Node> child_a, child_b;
};

namespace {

using Node = LaminateRealization::Node;

struct RNode {
    RMatrix2 avg;
    Rational lambda{1};
    std::shared_ptr<RNode> ca, cb;
};

std::shared_ptr<RNode> leaf(const RMatrix2& x) {
    auto n = std::make_shared<RNode>();
    n->avg = x;
    return n;
}

std::shared_ptr<RNode> split(Rational lambda, std::shared_ptr<RNode> ca, std::shared_ptr<RNode> cb) {
    auto n = std::make_shared<RNode>();
    n->lambda = lambda;
    n->avg = ca->avg.scaled(lambda) + cb->avg.scaled(Rational(1) - lambda);
    n->ca = std::move(ca);
    n->cb = std::move(cb);
    return n;
}

std::shared_ptr<RNode> split_tree(int m) {
    if (m == 0) return leaf(T_(0));
    auto mm = split(Rational(1, 4), leaf(C_(m)), split_tree(m - 1));
    return split(Rational(2, 3), mm, leaf(S_(m)));
}

void collect(const RNode& n, Rational w, std::vector<LaminateAtom>& out) {
    if (!n.ca) {
        out.push_back({w, n.avg});
        return;
    }
    collect(*n.ca, w * n.lambda, out);
    collect(*n.cb, w * (Rational(1) - n.lambda), out);
}

std::shared_ptr<const Node> to_node(const RNode& r, double t) {
    auto n = std::make_shared<Node>();
    n->avg = to_double(r.avg, t);
    if (!r.ca) return n;
    n->leaf = false;
    n->lambda = r.lambda.to_double();
    RMatrix2 d = r.ca->avg - r.cb->avg;
    const Rational zero(0);
    // A - B = a (x) e_axis needs a single nonzero column.
    bool col0 = d.m[0][0] != zero || d.m[1][0] != zero;
    bool col1 = d.m[0][1] != zero || d.m[1][1] != zero;
    if (col0 == col1) throw ConsistencyError("laminate split is not rank-one with an axis normal");
    n->axis = col0 ? 0 : 1;
    n->a = {d.m[0][n->axis].to_double() * t, d.m[1][n->axis].to_double() * t};
    n->child_a = to_node(*r.ca, t);
    n->child_b = to_node(*r.cb, t);
    return n;
}

struct Level {
    double eps, delta;
};

Level level(double len_normal, double len_tangent, int depth) {
    double target = len_tangent / (static_cast<double>(depth) * depth);
    double periods = std::max(1.0, std::round(len_normal / target));
    return {len_normal / periods, len_tangent / depth};
}

double cutoff(double x, double len, double delta, double* slope) {
    double lo = x / delta, hi = (len - x) / delta;
    if (lo >= 1.0 && hi >= 1.0) {
        *slope = 0.0;
        return 1.0;
    }
    if (lo <= hi) {
        *slope = lo > 0.0 ? 1.0 / delta : 0.0;
        return std::max(0.0, lo);
    }
    *slope = hi > 0.0 ? -1.0 / delta : 0.0;
    return std::max(0.0, hi);
}

std::array<double, 2> fluct_value(const Node& n, std::array<double, 2> size, std::array<double, 2> x, int depth) {
    if (n.leaf) return {0.0, 0.0};
    const int k = n.axis, tau = 1 - k;
    Level lv = level(size[k], size[tau], depth);
    double q = x[k] / lv.eps;
    double j = std::clamp(std::floor(q), 0.0, std::round(size[k] / lv.eps) - 1.0);
    double theta = std::clamp(q - j, 0.0, 1.0);
    double slope;
    double psi = cutoff(x[tau], size[tau], lv.delta, &slope);
    bool in_a = theta < n.lambda;
    double s = in_a ? (1.0 - n.lambda) * theta : n.lambda * (1.0 - theta);
    std::array<double, 2> v{lv.eps * s * psi * n.a[0], lv.eps * s * psi * n.a[1]};
    std::array<double, 2> csize = size, cx = x;
    csize[k] = (in_a ? n.lambda : 1.0 - n.lambda) * lv.eps;
    cx[k] = (in_a ? theta : theta - n.lambda) * lv.eps;
    auto c = fluct_value(in_a ? *n.child_a : *n.child_b, csize, cx, depth);
    return {v[0] + c[0], v[1] + c[1]};
}

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Fluctuation gradient; theta is drawn afresh below the top level.
Matrix2 fluct_grad(const Node& n, std::array<double, 2> size, std::array<double, 2> x, int depth, SplitMix& rng,
                   bool top) {
    Matrix2 g;
    if (n.leaf) return g;
    const int k = n.axis, tau = 1 - k;
    Level lv = level(size[k], size[tau], depth);
    double theta;
    if (top) {
        double q = x[k] / lv.eps;
        theta = std::clamp(q - std::floor(q), 0.0, 1.0);
    } else {
        theta = rng.uniform();
    }
    double slope;
    double psi = cutoff(x[tau], size[tau], lv.delta, &slope);
    bool in_a = theta < n.lambda;
    double s = in_a ? (1.0 - n.lambda) * theta : n.lambda * (1.0 - theta);
    double ds = in_a ? 1.0 - n.lambda : -n.lambda;
    for (int i = 0; i < 2; ++i) {
        g.m[i][k] += psi * ds * n.a[i];
        g.m[i][tau] += lv.eps * s * slope * n.a[i];
    }
    std::array<double, 2> csize = size, cx = x;
    csize[k] = (in_a ? n.lambda : 1.0 - n.lambda) * lv.eps;
    cx[k] = (in_a ? theta : theta - n.lambda) * lv.eps;
    return g + fluct_grad(in_a ? *n.child_a : *n.child_b, csize, cx, depth, rng, false);
}

}  // namespace

LaminateRealization::LaminateRealization(const Laminate& l, double r, int depth) : r_(r), depth_(depth) {
    if (!(r > 0.0)) throw DomainError("realization: r must be positive");
    if (depth < 2) throw DomainError("realization: depth must be >= 2");
    Laminate ref = canonical(build_laminate(l.order, l.t));
    Laminate given = canonical(l);
    if (given.atoms.size() != ref.atoms.size()) throw ConsistencyError("realization: not a laminate of the family");
    for (std::size_t i = 0; i < ref.atoms.size(); ++i) {
        const auto& x = given.atoms[i];
        if (!(x.weight == ref.atoms[i].weight) || !(x.unit == ref.atoms[i].unit))
            throw ConsistencyError("realization: not a laminate of the family");
    }
    auto tree = split_tree(l.order);
    std::vector<LaminateAtom> leaves;
    collect(*tree, Rational(1), leaves);
    Laminate from_tree = l;
    from_tree.atoms = leaves;
    from_tree = canonical(from_tree);
    for (std::size_t i = 0; i < ref.atoms.size(); ++i)
        if (!(from_tree.atoms[i].weight == ref.atoms[i].weight) || !(from_tree.atoms[i].unit == ref.atoms[i].unit))
            throw ConsistencyError("realization: split tree does not reproduce the laminate");
    root_ = to_node(*tree, l.t);
    average_ = root_->avg;
}

std::array<double, 2> LaminateRealization::fluctuation(double x, double y) const {
    return fluct_value(*root_, {r_, r_}, {x, y}, depth_);
}

std::vector<Matrix2> LaminateRealization::sample_gradients(std::size_t count, std::uint64_t seed) const {
    std::vector<Matrix2> out(count);
    std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    parallel_for(count, [&](std::size_t i) {
        SplitMix rng{seed * 0x2545F4914F6CDD1Dull + i};
        double x = (static_cast<double>(i % side) + rng.uniform()) / side * r_;
        double y = (static_cast<double>(i / side) + rng.uniform()) / side * r_;
        out[i] = average_ + fluct_grad(*root_, {r_, r_}, {x, y}, depth_, rng, true);
    });
    return out;
}

double LaminateRealization::realized_moment(const std::function<double(const Matrix2&)>& phi, std::size_t samples,
                                            std::uint64_t seed) const {
    auto g = sample_gradients(samples, seed);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = phi(g[i]);
    return pairwise_sum(v) / static_cast<double>(v.size());
}

double LaminateRealization::korn_ratio(const YoungFunction& a, const YoungFunction& b, std::size_t samples,
                                       std::uint64_t seed) const {
    auto g = sample_gradients(samples, seed);
    std::vector<double> full(g.size()), sym(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        Matrix2 d = g[i] - average_;
        full[i] = frobenius(d);
        sym[i] = frobenius(d.sym());
    }
    double w = r_ * r_ / static_cast<double>(g.size());
    double den = luxemburg(a, SampledFunction::uniform(sym, w)).value;
    if (den == 0.0) throw DegenerateInput("realization has no symmetric oscillation");
    return luxemburg(b, SampledFunction::uniform(full, w)).value / den;
}

GridField realize_field(const Laminate& l, double r, int depth, int cells) {
    LaminateRealization real(l, r, depth);
    Grid g = Grid::cube(2, cells, r, 0.0);
    return GridField::from_function(g, 2, [&](const Point& x) {
        auto v = real.fluctuation(x[0], x[1]);
        return Point{v[0], v[1], 0.0};
    }, true);
}

}  // namespace orlicz
