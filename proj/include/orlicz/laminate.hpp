#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "orlicz/fields.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

// Exact rational with 64-bit parts; arithmetic throws ConsistencyError on overflow.
class Rational {
public:
    Rational(std::int64_t num = 0, std::int64_t den = 1);
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend Rational operator+(const Rational& x, const Rational& y);
    friend Rational operator-(const Rational& x, const Rational& y);
    friend Rational operator*(const Rational& x, const Rational& y);
    friend Rational operator/(const Rational& x, const Rational& y);
    Rational operator-() const { return Rational(-num_, den_); }
    Rational& operator+=(const Rational& y) { return *this = *this + y; }
    friend bool operator==(const Rational& x, const Rational& y) = default;
    friend std::strong_ordering operator<=>(const Rational& x, const Rational& y);
    Rational abs() const { return Rational(num_ < 0 ? -num_ : num_, den_); }

private:
    std::int64_t num_, den_;
};

// 2x2 matrix with entries m[row][col].
template <class T>
struct Mat2 {
    std::array<std::array<T, 2>, 2> m{};
    static Mat2 G(T a, T b) {
        Mat2 x;
        x.m = {{{T(0), a}, {b, T(0)}}};
        return x;
    }
    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    Mat2 operator-(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    Mat2 scaled(const T& s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] * s;
        return r;
    }
    Mat2 transpose() const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    Mat2 sym() const { return (*this + transpose()).scaled(T(1) / T(2)); }
    bool operator==(const Mat2& o) const = default;
};

using Matrix2 = Mat2<double>;
using RMatrix2 = Mat2<Rational>;

double frobenius(const Matrix2& x);
bool is_symmetric(const Matrix2& x);
bool is_skew(const Matrix2& x);
Rational entry_l1(const RMatrix2& x);  // sum of |entries|

struct LaminateAtom {
    Rational weight;
    RMatrix2 unit;  // matrix in units of t
};

struct Laminate {
    int order = 0;
    double t = 1.0;
    std::vector<LaminateAtom> atoms;

    Matrix2 matrix(std::size_t i) const;
    Rational mass() const;
    RMatrix2 barycenter_unit() const;
    Matrix2 barycenter() const;
};

// Closed form: 2^-m at G(t,t); for k = 1..m, (1/3) 2^(k-m) at G(2^-k t, -2^-k t)
// and (1/6) 2^(k-m) at G(-2^(1-k) t, 2^(1-k) t).
Laminate build_laminate(int m, double t);
// Same measure from the splits T_m = 2/3 M_m + 1/3 S_m, M_m = 1/4 C_m + 3/4 T_(m-1).
Laminate build_laminate_recursive(int m, double t);
// Atoms sorted canonically with equal matrices merged.
Laminate canonical(const Laminate& l);

double moment(const Laminate& l, const std::function<double(const Matrix2&)>& phi);
// sum w |X - avg|_1 (or of the symmetric parts) in units of t, exactly.
Rational first_moment_exact(const Laminate& l, bool symmetric_part);

struct BlowupRow {
    int m = 0;
    double t_m = 0.0;
    double sym_moment = 0.0;   // sum w A(|X^sym - avg|)
    double full_moment = 0.0;  // sum w B(|X - avg|)
    double ratio = 0.0;
};

// t_m solves r^2 2^-m A(2 |G(t,t)|) = 1/2.
std::vector<BlowupRow> blowup_curve(const YoungFunction& a, const YoungFunction& b, int m_max, double r);

// Piecewise-affine field on (0, r)^2 realizing the laminate by nested sawtooth
// laminations with a cutoff layer of relative width 1/depth at every level.
class LaminateRealization {
public:
    LaminateRealization(const Laminate& l, double r, int depth);

    Matrix2 average() const { return average_; }
    double side() const { return r_; }
    // u(x) - average x; vanishes on the boundary of the square.
    std::array<double, 2> fluctuation(double x, double y) const;
    // Gradient samples with stratified top-level positions; deeper levels draw
    // their position inside the period afresh.
    std::vector<Matrix2> sample_gradients(std::size_t count, std::uint64_t seed) const;
    double realized_moment(const std::function<double(const Matrix2&)>& phi, std::size_t samples,
                           std::uint64_t seed = 1) const;
    // ||grad v||_B / ||E v||_A from gradient samples, v = u - average x.
    double korn_ratio(const YoungFunction& a, const YoungFunction& b, std::size_t samples,
                      std::uint64_t seed = 1) const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    Matrix2 average_;
    double r_;
    int depth_;
};

// Fluctuation field of the realization on a cells x cells grid over (0, r)^2.
GridField realize_field(const Laminate& l, double r, int depth, int cells = 256);

}  // namespace orlicz
