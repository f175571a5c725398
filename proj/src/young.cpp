#include "orlicz/young.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "orlicz/numeric.hpp"

namespace orlicz {

namespace detail {

class Profile {
public:
    virtual ~Profile() = default;
    virtual YoungKind kind() const = 0;
    virtual double value(double t) const = 0;
    virtual double density(double t) const = 0;
    virtual double finite_bound() const { return kInf; }
    virtual double density_limit() const { return kInf; }
    virtual std::optional<double> index_inf() const { return std::nullopt; }
    virtual std::optional<double> index_zero() const { return std::nullopt; }
    virtual nlohmann::json params() const = 0;
    virtual std::string describe() const = 0;
    virtual const YoungFunction* base() const { return nullptr; }

    virtual double inverse(double r) const {
        if (std::isinf(r)) return kInf;
        auto le = [&](double x) { return value(x) <= r; };
        double hi = 1.0;
        if (le(hi)) {
            double lo = hi;
            while (le(hi)) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e300) return kInf;
            }
            return bisect_last_true(le, lo, hi, 90);
        }
        while (hi > 1e-300 && !le(0.5 * hi)) hi *= 0.5;
        if (hi <= 1e-300) return 0.0;
        return bisect_last_true(le, 0.5 * hi, hi, 90);
    }

    virtual double density_inverse(double s) const {
        if (std::isinf(s)) return kInf;
        auto le = [&](double x) { return density(x) <= s; };
        double hi = 1.0;
        if (le(hi)) {
            double lo = hi;
            while (le(hi)) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e300) return kInf;
            }
            return bisect_last_true(le, lo, hi, 90);
        }
        while (hi > 1e-300 && !le(0.5 * hi)) hi *= 0.5;
        if (hi <= 1e-300) return 0.0;
        return bisect_last_true(le, 0.5 * hi, hi, 90);
    }
};

}  // namespace detail

namespace {

using detail::Profile;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

double conj_index(std::optional<double> q) {
    if (!q) return std::nan("");
    if (std::isinf(*q)) return 1.0;
    if (*q <= 1.0) return kInf;
    return *q / (*q - 1.0);
}

nlohmann::json num_json(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double json_num(const nlohmann::json& j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
        throw ConfigurationError("non-numeric value in Young function parameters: " + s);
    }
    return j.get<double>();
}

class PowerProfile final : public Profile {
public:
    PowerProfile(double p, double c) : p_(p), c_(c) {
        if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("Power: exponent must be >= 1");
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("Power: coefficient must be > 0");
    }
    YoungKind kind() const override { return YoungKind::Power; }
    double value(double t) const override { return p_ == 1.0 ? c_ * t : c_ * std::pow(t, p_); }
    double density(double t) const override {
        return p_ == 1.0 ? c_ : c_ * p_ * std::pow(t, p_ - 1.0);
    }
    double density_limit() const override { return p_ == 1.0 ? c_ : kInf; }
    double inverse(double r) const override { return std::pow(r / c_, 1.0 / p_); }
    double density_inverse(double s) const override {
        if (p_ == 1.0) return s < c_ ? 0.0 : kInf;
        return std::pow(s / (c_ * p_), 1.0 / (p_ - 1.0));
    }
    std::optional<double> index_inf() const override { return p_; }
    std::optional<double> index_zero() const override { return p_; }
    nlohmann::json params() const override { return {{"p", p_}, {"coef", c_}}; }
    std::string describe() const override {
        return (c_ == 1.0 ? "" : fmt(c_) + "*") + "t^" + fmt(p_);
    }
    double p() const { return p_; }
    double c() const { return c_; }

private:
    double p_, c_;
};

class LinearLogProfile final : public Profile {
public:
    YoungKind kind() const override { return YoungKind::LinearLog; }
    double value(double t) const override { return t * std::log1p(t); }
    double density(double t) const override { return std::log1p(t) + t / (1.0 + t); }
    std::optional<double> index_inf() const override { return 1.0; }
    std::optional<double> index_zero() const override { return 2.0; }
    nlohmann::json params() const override { return nlohmann::json::object(); }
    std::string describe() const override { return "t*log(1+t)"; }
};

// Smooth profile g made convex near 0 by a chord from the origin.
class CompletedProfile : public Profile {
public:
    double value(double t) const override { return t <= tstar_ ? kstar_ * t : g(t); }
    double density(double t) const override { return t <= tstar_ ? kstar_ : dg(t); }
    std::optional<double> index_zero() const override {
        if (tstar_ > 0.0) return 1.0;
        return raw_index_zero();
    }
    double completion_point() const { return tstar_; }

    // Must be called once after construction.
    void complete() {
        auto grid = log_grid(1e-12, 1e6, 1801);
        std::size_t last_bad = 0;
        bool bad = false;
        double prev = dg(grid[0]);
        if (!(prev >= 0.0)) {
            bad = true;
        }
        for (std::size_t i = 1; i < grid.size(); ++i) {
            double d = dg(grid[i]);
            if (!std::isfinite(d)) break;
            if (d < 0.0 || d < prev * (1.0 - 1e-12)) {
                last_bad = i;
                bad = true;
            }
            prev = d;
        }
        if (!bad) return;
        double t_nc = grid[last_bad];
        auto h = [&](double x) { return x * dg(x) - g(x); };
        double t_star = t_nc;
        if (h(t_nc) < 0.0) {
            double lo = t_nc, hi = 2.0 * t_nc;
            while (h(hi) < 0.0) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e300) throw DomainError("profile is not eventually convex");
            }
            t_star = bisect_last_true([&](double x) { return h(x) < 0.0; }, lo, hi, 200);
            t_star = hi > t_star ? std::nextafter(t_star, kInf) : t_star;
            while (h(t_star) < 0.0) t_star = std::nextafter(t_star, kInf);
        }
        tstar_ = t_star;
        kstar_ = g(t_star) / t_star;
        if (!(kstar_ > 0.0)) throw DomainError("profile has no positive completion slope");
    }

protected:
    virtual double g(double t) const = 0;
    virtual double dg(double t) const = 0;
    virtual std::optional<double> raw_index_zero() const = 0;

private:
    double tstar_ = 0.0;
    double kstar_ = 0.0;
};

class PowerLogProfile final : public CompletedProfile {
public:
    PowerLogProfile(double p, double alpha) : p_(p), alpha_(alpha) {
        if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("PowerLog: p must be >= 1");
        if (p == 1.0 && alpha <= 0.0) throw DomainError("PowerLog: p = 1 needs alpha > 0");
        if (!std::isfinite(alpha)) throw DomainError("PowerLog: alpha must be finite");
    }
    YoungKind kind() const override { return YoungKind::PowerLog; }
    std::optional<double> index_inf() const override { return p_; }
    nlohmann::json params() const override { return {{"p", p_}, {"alpha", alpha_}}; }
    std::string describe() const override {
        return "t^" + fmt(p_) + "*log(1+t)^" + fmt(alpha_);
    }

protected:
    double g(double t) const override {
        if (t == 0.0) return 0.0;
        return std::pow(t, p_) * std::pow(std::log1p(t), alpha_);
    }
    double dg(double t) const override {
        if (t == 0.0) return p_ + alpha_ > 1.0 ? 0.0 : (p_ + alpha_ == 1.0 ? 1.0 : kInf);
        double l = std::log1p(t);
        return std::pow(t, p_ - 1.0) * std::pow(l, alpha_ - 1.0) * (p_ * l + alpha_ * t / (1.0 + t));
    }
    std::optional<double> raw_index_zero() const override { return p_ + alpha_; }

private:
    double p_, alpha_;
};

class PowerLogLogProfile final : public CompletedProfile {
public:
    PowerLogLogProfile(double p, double alpha, double gamma) : p_(p), alpha_(alpha), gamma_(gamma) {
        if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("PowerLogLog: p must be >= 1");
        if (p == 1.0 && (alpha < 0.0 || (alpha == 0.0 && gamma <= 0.0)))
            throw DomainError("PowerLogLog: p = 1 needs superlinear growth");
        if (!std::isfinite(alpha) || !std::isfinite(gamma))
            throw DomainError("PowerLogLog: exponents must be finite");
    }
    YoungKind kind() const override { return YoungKind::PowerLogLog; }
    std::optional<double> index_inf() const override { return p_; }
    nlohmann::json params() const override {
        return {{"p", p_}, {"alpha", alpha_}, {"gamma", gamma_}};
    }
    std::string describe() const override {
        return "t^" + fmt(p_) + "*log(e+t)^" + fmt(alpha_) + "*log(e+log(1+t))^" + fmt(gamma_);
    }

protected:
    double g(double t) const override {
        if (t == 0.0) return 0.0;
        double e = std::log(std::numbers::e + t);
        double f = std::log(std::numbers::e + std::log1p(t));
        return std::pow(t, p_) * std::pow(e, alpha_) * std::pow(f, gamma_);
    }
    double dg(double t) const override {
        double l1 = std::log1p(t);
        double e = std::log(std::numbers::e + t);
        double f = std::log(std::numbers::e + l1);
        double bracket = p_ + alpha_ * t / ((std::numbers::e + t) * e) +
                         gamma_ * t / ((1.0 + t) * (std::numbers::e + l1) * f);
        double tp = p_ == 1.0 ? 1.0 : std::pow(t, p_ - 1.0);
        return tp * std::pow(e, alpha_) * std::pow(f, gamma_) * bracket;
    }
    std::optional<double> raw_index_zero() const override { return p_; }

private:
    double p_, alpha_, gamma_;
};

class ExpPowerProfile final : public CompletedProfile {
public:
    explicit ExpPowerProfile(double beta) : beta_(beta) {
        if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("ExpPower: beta must be > 0");
    }
    YoungKind kind() const override { return YoungKind::ExpPower; }
    std::optional<double> index_inf() const override { return kInf; }
    nlohmann::json params() const override { return {{"beta", beta_}}; }
    std::string describe() const override { return "exp(t^" + fmt(beta_) + ")-1"; }

protected:
    double g(double t) const override { return std::expm1(std::pow(t, beta_)); }
    double dg(double t) const override {
        if (t == 0.0) return beta_ > 1.0 ? 0.0 : (beta_ == 1.0 ? 1.0 : kInf);
        double tb = std::pow(t, beta_);
        return beta_ * tb / t * std::exp(tb);
    }
    std::optional<double> raw_index_zero() const override { return beta_; }

private:
    double beta_;
};

class ExpLogPowerProfile final : public CompletedProfile {
public:
    ExpLogPowerProfile(double a, double beta, double shift) : a_(a), beta_(beta), shift_(shift) {
        if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("ExpLogPower: a must be > 0");
        if (!(beta >= 1.0) || !std::isfinite(beta)) throw DomainError("ExpLogPower: beta must be >= 1");
        if (beta == 1.0 && a < 1.0) throw DomainError("ExpLogPower: beta = 1 needs a >= 1");
        if (1.0 + shift * (beta - 1.0) < 0.0)
            throw DomainError("ExpLogPower: shift makes the profile decreasing");
    }
    YoungKind kind() const override { return YoungKind::ExpLogPower; }
    std::optional<double> index_inf() const override {
        if (beta_ > 1.0) return kInf;
        return a_;
    }
    nlohmann::json params() const override {
        return {{"a", a_}, {"beta", beta_}, {"shift", shift_}};
    }
    std::string describe() const override {
        std::string inner = "log(e+t)";
        if (shift_ != 0.0 && beta_ != 1.0)
            inner += (shift_ > 0 ? "+" : "-") + fmt(std::fabs(shift_) * (beta_ - 1.0)) +
                     "*log(log(e+t))";
        return "exp(" + fmt(a_) + "*(" + inner + ")^" + fmt(beta_) + ")-exp(" + fmt(a_) + ")";
    }

protected:
    // u(t) - 1 without cancellation; log(e+t) = 1 + y.
    double u_minus_1(double t) const {
        double y = std::log1p(t / std::numbers::e);
        double c = shift_ * (beta_ - 1.0);
        double ly = std::log1p(y);
        // y - log1p(y), by its series when small.
        double gap = y < 1e-3 ? y * y * (0.5 - y * (1.0 / 3.0 - y * (0.25 - y / 5.0))) : y - ly;
        return (1.0 + c) * ly + gap;
    }
    double g(double t) const override {
        double ub_m1 = std::expm1(beta_ * std::log1p(u_minus_1(t)));
        return std::exp(a_) * std::expm1(a_ * ub_m1);
    }
    double dg(double t) const override {
        double x = std::numbers::e + t;
        double lx = std::log(x);
        double uu = lx + shift_ * (beta_ - 1.0) * std::log(lx);
        double du = (1.0 + shift_ * (beta_ - 1.0) / lx) / x;
        return std::exp(a_ * std::pow(uu, beta_)) * a_ * beta_ * std::pow(uu, beta_ - 1.0) * du;
    }
    std::optional<double> raw_index_zero() const override {
        if (dg(0.0) > 0.0) return 1.0;
        // shift (beta - 1) = -1: u - 1 ~ y^2 / 2, so A ~ t^2 near 0.
        if (shift_ * (beta_ - 1.0) == -1.0) return 2.0;
        return std::nullopt;
    }

private:
    double a_, beta_, shift_;
};

class IndicatorProfile final : public Profile {
public:
    explicit IndicatorProfile(double t1) : t1_(t1) {
        if (!(t1 > 0.0) || !std::isfinite(t1)) throw DomainError("Indicator: t1 must be > 0");
    }
    YoungKind kind() const override { return YoungKind::Indicator; }
    double value(double t) const override { return t <= t1_ ? 0.0 : kInf; }
    double density(double t) const override { return t <= t1_ ? 0.0 : kInf; }
    double finite_bound() const override { return t1_; }
    double density_limit() const override { return kInf; }
    double inverse(double r) const override { return std::isinf(r) ? kInf : t1_; }
    double density_inverse(double s) const override { return std::isinf(s) ? kInf : t1_; }
    nlohmann::json params() const override { return {{"t1", t1_}}; }
    std::string describe() const override { return "inf*chi(t>" + fmt(t1_) + ")"; }
    double t1() const { return t1_; }

private:
    double t1_;
};

class TabulatedProfile final : public Profile {
public:
    TabulatedProfile(std::vector<double> b, std::vector<double> s) {
        if (b.empty() || b.size() != s.size())
            throw DomainError("Tabulated: breakpoints and slopes must have equal nonzero length");
        if (b[0] != 0.0) throw DomainError("Tabulated: first breakpoint must be 0");
        for (std::size_t i = 1; i < b.size(); ++i) {
            if (!(b[i] > b[i - 1]) || !std::isfinite(b[i]))
                throw DomainError("Tabulated: breakpoints must be finite and increasing");
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] >= 0.0)) throw DomainError("Tabulated: slopes must be >= 0");
            if (i > 0 && s[i] < s[i - 1]) throw DomainError("Tabulated: slopes must be non-decreasing");
        }
        // Drop everything after the first infinite slope and merge equal slopes.
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!breaks_.empty() && s[i] == slopes_.back()) continue;
            breaks_.push_back(b[i]);
            slopes_.push_back(s[i]);
            if (std::isinf(s[i])) break;
        }
        if (std::isinf(slopes_.front())) throw DomainError("Tabulated: A is infinite on (0, inf)");
        if (slopes_.size() == 1 && slopes_.front() == 0.0) throw DomainError("Tabulated: A vanishes identically");
        values_.resize(breaks_.size());
        values_[0] = 0.0;
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            values_[i] = values_[i - 1] + slopes_[i - 1] * (breaks_[i] - breaks_[i - 1]);
    }
    YoungKind kind() const override { return YoungKind::Tabulated; }

    std::size_t interval(double t) const {
        // Index i with t in (b_i, b_{i+1}]; t = 0 maps to 0.
        auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
        if (it == breaks_.begin()) return 0;
        return static_cast<std::size_t>(it - breaks_.begin()) - 1;
    }
    double value(double t) const override {
        if (t == 0.0) return 0.0;
        std::size_t i = interval(t);
        if (std::isinf(slopes_[i])) return kInf;
        return values_[i] + slopes_[i] * (t - breaks_[i]);
    }
    double density(double t) const override { return slopes_[interval(t)]; }
    double finite_bound() const override {
        return std::isinf(slopes_.back()) ? breaks_.back() : kInf;
    }
    double density_limit() const override { return slopes_.back(); }
    double inverse(double r) const override {
        if (std::isinf(r)) return kInf;
        std::size_t k = breaks_.size();
        for (std::size_t i = 0; i < k; ++i) {
            if (std::isinf(slopes_[i])) return breaks_[i];
            bool last = i + 1 == k;
            if (!last && values_[i + 1] <= r) continue;
            if (slopes_[i] == 0.0) return last ? kInf : breaks_[i + 1];
            return breaks_[i] + (r - values_[i]) / slopes_[i];
        }
        return breaks_.back();
    }
    double density_inverse(double s) const override {
        if (std::isinf(s)) return kInf;
        std::size_t k = breaks_.size();
        std::size_t i = 0;
        if (slopes_[0] > s) return 0.0;
        while (i + 1 < k && slopes_[i + 1] <= s) ++i;
        return i + 1 == k ? kInf : breaks_[i + 1];
    }
    std::optional<double> index_inf() const override {
        if (std::isinf(slopes_.back())) return std::nullopt;
        return 1.0;
    }
    std::optional<double> index_zero() const override {
        return slopes_.front() > 0.0 ? 1.0 : kInf;
    }
    nlohmann::json params() const override {
        nlohmann::json s = nlohmann::json::array();
        for (double x : slopes_) s.push_back(num_json(x));
        return {{"breakpoints", breaks_}, {"slopes", s}};
    }
    std::string describe() const override {
        return "tabulated(" + std::to_string(breaks_.size()) + " pieces)";
    }
    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<double>& slopes() const { return slopes_; }

private:
    std::vector<double> breaks_, slopes_, values_;
};

class ScaledProfile final : public Profile {
public:
    ScaledProfile(double m, double k, YoungFunction base) : m_(m), k_(k), base_(std::move(base)) {
        if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("Scaled: M must be > 0");
        if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("Scaled: k must be > 0");
    }
    YoungKind kind() const override { return YoungKind::Scaled; }
    double value(double t) const override { return base_(k_ * t) / m_; }
    double density(double t) const override { return k_ * base_.density(k_ * t) / m_; }
    double finite_bound() const override { return base_.finite_bound() / k_; }
    double density_limit() const override { return k_ * base_.density_limit() / m_; }
    double inverse(double r) const override { return base_.inverse(m_ * r) / k_; }
    double density_inverse(double s) const override {
        return base_.density_inverse(m_ * s / k_) / k_;
    }
    std::optional<double> index_inf() const override { return base_.index_at_infinity(); }
    std::optional<double> index_zero() const override { return base_.index_at_zero(); }
    nlohmann::json params() const override {
        return {{"M", m_}, {"k", k_}, {"of", base_.to_json()}};
    }
    std::string describe() const override {
        return "A(" + fmt(k_) + "t)/" + fmt(m_) + " with A=" + base_.describe();
    }
    const YoungFunction* base() const override { return &base_; }
    double m() const { return m_; }
    double k() const { return k_; }

private:
    double m_, k_;
    YoungFunction base_;
};

double legendre_profile(const Profile& p, double s);

class ConjugateProfile final : public Profile {
public:
    explicit ConjugateProfile(YoungFunction base) : base_(std::move(base)) {}
    YoungKind kind() const override { return YoungKind::Conjugate; }
    double value(double s) const override { return legendre_profile(base_.impl(), s); }
    double density(double s) const override { return base_.density_inverse(s); }
    double finite_bound() const override { return base_.density_limit(); }
    double density_limit() const override { return base_.finite_bound(); }
    std::optional<double> index_inf() const override {
        auto q = base_.index_at_infinity();
        if (!q) return std::nullopt;
        return conj_index(q);
    }
    std::optional<double> index_zero() const override {
        auto q = base_.index_at_zero();
        if (!q) return std::nullopt;
        return conj_index(q);
    }
    nlohmann::json params() const override { return {{"of", base_.to_json()}}; }
    std::string describe() const override { return "conj[" + base_.describe() + "]"; }
    const YoungFunction* base() const override { return &base_; }

private:
    YoungFunction base_;
};

double legendre_profile(const Profile& p, double s) {
    if (s < 0.0 || std::isnan(s)) throw DomainError("Young conjugate: negative argument");
    if (s == 0.0) return 0.0;
    double lim = p.density_limit();
    if (s > lim) return kInf;
    double r = p.density_inverse(s);
    // The maximizer escapes the double range: the supremum overflows.
    if (std::isinf(r) && s < lim) return kInf;
    if (std::isinf(r)) {
        double best = 0.0;
        for (int e = -20; e <= 40; ++e) {
            double x = std::ldexp(1.0, e);
            double v = x * s - p.value(x);
            if (std::isfinite(v)) best = std::max(best, v);
        }
        return best;
    }
    double rs = r * s;
    if (std::isinf(rs)) return kInf;
    double v = rs - p.value(r);
    return std::isnan(v) ? 0.0 : std::max(v, 0.0);
}

template <class T>
const T* as(const YoungFunction& a) {
    return dynamic_cast<const T*>(&a.impl());
}

template <class T, class... Args>
YoungFunction make_completed(Args&&... args) {
    auto p = std::make_shared<T>(std::forward<Args>(args)...);
    p->complete();
    return YoungFunction(std::shared_ptr<const Profile>(std::move(p)));
}

}  // namespace

std::string to_string(YoungKind kind) {
    switch (kind) {
        case YoungKind::Power: return "Power";
        case YoungKind::PowerLog: return "PowerLog";
        case YoungKind::PowerLogLog: return "PowerLogLog";
        case YoungKind::ExpPower: return "ExpPower";
        case YoungKind::ExpLogPower: return "ExpLogPower";
        case YoungKind::LinearLog: return "LinearLog";
        case YoungKind::Indicator: return "Indicator";
        case YoungKind::Tabulated: return "Tabulated";
        case YoungKind::Conjugate: return "Conjugate";
        case YoungKind::Scaled: return "Scaled";
    }
    return "?";
}

YoungFunction YoungFunction::power(double p, double coef) {
    return YoungFunction(std::make_shared<PowerProfile>(p, coef));
}
YoungFunction YoungFunction::power_log(double p, double alpha) {
    if (alpha == 0.0) return power(p);
    return make_completed<PowerLogProfile>(p, alpha);
}
YoungFunction YoungFunction::power_log_log(double p, double alpha, double gamma) {
    return make_completed<PowerLogLogProfile>(p, alpha, gamma);
}
YoungFunction YoungFunction::exp_power(double beta) {
    return make_completed<ExpPowerProfile>(beta);
}
YoungFunction YoungFunction::exp_log_power(double a, double beta, double shift) {
    return make_completed<ExpLogPowerProfile>(a, beta, shift);
}
YoungFunction YoungFunction::linear_log() {
    return YoungFunction(std::make_shared<LinearLogProfile>());
}
YoungFunction YoungFunction::indicator(double t1) {
    return YoungFunction(std::make_shared<IndicatorProfile>(t1));
}
YoungFunction YoungFunction::tabulated(std::vector<double> breakpoints, std::vector<double> slopes) {
    return YoungFunction(std::make_shared<TabulatedProfile>(std::move(breakpoints), std::move(slopes)));
}
YoungFunction YoungFunction::scaled(double m, double k, const YoungFunction& base) {
    if (const auto* pw = as<PowerProfile>(base)) {
        if (!(m > 0.0) || !(k > 0.0)) throw DomainError("Scaled: M and k must be > 0");
        return power(pw->p(), pw->c() * std::pow(k, pw->p()) / m);
    }
    if (const auto* sc = as<ScaledProfile>(base)) {
        return YoungFunction(std::make_shared<ScaledProfile>(m * sc->m(), k * sc->k(), *sc->base()));
    }
    return YoungFunction(std::make_shared<ScaledProfile>(m, k, base));
}

YoungFunction YoungFunction::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigurationError("Young function JSON needs a \"kind\" field");
    std::string kind = j.at("kind").get<std::string>();
    nlohmann::json p = j.value("params", nlohmann::json::object());
    auto num = [&](const char* key, double fallback) {
        return p.contains(key) ? json_num(p.at(key)) : fallback;
    };
    auto req = [&](const char* key) {
        if (!p.contains(key)) throw ConfigurationError(kind + ": missing parameter " + key);
        return json_num(p.at(key));
    };
    if (kind == "Power") return power(req("p"), num("coef", 1.0));
    if (kind == "PowerLog") return power_log(req("p"), req("alpha"));
    if (kind == "PowerLogLog") return power_log_log(req("p"), num("alpha", 0.0), num("gamma", 0.0));
    if (kind == "ExpPower") return exp_power(req("beta"));
    if (kind == "ExpLogPower") return exp_log_power(req("a"), req("beta"), num("shift", 0.0));
    if (kind == "LinearLog") return linear_log();
    if (kind == "Indicator") return indicator(num("t1", 1.0));
    if (kind == "Tabulated") {
        std::vector<double> b, s;
        for (const auto& x : p.at("breakpoints")) b.push_back(json_num(x));
        for (const auto& x : p.at("slopes")) s.push_back(json_num(x));
        return tabulated(std::move(b), std::move(s));
    }
    if (kind == "Conjugate") return conjugate(from_json(p.at("of")));
    if (kind == "Scaled") return scaled(num("M", 1.0), num("k", 1.0), from_json(p.at("of")));
    throw ConfigurationError("unknown Young function kind: " + kind);
}

nlohmann::json YoungFunction::to_json() const {
    return {{"kind", to_string(kind())}, {"params", impl_->params()}};
}

double YoungFunction::operator()(double t) const {
    if (t < 0.0 || std::isnan(t)) throw DomainError("Young function evaluated at negative t");
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return kInf;
    return impl_->value(t);
}
double YoungFunction::density(double t) const {
    if (t < 0.0 || std::isnan(t)) throw DomainError("density evaluated at negative t");
    return impl_->density(t);
}
double YoungFunction::inverse(double r) const {
    if (r < 0.0 || std::isnan(r)) throw DomainError("inverse evaluated at negative r");
    return impl_->inverse(r);
}
double YoungFunction::density_inverse(double s) const {
    if (s < 0.0 || std::isnan(s)) throw DomainError("density inverse at negative s");
    return impl_->density_inverse(s);
}
YoungKind YoungFunction::kind() const { return impl_->kind(); }
bool YoungFunction::finite_valued() const { return std::isinf(impl_->finite_bound()); }
double YoungFunction::finite_bound() const { return impl_->finite_bound(); }
double YoungFunction::density_limit() const { return impl_->density_limit(); }
std::optional<double> YoungFunction::index_at_infinity() const { return impl_->index_inf(); }
std::optional<double> YoungFunction::index_at_zero() const { return impl_->index_zero(); }
std::string YoungFunction::describe() const { return impl_->describe(); }
const YoungFunction* YoungFunction::base() const { return impl_->base(); }

std::pair<std::vector<double>, std::vector<double>> YoungFunction::table() const {
    if (const auto* t = dynamic_cast<const TabulatedProfile*>(impl_.get()))
        return {t->breaks(), t->slopes()};
    return {};
}
std::pair<double, double> YoungFunction::power_params() const {
    if (const auto* p = dynamic_cast<const PowerProfile*>(impl_.get())) return {p->p(), p->c()};
    throw DomainError("power_params on non-Power kind");
}
std::pair<double, double> YoungFunction::scale_params() const {
    if (const auto* p = dynamic_cast<const ScaledProfile*>(impl_.get())) return {p->m(), p->k()};
    throw DomainError("scale_params on non-Scaled kind");
}
double YoungFunction::indicator_level() const {
    if (const auto* p = dynamic_cast<const IndicatorProfile*>(impl_.get())) return p->t1();
    throw DomainError("indicator_level on non-Indicator kind");
}

double evaluate(const YoungFunction& a, double t) { return a(t); }
double inverse(const YoungFunction& a, double r) { return a.inverse(r); }

double legendre_at(const YoungFunction& a, double s) { return legendre_profile(a.impl(), s); }

YoungFunction conjugate(const YoungFunction& a) {
    switch (a.kind()) {
        case YoungKind::Power: {
            auto [p, c] = a.power_params();
            if (p == 1.0) return YoungFunction::indicator(c);
            double q = p / (p - 1.0);
            return YoungFunction::power(q, (p - 1.0) * c * std::pow(c * p, -q));
        }
        case YoungKind::Indicator: return YoungFunction::power(1.0, a.indicator_level());
        case YoungKind::Conjugate: return *a.base();
        case YoungKind::Scaled: {
            auto [m, k] = a.scale_params();
            return YoungFunction::scaled(m, m / k, conjugate(*a.base()));
        }
        case YoungKind::Tabulated: {
            auto [b, s] = a.table();
            std::vector<std::pair<double, double>> pieces;  // (start, slope)
            if (s[0] > 0.0) pieces.emplace_back(0.0, 0.0);
            for (std::size_t i = 1; i < b.size(); ++i) pieces.emplace_back(s[i - 1], b[i]);
            if (std::isfinite(s.back())) pieces.emplace_back(s.back(), kInf);
            std::vector<double> nb, ns;
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                if (i + 1 < pieces.size() && pieces[i + 1].first == pieces[i].first) continue;
                if (!ns.empty() && ns.back() == pieces[i].second) continue;
                nb.push_back(pieces[i].first);
                ns.push_back(pieces[i].second);
            }
            return YoungFunction::tabulated(std::move(nb), std::move(ns));
        }
        default: return YoungFunction(std::make_shared<ConjugateProfile>(a));
    }
}

YoungFunction legendre_tabulate(const YoungFunction& a, std::size_t points, double lo, double hi) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("legendre_tabulate: bad grid");
    auto grid = log_grid(lo, hi, points);
    // Kinks of A are kept as nodes so the interpolant is exact there.
    std::vector<double> kinks = a.table().first;
    if (std::isfinite(a.finite_bound())) kinks.push_back(a.finite_bound());
    for (double k : kinks)
        if (k > lo && k < hi) grid.push_back(k);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> b{0.0}, s;
    double prev_r = 0.0, prev_v = 0.0;
    for (double r : grid) {
        double v = a(r);
        if (std::isinf(v)) {
            s.push_back(kInf);
            break;
        }
        double slope = (v - prev_v) / (r - prev_r);
        if (!s.empty()) slope = std::max(slope, s.back());
        s.push_back(slope);
        b.push_back(r);
        prev_r = r;
        prev_v = v;
    }
    if (s.size() < b.size()) s.push_back(s.back());
    // Interpolant of A on the grid, continued with its last slope.
    auto interp = YoungFunction::tabulated(std::move(b), std::move(s));
    return conjugate(interp);
}

// ---------------------------------------------------------------- growth scans

namespace {

struct Scan {
    double ext_coarse = 0.0;  // every other grid point
    double ext_fine = 0.0;
    double ext_head = 0.0;    // t <= t_max / 1e3
    std::vector<double> ts, vals;
};

Scan scan_ratio(const std::function<double(double)>& ratio, double t_start, double t_max,
                int ppd, bool want_max) {
    Scan sc;
    double decades = std::log10(t_max / t_start);
    std::size_t n = static_cast<std::size_t>(std::ceil(decades * ppd)) * 2 + 1;
    sc.ts = log_grid(t_start, t_max, n);
    sc.vals.resize(n);
    double init = want_max ? -kInf : kInf;
    sc.ext_coarse = sc.ext_fine = sc.ext_head = init;
    auto better = [&](double cur, double v) {
        if (std::isnan(v)) return cur;
        return want_max ? std::max(cur, v) : std::min(cur, v);
    };
    for (std::size_t i = 0; i < n; ++i) {
        double v = ratio(sc.ts[i]);
        sc.vals[i] = v;
        sc.ext_fine = better(sc.ext_fine, v);
        if (i % 2 == 0) sc.ext_coarse = better(sc.ext_coarse, v);
        if (sc.ts[i] <= t_max / 1e3) sc.ext_head = better(sc.ext_head, v);
    }
    return sc;
}

// t values where the ratio sets a new record in the unfavourable direction.
std::vector<double> record_points(const Scan& sc, bool increasing, std::size_t keep = 8) {
    std::vector<double> out;
    double rec = increasing ? -kInf : kInf;
    for (std::size_t i = 0; i < sc.ts.size(); ++i) {
        double v = sc.vals[i];
        if (std::isnan(v)) continue;
        bool is_rec = increasing ? v > rec : v < rec;
        if (is_rec) {
            rec = v;
            out.push_back(sc.ts[i]);
        }
        if (increasing && std::isinf(v)) break;
    }
    if (out.size() > keep) out.erase(out.begin(), out.end() - static_cast<long>(keep));
    return out;
}

double delta2_ratio(const YoungFunction& a, double t) {
    double a1 = a(t), a2 = a(2.0 * t);
    if (std::isinf(a2) && std::isinf(a1)) return 1.0;
    if (std::isinf(a2)) return kInf;
    if (a1 == 0.0) return a2 == 0.0 ? 1.0 : kInf;
    return a2 / a1;
}

double nabla2_ratio(const YoungFunction& a, double t) {
    double a1 = a(t), a2 = a(2.0 * t);
    if (std::isinf(a1) || std::isinf(a2) || a1 == 0.0) return kInf;
    return a2 / a1;
}

bool stable(double coarse, double fine) {
    if (std::isinf(coarse) && std::isinf(fine)) return true;
    return std::fabs(coarse - fine) <= 0.05 * std::fabs(fine);
}

std::vector<double> candidates(bool near_infinity, const GrowthScanOptions& opt) {
    if (near_infinity) return opt.thresholds;
    return {0.0};
}

}  // namespace

GrowthVerdict check_delta2(const YoungFunction& a, bool near_infinity, const GrowthScanOptions& opt) {
    GrowthVerdict v;
    if (!a.finite_valued()) {
        v.holds = false;
        v.failure_certificate = {0.75 * a.finite_bound()};
        v.note = "A is infinite beyond " + fmt(a.finite_bound());
        if (near_infinity) v.threshold_t0 = opt.thresholds.front();
        return v;
    }
    auto ratio = [&](double t) { return delta2_ratio(a, t); };
    auto idx = a.index_at_infinity();
    std::optional<Scan> first;
    for (double t0 : candidates(near_infinity, opt)) {
        double start = std::max(t0, opt.t_min);
        Scan sc = scan_ratio(ratio, start, opt.t_max, opt.points_per_decade, true);
        if (!first) first = sc;
        bool finite = std::isfinite(sc.ext_fine);
        bool numeric_ok = finite && stable(sc.ext_coarse, sc.ext_fine) &&
                          sc.ext_fine <= 1.05 * sc.ext_head;
        bool ok = idx ? (std::isfinite(*idx) && finite) : numeric_ok;
        if (ok) {
            v.holds = true;
            v.witness_constant = sc.ext_fine;
            if (near_infinity) v.threshold_t0 = t0;
            if (idx) v.note = "asymptotic index " + fmt(*idx);
            return v;
        }
        if (idx && std::isinf(*idx)) break;
    }
    v.holds = false;
    if (near_infinity) v.threshold_t0 = opt.thresholds.front();
    v.failure_certificate = record_points(*first, true);
    if (idx && std::isinf(*idx)) v.note = "index t a(t)/A(t) tends to infinity";
    else v.note = "ratio A(2t)/A(t) not bounded stably on the scan";
    return v;
}

GrowthVerdict check_nabla2(const YoungFunction& a, bool near_infinity, const GrowthScanOptions& opt) {
    GrowthVerdict v;
    if (!near_infinity) {
        // A(2t)/A(t) -> 2 as t -> 0 when the index at zero is 1; no scan reaches that limit.
        auto iz = a.index_at_zero();
        if (iz && *iz <= 1.0 && a(opt.t_min) > 0.0) {
            v.holds = false;
            v.failure_certificate = {opt.t_min};
            v.note = "index at 0 is 1; ratio A(2t)/A(t) tends to 2 as t -> 0";
            return v;
        }
    }
    auto ratio = [&](double t) { return nabla2_ratio(a, t); };
    auto idx = a.finite_valued() ? a.index_at_infinity() : std::nullopt;
    const double strict = 2.0 * (1.0 + 1e-9);
    std::optional<Scan> first;
    for (double t0 : candidates(near_infinity, opt)) {
        double start = std::max(t0, opt.t_min);
        Scan sc = scan_ratio(ratio, start, opt.t_max, opt.points_per_decade, false);
        if (!first) first = sc;
        bool numeric_ok = sc.ext_fine > strict && stable(sc.ext_coarse, sc.ext_fine) &&
                          sc.ext_fine >= sc.ext_head / 1.05;
        bool ok;
        if (idx && near_infinity) ok = *idx > 1.0 && sc.ext_fine > strict;
        else if (idx) ok = *idx > 1.0 && numeric_ok;
        else ok = numeric_ok;
        if (ok) {
            v.holds = true;
            v.witness_constant = sc.ext_fine;
            if (near_infinity) v.threshold_t0 = t0;
            if (idx) v.note = "asymptotic index " + fmt(*idx);
            return v;
        }
        if (idx && *idx <= 1.0) break;
    }
    if (idx && near_infinity && *idx > 1.0) {
        // Closed form with index above 1 whose ratio has not cleared 2 on the scan.
        v.holds = true;
        v.threshold_t0 = opt.t_max;
        v.witness_constant = std::pow(2.0, std::min(*idx, 60.0));
        v.note = "asymptotic only: ratio tends to 2^index beyond the scan";
        return v;
    }
    v.holds = false;
    if (near_infinity) v.threshold_t0 = opt.thresholds.front();
    v.failure_certificate = record_points(*first, false);
    if (idx && *idx <= 1.0) v.note = "index t a(t)/A(t) tends to 1; ratio A(2t)/A(t) tends to 2";
    else v.note = "ratio A(2t)/A(t) does not stay above 2 stably";
    return v;
}

GrowthVerdict dominates(const YoungFunction& a, const YoungFunction& b, bool near_infinity,
                        const GrowthScanOptions& opt) {
    GrowthVerdict v;
    std::vector<double> worst_ts;
    for (double t0 : candidates(near_infinity, opt)) {
        double start = std::max(t0, opt.t_min);
        for (int k = -10; k <= 10; ++k) {
            double c = std::ldexp(1.0, k);
            auto ratio = [&](double t) {
                double bt = b(t), act = a(c * t);
                if (std::isinf(act)) return 0.0;
                if (std::isinf(bt)) return kInf;
                if (act == 0.0) return bt == 0.0 ? 0.0 : kInf;
                return bt / act;
            };
            Scan sc = scan_ratio(ratio, start, opt.t_max, opt.points_per_decade, true);
            bool ok = sc.ext_fine <= 1.0 + 1e-12;
            // Reject constants that only work because the scan stops.
            if (ok && sc.ext_head > 0.0) ok = sc.ext_fine <= 1.05 * sc.ext_head;
            if (ok) {
                v.holds = true;
                v.witness_constant = c;
                if (near_infinity) v.threshold_t0 = t0;
                return v;
            }
            if (k == 10 && worst_ts.empty()) {
                for (std::size_t i = 0; i < sc.ts.size(); ++i)
                    if (sc.vals[i] > 1.0) worst_ts.push_back(sc.ts[i]);
                if (worst_ts.empty()) worst_ts = record_points(sc, true);
                if (worst_ts.size() > 8) worst_ts.erase(worst_ts.begin(), worst_ts.end() - 8);
            }
        }
    }
    v.holds = false;
    if (near_infinity) v.threshold_t0 = opt.thresholds.front();
    v.witness_constant = 1024.0;
    v.failure_certificate = worst_ts;
    v.note = "B(t)/A(Ct) exceeds 1 or keeps growing for every C in 2^-10..2^10";
    return v;
}

bool equivalent(const YoungFunction& a, const YoungFunction& b, bool near_infinity,
                const GrowthScanOptions& opt) {
    return dominates(a, b, near_infinity, opt).holds && dominates(b, a, near_infinity, opt).holds;
}

}  // namespace orlicz
