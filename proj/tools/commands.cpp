#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "orlicz/balance.hpp"
#include "orlicz/bogovskii.hpp"
#include "orlicz/catalog.hpp"
#include "orlicz/field_io.hpp"
#include "orlicz/fields.hpp"
#include "orlicz/hardy.hpp"
#include "orlicz/laminate.hpp"

#ifndef ORLICZ_KORN_VERSION
#define ORLICZ_KORN_VERSION "0.0.0"
#endif

namespace orlicz::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const std::vector<std::string> kCommands{"check-balance", "classify-examples", "verify-hardy",
                                         "verify-korn",   "laminate-demo",     "bogovskii",
                                         "poincare",      "negative-norm"};

// Drift above this between two resolutions counts as not refinement-stable.
constexpr double kDriftTol = 0.10;
constexpr double kResidualTol = 0.05;

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

struct Cell {
    std::string text;
    Cell(double x) : text(num(x)) {}
    Cell(int x) : text(std::to_string(x)) {}
    Cell(std::size_t x) : text(std::to_string(x)) {}
    Cell(bool x) : text(x ? "true" : "false") {}
    Cell(const char* s) : text(quote(s)) {}
    Cell(const std::string& s) : text(quote(s)) {}
};

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : f_(path) {
        if (!f_) throw ConfigurationError("cannot write " + path.string());
        row(std::vector<Cell>(header.begin(), header.end()));
    }
    void row(const std::vector<Cell>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i].text;
        f_ << '\n';
    }

private:
    std::ofstream f_;
};

double drift(double base, double other) {
    if (!std::isfinite(base) || !std::isfinite(other)) return kInf;
    if (base == 0.0) return other == 0.0 ? 0.0 : kInf;
    return std::fabs(other - base) / std::fabs(base);
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Options of one subcommand, remembered so the manifest lists every parameter.
class Params {
public:
    explicit Params(CLI::App* app) : app_(app) {}
    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& desc) {
        getters_.emplace_back(name, [&var] { return json(var); });
        return app_->add_option("--" + name, var, desc)->capture_default_str();
    }
    CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
        getters_.emplace_back(name, [&var] { return json(var); });
        return app_->add_flag("--" + name, var, desc);
    }
    json values() const {
        json j = json::object();
        for (const auto& [k, g] : getters_) j[k] = g();
        return j;
    }
    CLI::App* app() const { return app_; }

private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<json()>>> getters_;
};

struct Context {
    std::string command;
    fs::path out_dir;
    std::uint64_t seed = 20240607;
    json parameters;
    std::vector<std::string> outputs;
    std::ostream& out;

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return out_dir / name;
    }
};

void dump_field(Context& ctx, const GridField& u, const std::string& stem, FieldFormat fmt) {
    write_field(u, ctx.out_dir / stem, fmt);
    ctx.outputs.push_back(stem + ".json");
    ctx.outputs.push_back(stem + (fmt == FieldFormat::Csv ? ".csv" : ".bin"));
}

YoungFunction young(const std::string& name) { return Catalog::builtin().resolve(name); }

struct PairVerdict {
    BalanceReport report;
    bool holds() const { return report.cond_1_1.holds && report.cond_1_2.holds; }
};

PairVerdict balance_of(const YoungFunction& a, const YoungFunction& b) { return {check_balance(a, b)}; }

std::vector<std::string> balance_header() { return {"name_A", "name_B", "cond11", "cond12", "c", "t0"}; }

std::vector<Cell> balance_cells(const std::string& na, const std::string& nb, const PairVerdict& v) {
    return {na, nb, v.report.cond_1_1.holds, v.report.cond_1_2.holds, v.report.witness_c, v.report.threshold_t0};
}

template <class T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

double sup_finite_or_inf(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs)
        if (!std::isnan(x)) s = std::max(s, x);
    return s;
}

// ---------------------------------------------------------------- check-balance

struct BalanceArgs {
    std::string a = "L2", b = "L2";
    bool global = false;
};

double verdict_t0(const GrowthVerdict& v) { return v.threshold_t0.value_or(0.0); }

int check_balance_cmd(Context& ctx, const BalanceArgs& args) {
    auto a = young(args.a), b = young(args.b);
    BalanceOptions opt;
    opt.global_only = args.global;
    PairVerdict v{check_balance(a, b, opt)};

    Csv csv(ctx.file("balance.csv"),
            concat(balance_header(), {"c_11", "t0_11", "c_12", "t0_12", "note_11", "note_12"}));
    const auto& r = v.report;
    csv.row(concat(balance_cells(args.a, args.b, v),
                   {r.cond_1_1.witness_constant, verdict_t0(r.cond_1_1), r.cond_1_2.witness_constant,
                    verdict_t0(r.cond_1_2), r.cond_1_1.note, r.cond_1_2.note}));
    Csv diag(ctx.file("diagnostic.csv"), {"condition", "t", "ratio"});
    for (const auto& p : r.diagnostic_1_1) diag.row({"cond11", p.t, p.ratio});
    for (const auto& p : r.diagnostic_1_2) diag.row({"cond12", p.t, p.ratio});

    ctx.out << args.a << " / " << args.b << ": cond11=" << (r.cond_1_1.holds ? "holds" : "fails")
            << " cond12=" << (r.cond_1_2.holds ? "holds" : "fails") << " c=" << num(r.witness_c)
            << " t0=" << num(r.threshold_t0) << '\n';

    // Catalog pairs carry expected verdicts; a mismatch is a verdict failure.
    const auto& cat = Catalog::builtin();
    for (const auto* list : {&cat.examples(), &cat.controls()})
        for (const auto& p : *list)
            if (p.a == args.a && p.b == args.b && !args.global) {
                bool ok = p.expect_11 == r.cond_1_1.holds && p.expect_12 == r.cond_1_2.holds;
                ctx.out << "catalog pair " << p.id << ": " << (ok ? "matches" : "DOES NOT match")
                        << " the expected verdict\n";
                return ok ? kExitOk : kExitVerdict;
            }
    return kExitOk;
}

// ---------------------------------------------------------------- classify-examples

struct ClassifyArgs {
    bool controls = false;
};

int classify_cmd(Context& ctx, const ClassifyArgs& args) {
    auto rows = classify_catalog_pairs(Catalog::builtin(), args.controls);
    Csv csv(ctx.file("classify.csv"),
            {"id", "name_A", "name_B", "cond11", "cond12", "c_11", "t0_11", "c_12", "t0_12", "expect11",
             "expect12", "match"});
    bool all = true;
    for (const auto& r : rows) {
        const auto& rep = r.report;
        csv.row({r.pair.id, r.pair.a, r.pair.b, rep.cond_1_1.holds, rep.cond_1_2.holds,
                 rep.cond_1_1.witness_constant, verdict_t0(rep.cond_1_1), rep.cond_1_2.witness_constant,
                 verdict_t0(rep.cond_1_2), r.pair.expect_11, r.pair.expect_12, r.matches_expectation});
        all = all && r.matches_expectation;
        char line[200];
        std::snprintf(line, sizeof line, "%-18s %-12s %-12s cond11 %-5s cond12 %-5s %s\n", r.pair.id.c_str(),
                      r.pair.a.c_str(), r.pair.b.c_str(), rep.cond_1_1.holds ? "holds" : "fails",
                      rep.cond_1_2.holds ? "holds" : "fails", r.matches_expectation ? "ok" : "MISMATCH");
        ctx.out << line;
    }
    return all ? kExitOk : kExitVerdict;
}

// ---------------------------------------------------------------- verify-hardy

struct HardyArgs {
    std::string a = "L2", b = "L2";
    double L = 1.0;
    int trials = 64;
    int cells_per_decade = 16;
};

int hardy_cmd(Context& ctx, const HardyArgs& args) {
    auto a = young(args.a), b = young(args.b);
    HardyOptions opt;
    opt.seed = ctx.seed;
    opt.cells_per_decade = args.cells_per_decade;
    auto rep = verify_hardy(a, b, args.L, args.trials, opt);
    auto bal = balance_of(a, b);

    Csv trials(ctx.file("trials.csv"), {"label", "ratio_avg", "ratio_dual"});
    for (const auto& t : rep.trials) trials.row({t.label, t.ratio_avg, t.ratio_dual});
    Csv sweep(ctx.file("sweep.csv"), {"delta", "ratio_avg", "ratio_dual"});
    for (const auto& s : rep.sweep) sweep.row({s.delta, s.ratio_avg, s.ratio_dual});
    Csv summary(ctx.file("summary.csv"),
                concat(balance_header(), {"worst_avg", "worst_avg_trial", "worst_dual", "worst_dual_trial",
                                          "refinement_drift", "sweep_growth"}));
    summary.row(concat(balance_cells(args.a, args.b, bal),
                       {rep.worst_avg.ratio_avg, rep.worst_avg.label, rep.worst_dual.ratio_dual,
                        rep.worst_dual.label, rep.refinement_drift, rep.sweep_growth}));

    ctx.out << "worst averaging ratio " << num(rep.worst_avg.ratio_avg) << " (" << rep.worst_avg.label
            << "), worst dual ratio " << num(rep.worst_dual.ratio_dual) << " (" << rep.worst_dual.label
            << "), drift " << num(rep.refinement_drift) << ", sweep growth " << num(rep.sweep_growth) << '\n';
    bool bounded = std::isfinite(rep.worst_avg.ratio_avg) && std::isfinite(rep.worst_dual.ratio_dual) &&
                   rep.refinement_drift <= kDriftTol;
    if (bal.holds() && !bounded) {
        ctx.out << "balance conditions hold but the ratios are not stable\n";
        return kExitVerdict;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- verify-korn

struct KornArgs {
    std::string a = "L2", b = "L2";
    int grid = 16;
    int dim = 3;
    std::string mode = "zero_bc";
    std::string op = "E";
    std::string suite = "random";
    int count = 100;
    bool refine = false;
    int m_max = 8;
    int depth = 16;
    std::size_t samples = 1 << 16;
    bool dump = false;
    std::string format = "csv";
};

FieldFormat parse_format(const std::string& s) {
    if (s == "csv") return FieldFormat::Csv;
    if (s == "binary") return FieldFormat::Binary;
    throw ConfigurationError("unknown field format '" + s + "' (csv|binary)");
}

std::vector<GridField> korn_suite(const KornArgs& args, int cells, std::uint64_t seed, bool zero_bc) {
    if (args.suite == "smooth") return smooth_suite(Grid::cube(args.dim, cells), zero_bc);
    if (args.suite == "random") return random_suite(Grid::cube(args.dim, cells), args.count, seed, zero_bc);
    if (args.suite == "radial") {
        // Box around the unit ball centred at the origin.
        return radial_suite(Grid::cube(args.dim, cells, 2.5, -1.25), {1.0, 0.1, 0.01});
    }
    throw ConfigurationError("unknown suite '" + args.suite + "'");
}

struct RatioOutcome {
    double ratio = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

RatioOutcome guarded(const std::function<double()>& fn) {
    try {
        return {fn(), "ok"};
    } catch (const KernelMembership&) {
        return {std::numeric_limits<double>::quiet_NaN(), "kernel"};
    }
}

double laminate_t(const YoungFunction& a, const YoungFunction& b, int m) {
    // Same scale as the blow-up table when A allows it.
    try {
        return blowup_curve(a, b, m, 1.0).back().t_m;
    } catch (const DomainError&) {
        return 1.0;
    }
}

int korn_laminate(Context& ctx, const KornArgs& args, const YoungFunction& a, const YoungFunction& b,
                  const PairVerdict& bal) {
    Csv csv(ctx.file("ratios.csv"), {"suite", "m", "t_m", "depth", "samples", "ratio"});
    std::vector<double> ratios;
    auto fmt = parse_format(args.format);
    for (int m = 1; m <= args.m_max; ++m) {
        double t = laminate_t(a, b, m);
        Laminate l = build_laminate(m, t);
        LaminateRealization real(l, 1.0, args.depth);
        double r = real.korn_ratio(a, b, args.samples, ctx.seed);
        ratios.push_back(r);
        csv.row({"laminate", m, t, args.depth, args.samples, r});
        if (args.dump) dump_field(ctx, realize_field(l, 1.0, args.depth, args.grid), "field_m" + std::to_string(m), fmt);
        ctx.out << "m=" << m << " ratio " << num(r) << '\n';
    }
    Csv summary(ctx.file("summary.csv"), concat(balance_header(), {"suite", "sup", "first", "last"}));
    double sup = sup_finite_or_inf(ratios);
    summary.row(concat(balance_cells(args.a, args.b, bal),
                       {"laminate", sup, ratios.empty() ? 0.0 : ratios.front(), ratios.empty() ? 0.0 : ratios.back()}));
    return bal.holds() && !std::isfinite(sup) ? kExitVerdict : kExitOk;
}

int korn_cmd(Context& ctx, const KornArgs& args) {
    auto a = young(args.a), b = young(args.b);
    KornMode mode = parse_korn_mode(args.mode);
    KornOperator op = parse_korn_operator(args.op);
    auto bal = balance_of(a, b);
    if (args.suite == "laminate") return korn_laminate(ctx, args, a, b, bal);
    parse_format(args.format);

    bool zero_bc = mode == KornMode::ZeroBc;
    std::vector<int> grids{args.grid};
    if (args.refine) grids.push_back(2 * args.grid);
    Csv csv(ctx.file("ratios.csv"), {"suite", "index", "grid", "ratio", "status"});
    std::vector<double> sups;
    for (int cells : grids) {
        auto fields = korn_suite(args, cells, ctx.seed, zero_bc);
        std::vector<double> ratios;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            auto o = guarded([&] { return korn_ratio(a, b, fields[i], mode, op); });
            ratios.push_back(o.ratio);
            csv.row({args.suite, i, cells, o.ratio, o.status});
            if (args.dump && cells == args.grid)
                dump_field(ctx, fields[i], "field_" + std::to_string(i), parse_format(args.format));
        }
        sups.push_back(sup_finite_or_inf(ratios));
        ctx.out << args.suite << " suite, " << fields.size() << " fields, grid " << cells << ": sup ratio "
                << num(sups.back()) << '\n';
    }
    double d = args.refine ? drift(sups[0], sups[1]) : 0.0;
    Csv summary(ctx.file("summary.csv"),
                concat(balance_header(), {"suite", "mode", "operator", "grid", "sup", "refined_sup", "drift"}));
    summary.row(concat(balance_cells(args.a, args.b, bal),
                       {args.suite, to_string(mode), to_string(op), args.grid, sups[0],
                        args.refine ? sups[1] : std::numeric_limits<double>::quiet_NaN(), d}));
    if (args.refine) ctx.out << "refinement drift " << num(d) << '\n';
    if (bal.holds() && (!std::isfinite(sups[0]) || d > kDriftTol)) {
        ctx.out << "balance conditions hold but the Korn ratio is not stable\n";
        return kExitVerdict;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- laminate-demo

struct LaminateArgs {
    std::string a = "L1", b = "L1";
    int m_max = 10;
    double r = 1.0;
    bool realize = false;
    int depth = 64;
    int grid = 512;
    std::size_t samples = 1 << 18;
    std::string format = "csv";
};

bool same_atoms(const Laminate& x, const Laminate& y) {
    if (x.atoms.size() != y.atoms.size()) return false;
    for (std::size_t i = 0; i < x.atoms.size(); ++i)
        if (!(x.atoms[i].weight == y.atoms[i].weight) || !(x.atoms[i].unit == y.atoms[i].unit)) return false;
    return true;
}

int laminate_cmd(Context& ctx, const LaminateArgs& args) {
    auto a = young(args.a), b = young(args.b);
    if (args.m_max < 0) throw DomainError("--m-max must be >= 0");
    auto rows = blowup_curve(a, b, args.m_max, args.r);
    auto fmt = parse_format(args.format);

    Csv csv(ctx.file("blowup.csv"), {"m", "t_m", "sym_moment", "full_moment", "ratio", "sym_first_moment",
                                     "full_first_moment", "first_moment_ratio", "atoms", "exact_ok"});
    bool exact_ok = true;
    for (const auto& row : rows) {
        Laminate l = build_laminate(row.m, row.t_m);
        Rational unit_bar(1, std::int64_t{1} << row.m);
        bool ok = l.mass() == Rational(1) && l.barycenter_unit() == RMatrix2::G(unit_bar, unit_bar) &&
                  same_atoms(canonical(l), canonical(build_laminate_recursive(row.m, row.t_m)));
        exact_ok = exact_ok && ok;
        Rational sym = first_moment_exact(l, true), full = first_moment_exact(l, false);
        double fr = sym == Rational(0) ? 1.0 : (full / sym).to_double();
        csv.row({row.m, row.t_m, row.sym_moment, row.full_moment, row.ratio, sym.str(), full.str(), fr,
                 l.atoms.size(), ok});
        ctx.out << "m=" << row.m << " t_m=" << num(row.t_m) << " ratio=" << num(row.ratio)
                << " first-moment ratio=" << num(fr) << '\n';
    }

    if (args.realize) {
        Csv mom(ctx.file("realization.csv"), {"m", "moment", "exact", "realized", "rel_error", "depth", "samples"});
        const std::vector<std::pair<std::string, std::function<double(const Matrix2&)>>> phis{
            {"abs", [](const Matrix2& x) { return frobenius(x); }},
            {"abs2", [](const Matrix2& x) { return frobenius(x) * frobenius(x); }},
            {"abs_sym", [](const Matrix2& x) { return frobenius(x.sym()); }},
        };
        for (const auto& row : rows) {
            Laminate l = build_laminate(row.m, row.t_m);
            LaminateRealization real(l, args.r, args.depth);
            for (const auto& [name, phi] : phis) {
                double exact = moment(l, phi);
                double got = real.realized_moment(phi, args.samples, ctx.seed);
                mom.row({row.m, name, exact, got, drift(exact, got), args.depth, args.samples});
            }
        }
        const auto& last = rows.back();
        dump_field(ctx, realize_field(build_laminate(last.m, last.t_m), args.r, args.depth, args.grid),
                   "field_m" + std::to_string(last.m), fmt);
        ctx.out << "realization written for m=" << last.m << '\n';
    }
    if (!exact_ok) {
        ctx.out << "exact laminate identities failed\n";
        return kExitVerdict;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- bogovskii

struct BogovskiiArgs {
    std::string a = "L2", b = "L2";
    int grid = 64;
    int dim = 2;
    std::string suite = "smooth";
    std::vector<double> deltas{0.2, 0.1, 0.05};
    bool refine = false;
};

int bogovskii_cmd(Context& ctx, const BogovskiiArgs& args) {
    auto a = young(args.a), b = young(args.b);
    auto bal = balance_of(a, b);
    if (args.suite != "smooth" && args.suite != "spike")
        throw ConfigurationError("unknown suite '" + args.suite + "' (smooth|spike)");

    auto build = [&](const Grid& g) {
        std::vector<std::pair<double, GridField>> fs;
        if (args.suite == "smooth") {
            auto s = bogovskii_smooth_suite(g);
            for (std::size_t i = 0; i < s.size(); ++i) fs.emplace_back(static_cast<double>(i), std::move(s[i]));
        } else {
            for (double d : args.deltas) fs.emplace_back(d, bogovskii_spike(g, d));
        }
        return fs;
    };

    std::vector<int> grids{args.grid};
    if (args.refine) grids.push_back(args.grid / 2);
    Csv csv(ctx.file("ratios.csv"), {"suite", "index", "param", "grid", "residual", "grad_norm", "f_norm", "ratio"});
    Csv res(ctx.file("residual.csv"), {"index", "x", "y", "z", "residual"});
    std::map<int, std::vector<double>> ratios;
    double worst_residual = 0.0;
    for (int cells : grids) {
        Grid g = Grid::cube(args.dim, cells);
        auto cfg = BogovskiiConfig::for_grid(g);
        auto fs = build(g);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const auto& [param, f] = fs[i];
            GridField bf = bogovskii_apply(cfg, f);
            double rr = divergence_residual(bf, f);
            auto nr = norm_bound_ratio(a, b, bf, f);
            ratios[cells].push_back(nr.ratio);
            csv.row({args.suite, i, param, cells, rr, nr.grad_norm, nr.f_norm, nr.ratio});
            if (cells == args.grid) {
                worst_residual = std::max(worst_residual, rr);
                auto field = divergence_residual_field(bf, f);
                for (std::size_t c = 0; c < field.size(); ++c) {
                    Point p = g.cell_center(c);
                    res.row({i, p[0], p[1], args.dim == 3 ? p[2] : 0.0, field.values[c]});
                }
            }
            ctx.out << args.suite << "[" << i << "] grid " << cells << ": residual " << num(rr) << " ratio "
                    << num(nr.ratio) << '\n';
        }
    }
    double d = 0.0;
    if (args.refine)
        for (std::size_t i = 0; i < ratios[args.grid].size(); ++i)
            d = std::max(d, drift(ratios[args.grid][i], ratios[grids[1]][i]));
    double sup = sup_finite_or_inf(ratios[args.grid]);
    Csv summary(ctx.file("summary.csv"),
                concat(balance_header(), {"suite", "grid", "sup", "max_residual", "drift"}));
    summary.row(concat(balance_cells(args.a, args.b, bal), {args.suite, args.grid, sup, worst_residual, d}));

    int code = kExitOk;
    if (args.suite == "smooth" && worst_residual > kResidualTol) {
        ctx.out << "divergence residual above " << num(kResidualTol) << '\n';
        code = kExitVerdict;
    }
    if (args.suite == "smooth" && bal.holds() && (!std::isfinite(sup) || d > kDriftTol)) {
        ctx.out << "balance conditions hold but the ratio is not stable\n";
        code = kExitVerdict;
    }
    return code;
}

// ---------------------------------------------------------------- poincare

struct PoincareArgs {
    std::string a = "L2";
    int grid = 16;
    std::string mode = "zero_bc";
    std::string suite = "smooth";
    int count = 20;
    bool refine = false;
};

int poincare_cmd(Context& ctx, const PoincareArgs& args) {
    auto a = young(args.a);
    KornMode mode = parse_korn_mode(args.mode);
    bool zero_bc = mode == KornMode::ZeroBc;
    if (args.suite != "smooth" && args.suite != "random")
        throw ConfigurationError("unknown suite '" + args.suite + "' (smooth|random)");
    std::vector<int> grids{args.grid};
    if (args.refine) grids.push_back(2 * args.grid);
    Csv csv(ctx.file("ratios.csv"), {"suite", "index", "grid", "ratio", "status"});
    std::vector<double> sups;
    for (int cells : grids) {
        Grid g = Grid::cube(3, cells);
        auto fields = args.suite == "smooth" ? smooth_suite(g, zero_bc) : random_suite(g, args.count, ctx.seed, zero_bc);
        std::vector<double> ratios;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            auto o = guarded([&] { return poincare_ratio(a, fields[i], mode); });
            ratios.push_back(o.ratio);
            csv.row({args.suite, i, cells, o.ratio, o.status});
        }
        sups.push_back(sup_finite_or_inf(ratios));
        ctx.out << args.suite << " suite, grid " << cells << ": sup ratio " << num(sups.back()) << '\n';
    }
    double d = args.refine ? drift(sups[0], sups[1]) : 0.0;
    Csv summary(ctx.file("summary.csv"), {"name_A", "suite", "mode", "grid", "sup", "refined_sup", "drift"});
    summary.row({args.a, args.suite, to_string(mode), args.grid, sups[0],
                 args.refine ? sups[1] : std::numeric_limits<double>::quiet_NaN(), d});
    return std::isfinite(sups[0]) && d <= kDriftTol ? kExitOk : kExitVerdict;
}

// ---------------------------------------------------------------- negative-norm

struct NegativeArgs {
    std::string a = "L2";
    bool all = false;
    int grid = 8;
    int dim = 3;
    std::string suite = "smooth";
    int count = 10;
};

int negative_cmd(Context& ctx, const NegativeArgs& args) {
    if (args.suite != "smooth" && args.suite != "random")
        throw ConfigurationError("unknown suite '" + args.suite + "' (smooth|random)");
    Grid g = Grid::cube(args.dim, args.grid);
    auto fields = args.suite == "smooth" ? smooth_suite(g, false) : random_suite(g, args.count, ctx.seed, false);
    std::vector<std::string> names;
    if (args.all)
        names = Catalog::builtin().names();
    else
        names.push_back(args.a);

    Csv csv(ctx.file("negative_norm.csv"),
            {"name_A", "index", "lower_bound", "upper_bound", "ratio", "best", "dictionary_size"});
    int violations = 0;
    for (const auto& name : names) {
        auto a = young(name);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            GridField u{fields[i].grid, {fields[i].comp[0]}, fields[i].zero_bc};
            auto r = negative_norm_lower_bound(a, u);
            double ratio = r.upper_bound > 0.0 ? r.lower_bound / r.upper_bound : 0.0;
            bool ok = ext_le(r.lower_bound, r.upper_bound);
            violations += !ok;
            csv.row({name, i, r.lower_bound, r.upper_bound, ratio, r.best, r.dictionary_size});
        }
    }
    ctx.out << names.size() << " functions x " << fields.size() << " fields, " << violations << " violations\n";
    return violations == 0 ? kExitOk : kExitVerdict;
}

// ---------------------------------------------------------------- driver

// Turns a JSON config (or a manifest) into command-line tokens.
std::vector<std::string> config_tokens(const fs::path& path, std::string& command) {
    std::ifstream f(path);
    if (!f) throw ConfigurationError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigurationError("config " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
    if (j.contains("command")) command = j.at("command").get<std::string>();
    json params = j.contains("parameters") ? j.at("parameters") : j;
    static const std::vector<std::string> meta{"command", "parameters", "catalog_version", "tool_version",
                                               "timestamp", "outputs", "threads"};
    std::vector<std::string> toks;
    for (const auto& [k, v] : params.items()) {
        if (!j.contains("parameters") && std::find(meta.begin(), meta.end(), k) != meta.end()) continue;
        if (v.is_boolean()) {
            if (v.get<bool>()) toks.push_back("--" + k);
        } else if (v.is_array()) {
            for (const auto& e : v) {
                toks.push_back("--" + k);
                toks.push_back(e.is_string() ? e.get<std::string>() : e.dump());
            }
        } else {
            toks.push_back("--" + k);
            toks.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    return toks;
}

void add_young(Params& p, const std::string& name, std::string& var) {
    p.add(name, var, "Young function: catalog name or inline JSON")->required(false);
}

}  // namespace

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
    // --config is expanded before parsing; explicit flags win over the file.
    std::vector<std::string> args;
    std::string config, config_command;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "--config") {
            if (i + 1 >= raw.size()) {
                err << "--config requires a path\n";
                return kExitUsage;
            }
            config = raw[++i];
        } else if (raw[i].rfind("--config=", 0) == 0) {
            config = raw[i].substr(9);
        } else {
            args.push_back(raw[i]);
        }
    }
    if (!config.empty()) {
        try {
            auto toks = config_tokens(config, config_command);
            auto it = std::find_first_of(args.begin(), args.end(), kCommands.begin(), kCommands.end());
            if (it != args.end()) {
                if (!config_command.empty() && *it != config_command) {
                    err << "config is for '" << config_command << "' but '" << *it << "' was given\n";
                    return kExitUsage;
                }
                config_command = *it;
                args.erase(it);
            }
            if (config_command.empty()) {
                err << "config names no command\n";
                return kExitUsage;
            }
            toks.insert(toks.begin(), config_command);
            args.insert(args.begin(), toks.begin(), toks.end());
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return kExitUsage;
        }
    }

    CLI::App app{"Orlicz-space Korn inequality toolkit", "orlicz-korn"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", ORLICZ_KORN_VERSION);
    std::string config_help;
    app.add_option("--config", config_help, "JSON file with parameters (a manifest works)");

    std::string out_dir;
    std::uint64_t seed = 20240607;
    std::map<std::string, std::unique_ptr<Params>> params;
    auto sub = [&](const std::string& name, const std::string& desc) -> Params& {
        auto* s = app.add_subcommand(name, desc);
        auto& p = *(params[name] = std::make_unique<Params>(s));
        p.add("out", out_dir, "output directory (default results/<command>)");
        p.add("seed", seed, "random seed");
        return p;
    };

    BalanceArgs bal;
    {
        auto& p = sub("check-balance", "check the balance conditions for a pair (A, B)");
        add_young(p, "A", bal.a);
        add_young(p, "B", bal.b);
        p.flag("global", bal.global, "only global constants (t0 = 0)");
    }
    ClassifyArgs cls;
    {
        auto& p = sub("classify-examples", "classify the catalog example pairs");
        p.flag("controls", cls.controls, "include the control pairs");
    }
    HardyArgs hardy;
    {
        auto& p = sub("verify-hardy", "Hardy averaging and dual operator ratios");
        add_young(p, "A", hardy.a);
        add_young(p, "B", hardy.b);
        p.add("L", hardy.L, "interval length")->check(CLI::PositiveNumber);
        p.add("trials", hardy.trials, "random step-function trials")->check(CLI::NonNegativeNumber);
        p.add("cells-per-decade", hardy.cells_per_decade, "geometric resolution")->check(CLI::PositiveNumber);
    }
    KornArgs korn;
    {
        auto& p = sub("verify-korn", "Korn ratios over a field suite");
        add_young(p, "A", korn.a);
        add_young(p, "B", korn.b);
        p.add("grid", korn.grid, "cells per axis")->check(CLI::Range(2, 4096));
        p.add("dim", korn.dim, "dimension")->check(CLI::IsMember({2, 3}));
        p.add("mode", korn.mode, "zero_bc|full")->check(CLI::IsMember({"zero_bc", "full"}));
        p.add("operator", korn.op, "E|ED")->check(CLI::IsMember({"E", "ED"}));
        p.add("suite", korn.suite, "smooth|random|laminate|radial")
            ->check(CLI::IsMember({"smooth", "random", "laminate", "radial"}));
        p.add("count", korn.count, "random suite size")->check(CLI::PositiveNumber);
        p.flag("refine", korn.refine, "repeat on the doubled grid and report the drift");
        p.add("m-max", korn.m_max, "laminate suite orders 1..m-max")->check(CLI::Range(1, 40));
        p.add("depth", korn.depth, "laminate realization depth")->check(CLI::PositiveNumber);
        p.add("samples", korn.samples, "laminate gradient samples")->check(CLI::PositiveNumber);
        p.flag("dump-fields", korn.dump, "write every suite field");
        p.add("format", korn.format, "field format csv|binary")->check(CLI::IsMember({"csv", "binary"}));
    }
    LaminateArgs lam;
    {
        auto& p = sub("laminate-demo", "laminate blow-up table");
        add_young(p, "A", lam.a);
        add_young(p, "B", lam.b);
        p.add("m-max", lam.m_max, "largest order")->check(CLI::Range(0, 40));
        p.add("r", lam.r, "square side")->check(CLI::PositiveNumber);
        p.flag("realize", lam.realize, "sample the realization and dump its field");
        p.add("depth", lam.depth, "realization depth")->check(CLI::PositiveNumber);
        p.add("grid", lam.grid, "cells per axis of the dumped field")->check(CLI::Range(2, 8192));
        p.add("samples", lam.samples, "gradient samples per moment")->check(CLI::PositiveNumber);
        p.add("format", lam.format, "field format csv|binary")->check(CLI::IsMember({"csv", "binary"}));
    }
    BogovskiiArgs bog;
    {
        auto& p = sub("bogovskii", "Bogovskii operator residuals and norm ratios");
        add_young(p, "A", bog.a);
        add_young(p, "B", bog.b);
        p.add("grid", bog.grid, "cells per axis")->check(CLI::Range(4, 1024));
        p.add("dim", bog.dim, "dimension")->check(CLI::IsMember({2, 3}));
        p.add("suite", bog.suite, "smooth|spike")->check(CLI::IsMember({"smooth", "spike"}));
        p.add("delta", bog.deltas, "spike radii")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        p.flag("refine", bog.refine, "repeat on the halved grid and report the drift");
    }
    PoincareArgs poi;
    {
        auto& p = sub("poincare", "Poincare ratios for the deviatoric operator");
        add_young(p, "A", poi.a);
        p.add("grid", poi.grid, "cells per axis")->check(CLI::Range(2, 4096));
        p.add("mode", poi.mode, "zero_bc|full")->check(CLI::IsMember({"zero_bc", "full"}));
        p.add("suite", poi.suite, "smooth|random")->check(CLI::IsMember({"smooth", "random"}));
        p.add("count", poi.count, "random suite size")->check(CLI::PositiveNumber);
        p.flag("refine", poi.refine, "repeat on the doubled grid and report the drift");
    }
    NegativeArgs neg;
    {
        auto& p = sub("negative-norm", "negative-norm lower bound against the trivial upper bound");
        add_young(p, "A", neg.a);
        p.flag("all", neg.all, "every catalog function");
        p.add("grid", neg.grid, "cells per axis")->check(CLI::Range(4, 512));
        p.add("dim", neg.dim, "dimension")->check(CLI::IsMember({2, 3}));
        p.add("suite", neg.suite, "smooth|random")->check(CLI::IsMember({"smooth", "random"}));
        p.add("count", neg.count, "random suite size")->check(CLI::PositiveNumber);
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    auto* chosen = app.get_subcommands().front();
    Context ctx{chosen->get_name(), out_dir.empty() ? fs::path("results") / chosen->get_name() : fs::path(out_dir),
                seed, params.at(chosen->get_name())->values(), {}, out};
    try {
        fs::create_directories(ctx.out_dir);
        int code = kExitOk;
        const auto& name = ctx.command;
        if (name == "check-balance") code = check_balance_cmd(ctx, bal);
        else if (name == "classify-examples") code = classify_cmd(ctx, cls);
        else if (name == "verify-hardy") code = hardy_cmd(ctx, hardy);
        else if (name == "verify-korn") code = korn_cmd(ctx, korn);
        else if (name == "laminate-demo") code = laminate_cmd(ctx, lam);
        else if (name == "bogovskii") code = bogovskii_cmd(ctx, bog);
        else if (name == "poincare") code = poincare_cmd(ctx, poi);
        else if (name == "negative-norm") code = negative_cmd(ctx, neg);

        json manifest{{"command", ctx.command},
                      {"parameters", ctx.parameters},
                      {"seed", ctx.seed},
                      {"catalog_version", Catalog::builtin().version()},
                      {"tool_version", ORLICZ_KORN_VERSION},
                      {"timestamp", utc_timestamp()},
                      {"threads", worker_threads()},
                      {"outputs", ctx.outputs},
                      {"exit_code", code}};
        std::ofstream(ctx.out_dir / "manifest.json") << manifest.dump(2) << '\n';
        return code;
    } catch (const UnknownYoungFunction& e) {
        err << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigurationError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace orlicz::cli
