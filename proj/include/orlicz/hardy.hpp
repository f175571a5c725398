#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orlicz/rearrange.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

// Cells of a step function on (0, L) listed left to right; weights are widths.
SampledFunction step_function(const std::vector<double>& breakpoints, const std::vector<double>& values);
std::vector<double> cell_edges(const SampledFunction& f);

// Breakpoints 0, L*lo, ..., L with cells_per_decade geometric cells above L*lo
// and `head` uniform cells on (0, L*lo).
std::vector<double> hardy_breakpoints(double L, double lo, int cells_per_decade, int head = 4);

// s -> (1/s) int_0^s f, at cell midpoints.
SampledFunction averaging_operator(const SampledFunction& f);
// s -> int_s^L f(r)/r dr, at cell midpoints.
SampledFunction dual_operator(const SampledFunction& f);

struct HardyTrial {
    std::string label;
    SampledFunction f;
    double L = 1.0;
    double ratio_avg = 0.0;   // ||Hf||_B / ||f||_A
    double ratio_dual = 0.0;  // ||H*f||_B / ||f||_A
};

struct SpikePoint {
    double delta = 0.0;
    double ratio_avg = 0.0;
    double ratio_dual = 0.0;
};

struct HardyOptions {
    int cells_per_decade = 16;
    double resolution = 1e-8;  // smallest geometric breakpoint relative to L
    std::uint64_t seed = 20240607;
    std::vector<double> spike_deltas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
};

struct HardyReport {
    HardyTrial worst_avg;
    HardyTrial worst_dual;
    std::vector<HardyTrial> trials;  // without the sweep
    std::vector<SpikePoint> sweep;   // f = chi_(0,delta)/delta
    bool balance_holds = false;
    // Relative change of the worst ratios between the base and the doubled resolution.
    double refinement_drift = 0.0;
    // Sweep ratio at the sharpest spike over the bluntest one.
    double sweep_growth = 1.0;
};

HardyTrial evaluate_trial(const YoungFunction& a, const YoungFunction& b, std::string label,
                          SampledFunction f, double L);

// Fixed trial family: `random_trials` random step functions, 16 power spikes,
// 8 log spikes and, for failing pairs, profiles built from the balance diagnostics.
std::vector<std::pair<std::string, SampledFunction>> hardy_trial_family(
    const YoungFunction& a, const YoungFunction& b, double L, int random_trials,
    const HardyOptions& opt = {});

HardyReport verify_hardy(const YoungFunction& a, const YoungFunction& b, double L, int trials,
                         const HardyOptions& opt = {});

struct ReductionCheck {
    bool holds = false;
    bool balance_holds = false;
    std::vector<double> ratios;  // ||H psi_k + H* psi_k||_B / ||psi_k||_A along the dilations
    double growth = 0.0;         // rise over the second half of the sweep / rise over the first
};

// psi non-negative and non-increasing on (0, L). Evaluates the dilations
// psi_k(s) = 2^k psi(2^k s), k = 0..levels, and reports whether the ratio
// stays bounded: the second-half rise is at most tol times the first-half rise.
ReductionCheck rearrangement_reduction_check(const YoungFunction& a, const YoungFunction& b,
                                             const SampledFunction& psi, int levels = 16,
                                             double tol = 0.5);

}  // namespace orlicz
