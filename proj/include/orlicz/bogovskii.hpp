#pragma once

#include <string>
#include <vector>

#include "orlicz/fields.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct BogovskiiConfig {
    Grid grid;
    Point center{0.5, 0.5, 0.5};
    double radius = 0.3;
    int near_radial = 8;   // Gauss nodes along s in the polar rule
    int near_angular = 4;  // Gauss nodes per half face
    int far_order = 2;     // Gauss nodes per axis in ordinary cells
    int close_order = 4;   // ... in cells touching the polar block

    // Ball centred in the grid box with radius 0.3 * (shortest side).
    static BogovskiiConfig for_grid(const Grid& g);
    void validate() const;
    // Normalized bump c (1 - |z - center|^2 / R^2)^4.
    double omega(const Point& z) const;
    double omega_scale() const;
    // int omega over the grid cells by 6-point Gauss per axis.
    double omega_grid_integral() const;
};

// Kernel integral int_{|x-y|}^inf omega(y + r xi) r^{n-1} dr, xi = (x-y)/|x-y|.
double bogovskii_ray_integral(const BogovskiiConfig& cfg, const Point& x, const Point& y);

// B f at every node; f is a scalar node field with vanishing mean.
GridField bogovskii_apply(const BogovskiiConfig& cfg, const GridField& f);

// Discrete divergence at cell centres minus the cell average of f.
SampledFunction divergence_residual_field(const GridField& bf, const GridField& f);
// max |divergence_residual_field| / max |f| over cells.
double divergence_residual(const GridField& bf, const GridField& f);

struct BogovskiiRatio {
    double ratio = 0.0;
    double grad_norm = 0.0;  // ||grad B f||_B
    double f_norm = 0.0;     // ||f||_A
};

BogovskiiRatio norm_bound_ratio(const YoungFunction& a, const YoungFunction& b, const GridField& bf,
                                const GridField& f);
BogovskiiRatio norm_bound_ratio(const BogovskiiConfig& cfg, const YoungFunction& a, const YoungFunction& b,
                                const GridField& f);

// Smooth zero-mean scalar fields with compact support in the box (5 members).
std::vector<GridField> bogovskii_smooth_suite(const Grid& g);
// Two opposite unit-mass bumps of radius delta at fixed grid nodes; exactly zero mean.
GridField bogovskii_spike(const Grid& g, double delta);

}  // namespace orlicz
