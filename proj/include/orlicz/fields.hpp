#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orlicz/numeric.hpp"
#include "orlicz/rearrange.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

using Point = std::array<double, 3>;

// Uniform box grid; nodes are cells + 1 per axis. Unused axes (dim 2) have one cell
// of width 1 and are ignored by every operator.
struct Grid {
    int dim = 3;
    std::array<int, 3> cells{8, 8, 8};
    std::array<double, 3> h{0.125, 0.125, 0.125};
    Point origin{0.0, 0.0, 0.0};

    static Grid cube(int dim, int cells_per_axis, double length = 1.0, double origin = 0.0);

    void validate() const;
    std::array<int, 3> nodes() const;
    std::size_t node_count() const;
    std::size_t cell_count() const;
    std::size_t node_index(int i, int j, int k) const;
    std::size_t cell_index(int i, int j, int k) const;
    std::array<int, 3> node_coords(std::size_t idx) const;
    std::array<int, 3> cell_coords(std::size_t idx) const;
    Point node_position(std::size_t idx) const;
    Point cell_center(std::size_t idx) const;
    Point center() const;
    double cell_measure() const;
    double measure() const;
    bool is_boundary_node(std::size_t idx) const;
    // Trapezoid weight of a node (sums to measure()).
    double node_weight(std::size_t idx) const;
    bool operator==(const Grid&) const = default;
};

// Node values of a vector (or scalar) field.
struct GridField {
    Grid grid;
    std::vector<std::vector<double>> comp;
    bool zero_bc = false;

    static GridField zeros(const Grid& g, int components);
    static GridField from_function(const Grid& g, int components,
                                   const std::function<Point(const Point&)>& fn, bool zero_bc = false);
    int components() const { return static_cast<int>(comp.size()); }
    void validate() const;
    // Largest |value| on boundary nodes.
    double boundary_max() const;
    GridField operator-(const GridField& other) const;
    GridField operator+(const GridField& other) const;
    GridField scaled(double s) const;
};

// n x n matrices at cell centers, row-major per cell.
struct TensorField {
    Grid grid;
    int n = 3;
    std::vector<double> data;
    bool symmetric = false;
    bool trace_free = false;

    double at(std::size_t cell, int a, int b) const { return data[(cell * n + a) * n + b]; }
    double& at(std::size_t cell, int a, int b) { return data[(cell * n + a) * n + b]; }
    double frobenius(std::size_t cell) const;
    double max_abs() const;
    bool check_symmetric(double tol = 1e-12) const;
    bool check_trace_free(double tol = 1e-10) const;
    // |M| per cell with cell measures as weights.
    SampledFunction pointwise_norm() const;
};

TensorField gradient(const GridField& u);
TensorField sym_gradient(const GridField& u);
TensorField dev_sym_gradient(const GridField& u);
TensorField sym_part(const TensorField& m);
TensorField dev_part(const TensorField& m);

// Corner averages of |u| per cell.
SampledFunction cell_magnitude(const GridField& u);
// Corner averages of a scalar component per cell.
SampledFunction cell_values(const GridField& u, int component = 0);

enum class KernelKind { Rigid, Sigma };

// Sampled generators of the kernel of E (rigid motions) or E_D (Sigma).
// Coordinates are centred at the domain centre.
struct KernelBasis {
    Grid grid;
    KernelKind kind = KernelKind::Rigid;
    std::vector<GridField> generators;
    std::vector<std::string> labels;

    static KernelBasis build(const Grid& g, KernelKind kind);
    std::size_t size() const { return generators.size(); }
};

// Least-squares projection in the trapezoid L2 inner product.
class KernelProjector {
public:
    KernelProjector(const Grid& g, KernelKind kind);
    GridField project(const GridField& u) const;
    // c with ||P u||_1 <= c ||u||_1 for every u (trapezoid norms).
    double l1_constant() const { return l1_constant_; }
    double gram_condition() const { return condition_; }
    const KernelBasis& basis() const { return basis_; }

private:
    KernelBasis basis_;
    std::vector<double> gram_inverse_;
    double l1_constant_ = 0.0;
    double condition_ = 0.0;
};

GridField project_sigma(const GridField& u);
GridField project_rigid(const GridField& u);

enum class KornMode { ZeroBc, FullDomain };
enum class KornOperator { E, ED };

// The field lies in the kernel of the operator used in the denominator.
struct KernelMembership : DegenerateInput {
    using DegenerateInput::DegenerateInput;
};

std::string to_string(KornMode m);
std::string to_string(KornOperator o);
KornMode parse_korn_mode(const std::string& s);
KornOperator parse_korn_operator(const std::string& s);

// ||grad(u - P u)||_B / ||E u||_A (or E_D), P = 0 in zero-bc mode and the
// rigid or Sigma projection otherwise.
double korn_ratio(const YoungFunction& a, const YoungFunction& b, const GridField& u, KornMode mode,
                  KornOperator op);

// ||u - P u||_A / ||E_D u||_A.
double poincare_ratio(const YoungFunction& a, const GridField& u, KornMode mode);

struct RadialField {
    GridField u;  // Q x rho(|x|)
    GridField v;  // (int_{|x|}^1 h(w_n r^n) dr, 0, ...)
    double omega_n = 0.0;
};

double unit_ball_volume(int n);
// rho(r) = int_r^1 h(w_n t^n)/t dt for a step function h on (0, w_n).
double radial_profile(const SampledFunction& h, int n, double r);
// x measured from the grid centre; the grid must contain the unit ball.
RadialField radial_test_field(const SampledFunction& h, const Grid& g);

struct NegativeNormResult {
    double lower_bound = 0.0;  // max over the dictionary
    double upper_bound = 0.0;  // 2 sqrt(n) ||u - u_mean||_A
    std::string best;          // dictionary element attaining the max
    std::size_t dictionary_size = 0;
};

// sup over tensor-product bumps phi = psi e_k of int u div phi / ||grad phi||_{A~}.
NegativeNormResult negative_norm_lower_bound(const YoungFunction& a, const GridField& u);

// Trial fields. zero_bc suites vanish on the boundary.
std::vector<GridField> smooth_suite(const Grid& g, bool zero_bc);
std::vector<GridField> random_suite(const Grid& g, int count, std::uint64_t seed, bool zero_bc);
// Radial fields built from h = chi_(0,s)/s for the given s values.
std::vector<GridField> radial_suite(const Grid& g, const std::vector<double>& spikes);

}  // namespace orlicz
