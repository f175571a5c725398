#pragma once

#include <vector>

#include "orlicz/numeric.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

// Step function: values[i] on a cell of measure weights[i].
struct SampledFunction {
    std::vector<double> values;
    std::vector<double> weights;

    static SampledFunction uniform(std::vector<double> values, double cell_measure);

    std::size_t size() const { return values.size(); }
    double total_measure() const;
    // Throws DomainError on length mismatch, non-positive weights or non-finite values.
    void validate() const;
};

struct LuxemburgNorm {
    double value = 0.0;
    double lo = 0.0;  // final bisection bracket
    double hi = 0.0;
};

// Decreasing rearrangement of |u|; ties keep the original order.
SampledFunction rearrangement(const SampledFunction& u);

// |{ |u| > t }|.
double distribution(const SampledFunction& u, double t);

// sum_i w_i A(|u_i| / lambda), extended-real valued.
double modular(const YoungFunction& a, const SampledFunction& u, double lambda);

LuxemburgNorm luxemburg(const YoungFunction& a, const SampledFunction& u, double rel_tol = 1e-10);

// int u v / (||u||_A ||v||_{A~}); throws DegenerateInput when a norm vanishes.
double holder_check(const YoungFunction& a, const SampledFunction& u, const SampledFunction& v);

}  // namespace orlicz
