// Admissible shape parameters of the Wishart family.
//
// The Gindikin ensemble for dimension m is the discrete set of half-integers
// {1/2, ..., (m-2)/2} together with the half-line [(m-1)/2, inf). A Wishart
// distribution with shape alpha exists if and only if alpha lies in it.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "wishart/linalg.hpp"

namespace wishart {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Membership test for the Gindikin set Lambda_m. Half-integer matching uses
/// a 1e-12 tolerance (inputs are user-typed decimals), and the boundary point
/// (m-1)/2 is included.
inline bool gindikin_contains(double alpha, int m) noexcept {
    if (m < 1 || !std::isfinite(alpha)) return false;
    const double twice = 2.0 * alpha;
    const double k = std::round(twice);
    if (std::abs(twice - k) <= 2e-12 && k >= 1.0 && k <= static_cast<double>(m - 2))
        return true;
    return alpha >= 0.5 * (m - 1) - 1e-12;
}

inline std::string gindikin_description(int m) {
    auto half = [](int k) {
        return k % 2 == 0 ? std::to_string(k / 2) : std::to_string(k) + "/2";
    };
    const std::string ray = "[" + half(m - 1) + ", inf)";
    if (m <= 2) return ray;  // discrete part is empty
    if (m == 3) return "{1/2} U " + ray;
    return "{1/2, ..., " + half(m - 2) + "} U " + ray;
}

/// Shape parameter alpha validated against the Gindikin set of its dimension.
class ShapeParam {
public:
    ShapeParam(double alpha, int dim) : alpha_(alpha), dim_(dim) {
        detail::check_dim(dim);
        if (!(alpha > 0.0) || !std::isfinite(alpha) || !gindikin_contains(alpha, dim))
            throw ShapeError("shape parameter " + std::to_string(alpha) +
                             " is outside the Gindikin set " + gindikin_description(dim) +
                             " for m = " + std::to_string(dim));
    }

    double alpha() const { return alpha_; }
    int dim() const { return dim_; }

private:
    double alpha_;
    int dim_;
};

}  // namespace wishart
