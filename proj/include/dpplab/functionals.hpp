#pragma once

// Scalar functionals of a spectrum: entanglement entropy S = sum f(lambda)
// with f(x) = -x ln x - (1-x) ln(1-x), number variance V = sum lambda(1-lambda)
// (spectral and direct double-integral forms), expected count, and the
// Schatten-type traces sum lambda^p (1-lambda)^p.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpplab/geometry.hpp"
#include "dpplab/kernels.hpp"
#include "dpplab/spectral.hpp"

namespace dpplab {

inline constexpr double four_ln2 = 2.77258872223978123767;

// eigenvalues below this contribute nothing to any functional at working
// precision and are skipped (radial merges carry thousands of numerical zeros)
inline constexpr double eigenvalue_floor = 1e-14;

// f(x) = -x ln x - (1-x) ln(1-x), with f(0) = f(1) = 0 by continuity.
// Callers must clamp: x outside [0,1] is rejected.
inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("binary_entropy: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log(x) - (1.0 - x) * std::log(1.0 - x);
}

inline double entropy(const Spectrum& s) {
    double acc = 0.0;
    for (double l : s.lambdas)
        if (l > eigenvalue_floor) acc += binary_entropy(l);
    return acc;
}

inline double variance_spectral(const Spectrum& s) {
    double acc = 0.0;
    for (double l : s.lambdas)
        if (l > eigenvalue_floor) acc += l * (1.0 - l);
    return acc;
}

inline double expected_count(const Spectrum& s) {
    double acc = 0.0;
    for (double l : s.lambdas)
        if (l > eigenvalue_floor) acc += l;
    return acc;
}

// sum lambda^p (1-lambda)^p with 0^p := 0
inline double schatten_h_trace(const Spectrum& s, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("schatten_h_trace: need p > 0");
    double acc = 0.0;
    for (double l : s.lambdas) {
        if (l <= eigenvalue_floor || l >= 1.0) continue;
        acc += std::pow(l * (1.0 - l), p);
    }
    return acc;
}

// V = int_Omega K(z,z) dz - int_{Omega^2} |K(z,w)|^2 dz dw on the quadrature
// rule; agrees with variance_spectral of the assembled matrix as the discrete
// identity trace(A) - trace(A^2).
inline double variance_direct(const KernelSpec& spec, const QuadratureRule& rule) {
    double diag = 0.0, off = 0.0;
    const std::size_t n = rule.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double kii = kernel_eval(spec, rule.nodes[i], rule.nodes[i]).real();
        diag += rule.weights[i] * kii;
        off += rule.weights[i] * rule.weights[i] * kii * kii;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m2 = std::norm(kernel_eval(spec, rule.nodes[i], rule.nodes[j]));
            off += 2.0 * rule.weights[i] * rule.weights[j] * m2;
        }
    }
    return diag - off;
}

struct FunctionalReport {
    double expected_count = 0.0;
    double variance = 0.0;
    double entropy = 0.0;
    std::vector<std::pair<double, double>> schatten;  // (p, trace)
    double ratio_entropy_variance = 0.0;
};

inline FunctionalReport functional_report(const Spectrum& s,
                                          const std::vector<double>& ps = {0.5, 1.0}) {
    FunctionalReport r;
    r.expected_count = expected_count(s);
    r.variance = variance_spectral(s);
    r.entropy = entropy(s);
    for (double p : ps) r.schatten.emplace_back(p, schatten_h_trace(s, p));
    r.ratio_entropy_variance = r.variance > 0.0
                                   ? r.entropy / r.variance
                                   : std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace dpplab
