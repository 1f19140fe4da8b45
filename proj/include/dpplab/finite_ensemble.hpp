#pragma once

// Finite ensemble built from the leading N = ceil(|Omega|) eigenpairs of the
// concentration operator: truncated kernel, 1-point intensity, L^1 deviation
// from the flat density 1_Omega, and a sequential projection-DPP sampler for
// Monte-Carlo cross-checks.
//
// Eigenfunctions are extended off the quadrature nodes by the Nystrom formula
// and scaled to unit L^2 norm over the plane, so that sum_n |e_n(z)|^2
// integrates to N and stays below the full kernel diagonal K(z,z) = 1.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpplab/functionals.hpp"
#include "dpplab/geometry.hpp"
#include "dpplab/kernels.hpp"
#include "dpplab/spectral.hpp"

namespace dpplab {

// N = smallest integer >= area; values within 1e-9 of an integer snap to it
// so that nominally integer areas are not pushed up by roundoff
inline int truncation_rank(const Domain& d) {
    const double a = d.area();
    const double nearest = std::round(a);
    if (std::abs(a - nearest) < 1e-9) return static_cast<int>(nearest);
    return static_cast<int>(std::ceil(a));
}

// Closed-form truncated Ginibre kernel (exponential series cut at N terms),
// independent of any quadrature; the disk oracle for build_finite.
inline std::complex<double> finite_ginibre_kernel(int N, Point2 z, Point2 w) {
    if (N < 1) throw std::invalid_argument("finite_ginibre_kernel: need N >= 1");
    const std::complex<double> zc = to_complex(z), wc = to_complex(w);
    const std::complex<double> q = pi * zc * std::conj(wc);
    std::complex<double> term(1.0, 0.0), series(1.0, 0.0);
    for (int k = 1; k < N; ++k) {
        term *= q / static_cast<double>(k);
        series += term;
    }
    const double gauss = std::exp(-0.5 * pi * (std::norm(zc) + std::norm(wc)));
    const std::complex<double> phase =
        std::exp(std::complex<double>(0.0, pi * (w.x * w.y - z.x * z.y)));
    return phase * gauss * series;
}

class FiniteEnsemble {
public:
    FiniteEnsemble(KernelSpec spec, Domain domain, QuadratureRule rule, int rank,
                   std::vector<double> lambdas, Eigen::MatrixXcd scaled_vectors,
                   Spectrum full_spectrum)
        : spec_(std::move(spec)),
          domain_(std::move(domain)),
          rule_(std::move(rule)),
          rank_(rank),
          lambdas_(std::move(lambdas)),
          coeffs_(std::move(scaled_vectors)),
          full_spectrum_(std::move(full_spectrum)) {}

    int rank() const { return rank_; }
    const KernelSpec& spec() const { return spec_; }
    const Domain& domain() const { return domain_; }
    const QuadratureRule& rule() const { return rule_; }
    const std::vector<double>& leading_lambdas() const { return lambdas_; }
    const Spectrum& full_spectrum() const { return full_spectrum_; }

    double leading_lambda_sum() const {
        double s = 0.0;
        for (double l : lambdas_) s += l;
        return s;
    }

    // plane-normalized eigenfunction e_n(z), n in [0, rank)
    std::complex<double> eigenfunction(int n, Point2 z) const {
        if (n < 0 || n >= rank_) throw std::invalid_argument("eigenfunction: index out of range");
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < rule_.size(); ++j)
            acc += kernel_eval(spec_, z, rule_.nodes[j]) * coeffs_(static_cast<Eigen::Index>(j), n);
        return acc;
    }

    // rho_1(z) = sum_n |e_n(z)|^2
    double intensity(Point2 z) const {
        Eigen::VectorXcd krow(static_cast<Eigen::Index>(rule_.size()));
        for (std::size_t j = 0; j < rule_.size(); ++j)
            krow(static_cast<Eigen::Index>(j)) = kernel_eval(spec_, z, rule_.nodes[j]);
        return (krow.transpose() * coeffs_).squaredNorm();
    }

    // all eigenfunction values at once (feature map used by the sampler)
    Eigen::VectorXcd feature(Point2 z) const {
        Eigen::VectorXcd krow(static_cast<Eigen::Index>(rule_.size()));
        for (std::size_t j = 0; j < rule_.size(); ++j)
            krow(static_cast<Eigen::Index>(j)) = kernel_eval(spec_, z, rule_.nodes[j]);
        return (krow.transpose() * coeffs_).transpose();
    }

private:
    KernelSpec spec_;
    Domain domain_;
    QuadratureRule rule_;
    int rank_;
    std::vector<double> lambdas_;
    Eigen::MatrixXcd coeffs_;  // column n: sqrt(w_j) phi_n[j] / sqrt(lambda_n)
    Spectrum full_spectrum_;
};

inline FiniteEnsemble build_finite(const KernelSpec& spec, const Domain& d,
                                   const QuadratureRule& rule,
                                   double tol = default_spectral_tol) {
    const int N = truncation_rank(d);
    if (static_cast<int>(rule.size()) < 3 * N)
        throw std::invalid_argument(
            "build_finite: quadrature rule too coarse, need at least 3*N nodes");
    ConcentrationMatrix cm = assemble(spec, rule);
    EigenPairs ep = hermitian_eigenpairs(cm.entries);
    Spectrum full = detail::spectrum_from_raw(ep.values, tol);
    const double lam_N = ep.values[static_cast<std::size_t>(N - 1)];
    if (lam_N < 1e-6)
        throw std::runtime_error(
            "build_finite: lambda_N below 1e-6, Nystrom extension unstable; "
            "use a larger quadrature order");
    std::vector<double> lambdas(ep.values.begin(), ep.values.begin() + N);
    Eigen::MatrixXcd coeffs(static_cast<Eigen::Index>(rule.size()), N);
    for (int n = 0; n < N; ++n) {
        const double scale = 1.0 / std::sqrt(lambdas[static_cast<std::size_t>(n)]);
        for (std::size_t j = 0; j < rule.size(); ++j)
            coeffs(static_cast<Eigen::Index>(j), n) =
                scale * std::sqrt(rule.weights[j]) * ep.vectors(static_cast<Eigen::Index>(j), n);
    }
    return FiniteEnsemble(spec, d, rule, N, std::move(lambdas), std::move(coeffs),
                          std::move(full));
}

inline double intensity_finite(const FiniteEnsemble& fe, Point2 z) { return fe.intensity(z); }

// tensor rule over the bounding box dilated by `factor` about its center
inline QuadratureRule enclosing_box_rule(const Domain& d, double factor, int order) {
    const auto [lo, hi] = d.bounding_box();
    const Point2 c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    const double w = factor * (hi.x - lo.x), h = factor * (hi.y - lo.y);
    return quadrature(Domain::rectangle(w, h, {c.x - 0.5 * w, c.y - 0.5 * h}), order);
}

// int |rho_1 - 1_Omega| over the plane. Since 0 <= rho_1 <= 1 on Omega the
// integrand splits into smooth pieces:
//   int_Omega (1 - rho_1) + int_box rho_1 - int_Omega rho_1
//     = area - 2 sum_{n<N} lambda_n + int_box rho_1,
// using that the ensemble's own rule integrates rho_1 over Omega to the
// leading eigenvalue sum exactly.
inline double l1_deviation(const FiniteEnsemble& fe, const QuadratureRule& box_rule,
                           double tail_tol = 1e-4) {
    double box_mass = 0.0;
    for (std::size_t i = 0; i < box_rule.size(); ++i)
        box_mass += box_rule.weights[i] * fe.intensity(box_rule.nodes[i]);
    const double N = fe.rank();
    if (N - box_mass > tail_tol * N)
        throw std::runtime_error(
            "l1_deviation: intensity tail outside the box exceeds tolerance; "
            "use a larger enclosing box");
    return fe.domain().area() - 2.0 * fe.leading_lambda_sum() + box_mass;
}

// the same quantity from the spectrum alone:
// (N - sum_{n<=N} lambda) + (trace - sum_{n<=N} lambda)
inline double l1_deviation_spectral(const Spectrum& s, double area) {
    const int N = [&] {
        const double nearest = std::round(area);
        return std::abs(area - nearest) < 1e-9 ? static_cast<int>(nearest)
                                               : static_cast<int>(std::ceil(area));
    }();
    double leading = 0.0;
    for (int n = 0; n < N && n < static_cast<int>(s.size()); ++n)
        leading += s.lambdas[static_cast<std::size_t>(n)];
    return (N - leading) + (area - leading);
}

// N - sum_{n<=N} lambda_n >= 0; the variance obeys V <= 2 * gap
inline double truncation_gap(const FiniteEnsemble& fe) {
    return std::max(0.0, static_cast<double>(fe.rank()) - fe.leading_lambda_sum());
}

// ============================================================================
// Projection-DPP sampling
// ============================================================================

struct PointConfiguration {
    std::vector<Point2> points;
    std::uint64_t seed = 0;
};

struct SampleOptions {
    double box_factor = 3.0;
    std::uint64_t max_tries_per_point = 200000;  // ~acceptance 1e-4 diagnostic
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// uniform double in [0,1) from the engine's raw bits (implementation-independent)
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Sequential sampler: the k-th point is drawn from the density
// ||Q Phi(z)||^2 / k, where Phi is the eigenfunction feature map and Q
// projects onto the span orthogonal to the already-selected directions.
// Proposals are uniform over the enlarged bounding box with the envelope
// ||Phi(z)||^2 <= 1. Exactly rank() points, deterministic per seed.
inline PointConfiguration sample(const FiniteEnsemble& fe, std::uint64_t seed,
                                 const SampleOptions& opts = {}) {
    const int N = fe.rank();
    const auto [lo, hi] = fe.domain().bounding_box();
    const Point2 c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    const double bw = opts.box_factor * (hi.x - lo.x), bh = opts.box_factor * (hi.y - lo.y);
    std::mt19937_64 rng(detail::splitmix64(seed));

    PointConfiguration cfg;
    cfg.seed = seed;
    cfg.points.reserve(static_cast<std::size_t>(N));
    std::vector<Eigen::VectorXcd> basis;  // accepted orthonormal directions
    basis.reserve(static_cast<std::size_t>(N));
    const double envelope = 1.0 + 1e-6;

    for (int k = 0; k < N; ++k) {
        std::uint64_t tries = 0;
        while (true) {
            if (++tries > opts.max_tries_per_point)
                throw std::runtime_error(
                    "sample: rejection acceptance below 1e-4 (intensity envelope too loose)");
            const Point2 z{c.x + (detail::uniform01(rng) - 0.5) * bw,
                           c.y + (detail::uniform01(rng) - 0.5) * bh};
            Eigen::VectorXcd phi = fe.feature(z);
            for (const auto& v : basis) phi -= v.dot(phi) * v;
            const double q = phi.squaredNorm();
            if (detail::uniform01(rng) * envelope < q) {
                // re-orthogonalize once before normalizing
                for (const auto& v : basis) phi -= v.dot(phi) * v;
                basis.push_back(phi / phi.norm());
                cfg.points.push_back(z);
                break;
            }
        }
    }
    return cfg;
}

// independent streams derived from (seed, index)
inline std::vector<PointConfiguration> sample_many(const FiniteEnsemble& fe, std::uint64_t seed,
                                                   int count, const SampleOptions& opts = {}) {
    if (count < 1) throw std::invalid_argument("sample_many: need count >= 1");
    std::vector<PointConfiguration> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(sample(fe, detail::splitmix64(seed) ^ static_cast<std::uint64_t>(i), opts));
    return out;
}

struct CountStats {
    int n_samples = 0;
    double mean = 0.0;
    double variance = 0.0;        // unbiased
    double stderr_mean = 0.0;
    double stderr_variance = 0.0; // moment-based standard error of the variance
};

inline CountStats empirical_count_stats(const std::vector<PointConfiguration>& samples,
                                        const Domain& d) {
    if (samples.size() < 2)
        throw std::invalid_argument("empirical_count_stats: need at least 2 samples");
    const double n = static_cast<double>(samples.size());
    std::vector<double> counts;
    counts.reserve(samples.size());
    for (const auto& s : samples) {
        int c = 0;
        for (const Point2& p : s.points) c += d.contains(p) ? 1 : 0;
        counts.push_back(static_cast<double>(c));
    }
    CountStats st;
    st.n_samples = static_cast<int>(samples.size());
    for (double c : counts) st.mean += c;
    st.mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double c : counts) {
        const double d2 = (c - st.mean) * (c - st.mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    st.variance = m2 / (n - 1.0);
    m2 /= n;
    m4 /= n;
    st.stderr_mean = std::sqrt(st.variance / n);
    const double var_of_var = (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n;
    st.stderr_variance = std::sqrt(std::max(0.0, var_of_var));
    return st;
}

// ============================================================================
// CSV emission
// ============================================================================

inline void write_points_csv(std::ostream& out, const std::vector<PointConfiguration>& samples) {
    out << "sample,x,y\n";
    char buf[128];
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (const Point2& p : samples[i].points) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, p.x, p.y);
            out << buf;
        }
}

inline void write_stats_csv(std::ostream& out, const CountStats& st) {
    char buf[192];
    out << "n_samples,mean_count,var_count,stderr_mean\n";
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", st.n_samples, st.mean, st.variance,
                  st.stderr_mean);
    out << buf;
}

inline void write_points_csv(const std::string& path,
                             const std::vector<PointConfiguration>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write points csv: " + path);
    write_points_csv(out, samples);
}

inline void write_stats_csv(const std::string& path, const CountStats& st) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write stats csv: " + path);
    write_stats_csv(out, st);
}

}  // namespace dpplab
