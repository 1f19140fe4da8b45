#pragma once

// Nystrom discretization of the concentration operator
//   (T f)(z) = int_Omega f(w) conj(K(z, w)) dw
// with weight-symmetrized entries A[i][j] = sqrt(w_i w_j) K(z_i, z_j), dense
// Hermitian eigensolves (LAPACK), the analytic Ginibre disk spectrum, and an
// angular-block radial solver for rotation-invariant kernels on disks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpplab/geometry.hpp"
#include "dpplab/kernels.hpp"

extern "C" {
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, double* w, std::complex<double>* work, const int* lwork,
             double* rwork, const int* lrwork, int* iwork, const int* liwork, int* info);
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
}

namespace dpplab {

// ============================================================================
// LAPACK wrappers
// ============================================================================

namespace detail {

// ascending eigenvalues; A is overwritten (with eigenvectors when jobz = 'V')
inline Eigen::VectorXd zheevd_inplace(Eigen::MatrixXcd& A, bool vectors) {
    const int n = static_cast<int>(A.rows());
    Eigen::VectorXd evals(n);
    if (n == 0) return evals;
    const char jobz = vectors ? 'V' : 'N';
    const char uplo = 'L';
    int info = 0, lwork = -1, lrwork = -1, liwork = -1;
    std::complex<double> wkopt;
    double rwkopt;
    int iwkopt;
    zheevd_(&jobz, &uplo, &n, A.data(), &n, evals.data(), &wkopt, &lwork, &rwkopt, &lrwork,
            &iwkopt, &liwork, &info);
    lwork = static_cast<int>(wkopt.real());
    lrwork = static_cast<int>(rwkopt);
    liwork = iwkopt;
    std::vector<std::complex<double>> work(static_cast<std::size_t>(lwork));
    std::vector<double> rwork(static_cast<std::size_t>(lrwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    zheevd_(&jobz, &uplo, &n, A.data(), &n, evals.data(), work.data(), &lwork, rwork.data(),
            &lrwork, iwork.data(), &liwork, &info);
    if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
    return evals;
}

inline Eigen::VectorXd dsyevd_inplace(Eigen::MatrixXd& A, bool vectors) {
    const int n = static_cast<int>(A.rows());
    Eigen::VectorXd evals(n);
    if (n == 0) return evals;
    const char jobz = vectors ? 'V' : 'N';
    const char uplo = 'L';
    int info = 0, lwork = -1, liwork = -1;
    double wkopt;
    int iwkopt;
    dsyevd_(&jobz, &uplo, &n, A.data(), &n, evals.data(), &wkopt, &lwork, &iwkopt, &liwork,
            &info);
    lwork = static_cast<int>(wkopt);
    liwork = iwkopt;
    std::vector<double> work(static_cast<std::size_t>(lwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    dsyevd_(&jobz, &uplo, &n, A.data(), &n, evals.data(), work.data(), &lwork, iwork.data(),
            &liwork, &info);
    if (info != 0) throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
    return evals;
}

}  // namespace detail

// ============================================================================
// Concentration matrix and spectrum
// ============================================================================

struct ConcentrationMatrix {
    Eigen::MatrixXcd entries;
    KernelSpec spec;
    QuadratureRule rule;

    double trace() const { return entries.diagonal().real().sum(); }
};

inline ConcentrationMatrix assemble(const KernelSpec& spec, const QuadratureRule& rule) {
    const auto n = static_cast<Eigen::Index>(rule.size());
    Eigen::MatrixXcd A(n, n);
    std::vector<double> sw(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) sw[i] = std::sqrt(rule.weights[i]);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        A(i, i) = sw[iu] * sw[iu] *
                  kernel_eval(spec, rule.nodes[iu], rule.nodes[iu]).real();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const std::complex<double> k = kernel_eval(spec, rule.nodes[iu], rule.nodes[ju]);
            A(i, j) = sw[iu] * sw[ju] * k;
            A(j, i) = std::conj(A(i, j));
        }
    }
    return {std::move(A), spec, rule};
}

inline constexpr double default_spectral_tol = 1e-7;

struct Spectrum {
    std::vector<double> lambdas;      // non-increasing, clamped to [0,1]
    std::vector<double> raw_lambdas;  // pre-clamp values, same order
    double clamp_excess = 0.0;        // max(0, max(raw-1), max(-raw))
    bool flagged = false;
    std::string flag_reason;

    std::size_t size() const { return lambdas.size(); }
};

namespace detail {

inline Spectrum spectrum_from_raw(std::vector<double> raw, double tol) {
    std::sort(raw.begin(), raw.end(), std::greater<double>());
    Spectrum s;
    s.raw_lambdas = raw;
    s.lambdas.resize(raw.size());
    double excess = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        excess = std::max({excess, raw[i] - 1.0, -raw[i]});
        s.lambdas[i] = std::clamp(raw[i], 0.0, 1.0);
    }
    s.clamp_excess = std::max(0.0, excess);
    if (s.clamp_excess > tol) {
        s.flagged = true;
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "clamp excess %.3e above tolerance %.3e (under-resolved quadrature)",
                      s.clamp_excess, tol);
        s.flag_reason = buf;
    }
    return s;
}

}  // namespace detail

inline Spectrum eigenvalues(const ConcentrationMatrix& m, double tol = default_spectral_tol) {
    Eigen::MatrixXcd copy = m.entries;
    const Eigen::VectorXd ev = detail::zheevd_inplace(copy, false);
    return detail::spectrum_from_raw({ev.data(), ev.data() + ev.size()}, tol);
}

// descending eigenpairs of a Hermitian matrix
struct EigenPairs {
    std::vector<double> values;
    Eigen::MatrixXcd vectors;  // column k belongs to values[k]
};

inline EigenPairs hermitian_eigenpairs(const Eigen::MatrixXcd& A) {
    Eigen::MatrixXcd work = A;
    const Eigen::VectorXd ev = detail::zheevd_inplace(work, true);
    const Eigen::Index n = A.rows();
    EigenPairs out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[static_cast<std::size_t>(k)] = ev(n - 1 - k);
        out.vectors.col(k) = work.col(n - 1 - k);
    }
    return out;
}

// ============================================================================
// Regularized lower incomplete gamma P(a, x)
// ============================================================================

// series for x < a + 1, Lentz continued fraction otherwise; ~1e-14 absolute
inline double regularized_lower_incomplete_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("P(a,x): need a > 0");
    if (x < 0.0) throw std::invalid_argument("P(a,x): need x >= 0");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    const double lead = a * std::log(x) - x - lg;
    if (x < a + 1.0) {
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int it = 0; it < 500; ++it) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-17) break;
        }
        return std::min(1.0, sum * std::exp(lead));
    }
    // continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::max(0.0, 1.0 - std::exp(lead) * h);
}

// Ginibre concentration spectrum on a centered disk of radius R:
// lambda_j = P(j + 1, pi R^2)
inline Spectrum ginibre_disk_spectrum_analytic(double R, int count) {
    if (!(R > 0.0)) throw std::invalid_argument("disk spectrum: need R > 0");
    if (count < 1) throw std::invalid_argument("disk spectrum: need count >= 1");
    const double a = pi * R * R;
    std::vector<double> lam(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j)
        lam[static_cast<std::size_t>(j)] = regularized_lower_incomplete_gamma(j + 1.0, a);
    return detail::spectrum_from_raw(std::move(lam), default_spectral_tol);
}

// ============================================================================
// Radial angular-block solver for disks
// ============================================================================

namespace detail {

// in-place radix-2 FFT, X[m] = sum_k x[k] e^{-2 pi i k m / n}
inline void fft_pow2(std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::logic_error("fft_pow2: size must be 2^k");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// phase-stripped Landau kernel between ring radii r, s at angle delta
inline std::complex<double> landau_ring_kernel(int n, double r, double s, double c, double sn) {
    const double d2 = r * r + s * s - 2.0 * r * s * c;
    const std::complex<double> expo(-0.5 * pi * (r * r + s * s) + pi * r * s * c,
                                    pi * r * s * sn);
    return laguerre(n, pi * d2) * std::exp(expo);
}

}  // namespace detail

struct RadialInfo {
    int max_angular = 0;
    int radial_order = 0;
    int fft_size = 0;
    int blocks_used = 0;            // blocks contributing an eigenvalue above 1e-10
    double largest_discarded = 0.0; // top eigenvalue of the first block beyond max_angular
};

// Eigenvalues of the concentration operator for the Landau-n kernel on a disk
// of radius R, obtained per angular Fourier mode: the kernel restricted to the
// mode l is a 1D problem on [0, R] with measure r dr, discretized by
// Gauss-Legendre in u = r^2. All block eigenvalues are merged and sorted.
inline Spectrum landau_disk_spectrum_radial(int n, double R, int max_angular, int radial_order,
                                            RadialInfo* info = nullptr,
                                            double tol = default_spectral_tol) {
    if (n < 0 || n > 5)
        throw std::invalid_argument("radial solver: Landau level must be in [0, 5]");
    if (!(R > 0.0)) throw std::invalid_argument("radial solver: need R > 0");
    const double area = pi * R * R;
    if (max_angular < 2 * static_cast<int>(std::ceil(area)))
        throw std::invalid_argument("radial solver: max_angular must be >= 2*ceil(pi R^2)");
    if (radial_order < 8) throw std::invalid_argument("radial solver: radial_order too small");

    // radial Gauss-Legendre in u = r^2 on [0, R^2]; weight du/2 carries r dr
    const GaussLegendreRule gl = gauss_legendre(radial_order);
    const int mr = radial_order;
    std::vector<double> r(static_cast<std::size_t>(mr)), sw(static_cast<std::size_t>(mr));
    for (int i = 0; i < mr; ++i) {
        const double u = 0.5 * R * R * (gl.x[static_cast<std::size_t>(i)] + 1.0);
        r[static_cast<std::size_t>(i)] = std::sqrt(u);
        sw[static_cast<std::size_t>(i)] =
            std::sqrt(0.25 * R * R * gl.w[static_cast<std::size_t>(i)]);
    }

    std::size_t m = 256;
    while (m < 4 * static_cast<std::size_t>(max_angular + n + 40)) m <<= 1;
    std::vector<double> cosd(m), sind(m);
    for (std::size_t k = 0; k < m; ++k) {
        cosd[k] = std::cos(2.0 * pi * static_cast<double>(k) / static_cast<double>(m));
        sind[k] = std::sin(2.0 * pi * static_cast<double>(k) / static_cast<double>(m));
    }

    // angular Fourier coefficients for every radial pair; block l keeps
    // coefficient index (m + l) mod m of the forward FFT
    const int l_lo = -n, l_hi = max_angular + 1;  // one extra block for the discard check
    const int n_blocks = l_hi - l_lo + 1;
    std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(n_blocks));
    for (auto& b : blocks) b.resize(mr, mr);
    std::vector<std::complex<double>> buf(m);
    const double fscale = 2.0 * pi / static_cast<double>(m);
    for (int i = 0; i < mr; ++i) {
        for (int j = i; j < mr; ++j) {
            for (std::size_t k = 0; k < m; ++k)
                buf[k] = detail::landau_ring_kernel(n, r[static_cast<std::size_t>(i)],
                                                    r[static_cast<std::size_t>(j)], cosd[k],
                                                    sind[k]);
            detail::fft_pow2(buf);
            const double wij =
                fscale * sw[static_cast<std::size_t>(i)] * sw[static_cast<std::size_t>(j)];
            for (int l = l_lo; l <= l_hi; ++l) {
                const std::size_t idx = static_cast<std::size_t>(
                    (static_cast<int>(m) + l) % static_cast<int>(m));
                const double val = wij * buf[idx].real();
                auto& B = blocks[static_cast<std::size_t>(l - l_lo)];
                B(i, j) = val;
                B(j, i) = val;
            }
        }
    }

    std::vector<double> raw;
    raw.reserve(static_cast<std::size_t>(n_blocks) * static_cast<std::size_t>(mr));
    RadialInfo diag;
    diag.max_angular = max_angular;
    diag.radial_order = radial_order;
    diag.fft_size = static_cast<int>(m);
    for (int l = l_lo; l <= l_hi; ++l) {
        auto& B = blocks[static_cast<std::size_t>(l - l_lo)];
        const Eigen::VectorXd ev = detail::dsyevd_inplace(B, false);
        const double top = ev(ev.size() - 1);
        if (l == l_hi) {
            diag.largest_discarded = top;
            break;
        }
        if (top > 1e-10) ++diag.blocks_used;
        for (Eigen::Index k = 0; k < ev.size(); ++k) raw.push_back(ev(k));
    }

    Spectrum s = detail::spectrum_from_raw(std::move(raw), tol);
    if (diag.largest_discarded > 1e-10) {
        s.flagged = true;
        char buf2[128];
        std::snprintf(buf2, sizeof buf2,
                      "max_angular %d insufficient: discarded block eigenvalue %.3e > 1e-10",
                      max_angular, diag.largest_discarded);
        s.flag_reason = s.flag_reason.empty() ? buf2 : s.flag_reason + "; " + buf2;
    }
    if (info) *info = diag;
    return s;
}

// parameter choice that keeps the discarded-block eigenvalue below 1e-10 and
// the radial quadrature spectrally converged for pi R^2 up to a few hundred
inline Spectrum landau_disk_spectrum_radial_auto(int n, double R, RadialInfo* info = nullptr,
                                                 double tol = default_spectral_tol) {
    const double a = pi * R * R;
    const int max_angular = std::max(2 * static_cast<int>(std::ceil(a)),
                                     static_cast<int>(std::ceil(a + 7.0 * std::sqrt(a))) + 30 +
                                         10 * n);
    const int radial_order =
        std::max(48, static_cast<int>(std::ceil(0.55 * a)) + 48 + 8 * n);
    return landau_disk_spectrum_radial(n, R, max_angular, radial_order, info, tol);
}

// ============================================================================
// Spectrum CSV: "index,lambda,raw_lambda"
// ============================================================================

inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "index,lambda,raw_lambda\n";
    char buf[128];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, s.lambdas[i], s.raw_lambdas[i]);
        out << buf;
    }
}

inline void write_spectrum_csv(const std::string& path, const Spectrum& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write spectrum csv: " + path);
    write_spectrum_csv(out, s);
}

}  // namespace dpplab
