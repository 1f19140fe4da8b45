#pragma once

// Correlation kernels of the planar ensembles in scope: infinite Ginibre,
// Landau level n, and Weyl-Heisenberg kernels with Hermite or user-sampled
// windows, together with the special functions (Laguerre, Hermite), the
// short-time Fourier transform, and the window admissibility constant.
//
// Conventions: a point z = (x, xi) is read as the complex number x + i*xi.
// The phase-bearing kernels are
//   K_n(z, w) = e^{i pi (x' xi' - x xi)} e^{-pi/2 (|z|^2 + |w|^2)}
//               L_n(pi |z - w|^2) e^{pi z conj(w)},
// so |K_n(z, w)| = e^{-pi |z-w|^2 / 2} |L_n(pi |z-w|^2)| and K_n(z, z) = 1.
// Ginibre is n = 0. For a sampled window g the kernel is the reproducing
// kernel of the STFT range space, K_g(z, w) = e^{-2 pi i (xi - xi') x'}
// V_g g(z - w), evaluated numerically.

#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpplab/geometry.hpp"

namespace dpplab {

// ============================================================================
// Special functions
// ============================================================================

// Laguerre polynomial L_n(x) by the three-term recurrence
// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}
inline double laguerre(int n, double x) {
    if (n < 0) throw std::invalid_argument("laguerre: order must be >= 0");
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

inline constexpr int hermite_max_order = 30;

// L^2-normalized Hermite function, h_0(t) = 2^{1/4} e^{-pi t^2},
// h_{k+1}(t) = 2 sqrt(pi/(k+1)) t h_k(t) - sqrt(k/(k+1)) h_{k-1}(t)
inline double hermite_function(int n, double t) {
    if (n < 0) throw std::invalid_argument("hermite_function: order must be >= 0");
    if (n > hermite_max_order)
        throw std::invalid_argument("hermite_function: order capped at 30 for stability");
    const double h0 = std::pow(2.0, 0.25) * std::exp(-pi * t * t);
    if (n == 0) return h0;
    double hm1 = h0;
    double h = 2.0 * std::sqrt(pi) * t * h0;
    for (int k = 1; k < n; ++k) {
        const double hp1 =
            2.0 * std::sqrt(pi / (k + 1.0)) * t * h - std::sqrt(k / (k + 1.0)) * hm1;
        hm1 = h;
        h = hp1;
    }
    return h;
}

// ============================================================================
// Sampled windows
// ============================================================================

// Uniformly sampled window g(t), normalized at construction so the trapezoid
// approximation of ||g||^2 is exactly 1. The grid must cover the effective
// support: tail samples may not exceed 1e-12 of the peak.
class WindowSamples {
public:
    WindowSamples(double t0, double dt, std::vector<std::complex<double>> values)
        : t0_(t0), dt_(dt), values_(std::move(values)) {
        if (!(dt_ > 0.0) || !std::isfinite(dt_) || !std::isfinite(t0_))
            throw std::invalid_argument("window: bad grid");
        if (values_.size() < 8)
            throw std::invalid_argument("window: need at least 8 samples");
        double peak = 0.0;
        for (const auto& v : values_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("window: samples must be finite");
            peak = std::max(peak, std::abs(v));
        }
        if (peak == 0.0) throw std::invalid_argument("window: all samples are zero");
        if (std::abs(values_.front()) > 1e-12 * peak || std::abs(values_.back()) > 1e-12 * peak)
            throw std::invalid_argument(
                "window: grid does not cover the effective support (tail above 1e-12 of peak)");
        double e = 0.0;
        for (std::size_t k = 0; k < values_.size(); ++k) {
            const double m2 = std::norm(values_[k]);
            e += (k == 0 || k + 1 == values_.size()) ? 0.5 * m2 : m2;
        }
        e *= dt_;
        const double s = 1.0 / std::sqrt(e);
        for (auto& v : values_) v *= s;
    }

    static WindowSamples from_real(double t0, double dt, const std::vector<double>& values) {
        std::vector<std::complex<double>> cv(values.begin(), values.end());
        return WindowSamples(t0, dt, std::move(cv));
    }

    // text format: "t re [im]" per line, uniform spacing, '#' comments
    static WindowSamples load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open window file: " + path);
        std::vector<double> ts;
        std::vector<std::complex<double>> vs;
        std::string line;
        while (std::getline(in, line)) {
            const auto h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            std::istringstream ls(line);
            double t, re, im;
            if (!(ls >> t >> re)) continue;
            if (!(ls >> im)) im = 0.0;
            ts.push_back(t);
            vs.emplace_back(re, im);
        }
        if (ts.size() < 8) throw std::runtime_error("window file too short: " + path);
        const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
        if (!(dt > 0.0)) throw std::runtime_error("window file grid not increasing: " + path);
        for (std::size_t k = 0; k < ts.size(); ++k)
            if (std::abs(ts[k] - (ts.front() + static_cast<double>(k) * dt)) > 1e-9 * std::abs(dt) * ts.size())
                throw std::runtime_error("window file grid not uniform: " + path);
        return WindowSamples(ts.front(), dt, std::move(vs));
    }

    static WindowSamples sampled_hermite(int n, double half_width = 6.0, double dt = 1.0 / 2048) {
        const int m = static_cast<int>(std::ceil(half_width / dt));
        std::vector<std::complex<double>> vals(2 * m + 1);
        for (int k = 0; k <= 2 * m; ++k) vals[k] = hermite_function(n, (k - m) * dt);
        return WindowSamples(-m * dt, dt, std::move(vals));
    }

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    double t_end() const { return t0_ + dt_ * static_cast<double>(values_.size() - 1); }
    double span() const { return t_end() - t0_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<std::complex<double>>& values() const { return values_; }

    // linear interpolation, zero outside the grid
    std::complex<double> interpolate(double t) const {
        const double u = (t - t0_) / dt_;
        const auto i = static_cast<std::ptrdiff_t>(std::floor(u));
        if (i < 0 || i + 1 >= static_cast<std::ptrdiff_t>(values_.size())) return {0.0, 0.0};
        const double f = u - static_cast<double>(i);
        return (1.0 - f) * values_[static_cast<std::size_t>(i)] +
               f * values_[static_cast<std::size_t>(i) + 1];
    }

    bool same_grid(const WindowSamples& o) const {
        return values_.size() == o.values_.size() && t0_ == o.t0_ && dt_ == o.dt_;
    }

private:
    double t0_;
    double dt_;
    std::vector<std::complex<double>> values_;
};

// ============================================================================
// Short-time Fourier transform
// ============================================================================

// V_g f(x, xi) = int f(t) conj(g(t - x)) e^{-2 pi i xi t} dt by trapezoid
// on f's grid, with the shifted window linearly interpolated.
inline std::complex<double> stft(const WindowSamples& g, const WindowSamples& f, double x,
                                 double xi) {
    if (!g.same_grid(f)) throw std::invalid_argument("stft: windows must share one grid");
    if (std::abs(x) >= g.span())
        throw std::invalid_argument("stft: shift pushes the window support off the grid");
    const double dt = f.dt();
    const std::size_t n = f.size();
    // e^{-2 pi i xi t_k} via incremental rotation, refreshed periodically
    const std::complex<double> step = std::exp(std::complex<double>(0.0, -2.0 * pi * xi * dt));
    std::complex<double> rot = std::exp(std::complex<double>(0.0, -2.0 * pi * xi * f.t0()));
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if ((k & 2047u) == 2047u)
            rot = std::exp(std::complex<double>(
                0.0, -2.0 * pi * xi * (f.t0() + dt * static_cast<double>(k))));
        const double wk = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        const double tk = f.t0() + dt * static_cast<double>(k);
        acc += wk * f.values()[k] * std::conj(g.interpolate(tk - x)) * rot;
        rot *= step;
    }
    return acc * dt;
}

// ============================================================================
// Kernels
// ============================================================================

namespace detail {

// shared Gaussian/phase factor of the closed-form kernels
inline std::complex<double> ginibre_phase_gauss(Point2 z, Point2 w) {
    const std::complex<double> zc = to_complex(z), wc = to_complex(w);
    std::complex<double> expo = -0.5 * pi * (std::norm(zc) + std::norm(wc)) + pi * zc * std::conj(wc);
    expo += std::complex<double>(0.0, pi * (w.x * w.y - z.x * z.y));
    return std::exp(expo);
}

}  // namespace detail

inline std::complex<double> ginibre_kernel(Point2 z, Point2 w) {
    return detail::ginibre_phase_gauss(z, w);
}

inline std::complex<double> landau_kernel(int n, Point2 z, Point2 w) {
    if (n < 0) throw std::invalid_argument("landau_kernel: level must be >= 0");
    const double d2 = std::norm(to_complex(z) - to_complex(w));
    return laguerre(n, pi * d2) * detail::ginibre_phase_gauss(z, w);
}

class KernelSpec {
public:
    enum class Variant { ginibre, landau, wh_hermite, wh_sampled };

    static KernelSpec ginibre() { return KernelSpec(Variant::ginibre, 0, nullptr); }

    static KernelSpec landau(int n) {
        if (n < 0) throw std::invalid_argument("landau kernel: level must be >= 0");
        return KernelSpec(Variant::landau, n, nullptr);
    }

    static KernelSpec wh_hermite(int n) {
        if (n < 0 || n > hermite_max_order)
            throw std::invalid_argument("wh_hermite kernel: level must be in [0, 30]");
        return KernelSpec(Variant::wh_hermite, n, nullptr);
    }

    static KernelSpec wh_sampled(WindowSamples window) {
        return KernelSpec(Variant::wh_sampled, 0,
                          std::make_shared<const WindowSamples>(std::move(window)));
    }

    // "ginibre" | "landau:<n>" | "wh-hermite:<n>" | "wh-file:<path>"
    static KernelSpec parse(const std::string& text) {
        if (text == "ginibre") return ginibre();
        const auto colon = text.find(':');
        if (colon != std::string::npos) {
            const std::string kind = text.substr(0, colon);
            const std::string arg = text.substr(colon + 1);
            if (kind == "landau") return landau(std::stoi(arg));
            if (kind == "wh-hermite") return wh_hermite(std::stoi(arg));
            if (kind == "wh-file") return wh_sampled(WindowSamples::load(arg));
        }
        throw std::invalid_argument(
            "kernel: expected ginibre, landau:<n>, wh-hermite:<n>, or wh-file:<path>");
    }

    Variant variant() const { return variant_; }
    int level() const { return level_; }

    const WindowSamples& window() const {
        if (!window_) throw std::logic_error("kernel: no sampled window attached");
        return *window_;
    }

    // |K(z,w)| depends only on |z-w| for all closed-form variants
    bool rotation_invariant_modulus() const { return variant_ != Variant::wh_sampled; }

    // Landau level reproducing the same spectrum (ginibre -> 0)
    int landau_level() const {
        if (variant_ == Variant::wh_sampled)
            throw std::logic_error("kernel: sampled windows have no Landau level");
        return variant_ == Variant::ginibre ? 0 : level_;
    }

    std::string describe() const {
        switch (variant_) {
            case Variant::ginibre: return "ginibre";
            case Variant::landau: return "landau:" + std::to_string(level_);
            case Variant::wh_hermite: return "wh-hermite:" + std::to_string(level_);
            default: return "wh-sampled";
        }
    }

private:
    KernelSpec(Variant v, int level, std::shared_ptr<const WindowSamples> w)
        : variant_(v), level_(level), window_(std::move(w)) {}

    Variant variant_;
    int level_;
    std::shared_ptr<const WindowSamples> window_;
};

// Weyl-Heisenberg kernel: Hermite windows delegate to the Landau closed form;
// sampled windows evaluate K(z,w) = e^{-2 pi i (xi - xi') x'} V_g g(z - w).
inline std::complex<double> wh_kernel(const KernelSpec& spec, Point2 z, Point2 w) {
    switch (spec.variant()) {
        case KernelSpec::Variant::wh_hermite:
            return landau_kernel(spec.level(), z, w);
        case KernelSpec::Variant::wh_sampled: {
            const WindowSamples& g = spec.window();
            const std::complex<double> v = stft(g, g, z.x - w.x, z.y - w.y);
            return std::exp(std::complex<double>(0.0, -2.0 * pi * (z.y - w.y) * w.x)) * v;
        }
        default:
            throw std::invalid_argument("wh_kernel: spec is not a Weyl-Heisenberg variant");
    }
}

inline std::complex<double> kernel_eval(const KernelSpec& spec, Point2 z, Point2 w) {
    switch (spec.variant()) {
        case KernelSpec::Variant::ginibre: return ginibre_kernel(z, w);
        case KernelSpec::Variant::landau: return landau_kernel(spec.level(), z, w);
        default: return wh_kernel(spec, z, w);
    }
}

// ============================================================================
// Window constant  C_g = [int |V_g g|]^2 int (1+|z|)^{2s} |V_g g|^2
// ============================================================================

// Returns {[int |V_g g| dz]^2, int (1+|z|)^{2s} |V_g g|^2 dz}. The plane
// integrals run over expanding rings until the integrand drops below 1e-12.
inline std::pair<double, double> window_constant_parts(const KernelSpec& spec, double s) {
    if (spec.variant() != KernelSpec::Variant::wh_hermite &&
        spec.variant() != KernelSpec::Variant::wh_sampled)
        throw std::invalid_argument("window_constant: spec must be a Weyl-Heisenberg variant");
    if (!(s >= 0.5)) throw std::invalid_argument("window_constant: need s >= 1/2");

    const bool hermite = spec.variant() == KernelSpec::Variant::wh_hermite;
    const int n_angles = hermite ? 1 : 32;
    auto mod = [&](double r, double th) -> double {
        if (hermite) {
            const double q = pi * r * r;
            return std::exp(-0.5 * q) * std::abs(laguerre(spec.level(), q));
        }
        const WindowSamples& g = spec.window();
        return std::abs(stft(g, g, r * std::cos(th), r * std::sin(th)));
    };

    const GaussLegendreRule gl = gauss_legendre(16);
    const double panel = 0.5;
    const double r_cap = hermite ? 60.0 : spec.window().span() + 5.0;
    double i1 = 0.0, i2 = 0.0;
    double r0 = 0.0;
    bool decayed = false;
    while (r0 < r_cap) {
        const double r1 = r0 + panel;
        double panel_peak = 0.0;
        for (int k = 0; k < 16; ++k) {
            const double r = r0 + 0.5 * panel * (gl.x[k] + 1.0);
            const double wr = 0.5 * panel * gl.w[k] * r * 2.0 * pi;
            double m1 = 0.0, m2 = 0.0;
            for (int j = 0; j < n_angles; ++j) {
                const double v = mod(r, 2.0 * pi * j / n_angles);
                panel_peak = std::max(panel_peak, v);
                m1 += v;
                m2 += std::pow(1.0 + r, 2.0 * s) * v * v;
            }
            i1 += wr * m1 / n_angles;
            i2 += wr * m2 / n_angles;
        }
        r0 = r1;
        if (r0 > 2.0 && panel_peak < 1e-12) {
            decayed = true;
            break;
        }
    }
    if (!decayed)
        throw std::runtime_error(
            "window_constant: |V_g g| does not reach the 1e-12 tail; hypothesis violated");
    return {i1 * i1, i2};
}

inline double window_constant(const KernelSpec& spec, double s) {
    const auto [sq, mom] = window_constant_parts(spec, s);
    return sq * mom;
}

}  // namespace dpplab
