#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <random>

#include "dpplab/kernels.hpp"

using namespace dpplab;
using Catch::Approx;

namespace {

Point2 random_point(std::mt19937_64& rng, double scale = 1.5) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng)};
}

}  // namespace

TEST_CASE("laguerre basics") {
    CHECK(laguerre(0, 3.7) == 1.0);
    CHECK(laguerre(1, 2.0) == Approx(-1.0));
    CHECK(laguerre(2, 1.0) == Approx(-0.5));  // 1 - 2 + 1/2
    CHECK_THROWS_AS(laguerre(-1, 0.0), std::invalid_argument);
}

TEST_CASE("hermite function values and normalization") {
    CHECK(hermite_function(0, 0.0) == Approx(std::pow(2.0, 0.25)).epsilon(1e-12));
    CHECK(hermite_function(1, 0.0) == Approx(0.0).margin(1e-14));
    CHECK_THROWS_AS(hermite_function(31, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(hermite_function(-1, 0.0), std::invalid_argument);

    // fine trapezoid of h_2^2 on [-6, 6]
    const int n = 48000;
    const double dt = 12.0 / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = -6.0 + k * dt;
        const double v = hermite_function(2, t);
        acc += ((k == 0 || k == n) ? 0.5 : 1.0) * v * v;
    }
    CHECK(acc * dt == Approx(1.0).margin(1e-8));
}

TEST_CASE("ginibre kernel diagonal and modulus") {
    CHECK(ginibre_kernel({0, 0}, {0, 0}).real() == Approx(1.0));
    CHECK(ginibre_kernel({0, 0}, {0, 0}).imag() == Approx(0.0).margin(1e-16));

    // |K| = e^{-pi/2} at separation 1, via the closed form and directly
    const Point2 z{0.3, -0.4}, w{0.3 + std::sqrt(0.5), -0.4 + std::sqrt(0.5)};
    const double sep = std::abs(to_complex(z) - to_complex(w));
    REQUIRE(sep == Approx(1.0));
    CHECK(std::abs(ginibre_kernel(z, w)) == Approx(std::exp(-pi / 2.0)).epsilon(1e-12));
    CHECK(std::exp(-pi / 2.0) == Approx(0.20787957635076191).epsilon(1e-14));
}

TEST_CASE("ginibre kernel is Hermitian and bounded by one") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const Point2 z = random_point(rng), w = random_point(rng);
        const auto k1 = ginibre_kernel(z, w);
        const auto k2 = std::conj(ginibre_kernel(w, z));
        CHECK(std::abs(k1 - k2) <= 1e-14);
        CHECK(std::abs(k1) <= 1.0 + 1e-12);
    }
}

TEST_CASE("kernel modulus is translation invariant") {
    std::mt19937_64 rng(11);
    const KernelSpec specs[] = {KernelSpec::ginibre(), KernelSpec::landau(2),
                                KernelSpec::wh_hermite(1)};
    for (const auto& spec : specs) {
        for (int i = 0; i < 30; ++i) {
            const Point2 z = random_point(rng), w = random_point(rng), v = random_point(rng);
            const double m1 = std::abs(kernel_eval(spec, z, w));
            const double m2 = std::abs(kernel_eval(spec, z + v, w + v));
            CHECK(m1 == Approx(m2).margin(1e-12));
            CHECK(m1 <= 1.0 + 1e-12);
            CHECK(std::abs(kernel_eval(spec, z, w) - std::conj(kernel_eval(spec, w, z))) <=
                  1e-14);
        }
    }
}

TEST_CASE("landau level 0 equals the ginibre kernel") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Point2 z = random_point(rng), w = random_point(rng);
        const auto a = landau_kernel(0, z, w);
        const auto b = ginibre_kernel(z, w);
        CHECK(a == b);  // same arithmetic path, bitwise equal
    }
}

TEST_CASE("landau level 1 vanishes at the Laguerre root") {
    // |z - w|^2 = 1/pi makes L_1(pi |z-w|^2) = L_1(1) = 0
    const double d = 1.0 / std::sqrt(pi);
    const Point2 z{0.2, 0.1}, w{0.2 + d, 0.1};
    CHECK(std::abs(landau_kernel(1, z, w)) == Approx(0.0).margin(1e-14));
}

TEST_CASE("landau kernels have unit diagonal") {
    std::mt19937_64 rng(5);
    for (int n = 0; n <= 5; ++n) {
        const Point2 z = random_point(rng);
        const auto k = landau_kernel(n, z, z);
        CHECK(k.real() == Approx(1.0).margin(1e-9));
        CHECK(k.imag() == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("window samples normalize and validate") {
    const WindowSamples g = WindowSamples::sampled_hermite(0);
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double m2 = std::norm(g.values()[k]);
        e += (k == 0 || k + 1 == g.size()) ? 0.5 * m2 : m2;
    }
    CHECK(e * g.dt() == Approx(1.0).epsilon(1e-14));

    // a window that does not decay on its grid is rejected
    CHECK_THROWS_AS(WindowSamples::from_real(-1.0, 0.1, std::vector<double>(21, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("window file round trip") {
    const std::string path = "win_roundtrip.txt";
    {
        std::ofstream out(path);
        const int m = 400;
        const double dt = 12.0 / (2 * m);
        for (int k = 0; k <= 2 * m; ++k) {
            const double t = -6.0 + k * dt;
            char buf[80];
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", t, hermite_function(0, t));
            out << buf;
        }
    }
    const WindowSamples g = WindowSamples::load(path);
    CHECK(g.size() == 801);
    CHECK(g.dt() == Approx(12.0 / 800).epsilon(1e-12));
    std::remove(path.c_str());
}

TEST_CASE("non-uniform window grids are rejected") {
    const std::string path = "win_nonuniform.txt";
    {
        std::ofstream out(path);
        out << "-4 1e-15\n-3 0.5\n-2 0.9\n-1 1.0\n0 1.0\n1 0.9\n2 0.5\n4 1e-15\n";
    }
    CHECK_THROWS(WindowSamples::load(path));
    std::remove(path.c_str());
}

TEST_CASE("stft of the Gaussian window reproduces its ambiguity function") {
    const WindowSamples g = WindowSamples::sampled_hermite(0);
    CHECK(std::abs(stft(g, g, 0.0, 0.0) - 1.0) <= 1e-12);  // ||g||^2 after normalization

    CHECK(std::abs(stft(g, g, 1.0, 0.0)) == Approx(std::exp(-pi / 2.0)).margin(1e-6));

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    for (int i = 0; i < 20; ++i) {
        const double x = u(rng), xi = u(rng);
        CHECK(std::abs(stft(g, g, x, xi)) ==
              Approx(std::abs(stft(g, g, -x, -xi))).margin(1e-9));
        CHECK(std::abs(stft(g, g, x, xi)) ==
              Approx(std::exp(-0.5 * pi * (x * x + xi * xi))).margin(1e-6));
    }
}

TEST_CASE("stft rejects shifts beyond the grid") {
    const WindowSamples g = WindowSamples::sampled_hermite(0, 4.0, 1.0 / 256);
    CHECK_THROWS_AS(stft(g, g, 9.0, 0.0), std::invalid_argument);
}

TEST_CASE("stft rejects incompatible grids") {
    const WindowSamples g = WindowSamples::sampled_hermite(0, 4.0, 1.0 / 256);
    const WindowSamples f = WindowSamples::sampled_hermite(0, 4.0, 1.0 / 512);
    CHECK_THROWS_AS(stft(g, f, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("wh kernel: hermite variant matches the closed forms") {
    std::mt19937_64 rng(17);
    const KernelSpec wh0 = KernelSpec::wh_hermite(0);
    for (int i = 0; i < 50; ++i) {
        const Point2 z = random_point(rng), w = random_point(rng);
        CHECK(wh_kernel(wh0, z, w) == ginibre_kernel(z, w));
    }
    CHECK_THROWS_AS(wh_kernel(KernelSpec::ginibre(), {0, 0}, {1, 0}), std::invalid_argument);
}

TEST_CASE("wh kernel: sampled Gaussian window matches ginibre in modulus") {
    const KernelSpec spec = KernelSpec::wh_sampled(WindowSamples::sampled_hermite(0));
    std::mt19937_64 rng(19);
    for (int i = 0; i < 50; ++i) {
        const Point2 z = random_point(rng, 1.0), w = random_point(rng, 1.0);
        CHECK(std::abs(wh_kernel(spec, z, w)) ==
              Approx(std::abs(ginibre_kernel(z, w))).margin(1e-6));
    }
    // unit diagonal after normalization
    CHECK(std::abs(wh_kernel(spec, {0.4, -0.7}, {0.4, -0.7})) == Approx(1.0).margin(1e-12));
    // Hermitian up to the shift-interpolation error (the assembled matrix
    // mirrors the lower triangle, so it is exactly Hermitian regardless)
    for (int i = 0; i < 10; ++i) {
        const Point2 z = random_point(rng, 1.0), w = random_point(rng, 1.0);
        CHECK(std::abs(wh_kernel(spec, z, w) - std::conj(wh_kernel(spec, w, z))) <= 5e-7);
    }
}

TEST_CASE("window constant for the Gaussian window") {
    const auto [sq, mom] = window_constant_parts(KernelSpec::wh_hermite(0), 0.5);
    CHECK(sq == Approx(4.0).margin(1e-6));   // [int e^{-pi r^2/2}]^2
    CHECK(mom == Approx(1.5).margin(1e-6));  // int (1+r) e^{-pi r^2}
    CHECK(window_constant(KernelSpec::wh_hermite(0), 0.5) == Approx(6.0).margin(1e-4));
}

TEST_CASE("window constant is non-decreasing in s") {
    const KernelSpec spec = KernelSpec::wh_hermite(1);
    const double c1 = window_constant(spec, 0.5);
    const double c2 = window_constant(spec, 1.0);
    const double c3 = window_constant(spec, 2.0);
    CHECK(c1 <= c2);
    CHECK(c2 <= c3);
    CHECK_THROWS_AS(window_constant(spec, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(window_constant(KernelSpec::ginibre(), 0.5), std::invalid_argument);
}

TEST_CASE("kernel spec parsing") {
    CHECK(KernelSpec::parse("ginibre").variant() == KernelSpec::Variant::ginibre);
    const KernelSpec l2 = KernelSpec::parse("landau:2");
    CHECK(l2.variant() == KernelSpec::Variant::landau);
    CHECK(l2.level() == 2);
    CHECK(KernelSpec::parse("wh-hermite:1").landau_level() == 1);
    CHECK_THROWS(KernelSpec::parse("nope"));
    CHECK_THROWS(KernelSpec::parse("landau:-1"));
}
