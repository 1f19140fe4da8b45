#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dpplab/functionals.hpp"

using namespace dpplab;
using Catch::Approx;

namespace {

Spectrum make_spectrum(std::vector<double> lambdas) {
    Spectrum s;
    s.raw_lambdas = lambdas;
    s.lambdas = std::move(lambdas);
    return s;
}

// independent oracle for the unit-area disk: lambda_j = 1 - e^{-1} sum_{k<=j} 1/k!
std::vector<double> poisson_tail_spectrum(int count) {
    std::vector<double> out;
    double partial = 0.0, factorial = 1.0;
    for (int j = 0; j < count; ++j) {
        if (j > 0) factorial *= j;
        partial += 1.0 / factorial;
        out.push_back(1.0 - std::exp(-1.0) * partial);
    }
    return out;
}

}  // namespace

TEST_CASE("binary entropy pointwise") {
    CHECK(binary_entropy(0.5) == Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK_THROWS_AS(binary_entropy(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(binary_entropy(1.01), std::invalid_argument);
}

TEST_CASE("binary entropy dominates the parabola 4 ln2 x(1-x)") {
    for (int k = 0; k <= 10000; ++k) {
        const double x = k / 10000.0;
        CHECK(binary_entropy(x) >= four_ln2 * x * (1.0 - x) - 1e-14);
    }
    CHECK(binary_entropy(0.5) == Approx(four_ln2 * 0.25).epsilon(1e-14));
}

TEST_CASE("entropy of simple spectra") {
    CHECK(entropy(make_spectrum({1.0, 1.0, 1.0})) == 0.0);
    CHECK(entropy(make_spectrum({0.5})) == Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("frozen unit-area disk functionals from the analytic spectrum") {
    // oracle check first: the Poisson-tail closed form and P(j+1, 1) agree
    const auto oracle = poisson_tail_spectrum(30);
    const Spectrum s = ginibre_disk_spectrum_analytic(std::sqrt(1.0 / pi), 30);
    for (int j = 0; j < 30; ++j)
        CHECK(s.lambdas[static_cast<std::size_t>(j)] ==
              Approx(oracle[static_cast<std::size_t>(j)]).margin(1e-13));

    CHECK(entropy(s) == Approx(1.6390490917419293).epsilon(0).margin(1e-10));
    CHECK(variance_spectral(s) == Approx(0.52377761180260870).epsilon(0).margin(1e-12));
    // sqrt amplifies the 1e-14 eigenvalue floor, hence the looser margin
    CHECK(schatten_h_trace(s, 0.5) == Approx(1.4300125235702685).epsilon(0).margin(1e-7));
    CHECK(entropy(s) / variance_spectral(s) ==
          Approx(3.1292843657464741).epsilon(0).margin(1e-9));
}

TEST_CASE("variance of simple spectra") {
    CHECK(variance_spectral(make_spectrum({1.0, 1.0})) == 0.0);
    CHECK(variance_spectral(make_spectrum({0.5})) == Approx(0.25));
}

TEST_CASE("expected count") {
    CHECK(expected_count(make_spectrum({})) == 0.0);
    const Domain d = Domain::disk(1.0);
    const Spectrum s = eigenvalues(assemble(KernelSpec::ginibre(), quadrature(d, 24)));
    CHECK(expected_count(s) == Approx(pi).margin(1e-6));

    const Domain sq = Domain::rectangle(2.0, 2.0, {-1.0, -1.0});
    const Spectrum s2 = eigenvalues(assemble(KernelSpec::landau(1), quadrature(sq, 20)));
    CHECK(expected_count(s2) == Approx(4.0).margin(1e-6));
}

TEST_CASE("schatten traces") {
    const Spectrum half = make_spectrum({0.5});
    CHECK(schatten_h_trace(half, 0.5) == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(schatten_h_trace(half, 0.0), std::invalid_argument);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> lam(15);
        for (auto& l : lam) l = u(rng);
        const Spectrum s = make_spectrum(lam);
        CHECK(schatten_h_trace(s, 1.0) == Approx(variance_spectral(s)).epsilon(1e-15));
        // non-increasing in p for p >= 1
        double prev = schatten_h_trace(s, 1.0);
        for (double p : {1.5, 2.0, 3.0, 5.0}) {
            const double v = schatten_h_trace(s, p);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        // entropy dominates the variance on any spectrum
        CHECK(entropy(s) >= four_ln2 * variance_spectral(s) - 1e-12);
    }
}

TEST_CASE("direct and spectral variance agree on one discretization") {
    const Domain d = Domain::disk(std::sqrt(4.0 / pi));
    const QuadratureRule rule = quadrature(d, 24);
    const KernelSpec spec = KernelSpec::ginibre();
    const double direct = variance_direct(spec, rule);
    const Spectrum s = eigenvalues(assemble(spec, rule));
    const double spectral = variance_spectral(s);
    CHECK(direct == Approx(spectral).epsilon(1e-9));
    CHECK(spectral <= static_cast<double>(s.size()) / 4.0);
}

TEST_CASE("direct variance on the unit-area disk") {
    const Domain d = Domain::disk(std::sqrt(1.0 / pi));
    CHECK(variance_direct(KernelSpec::ginibre(), quadrature(d, 24)) ==
          Approx(0.52377761180260870).margin(1e-7));
}

TEST_CASE("direct variance of a single-node rule") {
    QuadratureRule rule;
    rule.order = 1;
    rule.nodes = {{0.3, 0.4}};
    rule.weights = {0.6};
    for (const auto& spec : {KernelSpec::ginibre(), KernelSpec::landau(2)})
        CHECK(variance_direct(spec, rule) == Approx(0.6 - 0.36).epsilon(1e-12));
}

TEST_CASE("functional report carries the ratio and schatten list") {
    const Spectrum s = ginibre_disk_spectrum_analytic(std::sqrt(1.0 / pi), 40);
    const FunctionalReport r = functional_report(s, {0.5, 1.0});
    CHECK(r.expected_count == Approx(1.0).margin(1e-10));
    CHECK(r.schatten.size() == 2);
    CHECK(r.schatten[1].second == Approx(r.variance).epsilon(1e-15));
    CHECK(r.ratio_entropy_variance == Approx(3.1292843657464741).margin(1e-9));
    CHECK(r.variance <= r.expected_count);
}
