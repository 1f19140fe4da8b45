#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "dpplab/sweep.hpp"

using namespace dpplab;
using Catch::Approx;

namespace {

ScalingReport synthetic_report(const std::vector<double>& Ls,
                               const std::vector<double>& Vs) {
    ScalingReport r;
    r.schatten_ps = {0.5, 1.0};
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        SweepRecord rec;
        rec.L = Ls[i];
        rec.area = pi * Ls[i] * Ls[i];
        rec.perimeter = 2.0 * pi * Ls[i];
        rec.expected_count = rec.area;
        rec.variance = Vs[i];
        rec.entropy = 4.0 * Vs[i];  // safely above 4 ln2 V
        rec.schatten = {Vs[i], Vs[i]};
        rec.S_over_V = 4.0;
        rec.S_over_perimeter = rec.entropy / rec.perimeter;
        rec.V_over_perimeter = rec.variance / rec.perimeter;
        r.records.push_back(rec);
    }
    return r;
}

}  // namespace

TEST_CASE("config parsing applies defaults") {
    const SweepConfig cfg = parse_config("kernel = ginibre\ndomain = disk:1\nL_grid = 2 3 4\n");
    CHECK(cfg.quad_order == 24);
    REQUIRE(cfg.schatten_ps.size() == 2);
    CHECK(cfg.schatten_ps[0] == 0.5);
    CHECK(cfg.schatten_ps[1] == 1.0);
    CHECK(cfg.kernel.variant() == KernelSpec::Variant::ginibre);
    CHECK(cfg.base_domain.kind() == ShapeKind::disk);
}

TEST_CASE("config parsing rejects bad grids and unknown keys") {
    CHECK_THROWS_WITH(parse_config("L_grid = 3 2 1\n"),
                      Catch::Matchers::ContainsSubstring("strictly increasing"));
    CHECK_THROWS_WITH(parse_config("frobnicate = 1\n"),
                      Catch::Matchers::ContainsSubstring("config line 1"));
    CHECK_THROWS_WITH(parse_config("kernel = ginibre\nquad_order = abc\n"),
                      Catch::Matchers::ContainsSubstring("config line 2"));
    CHECK_THROWS(parse_config("L_grid = -1 2\n"));
    CHECK_THROWS(parse_config("quad_order = 2\n"));
}

TEST_CASE("config parses kernels, comments, and engine") {
    const SweepConfig cfg = parse_config(
        "# comment\nkernel = landau:2\nengine = radial\nschatten_ps = 0.25, 0.5, 1\n"
        "seed = 9\nsamples = 50\nout = r.csv\n");
    CHECK(cfg.kernel.variant() == KernelSpec::Variant::landau);
    CHECK(cfg.kernel.level() == 2);
    CHECK(cfg.engine == Engine::radial);
    CHECK(cfg.schatten_ps.size() == 3);
    CHECK(cfg.seed == 9);
    CHECK(cfg.n_samples == 50);
    CHECK(cfg.out_path == "r.csv");
}

TEST_CASE("single-L sweep produces one record and no fits") {
    SweepConfig cfg;
    cfg.kernel = KernelSpec::ginibre();
    cfg.base_domain = Domain::disk(std::sqrt(1.0 / pi));
    cfg.L_grid = {1.0};
    cfg.quad_order = 16;
    cfg.engine = Engine::nystrom;
    const ScalingReport rep = run_sweep(cfg);
    REQUIRE(rep.records.size() == 1);
    CHECK_FALSE(rep.fits.valid);
    CHECK(rep.records[0].expected_count == Approx(1.0).margin(1e-8));
    CHECK(rep.records[0].variance == Approx(0.52377761180260870).margin(1e-6));
    CHECK(rep.records[0].entropy == Approx(1.6390490917419293).margin(1e-6));
}

TEST_CASE("ginibre disk sweep satisfies the entropy-variance chain") {
    SweepConfig cfg;
    cfg.base_domain = Domain::disk(1.0);
    cfg.L_grid = {2.0, 3.0, 4.0, 5.0};
    const ScalingReport rep = run_sweep(cfg);  // radial engine via auto
    REQUIRE(rep.records.size() == 4);
    for (const auto& r : rep.records) {
        CHECK(r.S_over_V >= four_ln2);
        CHECK(r.entropy >= four_ln2 * r.variance - 1e-12);
        CHECK(r.expected_count == Approx(r.area).margin(1e-6 * r.area));
    }
    // regression values from the analytic spectrum
    CHECK(rep.records[0].entropy == Approx(6.365795).margin(2e-4));
    CHECK(rep.records[0].variance == Approx(1.989977).margin(2e-4));
    CHECK(rep.records[0].S_over_V == Approx(3.19893).margin(1e-3));
    CHECK(rep.fits.valid);
    CHECK(rep.fits.variance_exponent == Approx(1.0).margin(0.02));
    CHECK(rep.fits.entropy_exponent == Approx(1.0).margin(0.02));
    // top-half V/perimeter spread stays small for this hyperuniform kernel
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = rep.records.size() / 2; i < rep.records.size(); ++i) {
        lo = std::min(lo, rep.records[i].V_over_perimeter);
        hi = std::max(hi, rep.records[i].V_over_perimeter);
    }
    CHECK((hi - lo) / lo < 0.05);
    // variance stays below a quarter of the effective dimension
    for (const auto& r : rep.records) CHECK(r.variance <= r.expected_count);
}

TEST_CASE("sweep aborts when the node cap is exceeded") {
    SweepConfig cfg;
    cfg.base_domain = Domain::rectangle(1.0, 1.0);
    cfg.L_grid = {1.0, 2.0};
    cfg.quad_order = 80;  // 6400 nodes
    cfg.node_cap = 4000;
    cfg.engine = Engine::nystrom;
    CHECK_THROWS_WITH(run_sweep(cfg), Catch::Matchers::ContainsSubstring("node cap"));
}

TEST_CASE("engine=radial rejects non-disk domains") {
    SweepConfig cfg;
    cfg.base_domain = Domain::rectangle(1.0, 1.0);
    cfg.engine = Engine::radial;
    CHECK_THROWS(run_sweep(cfg));
}

TEST_CASE("classifier identifies synthetic growth laws exactly") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    const std::vector<double> Ls = {2, 3, 4, 5, 6, 7, 8};
    int correct = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const double a = u(rng);
        std::vector<double> lin, logl;
        for (double L : Ls) {
            lin.push_back(a * L);
            logl.push_back(a * L * std::log(L));
        }
        if (classify_hyperuniformity(synthetic_report(Ls, lin)) ==
            HyperuniformityClass::class_one)
            ++correct;
        if (classify_hyperuniformity(synthetic_report(Ls, logl)) ==
            HyperuniformityClass::class_two)
            ++correct;
    }
    CHECK(correct == 100);
}

TEST_CASE("classifier is inconclusive when neither model fits") {
    const std::vector<double> Ls = {2, 3, 4, 5, 6, 7, 8};
    std::vector<double> cubic;
    for (double L : Ls) cubic.push_back(0.3 * L * L * L);
    CHECK(classify_hyperuniformity(synthetic_report(Ls, cubic)) ==
          HyperuniformityClass::inconclusive);
    CHECK_THROWS_AS(classify_hyperuniformity(synthetic_report({1, 2, 3}, {1, 2, 3})),
                    std::invalid_argument);
}

TEST_CASE("report emission round trip preserves all digits") {
    const std::vector<double> Ls = {2, 3, 4, 5};
    std::vector<double> Vs;
    for (double L : Ls) Vs.push_back(0.7123456789123456 * L);
    const ScalingReport rep = synthetic_report(Ls, Vs);
    std::ostringstream out;
    emit_report(rep, out);
    std::istringstream in(out.str());
    const ScalingReport back = parse_report(in);
    REQUIRE(back.records.size() == rep.records.size());
    REQUIRE(back.schatten_ps == rep.schatten_ps);
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        CHECK(back.records[i].L == rep.records[i].L);
        CHECK(back.records[i].area == rep.records[i].area);
        CHECK(back.records[i].perimeter == rep.records[i].perimeter);
        CHECK(back.records[i].expected_count == rep.records[i].expected_count);
        CHECK(back.records[i].variance == rep.records[i].variance);
        CHECK(back.records[i].entropy == rep.records[i].entropy);
        CHECK(back.records[i].schatten == rep.records[i].schatten);
        CHECK(back.records[i].S_over_V == rep.records[i].S_over_V);
        CHECK(back.records[i].S_over_perimeter == rep.records[i].S_over_perimeter);
        CHECK(back.records[i].V_over_perimeter == rep.records[i].V_over_perimeter);
    }
}

TEST_CASE("empty report emits only the documented header") {
    ScalingReport rep;
    rep.schatten_ps = {0.5, 1.0};
    std::ostringstream out;
    emit_report(rep, out);
    CHECK(out.str() ==
          "L,area,perimeter,expected_count,variance,entropy,schatten_0.5,schatten_1,"
          "S_over_V,S_over_perimeter,V_over_perimeter\n");
}

TEST_CASE("emission re-validates the record invariants") {
    ScalingReport rep = synthetic_report({2, 3, 4, 5}, {1, 2, 3, 4});
    rep.records[1].entropy = 0.0;  // breaks S >= 4 ln2 V
    std::ostringstream out;
    CHECK_THROWS_AS(emit_report(rep, out), std::logic_error);
}

TEST_CASE("determinism: identical config, identical bytes") {
    SweepConfig cfg;
    cfg.base_domain = Domain::disk(std::sqrt(1.0 / pi));
    cfg.L_grid = {1.0, 2.0};
    cfg.quad_order = 12;
    cfg.engine = Engine::nystrom;
    std::ostringstream a, b;
    emit_report(run_sweep(cfg), a);
    emit_report(run_sweep(cfg), b);
    CHECK(a.str() == b.str());
}
