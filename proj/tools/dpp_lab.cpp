// Command-line front end: spectra, functionals, dilation sweeps, finite
// ensembles, projection-DPP sampling, and variance-growth classification.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "dpplab/finite_ensemble.hpp"
#include "dpplab/functionals.hpp"
#include "dpplab/geometry.hpp"
#include "dpplab/kernels.hpp"
#include "dpplab/spectral.hpp"
#include "dpplab/sweep.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::string kernel;
    std::string domain;
    int quad_order = -1;
    long long seed = -1;
    std::string out;
    std::string engine;
    int samples = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "config file (key = value lines)");
    cmd->add_option("--kernel", o.kernel,
                    "ginibre | landau:<n> | wh-hermite:<n> | wh-file:<path>");
    cmd->add_option("--domain", o.domain, "disk:<R> | rect:<W>x<H> | poly:<path>");
    cmd->add_option("--quad-order", o.quad_order, "quadrature order");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--engine", o.engine, "auto | nystrom | radial");
    cmd->add_option("--samples", o.samples, "number of point configurations");
}

dpplab::SweepConfig resolve(const CommonOpts& o) {
    dpplab::SweepConfig cfg;
    if (!o.config.empty()) cfg = dpplab::parse_config_file(o.config);
    if (!o.kernel.empty()) cfg.kernel = dpplab::KernelSpec::parse(o.kernel);
    if (!o.domain.empty()) cfg.base_domain = dpplab::parse_domain(o.domain);
    if (o.quad_order > 0) cfg.quad_order = o.quad_order;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.out.empty()) cfg.out_path = o.out;
    if (o.samples > 0) cfg.n_samples = o.samples;
    if (!o.engine.empty()) {
        if (o.engine == "auto") cfg.engine = dpplab::Engine::automatic;
        else if (o.engine == "nystrom") cfg.engine = dpplab::Engine::nystrom;
        else if (o.engine == "radial") cfg.engine = dpplab::Engine::radial;
        else throw std::invalid_argument("--engine must be auto|nystrom|radial");
    }
    return cfg;
}

void print_functionals(const dpplab::FunctionalReport& f) {
    std::printf("expected_count = %.12g\n", f.expected_count);
    std::printf("variance       = %.12g\n", f.variance);
    std::printf("entropy        = %.12g\n", f.entropy);
    for (const auto& [p, v] : f.schatten) std::printf("schatten_%g     = %.12g\n", p, v);
    std::printf("S_over_V       = %.12g\n", f.ratio_entropy_variance);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for planar determinantal point processes"};
    app.require_subcommand(1);

    CommonOpts o_spectrum, o_functionals, o_sweep, o_finite, o_sample, o_classify;
    std::string classify_report;

    auto* c_spectrum =
        app.add_subcommand("spectrum", "eigenvalues of the concentration operator");
    add_common(c_spectrum, o_spectrum);
    auto* c_functionals =
        app.add_subcommand("functionals", "entropy, variance, counts, Schatten traces");
    add_common(c_functionals, o_functionals);
    auto* c_sweep = app.add_subcommand("sweep", "dilation sweep with CSV report");
    add_common(c_sweep, o_sweep);
    auto* c_finite = app.add_subcommand("finite", "finite-ensemble diagnostics");
    add_common(c_finite, o_finite);
    auto* c_sample = app.add_subcommand("sample", "draw projection-DPP point configurations");
    add_common(c_sample, o_sample);
    std::string sample_stats;
    c_sample->add_option("--stats", sample_stats, "write count statistics CSV here");
    auto* c_classify =
        app.add_subcommand("classify", "variance growth model: class I vs class II");
    add_common(c_classify, o_classify);
    c_classify->add_option("--report", classify_report, "classify an existing report CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_spectrum->parsed()) {
            const auto cfg = resolve(o_spectrum);
            const dpplab::Spectrum s = dpplab::sweep_spectrum(cfg, cfg.base_domain);
            if (cfg.out_path.empty()) dpplab::write_spectrum_csv(std::cout, s);
            else dpplab::write_spectrum_csv(cfg.out_path, s);
            std::fprintf(stderr, "%zu eigenvalues, clamp excess %.3g%s\n", s.size(),
                         s.clamp_excess, s.flagged ? " [FLAGGED]" : "");
            if (s.flagged) {
                std::fprintf(stderr, "error: %s\n", s.flag_reason.c_str());
                return 2;
            }
        } else if (c_functionals->parsed()) {
            const auto cfg = resolve(o_functionals);
            const dpplab::Spectrum s = dpplab::sweep_spectrum(cfg, cfg.base_domain);
            if (s.flagged) {
                std::fprintf(stderr, "error: %s\n", s.flag_reason.c_str());
                return 2;
            }
            const auto f = dpplab::functional_report(s, cfg.schatten_ps);
            print_functionals(f);
            if (!cfg.out_path.empty()) {
                dpplab::ScalingReport rep;
                rep.schatten_ps = cfg.schatten_ps;
                dpplab::SweepRecord rec;
                rec.L = cfg.base_domain.dilation_factor();
                rec.area = cfg.base_domain.area();
                rec.perimeter = cfg.base_domain.perimeter();
                rec.expected_count = f.expected_count;
                rec.variance = f.variance;
                rec.entropy = f.entropy;
                for (const auto& [p, v] : f.schatten) rec.schatten.push_back(v);
                rec.S_over_V = f.ratio_entropy_variance;
                rec.S_over_perimeter = rec.entropy / rec.perimeter;
                rec.V_over_perimeter = rec.variance / rec.perimeter;
                rep.records.push_back(rec);
                dpplab::emit_report(rep, cfg.out_path);
            }
        } else if (c_sweep->parsed()) {
            const auto cfg = resolve(o_sweep);
            const auto report = dpplab::run_sweep(cfg);
            const std::string path =
                cfg.out_path.empty() ? std::string("sweep_report.csv") : cfg.out_path;
            dpplab::emit_report(report, path);
            std::printf("wrote %zu records to %s\n", report.records.size(), path.c_str());
            if (report.fits.valid) {
                std::printf("fit V ~ a*L: a = %.6g, rel residual %.3g\n",
                            report.fits.linear_coeff, report.fits.linear_residual);
                std::printf("fit V ~ a*L*lnL: a = %.6g, rel residual %.3g\n",
                            report.fits.loglinear_coeff, report.fits.loglinear_residual);
                std::printf("entropy exponent %.4f, variance exponent %.4f\n",
                            report.fits.entropy_exponent, report.fits.variance_exponent);
                std::printf("classification: %s\n",
                            dpplab::to_string(dpplab::classify_hyperuniformity(report)));
                std::printf("area-law spread (top half) = %.4g  [threshold %.3g]\n",
                            dpplab::area_law_spread(report), cfg.area_law_spread_threshold);
            }
        } else if (c_finite->parsed()) {
            const auto cfg = resolve(o_finite);
            const auto rule = dpplab::quadrature(cfg.base_domain, cfg.quad_order);
            const auto fe = dpplab::build_finite(cfg.kernel, cfg.base_domain, rule,
                                                 cfg.spectral_tol);
            const auto box =
                dpplab::enclosing_box_rule(cfg.base_domain, cfg.box_factor, 64);
            const double gap = dpplab::truncation_gap(fe);
            const double V = dpplab::variance_spectral(fe.full_spectrum());
            const double l1 = dpplab::l1_deviation(fe, box);
            std::printf("rank N        = %d\n", fe.rank());
            std::printf("sum lambda_n  = %.12g (n <= N)\n", fe.leading_lambda_sum());
            std::printf("gap N - sum   = %.12g\n", gap);
            std::printf("variance      = %.12g\n", V);
            std::printf("l1 deviation  = %.12g\n", l1);
            std::printf("V <= 2*gap    : %s\n", V <= 2.0 * gap + 1e-9 ? "yes" : "NO");
            std::printf("V <= l1       : %s\n", V <= l1 + 1e-9 ? "yes" : "NO");
            if (!cfg.out_path.empty())
                dpplab::write_spectrum_csv(cfg.out_path, fe.full_spectrum());
        } else if (c_sample->parsed()) {
            const auto cfg = resolve(o_sample);
            const auto rule = dpplab::quadrature(cfg.base_domain, cfg.quad_order);
            const auto fe = dpplab::build_finite(cfg.kernel, cfg.base_domain, rule,
                                                 cfg.spectral_tol);
            dpplab::SampleOptions opts;
            opts.box_factor = cfg.box_factor;
            const auto samples = dpplab::sample_many(fe, cfg.seed, cfg.n_samples, opts);
            const auto stats = dpplab::empirical_count_stats(samples, cfg.base_domain);
            const std::string path =
                cfg.out_path.empty() ? std::string("points.csv") : cfg.out_path;
            dpplab::write_points_csv(path, samples);
            if (!sample_stats.empty()) dpplab::write_stats_csv(sample_stats, stats);
            std::printf("%d samples of %d points -> %s\n", stats.n_samples, fe.rank(),
                        path.c_str());
            std::printf("mean count %.6g (se %.3g), variance %.6g (se %.3g)\n", stats.mean,
                        stats.stderr_mean, stats.variance, stats.stderr_variance);
        } else if (c_classify->parsed()) {
            dpplab::ScalingReport report;
            if (!classify_report.empty()) {
                report = dpplab::parse_report_file(classify_report);
            } else {
                const auto cfg = resolve(o_classify);
                report = dpplab::run_sweep(cfg);
            }
            const auto cls = dpplab::classify_hyperuniformity(report);
            std::printf("classification: %s\n", dpplab::to_string(cls));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
