#pragma once

// Dilation sweeps: for each L in the grid, compute the spectrum of the
// concentration operator on L*Omega and record count, variance, entropy,
// Schatten traces, and their ratios against the perimeter. Includes the
// variance growth-model classifier (linear vs L log L), the "key = value"
// config parser, and CSV report emission/parsing.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpplab/finite_ensemble.hpp"
#include "dpplab/functionals.hpp"
#include "dpplab/geometry.hpp"
#include "dpplab/kernels.hpp"
#include "dpplab/spectral.hpp"

namespace dpplab {

enum class Engine { automatic, nystrom, radial };

struct SweepConfig {
    KernelSpec kernel = KernelSpec::ginibre();
    Domain base_domain = Domain::disk(1.0);
    std::vector<double> L_grid = {1.0};
    int quad_order = 24;
    std::vector<double> schatten_ps = {0.5, 1.0};
    double spectral_tol = default_spectral_tol;
    int node_cap = 4000;
    Engine engine = Engine::automatic;
    std::string out_path;
    std::uint64_t seed = 1;
    int n_samples = 2000;
    double box_factor = 3.0;
    double area_law_spread_threshold = 0.05;
};

// ============================================================================
// Config parsing: UTF-8 "key = value" lines, '#' comments
// ============================================================================

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, int line_no) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": malformed number '" + v + "'");
    }
}

inline std::vector<double> parse_double_list(const std::string& v, int line_no) {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, line_no));
    return out;
}

}  // namespace detail

inline SweepConfig parse_config(const std::string& text) {
    SweepConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        try {
            if (key == "kernel") {
                cfg.kernel = KernelSpec::parse(val);
            } else if (key == "domain") {
                cfg.base_domain = parse_domain(val);
            } else if (key == "L_grid") {
                cfg.L_grid = detail::parse_double_list(val, line_no);
            } else if (key == "quad_order") {
                cfg.quad_order = static_cast<int>(detail::parse_double(val, line_no));
            } else if (key == "schatten_ps") {
                cfg.schatten_ps = detail::parse_double_list(val, line_no);
            } else if (key == "spectral_tol") {
                cfg.spectral_tol = detail::parse_double(val, line_no);
            } else if (key == "node_cap") {
                cfg.node_cap = static_cast<int>(detail::parse_double(val, line_no));
            } else if (key == "engine") {
                if (val == "auto") cfg.engine = Engine::automatic;
                else if (val == "nystrom") cfg.engine = Engine::nystrom;
                else if (val == "radial") cfg.engine = Engine::radial;
                else throw std::invalid_argument("engine must be auto|nystrom|radial");
            } else if (key == "out") {
                cfg.out_path = val;
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(detail::parse_double(val, line_no));
            } else if (key == "samples") {
                cfg.n_samples = static_cast<int>(detail::parse_double(val, line_no));
            } else if (key == "box_factor") {
                cfg.box_factor = detail::parse_double(val, line_no);
            } else if (key == "area_law_threshold") {
                cfg.area_law_spread_threshold = detail::parse_double(val, line_no);
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            if (msg.rfind("config line", 0) == 0) throw;
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + msg);
        }
    }
    if (cfg.L_grid.empty())
        throw std::invalid_argument("config: L_grid must not be empty");
    for (double L : cfg.L_grid)
        if (!(L > 0.0))
            throw std::invalid_argument("config: L_grid entries must be positive");
    for (std::size_t i = 1; i < cfg.L_grid.size(); ++i)
        if (!(cfg.L_grid[i] > cfg.L_grid[i - 1]))
            throw std::invalid_argument("config: L_grid must be strictly increasing");
    if (cfg.quad_order < 4)
        throw std::invalid_argument("config: quad_order must be >= 4");
    for (double p : cfg.schatten_ps)
        if (!(p > 0.0)) throw std::invalid_argument("config: schatten_ps must be positive");
    return cfg;
}

inline SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ============================================================================
// Sweep
// ============================================================================

struct SweepRecord {
    double L = 1.0;
    double area = 0.0;
    double perimeter = 0.0;
    double expected_count = 0.0;
    double variance = 0.0;
    double entropy = 0.0;
    std::vector<double> schatten;  // aligned with the report's schatten_ps
    double S_over_V = 0.0;
    double S_over_perimeter = 0.0;
    double V_over_perimeter = 0.0;
};

struct SweepFits {
    bool valid = false;
    double linear_coeff = 0.0;       // V ~ a*L on the top half of the grid
    double linear_residual = 0.0;    // relative l2 residual
    double loglinear_coeff = 0.0;    // V ~ a*L*ln L
    double loglinear_residual = 0.0;
    double entropy_exponent = 0.0;   // d ln S / d ln L, top half
    double variance_exponent = 0.0;
};

struct ScalingReport {
    std::vector<double> schatten_ps;
    std::vector<SweepRecord> records;
    SweepFits fits;
};

// compute a spectrum for one dilated domain under the configured engine
inline Spectrum sweep_spectrum(const SweepConfig& cfg, const Domain& dom) {
    const bool radial_possible = dom.kind() == ShapeKind::disk &&
                                 cfg.kernel.rotation_invariant_modulus() &&
                                 cfg.kernel.landau_level() <= 5;
    Engine engine = cfg.engine;
    if (engine == Engine::automatic)
        engine = radial_possible ? Engine::radial : Engine::nystrom;
    if (engine == Engine::radial) {
        if (!radial_possible)
            throw std::invalid_argument(
                "engine=radial requires a disk domain and a closed-form kernel with level <= 5");
        return landau_disk_spectrum_radial_auto(cfg.kernel.landau_level(), dom.disk_radius(),
                                                nullptr, cfg.spectral_tol);
    }
    const QuadratureRule rule = quadrature(dom, cfg.quad_order);
    if (static_cast<int>(rule.size()) > cfg.node_cap)
        throw std::runtime_error("matrix dimension " + std::to_string(rule.size()) +
                                 " exceeds the node cap " + std::to_string(cfg.node_cap));
    return eigenvalues(assemble(cfg.kernel, rule), cfg.spectral_tol);
}

namespace detail {

inline void validate_record(const SweepRecord& r) {
    if (r.entropy + 1e-12 < four_ln2 * r.variance)
        throw std::logic_error("record invariant violated: S >= 4 ln2 V fails at L=" +
                               std::to_string(r.L));
    if (std::abs(r.expected_count - r.area) > 1e-6 * r.area + 1e-9)
        throw std::logic_error("record invariant violated: expected count far from area at L=" +
                               std::to_string(r.L));
    if (r.variance < 0.0)
        throw std::logic_error("record invariant violated: negative variance at L=" +
                               std::to_string(r.L));
}

// least squares through the origin for V against the given basis values
inline std::pair<double, double> fit_through_origin(const std::vector<double>& basis,
                                                    const std::vector<double>& y) {
    double bb = 0.0, by = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        bb += basis[i] * basis[i];
        by += basis[i] * y[i];
        yy += y[i] * y[i];
    }
    const double a = bb > 0.0 ? by / bb : 0.0;
    double res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - a * basis[i];
        res += d * d;
    }
    return {a, yy > 0.0 ? std::sqrt(res / yy) : 0.0};
}

inline double loglog_slope(const std::vector<double>& L, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) {
        const double x = std::log(L[i]), v = std::log(y[i]);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    const double denom = n * sxx - sx * sx;
    return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace detail

inline ScalingReport run_sweep(const SweepConfig& cfg) {
    ScalingReport report;
    report.schatten_ps = cfg.schatten_ps;
    for (double L : cfg.L_grid) {
        const Domain dom = cfg.base_domain.dilated(L);
        Spectrum s;
        try {
            s = sweep_spectrum(cfg, dom);
        } catch (const std::exception& e) {
            throw std::runtime_error("sweep aborted at L=" + std::to_string(L) + ": " + e.what());
        }
        if (s.flagged)
            throw std::runtime_error("sweep aborted at L=" + std::to_string(L) + ": " +
                                     s.flag_reason);
        const FunctionalReport f = functional_report(s, cfg.schatten_ps);
        SweepRecord rec;
        rec.L = L;
        rec.area = dom.area();
        rec.perimeter = dom.perimeter();
        rec.expected_count = f.expected_count;
        rec.variance = f.variance;
        rec.entropy = f.entropy;
        for (const auto& [p, v] : f.schatten) rec.schatten.push_back(v);
        rec.S_over_V = f.ratio_entropy_variance;
        rec.S_over_perimeter = rec.entropy / rec.perimeter;
        rec.V_over_perimeter = rec.variance / rec.perimeter;
        detail::validate_record(rec);
        report.records.push_back(std::move(rec));
    }

    if (report.records.size() >= 4) {
        const std::size_t half = report.records.size() / 2;
        std::vector<double> L, V, S, basis_lin, basis_log;
        for (std::size_t i = half; i < report.records.size(); ++i) {
            const auto& r = report.records[i];
            L.push_back(r.L);
            V.push_back(r.variance);
            S.push_back(r.entropy);
            basis_lin.push_back(r.L);
            basis_log.push_back(r.L * std::log(r.L));
        }
        auto [al, rl] = detail::fit_through_origin(basis_lin, V);
        auto [ag, rg] = detail::fit_through_origin(basis_log, V);
        report.fits.valid = true;
        report.fits.linear_coeff = al;
        report.fits.linear_residual = rl;
        report.fits.loglinear_coeff = ag;
        report.fits.loglinear_residual = rg;
        report.fits.entropy_exponent = detail::loglog_slope(L, S);
        report.fits.variance_exponent = detail::loglog_slope(L, V);
    }
    return report;
}

// ============================================================================
// Hyperuniformity classification
// ============================================================================

enum class HyperuniformityClass { class_one, class_two, inconclusive };

inline const char* to_string(HyperuniformityClass c) {
    switch (c) {
        case HyperuniformityClass::class_one: return "class_one";
        case HyperuniformityClass::class_two: return "class_two";
        default: return "inconclusive";
    }
}

// Fit V(L) against a*L and against a*L*ln L over the top half of the grid;
// the model whose relative residual is at least twice smaller wins.
inline HyperuniformityClass classify_hyperuniformity(const ScalingReport& report) {
    if (report.records.size() < 4)
        throw std::invalid_argument("classify_hyperuniformity: need at least 4 records");
    const std::size_t half = report.records.size() / 2;
    std::vector<double> V, basis_lin, basis_log;
    for (std::size_t i = half; i < report.records.size(); ++i) {
        const auto& r = report.records[i];
        V.push_back(r.variance);
        basis_lin.push_back(r.L);
        basis_log.push_back(r.L * std::log(r.L));
    }
    const double res_lin = detail::fit_through_origin(basis_lin, V).second;
    const double res_log = detail::fit_through_origin(basis_log, V).second;
    if (res_lin < 1e-15 && res_log < 1e-15) return HyperuniformityClass::inconclusive;
    if (2.0 * res_lin <= res_log) return HyperuniformityClass::class_one;
    if (2.0 * res_log <= res_lin) return HyperuniformityClass::class_two;
    return HyperuniformityClass::inconclusive;
}

// ============================================================================
// Report CSV
// ============================================================================

namespace detail {

inline std::string format_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

}  // namespace detail

inline std::string report_header(const std::vector<double>& ps) {
    std::string h = "L,area,perimeter,expected_count,variance,entropy";
    for (double p : ps) h += ",schatten_" + detail::format_p(p);
    h += ",S_over_V,S_over_perimeter,V_over_perimeter";
    return h;
}

inline void emit_report(const ScalingReport& report, std::ostream& out) {
    for (const auto& r : report.records) detail::validate_record(r);
    out << report_header(report.schatten_ps) << "\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << (last ? "\n" : ",");
    };
    for (const auto& r : report.records) {
        put(r.L);
        put(r.area);
        put(r.perimeter);
        put(r.expected_count);
        put(r.variance);
        put(r.entropy);
        for (double v : r.schatten) put(v);
        put(r.S_over_V);
        put(r.S_over_perimeter);
        put(r.V_over_perimeter, true);
    }
}

inline void emit_report(const ScalingReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    emit_report(report, out);
}

inline ScalingReport parse_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("report: empty file");
    std::vector<std::string> cols;
    {
        std::istringstream hs(line);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    ScalingReport report;
    for (const auto& c : cols)
        if (c.rfind("schatten_", 0) == 0) report.schatten_ps.push_back(std::stod(c.substr(9)));
    const std::size_t n_schatten = report.schatten_ps.size();
    if (cols.size() != 9 + n_schatten)
        throw std::runtime_error("report: unexpected column layout");
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        std::istringstream ls(line);
        std::vector<double> v;
        std::string tok;
        while (std::getline(ls, tok, ',')) v.push_back(std::stod(tok));
        if (v.size() != cols.size()) throw std::runtime_error("report: malformed row");
        SweepRecord r;
        std::size_t i = 0;
        r.L = v[i++];
        r.area = v[i++];
        r.perimeter = v[i++];
        r.expected_count = v[i++];
        r.variance = v[i++];
        r.entropy = v[i++];
        for (std::size_t k = 0; k < n_schatten; ++k) r.schatten.push_back(v[i++]);
        r.S_over_V = v[i++];
        r.S_over_perimeter = v[i++];
        r.V_over_perimeter = v[i++];
        report.records.push_back(std::move(r));
    }
    return report;
}

inline ScalingReport parse_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report: " + path);
    return parse_report(in);
}

// relative spread (max-min)/mean of S/perimeter over the top half of the grid
inline double area_law_spread(const ScalingReport& report) {
    if (report.records.size() < 2)
        throw std::invalid_argument("area_law_spread: need at least 2 records");
    const std::size_t half = report.records.size() / 2;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = half; i < report.records.size(); ++i) {
        const double v = report.records[i].S_over_perimeter;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
        ++n;
    }
    return (hi - lo) / (sum / static_cast<double>(n));
}

}  // namespace dpplab
