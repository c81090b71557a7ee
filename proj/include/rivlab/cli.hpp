// Command implementations behind the `rivlab` executable: every analysis is
// a subcommand that writes plot-ready CSV or JSON. Output is deterministic
// for a fixed flag set (including the seed); numbers are serialized with 12
// significant digits; CSV is comma-separated UTF-8 with LF line endings and
// a mandatory header row.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rivlab/critical.hpp"
#include "rivlab/mc.hpp"
#include "rivlab/phase.hpp"
#include "rivlab/rivdist.hpp"

namespace rivlab::cli {

inline constexpr int kSchemaVersion = 1;

enum class Format { csv, json };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::domain_error("format: expected csv | json");
}

/// 12-significant-digit rendering used by both writers.
inline std::string str12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Round to the 12-digit wire representation so JSON round-trips match CSV.
inline double round12(double v) { return std::strtod(str12(v).c_str(), nullptr); }

struct GridSpec {
    double start = 0.0;
    double stop = 1.0;
    int count = 100;
    bool log_scale = false;
};

/// Parse "start:stop:count".
inline GridSpec parse_grid(const std::string& s, bool log_scale) {
    GridSpec g;
    g.log_scale = log_scale;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &g.start, &g.stop, &g.count) != 3)
        throw std::domain_error("grid: expected start:stop:count");
    if (g.count < 2 || !(g.stop > g.start)) throw std::domain_error("grid: requires stop > start, count >= 2");
    return g;
}

inline std::vector<double> make_grid(const GridSpec& g) {
    return g.log_scale ? critical::log_spaced_grid(g.start, g.stop, g.count)
                       : critical::linear_grid(g.start, g.stop, g.count);
}

/// A full parsed invocation; exactly one subcommand.
struct RunConfig {
    std::string subcommand;

    // dist + validate
    double k = 5, m = 200, n = 1000;
    std::string which = "left";  // left | right
    std::string form = "exact";  // exact | asymptotic

    // support
    double support_m = 1000;
    double support_n = 50000;
    std::vector<double> rho_list;

    // critical + phase
    double level = 0.6;
    double ambient_n = 1e4;
    std::vector<std::string> methods;

    double eps = 1e-3;
    std::optional<GridSpec> grid;

    // validate
    std::uint64_t seed = 0;
    long trials = 10000;
    double sigma2 = 0.0;  // 0 -> 1/M
    std::string x_rule = "equal-entries";

    Format format = Format::csv;
    std::string out_path = "out.csv";
};

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed");
    }

  private:
    std::ofstream out_;
};

inline void write_json(const std::string& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << j.dump(2) << '\n';
    out.close();
    if (!out) throw std::runtime_error("write failed");
}

/// "dir/name.ext" -> "dir/name_tag.ext"
inline std::string tagged_path(const std::string& path, const std::string& tag) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_" + tag;
    return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

/// dist: PDF/CDF table of one RIV, exact or asymptotic.
inline void cmd_dist(const RunConfig& cfg) {
    const rivdist::Triplet t(cfg.k, cfg.m, cfg.n);
    const bool left = cfg.which == "left";
    const bool exact = cfg.form == "exact";
    if (!left && cfg.which != "right") throw std::domain_error("dist: --which expects left | right");
    if (!exact && cfg.form != "asymptotic") throw std::domain_error("dist: --form expects exact | asymptotic");

    std::vector<double> grid;
    if (cfg.grid) {
        grid = make_grid(*cfg.grid);
    } else if (left) {
        grid = critical::linear_grid(0.0, 1.0, 201);
    } else {
        const double hi = mc::detail::right_riv_quantile(t, 0.9999) * 1.25;
        grid = critical::linear_grid(0.0, hi, 201);
    }

    const auto cdf = [&](double x) {
        if (left) return exact ? rivdist::left_riv_cdf(t, x) : rivdist::left_riv_cdf_asym(t, x);
        return exact ? rivdist::right_riv_cdf(t, x) : rivdist::right_riv_cdf_asym(t, x);
    };
    const auto log_pdf = [&](double x) {
        if (left) return exact ? rivdist::left_riv_log_pdf(t, x) : rivdist::left_riv_log_pdf_asym(t, x);
        return exact ? rivdist::right_riv_log_pdf(t, x) : rivdist::right_riv_log_pdf_asym(t, x);
    };

    const std::string var = left ? "u" : "v";
    if (cfg.format == Format::csv) {
        CsvWriter w(cfg.out_path);
        w.row({var, "pdf", "cdf", "log_pdf"});
        for (const double x : grid) {
            const double lp = log_pdf(x);
            w.row({str12(x), str12(std::exp(lp)), str12(cdf(x)), str12(lp)});
        }
        w.close();
        return;
    }
    nlohmann::ordered_json j;
    j["version"] = kSchemaVersion;
    j["command"] = "dist";
    j["config"] = {{"k", cfg.k}, {"m", cfg.m}, {"n", cfg.n}, {"which", cfg.which}, {"form", cfg.form}};
    j["log_ns"] = round12(t.log_ns.value);
    j["asymptotic_regime_estimate"] = round12(1.0 / (t.log_ns.value * t.log_ns.value));
    j["columns"] = {var, "pdf", "cdf", "log_pdf"};
    auto rows = nlohmann::ordered_json::array();
    for (const double x : grid) {
        const double lp = log_pdf(x);
        rows.push_back({round12(x), round12(std::exp(lp)), round12(cdf(x)), round12(lp)});
    }
    j["rows"] = std::move(rows);
    write_json(cfg.out_path, j);
}

/// support: LESP/UESP band of the left limit law; M fixed, delta swept from
/// M/N up to 1, one pair of series per rho.
inline void cmd_support(const RunConfig& cfg) {
    const double m = cfg.support_m;
    const double n = cfg.support_n;
    if (!(m >= 2.0 && n > m)) throw std::domain_error("support: requires 2 <= M < N");
    std::vector<double> rhos = cfg.rho_list;
    if (rhos.empty()) rhos = {0.05, 0.1, 0.15, 0.2};
    for (const double r : rhos)
        if (!(r * m >= 1.0 && r <= 1.0)) throw std::domain_error("support: rho list requires 1 <= rho*M <= M");
    const std::vector<double> deltas =
        cfg.grid ? make_grid(*cfg.grid) : critical::linear_grid(m / n, 1.0, 50);

    struct Row {
        double rho, delta, lesp, uesp;
    };
    std::vector<Row> rows;
    for (const double rho : rhos)
        for (const double delta : deltas) {
            if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("support: delta grid outside (0, 1]");
            const rivdist::Triplet t(rho * m, m, m / delta);
            const auto band = rivdist::left_support(t, cfg.eps);
            rows.push_back({rho, delta, band.lower, band.upper});
        }

    if (cfg.format == Format::csv) {
        CsvWriter w(cfg.out_path);
        w.row({"rho", "delta", "lesp", "uesp", "width"});
        for (const auto& r : rows)
            w.row({str12(r.rho), str12(r.delta), str12(r.lesp), str12(r.uesp), str12(r.uesp - r.lesp)});
        w.close();
        return;
    }
    nlohmann::ordered_json j;
    j["version"] = kSchemaVersion;
    j["command"] = "support";
    j["config"] = {{"m", m}, {"n", n}, {"rho", rhos}, {"eps", cfg.eps}};
    j["columns"] = {"rho", "delta", "lesp", "uesp", "width"};
    auto jr = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        jr.push_back({round12(r.rho), round12(r.delta), round12(r.lesp), round12(r.uesp),
                      round12(r.uesp - r.lesp)});
    j["rows"] = std::move(jr);
    write_json(cfg.out_path, j);
}

/// critical: level curve of the left critical function with residuals;
/// no-root grid points are flagged, never dropped.
inline void cmd_critical(const RunConfig& cfg) {
    const std::vector<double> deltas =
        cfg.grid ? make_grid(*cfg.grid) : critical::log_spaced_grid(0.01, 1.0, 100);
    const auto pts = critical::level_curve(cfg.level, cfg.ambient_n, cfg.eps, deltas);

    if (cfg.format == Format::csv) {
        CsvWriter w(cfg.out_path);
        w.row({"delta", "rho", "residual", "status"});
        for (const auto& p : pts) {
            if (p.found)
                w.row({str12(p.delta), str12(p.rho), str12(p.residual), "ok"});
            else
                w.row({str12(p.delta), "", "", "no-root"});
        }
        w.close();
        return;
    }
    nlohmann::ordered_json j;
    j["version"] = kSchemaVersion;
    j["command"] = "critical";
    j["config"] = {{"level", cfg.level}, {"n", cfg.ambient_n}, {"eps", cfg.eps}};
    j["columns"] = {"delta", "rho", "residual", "status"};
    auto jr = nlohmann::ordered_json::array();
    for (const auto& p : pts) {
        if (p.found)
            jr.push_back({round12(p.delta), round12(p.rho), round12(p.residual), "ok"});
        else
            jr.push_back({round12(p.delta), nullptr, nullptr, "no-root"});
    }
    j["rows"] = std::move(jr);
    write_json(cfg.out_path, j);
}

namespace detail {

inline nlohmann::ordered_json boundary_rows(const phase::Boundary& b) {
    auto jr = nlohmann::ordered_json::array();
    for (const auto& p : b.grid) {
        if (p.found)
            jr.push_back({round12(p.delta), round12(p.rho), round12(p.residual), "ok"});
        else
            jr.push_back({round12(p.delta), nullptr, nullptr, "no-root"});
    }
    return jr;
}

inline void write_boundary_csv(const std::string& path, const phase::Boundary& b) {
    CsvWriter w(path);
    w.row({"delta", "rho", "residual", "status"});
    for (const auto& p : b.grid) {
        if (p.found)
            w.row({str12(p.delta), str12(p.rho), str12(p.residual), "ok"});
        else
            w.row({str12(p.delta), "", "", "no-root"});
    }
    w.close();
}

}  // namespace detail

/// phase: PT boundaries for the selected methods plus the measurement-bound
/// summary; literature constants are emitted with provenance "paper", the
/// solved ones with provenance "computed".
inline void cmd_phase(const RunConfig& cfg) {
    std::vector<std::string> methods = cfg.methods;
    if (methods.empty()) methods = {"riv", "gfa"};
    const std::vector<double> deltas =
        cfg.grid ? make_grid(*cfg.grid) : critical::log_spaced_grid(0.01, 1.0, 100);

    std::vector<phase::Boundary> bounds;
    for (const auto& name : methods) {
        phase::Method method;
        if (name == "riv")
            method = phase::Method::riv;
        else if (name == "gfa")
            method = phase::Method::gfa;
        else
            throw std::domain_error("phase: --methods expects a subset of {riv, gfa}");
        bounds.push_back(phase::pt_boundary(method, cfg.ambient_n, cfg.eps, deltas));
    }

    struct SummaryRow {
        std::string approach;
        double c;
        std::string provenance;
    };
    std::vector<SummaryRow> summary;
    double c_riv = 0.0;
    for (const auto& b : bounds) {
        const double c = phase::measurement_bound(b);
        if (b.method == phase::Method::riv) c_riv = c;
        summary.push_back({phase::method_name(b.method), c, "computed"});
    }
    summary.push_back({phase::kCitedPolytopeBound.approach, phase::kCitedPolytopeBound.c, "paper"});
    summary.push_back({phase::kCitedEvBound.approach, phase::kCitedEvBound.c, "paper"});
    if (c_riv > 0.0) summary.push_back({"ev_to_riv_ratio", phase::kCitedEvBound.c / c_riv, "computed"});

    if (cfg.format == Format::csv) {
        for (const auto& b : bounds)
            detail::write_boundary_csv(tagged_path(cfg.out_path, phase::method_name(b.method)), b);
        CsvWriter w(tagged_path(cfg.out_path, "summary"));
        w.row({"approach", "c", "provenance"});
        for (const auto& s : summary) w.row({s.approach, str12(s.c), s.provenance});
        w.close();
        return;
    }
    nlohmann::ordered_json j;
    j["version"] = kSchemaVersion;
    j["command"] = "phase";
    j["config"] = {{"methods", methods}, {"n", cfg.ambient_n}, {"eps", cfg.eps}};
    j["columns"] = {"delta", "rho", "residual", "status"};
    auto jb = nlohmann::ordered_json::object();
    for (const auto& b : bounds) jb[phase::method_name(b.method)] = detail::boundary_rows(b);
    j["boundaries"] = std::move(jb);
    auto js = nlohmann::ordered_json::array();
    for (const auto& s : summary)
        js.push_back({{"approach", s.approach}, {"c", round12(s.c)}, {"provenance", s.provenance}});
    j["summary"] = std::move(js);
    write_json(cfg.out_path, j);
}

inline nlohmann::ordered_json report_to_json(const mc::MCReport& r) {
    const auto vec12 = [](const std::vector<double>& v) {
        auto a = nlohmann::ordered_json::array();
        for (const double x : v) a.push_back(round12(x));
        return a;
    };
    nlohmann::ordered_json j;
    j["version"] = kSchemaVersion;
    j["command"] = "validate";
    j["config"] = {{"k", r.k},        {"m", r.m},MACRO_GUARD
                   {"n", r.n},        {"trials", r.trials},
                   {"seed", r.seed},  {"sigma2", round12(r.sigma2)},
                   {"x_rule", r.x_rule}, {"x_rule_alt", r.x_rule_alt}};
    j["ratio_mean"] = round12(r.ratio_mean);
    j["ratio_var"] = round12(r.ratio_var);
    j["moments_pass"] = r.moments_pass;
    j["ks_ratio"] = round12(r.ks_ratio);
    j["ks_ratio_alt"] = round12(r.ks_ratio_alt);
    j["ks_noise"] = round12(r.ks_noise);
    j["ks_pass"] = r.ks_pass;
    j["x_invariance_pass"] = r.x_invariance_pass;
    j["sandwich_violations"] = r.sandwich_violations;
    j["ev_dominance_violations"] = r.ev_dominance_violations;
    j["left_grid"] = vec12(r.left_grid);
    j["emp_left_cdf"] = vec12(r.emp_left_cdf);
    j["ana_left_cdf"] = vec12(r.ana_left_cdf);
    j["left_ordering_margin"] = vec12(r.left_ordering_margin);
    j["right_grid"] = vec12(r.right_grid);
    j["emp_right_cdf"] = vec12(r.emp_right_cdf);
    j["ana_right_cdf"] = vec12(r.ana_right_cdf);
    j["right_ordering_margin"] = vec12(r.right_ordering_margin);
    j["ordering_pass"] = r.ordering_pass;
    j["deterministic_pass"] = r.deterministic_pass();
    return j;
}

/// validate: MC validation report as JSON; the exit status reflects only the
/// deterministic inequality checks.
inline int cmd_validate(const RunConfig& cfg) {
    const mc::MCConfig mcc(rivdist::Triplet(cfg.k, cfg.m, cfg.n), cfg.trials, cfg.seed, cfg.sigma2,
                           mc::parse_x_rule(cfg.x_rule));
    const mc::MCReport rep = mc::validate(mcc);
    write_json(cfg.out_path, report_to_json(rep));
    return rep.deterministic_pass() ? 0 : 1;
}

/// Dispatch; returns the process exit code.
inline int run(const RunConfig& cfg) {
    if (cfg.subcommand == "dist") {
        cmd_dist(cfg);
        return 0;
    }
    if (cfg.subcommand == "support") {
        cmd_support(cfg);
        return 0;
    }
    if (cfg.subcommand == "critical") {
        cmd_critical(cfg);
        return 0;
    }
    if (cfg.subcommand == "phase") {
        cmd_phase(cfg);
        return 0;
    }
    if (cfg.subcommand == "validate") return cmd_validate(cfg);
    throw std::domain_error("unknown subcommand: " + cfg.subcommand);
}

}  // namespace rivlab::cli
