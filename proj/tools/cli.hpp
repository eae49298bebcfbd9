#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "config.hpp"
#include "imcf/imcf.hpp"
#include "imcf/serialize.hpp"

namespace imcf::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kDomain = 2, kNumerical = 3 };

inline constexpr const char* kManifestSchema = "imcf-manifest/1";

/// Resolved settings for one run: config file entries overlaid by flags.
class RunConfig {
public:
    std::string command;
    ConfigMap values;

    [[nodiscard]] bool has(const std::string& key) const { return values.count(key) != 0; }

    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback = {}) const {
        const auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    [[nodiscard]] std::string require(const std::string& key) const {
        const auto it = values.find(key);
        if (it == values.end()) throw DomainError("missing required setting '--" + dashed(key) + "'");
        return it->second;
    }
    [[nodiscard]] double number(const std::string& key, double fallback) const {
        return has(key) ? parse_double(text(key), dashed(key)) : fallback;
    }
    [[nodiscard]] double number(const std::string& key) const { return parse_double(require(key), dashed(key)); }
    [[nodiscard]] int integer(const std::string& key, int fallback) const {
        return has(key) ? static_cast<int>(parse_long(text(key), dashed(key))) : fallback;
    }
    [[nodiscard]] int integer(const std::string& key) const {
        return static_cast<int>(parse_long(require(key), dashed(key)));
    }
    [[nodiscard]] bool flag(const std::string& key) const {
        const auto v = text(key, "false");
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw DomainError("'" + dashed(key) + "' expects true or false, got '" + v + "'");
    }
    [[nodiscard]] std::vector<int> integers(const std::string& key, std::vector<int> fallback) const {
        if (!has(key)) return fallback;
        std::vector<int> out;
        for (const auto& s : split_list(text(key))) out.push_back(static_cast<int>(parse_long(s, dashed(key))));
        return out;
    }
    [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : split_list(require(key))) out.push_back(parse_double(s, dashed(key)));
        return out;
    }

    [[nodiscard]] static std::string dashed(std::string key) {
        std::replace(key.begin(), key.end(), '_', '-');
        return key;
    }
};

/// File entries apply when unscoped or scoped to the command; scoped wins.
[[nodiscard]] inline RunConfig resolve_config(const std::string& command, const ConfigMap& file,
                                              const ConfigMap& flags) {
    RunConfig cfg;
    cfg.command = command;
    for (const auto& [k, v] : file)
        if (k.find('.') == std::string::npos) cfg.values[k] = v;
    const std::string prefix = command + ".";
    for (const auto& [k, v] : file)
        if (k.rfind(prefix, 0) == 0) cfg.values[k.substr(prefix.size())] = v;
    for (const auto& [k, v] : flags) cfg.values[k] = v;
    return cfg;
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

struct TimeRange {
    double t_min = -5.0;
    double t_max = 5.0;
    int points = 201;
    double tol = 1e-10;
};

[[nodiscard]] inline TimeRange time_range(const RunConfig& cfg, int default_points = 201) {
    TimeRange r{cfg.number("t_min", -5.0), cfg.number("t_max", 5.0), cfg.integer("grid_points", default_points),
                cfg.number("tol", 1e-10)};
    if (!(r.t_min <= 0.0 && 0.0 <= r.t_max)) throw DomainError("the t range must contain 0 (t-min <= 0 <= t-max)");
    if (r.points < 2) throw DomainError("grid-points must be at least 2");
    if (!(r.tol >= kMinTolerance && r.tol <= kMaxTolerance)) throw DomainError("tol must lie in [1e-13, 1e-6]");
    return r;
}

[[nodiscard]] inline std::vector<double> uniform_grid(const TimeRange& r) {
    std::vector<double> g(static_cast<std::size_t>(r.points));
    for (int i = 0; i < r.points; ++i)
        g[static_cast<std::size_t>(i)] = r.t_min + (r.t_max - r.t_min) * i / (r.points - 1);
    if (std::find(g.begin(), g.end(), 0.0) == g.end()) {
        g.push_back(0.0);
        std::sort(g.begin(), g.end());
    }
    return g;
}

struct CaseSetup {
    PrincipalSpectrum spectrum;
    std::optional<FlowProfile> profile;
    bool extension = false;
};

[[nodiscard]] inline CaseSetup build_case(const RunConfig& cfg) {
    const std::string c = cfg.require("case");
    const bool neg = cfg.flag("allow_negative");
    if (c == "sphere") {
        const int g = cfg.integer("g");
        const double k1 = cfg.number("k1");
        const auto ms = cfg.integers("m", {1});
        if (ms.size() == 1) {
            auto p = solve_sphere(g, ms[0], k1);
            auto spec = p.spectrum();
            return {std::move(spec), std::move(p), false};
        }
        auto spec = sphere_spectrum_from_k1(g, k1, ms);
        if (spec.equal_multiplicity()) {
            auto p = solve_sphere(g, ms[0], k1);
            return {std::move(spec), std::move(p), false};
        }
        return {std::move(spec), std::nullopt, true};
    }
    if (c == "euclid") {
        auto p = solve_euclidean(cfg.integer("n"), cfg.integer("m", cfg.integer("n")), cfg.number("r0", 1.0));
        auto spec = p.spectrum();
        return {std::move(spec), std::move(p), false};
    }
    if (c == "horo") {
        auto p = solve_horosphere(cfg.integer("n"), cfg.number("k"));
        auto spec = p.spectrum();
        return {std::move(spec), std::move(p), false};
    }
    if (c == "hyp-umbilic") {
        auto p = solve_hyperbolic_umbilic(cfg.integer("n"), cfg.number("k"), neg);
        auto spec = p.spectrum();
        return {std::move(spec), std::move(p), false};
    }
    if (c == "hyp-cylinder") {
        auto p = solve_hyperbolic_cylinder(cfg.integer("m"), cfg.number("k1"));
        auto spec = p.spectrum();
        return {std::move(spec), std::move(p), false};
    }
    throw DomainError("unknown case '" + c + "' (expected sphere, euclid, horo, hyp-umbilic or hyp-cylinder)");
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IOError("cannot open '" + path.string() + "' for writing");
    os << text;
    os.flush();
    if (!os) throw IOError("write to '" + path.string() + "' failed");
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IOError("cannot create '" + dir.string() + "': " + ec.message());
}

inline void write_manifest(const fs::path& dir, const RunConfig& cfg, std::vector<std::string> outputs) {
    std::sort(outputs.begin(), outputs.end());
    json config = json::object();
    for (const auto& [k, v] : cfg.values)
        if (k != "config" && k != "out_dir") config[k] = v;
    const json m{{"schema", kManifestSchema},
                 {"version", kVersion},
                 {"command", cfg.command},
                 {"config", config},
                 {"outputs", outputs}};
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

[[nodiscard]] inline std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveResult {
    json summary;
    std::vector<std::string> outputs;
};

[[nodiscard]] inline SolveResult run_solve(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const auto setup = build_case(cfg);
    const auto range = time_range(cfg);
    const std::string format = cfg.text("format", "both");
    if (format != "csv" && format != "json" && format != "both")
        throw DomainError("format must be csv, json or both");
    const bool csv = format != "json", js = format != "csv";
    ensure_dir(dir);
    SolveResult res;

    json summary{{"spectrum", spectrum_to_json(setup.spectrum)}};
    if (setup.profile) {
        const auto& p = *setup.profile;
        summary["profile"] = profile_to_json(p);
        summary["limits"] = limit_summary_to_json(limit_summary(p));
        out << "case: " << to_string(p.flow_case()) << "\n";
        out << "classification: " << to_string(p.classification()) << "\n";
        if (const auto ts = p.t_star()) {
            out << (p.classification() == Classification::immortal ? "t_lo: " : "t_star: ") << fmt(*ts) << "\n";
        } else {
            out << "t_star: none\n";
        }
        out << "limits:\n" << limit_summary(p).text();
        if (const auto txt = limit_summary(p).text(); txt.empty() || txt.back() != '\n') out << "\n";
        const auto samples = sample_profile(p, profile_grid(p, range.t_min, range.t_max, range.points));
        double worst = 0.0;
        for (const auto& s : samples) worst = std::max(worst, s.residual);
        summary["max_product_residual"] = worst;
        out << "max product residual: " << fmt(worst) << "\n";
        if (csv) {
            std::ostringstream os;
            write_profile_csv(os, samples);
            write_text(dir / "profile.csv", os.str());
            res.outputs.push_back("profile.csv");
        }
    } else {
        out << "case: EXTENSION (no closed form; numerical path only)\n";
    }

    const bool neg = cfg.flag("allow_negative");
    if (setup.spectrum.mean_curvature() > 0.0 || neg) {
        FlowOptions opts;
        opts.allow_negative_mean_curvature = neg;
        opts.output_times = uniform_grid(range);
        const auto path = integrate_mu(setup.spectrum, range.t_min, range.t_max, range.tol, opts);
        json pj = path_to_json(path, setup.extension);
        json ends = json::object();
        for (auto end : {PathEnd::lower, PathEnd::upper}) {
            try {
                const auto b = estimate_boundary(path, end);
                ends[to_string(end)] = {{"t", real_to_json(b.t)},
                                        {"reason", b.reason ? json(to_string(*b.reason)) : json(nullptr)}};
            } catch (const NoEvent&) {
                ends[to_string(end)] = nullptr;
            }
        }
        pj["boundary_estimates"] = ends;
        if (setup.profile) {
            double delta = 0.0;
            for (const auto& s : path.samples)
                if (setup.profile->contains(s.t)) delta = std::max(delta, std::abs(s.mu - setup.profile->mu(s.t)));
            pj["max_oracle_delta"] = delta;
        }
        summary["numeric"] = pj;
        for (const auto& [end, b] : ends.items())
            if (!b.is_null() && b.at("reason").is_string())
                out << "numeric " << end << " boundary: " << b.at("t").dump() << " ("
                    << b.at("reason").get<std::string>() << ")\n";
        if (csv) {
            std::ostringstream os;
            write_path_csv(os, path);
            write_text(dir / "path.csv", os.str());
            res.outputs.push_back("path.csv");
        }
    } else {
        throw PreconditionError("H(0) = " + fmt(setup.spectrum.mean_curvature()) +
                                " is not positive; pass --allow-negative to trace the flow");
    }
    if (js) {
        write_text(dir / "solve.json", summary.dump(2) + "\n");
        res.outputs.push_back("solve.json");
    }
    res.summary = std::move(summary);
    return res;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    json details = json::object();
};

[[nodiscard]] inline std::vector<FlowProfile> verify_profiles(const RunConfig& cfg) {
    if (cfg.has("case")) {
        auto setup = build_case(cfg);
        if (!setup.profile) throw DomainError("the selected case has no closed form");
        return {std::move(*setup.profile)};
    }
    std::vector<FlowProfile> out;
    out.push_back(solve_euclidean(2, 2, 1.0));
    out.push_back(solve_euclidean(3, 2, 1.0));
    out.push_back(solve_horosphere(2, 1.0));
    out.push_back(solve_horosphere(2, -1.0));
    out.push_back(solve_hyperbolic_umbilic(2, 0.5));
    out.push_back(solve_hyperbolic_umbilic(2, 2.0));
    out.push_back(solve_hyperbolic_cylinder(1, std::numbers::sqrt2));
    for (int g : {1, 2, 3, 4, 6})
        out.push_back(solve_sphere(g, 1, std::max(sphere_k1_lower_bound(g), sphere_k1_mean_convex_bound(g)) + 0.5));
    return out;
}

[[nodiscard]] inline std::string profile_label(const FlowProfile& p) {
    std::string s = std::string(to_string(p.flow_case())) + " n=" + std::to_string(p.spectrum().n());
    s += " k1=" + fmt(p.spectrum().entries().front().k);
    return s;
}

[[nodiscard]] inline SuiteResult suite_product(const RunConfig& cfg) {
    SuiteResult r{"product", false, "max_residual", 0.0, 1e-10};
    const auto range = time_range(cfg, 400);
    for (const auto& p : verify_profiles(cfg)) {
        double worst = 0.0;
        for (double t : profile_grid(p, range.t_min, range.t_max, range.points))
            worst = std::max(worst, p.product_residual(t));
        r.details[profile_label(p)] = worst;
        r.value = std::max(r.value, worst);
    }
    r.passed = r.value <= r.threshold;
    return r;
}

[[nodiscard]] inline SuiteResult suite_oracle(const RunConfig& cfg) {
    SuiteResult r{"oracle", false, "max_delta", 0.0, 1e-7};
    const auto range = time_range(cfg);
    for (const auto& p : verify_profiles(cfg)) {
        FlowOptions opts;
        opts.allow_negative_mean_curvature = p.spectrum().mean_curvature() < 0.0;
        opts.output_times = profile_grid(p, range.t_min, range.t_max, range.points);
        const auto path = integrate_mu(p.spectrum(), std::min(0.0, opts.output_times.front()),
                                       std::max(0.0, opts.output_times.back()), range.tol, opts);
        double worst = 0.0;
        for (const auto& s : path.samples)
            if (p.contains(s.t)) worst = std::max(worst, std::abs(s.mu - p.mu(s.t)));
        r.details[profile_label(p)] = worst;
        r.value = std::max(r.value, worst);
    }
    r.passed = r.value <= r.threshold;
    return r;
}

[[nodiscard]] inline SuiteResult suite_identities(const RunConfig& cfg) {
    SuiteResult r{"identities", false, "max_residual", 0.0, 1e-11};
    const int samples = cfg.integer("samples", 100);
    if (samples < 1) throw DomainError("samples must be positive");
    std::vector<int> gs = cfg.has("g") ? std::vector<int>{cfg.integer("g")} : std::vector<int>{3, 4, 6};
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.integer("seed", 1)));
    for (int g : gs) {
        if (g != 3 && g != 4 && g != 6) throw DomainError("identity checks exist for g in {3, 4, 6}");
        // k1 = cot s with s below the bound that keeps the ordering chain.
        const double w = std::atan(1.0 / sphere_k1_lower_bound(g));
        std::uniform_real_distribution<double> sd(0.02 * w, 0.98 * w);
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double s = sd(rng);
            worst = std::max(worst, verify_identities(sphere_spectrum_from_k1(g, 1.0 / std::tan(s), 1)).max_residual());
        }
        r.details["g=" + std::to_string(g)] = worst;
        r.value = std::max(r.value, worst);
    }
    r.passed = r.value <= r.threshold;
    return r;
}

[[nodiscard]] inline SuiteResult suite_isoparametric(const RunConfig& cfg) {
    SuiteResult r{"isoparametric", true, "max_spread", 0.0, 1e-6};
    const int res = cfg.integer("res", 32);
    for (const auto& name : example_immersion_names()) {
        const auto imm = example_immersion(name);
        const auto rep = check_isoparametric(imm, {0.0, 0.05}, res);
        double spread = 0.0, agree = 0.0;
        for (const auto& s : rep.samples) {
            spread = std::max(spread, s.spread());
            agree = std::max(agree, s.max_disagreement);
        }
        r.details[name] = {{"spread", spread}, {"agreement", agree}, {"passed", rep.passed()}};
        r.value = std::max(r.value, spread);
        r.passed = r.passed && rep.passed();
    }
    return r;
}

[[nodiscard]] inline SuiteResult suite_continuation(const RunConfig& cfg) {
    SuiteResult r{"continuation", false, "max_delta", 0.0, 1e-7};
    const auto range = time_range(cfg);
    const auto spec = sphere_spectrum_from_k1(4, 5.0, std::vector<int>{1, 2, 1, 2});
    const auto grid = uniform_grid(range);
    FlowOptions opts;
    opts.output_times = grid;
    const auto ode = integrate_mu(spec, grid.front(), grid.back(), range.tol, opts);
    const auto cont = continuation_sweep(spec, grid, range.tol);
    std::size_t compared = 0;
    for (const auto& s : cont.samples)
        if (const auto o = ode.sample_at(s.t)) {
            r.value = std::max(r.value, std::abs(o->mu - s.mu));
            ++compared;
        }
    r.details = {{"label", "EXTENSION"}, {"spectrum", spectrum_to_json(spec)}, {"compared_samples", compared}};
    r.passed = compared > 0 && r.value <= r.threshold;
    return r;
}

[[nodiscard]] inline std::vector<std::string> suite_names() {
    return {"product", "oracle", "identities", "isoparametric", "continuation"};
}

[[nodiscard]] inline SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
    if (name == "product") return suite_product(cfg);
    if (name == "oracle") return suite_oracle(cfg);
    if (name == "identities") return suite_identities(cfg);
    if (name == "isoparametric") return suite_isoparametric(cfg);
    if (name == "continuation") return suite_continuation(cfg);
    throw DomainError("unknown suite '" + name + "'");
}

[[nodiscard]] inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = cfg.text("out_dir", "imcf_out");
    const auto names = cfg.has("only") ? split_list(cfg.text("only")) : suite_names();
    std::vector<SuiteResult> results;
    for (const auto& n : names) results.push_back(run_suite(n, cfg));
    bool all = true;
    json report = json::object();
    for (const auto& r : results) {
        out << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " " << r.metric << "=" << fmt(r.value)
            << " threshold=" << fmt(r.threshold) << "\n";
        report[r.name] = {{"passed", r.passed},
                          {r.metric, r.value},
                          {"threshold", r.threshold},
                          {"details", r.details}};
        all = all && r.passed;
    }
    ensure_dir(dir);
    write_text(dir / "verify.json", report.dump(2) + "\n");
    write_manifest(dir, cfg, {"verify.json"});
    return all ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// solve / mesh / sweep commands
// ---------------------------------------------------------------------------

[[nodiscard]] inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = cfg.text("out_dir", "imcf_out");
    auto res = run_solve(cfg, dir, out);
    write_manifest(dir, cfg, res.outputs);
    return kOk;
}

[[nodiscard]] inline int cmd_mesh(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = cfg.text("out_dir", "imcf_out");
    const std::string format = cfg.text("format", "obj");
    std::vector<MeshFormat> formats;
    if (format == "obj" || format == "both") formats.push_back(MeshFormat::obj);
    if (format == "ply" || format == "both") formats.push_back(MeshFormat::ply);
    if (formats.empty()) throw DomainError("format must be obj, ply or both");
    const int res = cfg.integer("res", 64);
    if (res < 3) throw DomainError("res must be at least 3");
    const auto scenes = cfg.has("scene") ? split_list(cfg.text("scene")) : scene_names();
    std::vector<std::string> outputs;
    for (const auto& name : scenes) {
        const auto scene = make_scene(name, res);
        for (const auto& p : export_scene(scene, dir, formats)) {
            outputs.push_back(p.filename().string());
            out << "wrote " << p.filename().string() << "\n";
        }
    }
    write_manifest(dir, cfg, outputs);
    return kOk;
}

[[nodiscard]] inline int exit_code_for(const Error& e) {
    return e.family() == ErrorFamily::numerical ? kNumerical : kDomain;
}

[[nodiscard]] inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = cfg.text("out_dir", "imcf_out");
    const std::string param = normalize_key(cfg.require("param"));
    static const std::vector<std::string> allowed{"k1", "k", "r0", "g", "m", "n"};
    if (std::find(allowed.begin(), allowed.end(), param) == allowed.end())
        throw DomainError("param must be one of k1, k, r0, g, m, n");
    const auto values = split_list(cfg.require("values"));
    if (values.empty() || values.front().empty()) throw DomainError("values must list at least one entry");
    const int jobs = cfg.integer("jobs", 1);
    if (jobs < 1) throw DomainError("jobs must be positive");
    (void)cfg.require("case");
    ensure_dir(dir);

    struct Task {
        int code = kOk;
        std::string log;
        std::string error;
        json summary;
        std::vector<std::string> outputs;
    };
    std::vector<Task> tasks(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            RunConfig sub = cfg;
            sub.command = "solve";
            sub.values[param] = values[i];
            for (const char* k : {"param", "values", "jobs"}) sub.values.erase(k);
            const std::string shard = param + "_" + std::to_string(i);
            std::ostringstream log;
            try {
                auto r = run_solve(sub, dir / shard, log);
                write_manifest(dir / shard, sub, r.outputs);
                tasks[i].summary = std::move(r.summary);
                for (const auto& o : r.outputs) tasks[i].outputs.push_back(shard + "/" + o);
                tasks[i].outputs.push_back(shard + "/manifest.json");
            } catch (const Error& e) {
                tasks[i].code = exit_code_for(e);
                tasks[i].error = e.what();
            } catch (const std::exception& e) {
                tasks[i].code = kNumerical;
                tasks[i].error = e.what();
            }
            tasks[i].log = log.str();
        }
    };
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    json rows = json::array();
    std::vector<std::string> outputs{"sweep.json"};
    int worst = kOk;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        out << "[" << param << "=" << values[i] << "] exit " << t.code << "\n" << t.log;
        if (!t.error.empty()) out << "error: " << t.error << "\n";
        json row{{"param", param}, {"value", values[i]}, {"exit_code", t.code}};
        if (t.code == kOk) {
            if (t.summary.contains("profile")) {
                row["classification"] = t.summary["profile"]["classification"];
                row["t_star"] = t.summary["profile"]["t_star"];
            }
        } else {
            row["error"] = t.error;
        }
        rows.push_back(row);
        outputs.insert(outputs.end(), t.outputs.begin(), t.outputs.end());
        worst = std::max(worst, t.code);
    }
    write_text(dir / "sweep.json", json{{"param", param}, {"runs", rows}}.dump(2) + "\n");
    write_manifest(dir, cfg, outputs);
    return worst;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses argv, runs the subcommand and maps failures to exit codes.
[[nodiscard]] inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inverse mean curvature flow by parallel hypersurfaces in space forms"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    struct Opt {
        std::string key;
        std::string value;
        CLI::Option* opt = nullptr;
    };
    std::vector<CLI::App*> subs;
    // Options bind to strings owned by these heap vectors.
    std::vector<std::unique_ptr<std::vector<Opt>>> store;
    std::vector<std::unique_ptr<bool>> bool_store;
    std::vector<std::tuple<std::size_t, CLI::Option*, std::string>> bool_opts;

    auto make = [&](const std::string& name, const std::string& help,
                    const std::vector<std::pair<std::string, std::string>>& opts,
                    const std::vector<std::pair<std::string, std::string>>& flags) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto v = std::make_unique<std::vector<Opt>>();
        v->reserve(opts.size() + 6);
        const std::vector<std::pair<std::string, std::string>> shared{
            {"out-dir", "output directory (default imcf_out)"},
            {"tol", "integrator tolerance in [1e-13, 1e-6] (default 1e-10)"},
            {"t-min", "lower end of the time range (default -5)"},
            {"t-max", "upper end of the time range (default 5)"},
            {"grid-points", "number of grid times"},
            {"config", "JSON or TOML config file; flags win"}};
        for (const auto* list : {&shared, &opts})
            for (const auto& [flag, help_text] : *list) {
                v->push_back({normalize_key(flag), {}, nullptr});
                v->back().opt = sub->add_option("--" + flag, v->back().value, help_text);
            }
        for (const auto& [flag, help_text] : flags) {
            bool_store.push_back(std::make_unique<bool>(false));
            bool_opts.emplace_back(subs.size(), sub->add_flag("--" + flag, *bool_store.back(), help_text),
                                   normalize_key(flag));
        }
        subs.push_back(sub);
        store.push_back(std::move(v));
        return sub;
    };

    const std::vector<std::pair<std::string, std::string>> case_opts{
        {"case", "sphere | euclid | horo | hyp-umbilic | hyp-cylinder"},
        {"g", "number of distinct principal curvatures (sphere)"},
        {"m", "multiplicity, or a comma list for unequal multiplicities"},
        {"k1", "largest principal curvature"},
        {"n", "hypersurface dimension"},
        {"r0", "initial radius (euclid)"},
        {"k", "umbilic or horosphere curvature"},
        {"format", "csv | json | both (default both)"}};
    auto with = [](std::vector<std::pair<std::string, std::string>> a,
                   const std::vector<std::pair<std::string, std::string>>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    const std::vector<std::pair<std::string, std::string>> neg{
        {"allow-negative", "accept initial data with H(0) < 0"}};

    make("solve", "closed-form and numerical flow for one case", case_opts, neg);
    make("verify", "run invariant suites",
         with(case_opts, {{"only", "comma list of suites: product, oracle, identities, isoparametric, continuation"},
                          {"samples", "random samples per g for identities (default 100)"},
                          {"seed", "random seed (default 1)"},
                          {"res", "grid resolution for isoparametric (default 32)"}}),
         neg);
    make("mesh", "export figure scenes as meshes",
         {{"scene", "figure1 | figure2 | figure3 (comma list; default all)"},
          {"format", "obj | ply | both (default obj)"},
          {"res", "grid resolution per axis (default 64)"}},
         {});
    make("sweep", "solve over a list of parameter values",
         with(case_opts, {{"param", "parameter to vary: k1, k, r0, g, m or n"},
                          {"values", "comma list of values"},
                          {"jobs", "worker threads (default 1)"}}),
         neg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kDomain;
    }

    for (std::size_t s = 0; s < subs.size(); ++s) {
        CLI::App* sub = subs[s];
        if (!sub->parsed()) continue;
        try {
            ConfigMap flags;
            for (const auto& o : *store[s])
                if (o.opt->count() > 0) flags[o.key] = o.value;
            for (const auto& [owner, opt, key] : bool_opts)
                if (owner == s && opt->count() > 0) flags[key] = "true";
            ConfigMap file;
            if (flags.count("config")) file = load_config(flags.at("config"));
            const auto cfg = resolve_config(sub->get_name(), file, flags);
            if (cfg.command == "solve") return cmd_solve(cfg, out);
            if (cfg.command == "verify") return cmd_verify(cfg, out);
            if (cfg.command == "mesh") return cmd_mesh(cfg, out);
            return cmd_sweep(cfg, out);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return exit_code_for(e);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kNumerical;
        }
    }
    return kDomain;
}

}  // namespace imcf::cli
