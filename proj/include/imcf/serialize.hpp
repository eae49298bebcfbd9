#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "imcf/closedform.hpp"
#include "imcf/geomviz.hpp"
#include "imcf/numflow.hpp"
#include "imcf/spectrum.hpp"

namespace imcf {

using nlohmann::json;

/// Non-finite reals become the strings "-inf", "inf" or "nan".
[[nodiscard]] inline json real_to_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

[[nodiscard]] inline json spectrum_to_json(const PrincipalSpectrum& spec) {
    json entries = json::array();
    for (const auto& e : spec.entries()) entries.push_back({{"k", e.k}, {"m", e.m}});
    json j{{"epsilon", spec.epsilon()}, {"n", spec.n()}, {"entries", entries}};
    if (const auto& sp = spec.sphere_parameter()) j["sphere_parameter"] = {{"s", sp->s}, {"tau", sp->tau}};
    return j;
}

[[nodiscard]] inline PrincipalSpectrum spectrum_from_json(const json& j) {
    try {
        std::vector<CurvatureEntry> entries;
        for (const auto& e : j.at("entries")) entries.push_back({e.at("k").get<double>(), e.at("m").get<int>()});
        PrincipalSpectrum spec(space_form_from_epsilon(j.at("epsilon").get<int>()), std::move(entries));
        if (j.contains("n") && j.at("n").get<int>() != spec.n()) throw DomainError("n disagrees with multiplicities");
        return spec;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed spectrum JSON: ") + e.what());
    }
}

[[nodiscard]] inline json profile_to_json(const FlowProfile& p) {
    json ms = json::array();
    for (const auto& e : p.spectrum().entries()) ms.push_back(e.m);
    const auto ts = p.t_star();
    return {{"case", to_string(p.flow_case())},
            {"epsilon", p.spectrum().epsilon()},
            {"n", p.spectrum().n()},
            {"g", p.spectrum().g()},
            {"multiplicities", ms},
            {"k1", p.spectrum().entries().front().k},
            {"a", p.a()},
            {"t_star", ts ? json(*ts) : json(nullptr)},
            {"interval", {real_to_json(p.interval().lo), real_to_json(p.interval().hi)}},
            {"interval_open", {true, true}},
            {"classification", to_string(p.classification())}};
}

[[nodiscard]] inline json limit_summary_to_json(const LimitSummary& s) {
    auto end = [](const EndpointLimit& e) {
        json j{{"t", real_to_json(e.t)},
               {"object", e.object},
               {"dimension", e.dimension},
               {"vanishing_factors", e.vanishing_factors}};
        if (e.minimal)
            j["minimal"] = {{"second_fundamental_form_sq", e.minimal->second_fundamental_form_sq},
                            {"scalar_curvature", e.minimal->scalar_curvature},
                            {"kind", to_string(e.minimal->kind)}};
        return j;
    };
    return {{"lower", end(s.lower)}, {"upper", end(s.upper)}};
}

[[nodiscard]] inline json path_to_json(const NumericPath& path, bool extension = false) {
    json events = json::array();
    for (const auto& e : path.events)
        events.push_back({{"t", e.t}, {"mu", e.mu}, {"reason", to_string(e.reason)}, {"end", to_string(e.end)}});
    json j{{"spectrum", spectrum_to_json(path.spectrum)},
           {"tol", path.tol},
           {"t_span", {path.t_lo, path.t_hi}},
           {"sample_count", path.samples.size()},
           {"boundary_events", events}};
    if (extension) j["label"] = "EXTENSION";
    return j;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileSample>& samples) {
    os << "t,mu,H_t,residual\n";
    for (const auto& s : samples)
        os << format_double(s.t) << ',' << format_double(s.mu) << ',' << format_double(s.mean_curvature) << ','
           << format_double(s.residual) << '\n';
}

/// Path samples; the residual column is the log-sum residual.
inline void write_path_csv(std::ostream& os, const NumericPath& path) {
    os << "t,mu,H_t,residual\n";
    for (const auto& s : path.samples)
        os << format_double(s.t) << ',' << format_double(s.mu) << ',' << format_double(s.mean_curvature) << ','
           << format_double(log_product_residual(path.spectrum, s.mu, s.t)) << '\n';
}

}  // namespace imcf
