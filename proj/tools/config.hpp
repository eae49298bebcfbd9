#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "imcf/errors.hpp"
#include "imcf/geomviz.hpp"

namespace imcf::cli {

/// Flat key -> text map. Keys use underscores; list values are comma joined.
using ConfigMap = std::map<std::string, std::string>;

[[nodiscard]] inline std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

[[nodiscard]] inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Locale-independent numeric parsing.
[[nodiscard]] inline double parse_double(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw DomainError("'" + std::string(what) + "' expects a number, got '" + s + "'");
    return v;
}

[[nodiscard]] inline long parse_long(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw DomainError("'" + std::string(what) + "' expects an integer, got '" + s + "'");
    return v;
}

[[nodiscard]] inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

namespace detail {

inline std::string json_scalar_text(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    throw DomainError("config key '" + key + "' has an unsupported value");
}

inline void flatten_json(const nlohmann::json& j, const std::string& prefix, ConfigMap& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix + normalize_key(it.key());
        if (it->is_object()) {
            flatten_json(*it, key + ".", out);
        } else if (it->is_array()) {
            std::string joined;
            for (std::size_t i = 0; i < it->size(); ++i) {
                if (i) joined += ",";
                joined += json_scalar_text((*it)[i], key);
            }
            out[key] = joined;
        } else {
            out[key] = json_scalar_text(*it, key);
        }
    }
}

inline std::string strip_toml_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

inline std::string toml_value_text(const std::string& raw, const std::string& key, int lineno) {
    auto bad = [&]() {
        return DomainError("config line " + std::to_string(lineno) + ": cannot parse value of '" + key + "'");
    };
    if (raw.empty()) throw bad();
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') throw bad();
        return raw.substr(1, raw.size() - 2);
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') throw bad();
        std::string joined;
        const auto items = split_list(raw.substr(1, raw.size() - 2));
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i].empty()) continue;
            if (!joined.empty()) joined += ",";
            joined += toml_value_text(items[i], key, lineno);
        }
        return joined;
    }
    return raw;
}

}  // namespace detail

/// Minimal TOML: `key = value` lines with strings, numbers, booleans and
/// flat arrays; `[section]` headers prefix keys as `section.key`.
[[nodiscard]] inline ConfigMap parse_toml(std::istream& is) {
    ConfigMap out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(detail::strip_toml_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw DomainError("config line " + std::to_string(lineno) + ": bad section header");
            section = normalize_key(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        if (key.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
        out[section.empty() ? key : section + "." + key] = detail::toml_value_text(trim(line.substr(eq + 1)), key, lineno);
    }
    return out;
}

[[nodiscard]] inline ConfigMap parse_json_config(std::istream& is) {
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed JSON config: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("JSON config must be an object");
    ConfigMap out;
    detail::flatten_json(j, "", out);
    return out;
}

/// Loads a config file, choosing the format by extension.
[[nodiscard]] inline ConfigMap load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IOError("cannot read config '" + path.string() + "'");
    const auto ext = path.extension().string();
    if (ext == ".json") return parse_json_config(is);
    if (ext == ".toml") return parse_toml(is);
    throw DomainError("config '" + path.string() + "' must end in .json or .toml");
}

}  // namespace imcf::cli
