#pragma once

// Flat "key = value" configuration files. '#' starts a comment; blank lines
// are ignored. Keys may appear once.

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "diamond/model.hpp"

namespace diamond {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigEntry {
    std::string value;
    int line = 0;
};

class KeyValues {
public:
    static KeyValues parse(std::istream& in, const std::string& source = "<config>") {
        KeyValues kv;
        kv.source_ = source;
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string text = trim(raw);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError(kv.where(line) + ": expected 'key = value', got '" + text + "'");
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key.empty()) throw ConfigError(kv.where(line) + ": missing key before '='");
            if (value.empty()) throw ConfigError(kv.where(line) + ": key '" + key + "' has no value");
            if (auto it = kv.entries_.find(key); it != kv.entries_.end())
                throw ConfigError(kv.where(line) + ": key '" + key + "' repeats line " + std::to_string(it->second.line));
            kv.entries_[key] = {value, line};
        }
        return kv;
    }

    static KeyValues parse_string(const std::string& text, const std::string& source = "<config>") {
        std::istringstream in(text);
        return parse(in, source);
    }

    static KeyValues load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path + ": cannot open");
        return parse(in, path);
    }

    bool has(const std::string& key) const { return entries_.contains(key); }

    std::string text(const std::string& key) const { return entry(key).value; }

    std::string text_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    double number(const std::string& key) const {
        const ConfigEntry& e = entry(key);
        const char* begin = e.value.c_str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0' || errno == ERANGE)
            throw ConfigError(where(e.line) + ": key '" + key + "' expects a number, got '" + e.value + "'");
        return v;
    }

    double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    long long integer(const std::string& key) const {
        const ConfigEntry& e = entry(key);
        const char* begin = e.value.c_str();
        char* end = nullptr;
        errno = 0;
        const long long v = std::strtoll(begin, &end, 10);
        if (end == begin || *end != '\0' || errno == ERANGE)
            throw ConfigError(where(e.line) + ": key '" + key + "' expects an integer, got '" + e.value + "'");
        return v;
    }

    /// Rejects any key outside `allowed`.
    void require_known(const std::set<std::string>& allowed) const {
        for (const auto& [key, e] : entries_)
            if (!allowed.contains(key)) throw ConfigError(where(e.line) + ": unknown key '" + key + "'");
    }

    int line_of(const std::string& key) const { return entry(key).line; }
    std::string where(int line) const { return source_ + ":" + std::to_string(line); }
    const std::string& source() const { return source_; }

private:
    const ConfigEntry& entry(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
        return it->second;
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, ConfigEntry> entries_;
    std::string source_;
};

inline const std::set<std::string>& direct_scenario_keys() {
    static const std::set<std::string> keys{"h1_re", "h1_im", "h2_re", "h2_im", "g1_re", "g1_im", "g2_re",
                                            "g2_im", "ps",    "pr",    "c12",   "c21"};
    return keys;
}

inline const std::set<std::string>& snr_scenario_keys() {
    static const std::set<std::string> keys{"gamma_db", "tgamma_db", "c", "ps", "pr"};
    return keys;
}

/// Scenario from either the direct-gain form or the SNR form. Imaginary
/// parts, c12, c21 default to 0 and powers to 1.
inline Scenario scenario_from_config(const KeyValues& kv) {
    const bool snr_form = kv.has("gamma_db") || kv.has("tgamma_db") || kv.has("c");
    try {
        if (snr_form) {
            kv.require_known(snr_scenario_keys());
            return scenario_from_snrs(kv.number("gamma_db"), kv.number("tgamma_db"), kv.number_or("ps", 1.0),
                                      kv.number_or("pr", 1.0), kv.number_or("c", 0.0));
        }
        kv.require_known(direct_scenario_keys());
        Scenario s;
        s.h1 = {kv.number("h1_re"), kv.number_or("h1_im", 0.0)};
        s.h2 = {kv.number("h2_re"), kv.number_or("h2_im", 0.0)};
        s.g1 = {kv.number("g1_re"), kv.number_or("g1_im", 0.0)};
        s.g2 = {kv.number("g2_re"), kv.number_or("g2_im", 0.0)};
        s.ps = kv.number_or("ps", 1.0);
        s.pr = kv.number_or("pr", 1.0);
        s.c12 = kv.number_or("c12", 0.0);
        s.c21 = kv.number_or("c21", 0.0);
        validate(s);
        return s;
    } catch (const ValidationError& e) {
        throw ConfigError(kv.source() + ": " + e.what());
    }
}

}  // namespace diamond
