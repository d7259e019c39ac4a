// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

#include "epg/error.hpp"

namespace epg {
namespace {

using Value = std::variant<bool, double, std::string, std::vector<std::string>>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto at = s.find(sep);
        out.push_back(trim(s.substr(0, at)));
        if (at == std::string_view::npos) break;
        s.remove_prefix(at + 1);
    }
    return out;
}

/// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

class Parser {
  public:
    explicit Parser(std::size_t line) : line_{line} {}

    Value value(std::string_view v) {
        v = trim(v);
        if (v.empty()) fail("missing value");
        if (v == "true") return true;
        if (v == "false") return false;
        if (v.front() == '"') return string(v);
        if (v.front() == '[') {
            if (v.back() != ']') fail("unterminated array");
            std::vector<std::string> items;
            auto body = trim(v.substr(1, v.size() - 2));
            if (body.empty()) return items;
            for (auto item : split(body, ',')) {
                if (item.empty()) continue;  // trailing comma
                items.push_back(string(item));
            }
            return items;
        }
        std::string s{v};
        std::erase(s, '_');
        try {
            std::size_t used = 0;
            const double d = std::stod(s, &used);
            if (used != s.size()) fail("bad number '" + std::string{v} + "'");
            return d;
        } catch (const std::logic_error&) {
            fail("bad value '" + std::string{v} + "'");
        }
    }

    std::string string(std::string_view v) {
        if (v.size() < 2 || v.front() != '"' || v.back() != '"') fail("expected a quoted string");
        return std::string{v.substr(1, v.size() - 2)};
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorKind::MalformedConfig, "line " + std::to_string(line_) + ": " + why);
    }

  private:
    std::size_t line_;
};

template <typename T>
const T& expect(const Value& v, const std::string& key, const char* what) {
    if (!std::holds_alternative<T>(v)) throw Error(ErrorKind::MalformedConfig, key + " must be " + what);
    return std::get<T>(v);
}

}  // namespace

void apply_refinements(DetectorConfig& cfg, std::string_view list) {
    for (auto name : split(list, ',')) {
        if (name.empty()) continue;
        auto& r = cfg.refinements;
        if (name == "r1") r.r1 = true;
        else if (name == "a1") r.a1 = true;
        else if (name == "a2") r.a2 = true;
        else if (name == "a3") r.a3 = true;
        else if (name == "p1") r.p1 = true;
        else if (name == "p2") r.p2 = true;
        else throw Error(ErrorKind::UnknownKey, "unknown refinement '" + std::string{name} + "'");
    }
}

void apply_detectors(DetectorConfig& cfg, std::string_view list) {
    cfg.detectors.clear();
    for (auto name : split(list, ',')) {
        if (name.empty()) continue;
        if (name != "reentrancy" && name != "fac" && name != "price")
            throw Error(ErrorKind::UnknownKey, "unknown detector '" + std::string{name} + "'");
        cfg.detectors.emplace(name);
    }
}

DetectorConfig parse_config(std::string_view text) {
    DetectorConfig cfg;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        Parser p{lineno};
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) p.fail("expected key = value");
        const std::string key{trim(line.substr(0, eq))};
        if (!seen.insert(key).second) p.fail("duplicate key '" + key + "'");
        const auto v = p.value(line.substr(eq + 1));
        if (key == "attacker_contracts") {
            cfg.attacker_contracts.clear();
            for (const auto& a : expect<std::vector<std::string>>(v, key, "an array of addresses"))
                cfg.attacker_contracts.insert(parse_address(a));
        } else if (key == "p1_threshold") {
            cfg.p1_threshold = expect<double>(v, key, "a number");
        } else if (key == "p2_usd_threshold") {
            cfg.p2_usd_threshold = expect<double>(v, key, "a number");
        } else if (key == "allowlist") {
            cfg.allowlist = expect<std::string>(v, key, "a path");
        } else if (key == "prices") {
            cfg.prices = expect<std::string>(v, key, "a path");
        } else if (key == "refinements") {
            cfg.refinements = {};
            std::string joined;
            for (const auto& r : expect<std::vector<std::string>>(v, key, "an array of names")) joined += r + ",";
            apply_refinements(cfg, joined);
        } else if (key == "accept_root_caller") {
            cfg.accept_root_caller = expect<bool>(v, key, "a boolean");
        } else if (key == "detectors") {
            std::string joined;
            for (const auto& d : expect<std::vector<std::string>>(v, key, "an array of names")) joined += d + ",";
            apply_detectors(cfg, joined);
        } else {
            throw Error(ErrorKind::UnknownKey, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

DetectorConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MalformedConfig, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_config(ss.str());
    // relative data files are looked up next to the config file
    const auto base = std::filesystem::path(path).parent_path();
    for (auto* p : {&cfg.allowlist, &cfg.prices})
        if (*p && std::filesystem::path(**p).is_relative()) **p = (base / **p).string();
    return cfg;
}

}  // namespace epg
