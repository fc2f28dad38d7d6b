#include "modscat/config.hpp"
#include "modscat/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace modscat {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    if (*b == '+') ++b;
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

} // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
    ConfigFile cf;
    cf.source_ = source;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    auto err = [&](const std::string& msg) {
        throw Error(Errc::config, source + ":" + std::to_string(line) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        auto c = s.find_first_of("#;");
        if (c != std::string::npos) s = s.substr(0, c);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') err("malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) err("empty section name");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) err("expected 'key = value', got '" + s + "'");
        if (section.empty()) err("key outside of any [section]");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) err("empty key");
        std::string full = section + "." + key;
        if (cf.entries_.count(full)) err("duplicate key '" + key + "' in [" + section + "]");
        cf.entries_[full] = Entry{val, line, false};
        cf.order_.push_back(full);
    }
    return cf;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config, path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) {
    auto it = entries_.find(section + "." + key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return entries_.count(section + "." + key) != 0;
}

int ConfigFile::line_of(const std::string& section, const std::string& key) const {
    auto it = entries_.find(section + "." + key);
    return it == entries_.end() ? 0 : it->second.line;
}

void ConfigFile::fail(const std::string& section, const std::string& key, const std::string& msg) const {
    int line = line_of(section, key);
    std::string where = line > 0 ? source_ + ":" + std::to_string(line) : source_;
    throw Error(Errc::config, where + ": [" + section + "] " + key + ": " + msg);
}

double ConfigFile::get_double(const std::string& section, const std::string& key, double fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    double v;
    if (!parse_number(e->value, v)) fail(section, key, "expected a number, got '" + e->value + "'");
    return v;
}

long long ConfigFile::get_int(const std::string& section, const std::string& key, long long fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    long long v = 0;
    const char* b = e->value.data();
    const char* end = b + e->value.size();
    auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end) fail(section, key, "expected an integer, got '" + e->value + "'");
    return v;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(section, key, "expected true/false, got '" + e->value + "'");
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key, const std::string& fallback) {
    Entry* e = find(section, key);
    return e ? e->value : fallback;
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_number(item, v)) fail(section, key, "bad list element '" + trim(item) + "'");
        out.push_back(v);
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
}

void ConfigFile::reject_unused() const {
    for (const auto& full : order_) {
        const Entry& e = entries_.at(full);
        if (e.used) continue;
        auto dot = full.find('.');
        throw Error(Errc::config, source_ + ":" + std::to_string(e.line) + ": unknown key '" + full.substr(dot + 1) +
                                      "' in [" + full.substr(0, dot) + "]");
    }
}

} // namespace modscat
