#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace modscat {

// Strict INI-style key/value file:
//   # comment            ; comment
//   [section]
//   key = value
// Every (section, key) must be registered by the consumer; anything else is
// rejected with its line number.
class ConfigFile {
public:
    struct Entry {
        std::string value;
        int line = 0;
        bool used = false;
    };

    static ConfigFile parse(const std::string& text, const std::string& source);
    static ConfigFile load(const std::filesystem::path& path);

    const std::string& source() const { return source_; }
    bool has(const std::string& section, const std::string& key) const;

    // Typed getters mark the entry as used; a missing entry returns the fallback.
    double get_double(const std::string& section, const std::string& key, double fallback);
    long long get_int(const std::string& section, const std::string& key, long long fallback);
    bool get_bool(const std::string& section, const std::string& key, bool fallback);
    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback);
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback);

    // Line of an entry, 0 when absent.
    int line_of(const std::string& section, const std::string& key) const;

    // Throws on the first entry no getter has asked for.
    void reject_unused() const;

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const;

private:
    std::string source_;
    std::map<std::string, Entry> entries_; // "section.key"
    std::vector<std::string> order_;
    Entry* find(const std::string& section, const std::string& key);
};

} // namespace modscat
