#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace modscat {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string measured;
    std::string threshold;
    bool pass = false;
};

struct VerifyOptions {
    std::filesystem::path presets_dir;
    std::filesystem::path runs_root;
    bool flip_w11_sign = false; // mutation fixture: must make "appendix" fail
    std::ostream* log = nullptr;
    unsigned threads = 1;       // worker pool for the independent runs behind "all"
};

// free, conservation, splitting, decay, phase, oracle, appendix, remainder,
// quintic, jinsegur, determinism; "all" runs every suite.
const std::vector<std::string>& suite_names();

std::vector<CriterionResult> run_suite(const std::string& name, const VerifyOptions& opt);

// Runs (or reloads) every preset trajectory the suites need, opt.threads at a time.
void prepare_runs(const VerifyOptions& opt);

// Directory holding the shipped presets (compile-time default, overridable
// through MODSCAT_PRESETS_DIR).
std::filesystem::path default_presets_dir();

std::string format_table(const std::vector<CriterionResult>& rows);

} // namespace modscat
