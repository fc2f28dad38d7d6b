#pragma once

#include <stdexcept>
#include <string>

namespace modscat {

enum class Errc {
    invalid_argument,
    non_finite,
    under_resolved,
    memory_cap,
    not_implemented,
    empty_window,
    ill_conditioned,
    too_few_points,
    unconverged,
    config,
    io,
    version_mismatch,
    checksum,
    truncated,
};

const char* errc_name(Errc c);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& what)
        : std::runtime_error(what), code_(c) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace modscat
