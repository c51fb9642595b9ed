#pragma once

#include <stdexcept>
#include <string>

namespace purelab {

enum class Errc {
    invalid_argument,
    domain,
    unsupported,
    numeric,
    training,
    io,
    contract,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void throw_domain(const std::string& what) { throw Error(Errc::domain, what); }
[[noreturn]] inline void throw_invalid(const std::string& what) { throw Error(Errc::invalid_argument, what); }

}  // namespace purelab
