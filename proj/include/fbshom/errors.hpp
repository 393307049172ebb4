#ifndef FBSHOM_ERRORS_HPP
#define FBSHOM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fbshom {

struct invalid_parameter : std::runtime_error {
    explicit invalid_parameter(const std::string& what) : std::runtime_error(what) {}
};

// Grid too coarse, too narrow, or unable to represent a requested shift.
struct resolution_error : std::runtime_error {
    explicit resolution_error(const std::string& what) : std::runtime_error(what) {}
};

struct aliasing_error : std::runtime_error {
    explicit aliasing_error(const std::string& what) : std::runtime_error(what) {}
};

struct unsupported_input : std::runtime_error {
    explicit unsupported_input(const std::string& what) : std::runtime_error(what) {}
};

struct normalization_error : std::runtime_error {
    explicit normalization_error(const std::string& what) : std::runtime_error(what) {}
};

struct boundary_error : std::runtime_error {
    explicit boundary_error(const std::string& what) : std::runtime_error(what) {}
};

struct fit_error : std::runtime_error {
    explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fbshom

#endif
