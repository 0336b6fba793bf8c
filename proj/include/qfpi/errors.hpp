#pragma once

#include <stdexcept>
#include <string>

namespace qfpi
{

// Base of every error thrown by the library.
struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// A parameter is outside its physical or mathematical domain.
struct ParameterError : Error
{
    using Error::Error;
};

// An iterative numerical method did not reach the requested tolerance.
struct ConvergenceError : Error
{
    ConvergenceError(const std::string& what, double best, double bound)
        : Error(what), best_estimate(best), error_bound(bound)
    {
    }
    double best_estimate;
    double error_bound;
};

// A tabulated spectrum does not extend far enough to hold the integrand mass.
struct CoverageError : Error
{
    CoverageError(const std::string& what, double lo, double hi)
        : Error(what), required_lo(lo), required_hi(hi)
    {
    }
    double required_lo;
    double required_hi;
};

// Invalid run configuration; key_path names the offending entry.
struct ConfigError : Error
{
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_path(std::move(key))
    {
    }
    std::string key_path;
};

struct IoError : Error
{
    using Error::Error;
};

} // namespace qfpi
