#pragma once

#include <stdexcept>
#include <string>

namespace pullback {

/** Base class for every error raised by the library. */
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Trajectory left the guard ball; carries the time at which it was detected. */
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double exit_time)
        : Error(what), exit_time_(exit_time) {}
    double exit_time() const noexcept { return exit_time_; }

private:
    double exit_time_;
};

/** Adaptive step size collapsed below round-off. */
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double time)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/** Invalid configuration value; `field()` names the offending key. */
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace pullback
