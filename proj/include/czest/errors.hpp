#pragma once

#include <stdexcept>
#include <string>

namespace czest
{

// Set is empty where a non-empty set was required (hull, diameter).
class EmptySetError : public std::runtime_error
{
    public:
        explicit EmptySetError(const std::string& what) : std::runtime_error(what) {}
};

// Measurement update produced an empty set: the data contradicts the declared noise bounds.
class EmptyPosteriorError : public std::runtime_error
{
    public:
        explicit EmptyPosteriorError(const std::string& what) : std::runtime_error(what) {}
};

class NotObservableError : public std::runtime_error
{
    public:
        explicit NotObservableError(const std::string& what) : std::runtime_error(what) {}
};

class WindowTooShortError : public std::invalid_argument
{
    public:
        explicit WindowTooShortError(const std::string& what) : std::invalid_argument(what) {}
};

// Scenario/config problems surfaced to the CLI as exit code 1.
class ConfigError : public std::runtime_error
{
    public:
        explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace czest
