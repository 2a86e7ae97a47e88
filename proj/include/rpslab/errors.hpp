#pragma once

#include <stdexcept>
#include <string>

namespace rps {

// Every failure carries a short machine-readable kind; the CLI turns it into
// the "kind" field of its error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("configuration", w) {}
};
struct RangeError : Error {
    explicit RangeError(const std::string& w) : Error("range", w) {}
};
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& w) : Error("grid_mismatch", w) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error("convergence", w) {}
};
struct SchemaError : Error {
    explicit SchemaError(const std::string& w) : Error("schema", w) {}
};
struct ResourceError : Error {
    explicit ResourceError(const std::string& w) : Error("resource", w) {}
};
struct DataError : Error {
    explicit DataError(const std::string& w) : Error("data", w) {}
};

} // namespace rps
