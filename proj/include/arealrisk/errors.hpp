#ifndef AREALRISK_ERRORS_HPP
#define AREALRISK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace arealrisk {

// Bad or inconsistent caller input: unknown labels, dimension mismatches,
// parameters outside their admissible range.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A fit or derived quantity could not be produced from otherwise valid
// input (non-convergence, degenerate samples, singular systems).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure inside a numerical routine (eigensolver, factorization).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by pipeline stages so the CLI can report which stage failed.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& msg)
        : std::runtime_error("[" + stage + "] " + msg), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace arealrisk

#endif
