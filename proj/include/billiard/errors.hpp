#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace billiard {

/// A caller violated an operation's precondition.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The simulation reached a state that should be impossible (overlap after an
/// event, non-finite values). Signals a scheduling bug.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed or invalid scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling could not place the disks.
class PackingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too few usable points for a regression.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A trial failed; carries the coordinates needed to replay it.
class TrialError : public std::runtime_error {
public:
    TrialError(std::uint64_t trial_index, std::uint64_t master_seed, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial_index) + " (seed " +
                             std::to_string(master_seed) + "): " + what),
          trial_index_(trial_index),
          master_seed_(master_seed) {}

    std::uint64_t trial_index() const noexcept { return trial_index_; }
    std::uint64_t master_seed() const noexcept { return master_seed_; }

private:
    std::uint64_t trial_index_;
    std::uint64_t master_seed_;
};

}  // namespace billiard
