#pragma once

#include <stdexcept>
#include <string>

namespace ruin {

/// Invalid parameters or configuration. CLI exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative or adaptive procedure failed to reach its tolerance. CLI exit code 2.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The analytic construction requires gamma > 1 (and a finite jump mean). CLI exit code 3.
class HypothesisViolated : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace detail
}  // namespace ruin
