#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace swipt {

/// Requested RF target cannot be met. `shortfall` is in the caller's units.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double shortfall)
        : std::runtime_error(what), shortfall_(shortfall) {}
    double shortfall() const noexcept { return shortfall_; }

private:
    double shortfall_;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double gap)
        : std::runtime_error(what), gap_(gap) {}
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

/// Convergence failure that still hands back the best iterate found.
template <class Solution>
class NotConverged : public ConvergenceError {
public:
    NotConverged(const std::string& what, double gap, Solution best)
        : ConvergenceError(what, gap), best_(std::move(best)) {}
    const Solution& best() const noexcept { return best_; }

private:
    Solution best_;
};

} // namespace swipt
