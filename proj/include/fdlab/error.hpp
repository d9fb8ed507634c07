#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fdlab {

/// Bad input detected before any computation; carries the offending field path.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_error, double requested)
        : std::runtime_error(what), achieved_error_(achieved_error), requested_(requested) {}

    double achieved_error() const noexcept { return achieved_error_; }
    double requested() const noexcept { return requested_; }

private:
    double achieved_error_;
    double requested_;
};

/// A nonlinear or time-stepping solve failed. The payload mirrors what the
/// CLI prints on exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::string context, long step = -1,
                     std::vector<double> residual_history = {}, bool line_search_exhausted = false)
        : std::runtime_error(what),
          context_(std::move(context)),
          step_(step),
          history_(std::move(residual_history)),
          line_search_exhausted_(line_search_exhausted) {}

    const std::string& context() const noexcept { return context_; }
    long step() const noexcept { return step_; }
    const std::vector<double>& residual_history() const noexcept { return history_; }
    bool line_search_exhausted() const noexcept { return line_search_exhausted_; }

private:
    std::string context_;
    long step_;
    std::vector<double> history_;
    bool line_search_exhausted_;
};

}  // namespace fdlab
