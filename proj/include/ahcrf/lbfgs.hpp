#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ahcrf {

/// f(x), writing the gradient into `grad` (same length as x).
using DifferentiableFunction = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  std::size_t history = 10;
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-5;  // on the Euclidean gradient norm
  double armijo = 1e-4;              // sufficient decrease (c1)
  double curvature = 0.9;            // strong Wolfe curvature (c2)
  std::size_t max_evaluations_per_search = 40;
};

enum class LbfgsStatus { kConverged, kMaxIterations, kLineSearchFailed };

struct LbfgsIteration {
  std::size_t iteration = 0;
  double value = 0.0;
  double gradient_norm = 0.0;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  // Entry 0 is the starting point, then one entry per accepted step.
  std::vector<LbfgsIteration> trace;
};

/// Limited-memory BFGS minimization with a strong-Wolfe line search.
/// Trial points with a non-finite value are treated as overshoots and the
/// step is shrunk. Throws TrainingError when f(x0) is not finite.
LbfgsResult minimize_lbfgs(const DifferentiableFunction& f, std::vector<double> x0, const LbfgsOptions& options);

const char* to_string(LbfgsStatus status) noexcept;

}  // namespace ahcrf
