#include "ahcrf/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

#include "ahcrf/error.hpp"
#include "ahcrf/kernels.hpp"

namespace ahcrf {
namespace {

struct Point {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative along the search direction
  std::vector<double> x;
  std::vector<double> grad;
};

class LineSearch {
 public:
  LineSearch(const DifferentiableFunction& f, const LbfgsOptions& options, const Point& origin,
             std::span<const double> direction, std::size_t& evaluations)
      : f_(f), options_(options), origin_(origin), direction_(direction), evaluations_(evaluations) {}

  // Strong-Wolfe search; returns nullopt when no step with sufficient
  // decrease was found.
  std::optional<Point> run(double initial_step) {
    Point previous = origin_;
    double step = initial_step;
    for (std::size_t i = 0; used_ < options_.max_evaluations_per_search; ++i) {
      Point trial = evaluate(step);
      if (!std::isfinite(trial.value)) {
        step = 0.5 * (previous.step + step);
        continue;
      }
      if (!sufficient(trial) || (i > 0 && trial.value >= previous.value)) return zoom(previous, trial);
      if (std::abs(trial.slope) <= -options_.curvature * origin_.slope) return trial;
      if (trial.slope >= 0.0) return zoom(trial, previous);
      previous = std::move(trial);
      step *= 2.0;
    }
    return fallback(previous);
  }

 private:
  bool sufficient(const Point& p) const {
    return p.value <= origin_.value + options_.armijo * p.step * origin_.slope;
  }

  Point evaluate(double step) {
    ++used_;
    ++evaluations_;
    Point p;
    p.step = step;
    p.x = origin_.x;
    kernels::axpy(step, direction_, p.x);
    p.grad.assign(p.x.size(), 0.0);
    p.value = f_(p.x, p.grad);
    p.slope = kernels::dot(p.grad, direction_);
    return p;
  }

  static double interpolate(const Point& lo, const Point& hi) {
    const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (lo.step - hi.step);
    const double disc = d1 * d1 - lo.slope * hi.slope;
    if (std::isfinite(hi.value) && disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), hi.step - lo.step);
      const double step = hi.step - (hi.step - lo.step) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
      if (std::isfinite(step)) return step;
    }
    return 0.5 * (lo.step + hi.step);
  }

  std::optional<Point> zoom(Point lo, Point hi) {
    while (used_ < options_.max_evaluations_per_search) {
      const double width = hi.step - lo.step;
      const double a = std::min(lo.step, hi.step) + 0.1 * std::abs(width);
      const double b = std::max(lo.step, hi.step) - 0.1 * std::abs(width);
      const double step = std::clamp(interpolate(lo, hi), a, b);
      Point trial = evaluate(step);
      if (!std::isfinite(trial.value) || !sufficient(trial) || trial.value >= lo.value) {
        hi = std::move(trial);
        hi.value = std::isfinite(hi.value) ? hi.value : std::numeric_limits<double>::infinity();
        continue;
      }
      if (std::abs(trial.slope) <= -options_.curvature * origin_.slope) return trial;
      if (trial.slope * (hi.step - lo.step) >= 0.0) hi = lo;
      lo = std::move(trial);
    }
    return fallback(lo);
  }

  // Out of evaluations: keep the best sufficient-decrease point, if any.
  std::optional<Point> fallback(const Point& best) const {
    if (best.step > 0.0 && best.value < origin_.value) return best;
    return std::nullopt;
  }

  const DifferentiableFunction& f_;
  const LbfgsOptions& options_;
  const Point& origin_;
  std::span<const double> direction_;
  std::size_t& evaluations_;
  std::size_t used_ = 0;
};

double norm(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

}  // namespace

const char* to_string(LbfgsStatus status) noexcept {
  switch (status) {
    case LbfgsStatus::kConverged:
      return "converged";
    case LbfgsStatus::kMaxIterations:
      return "max-iterations";
    case LbfgsStatus::kLineSearchFailed:
      return "line-search-failed";
  }
  return "unknown";
}

LbfgsResult minimize_lbfgs(const DifferentiableFunction& f, std::vector<double> x0, const LbfgsOptions& options) {
  LbfgsResult result;
  Point current;
  current.x = std::move(x0);
  current.grad.assign(current.x.size(), 0.0);
  current.value = f(current.x, current.grad);
  result.evaluations = 1;
  if (!std::isfinite(current.value)) throw TrainingError("objective is not finite at the starting point");

  struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
  };
  std::deque<Pair> history;

  double gnorm = norm(current.grad);
  result.trace.push_back({0, current.value, gnorm});
  result.status = LbfgsStatus::kMaxIterations;

  std::vector<double> direction(current.x.size());
  std::vector<double> alpha(options.history);
  while (true) {
    if (gnorm < options.gradient_tolerance) {
      result.status = LbfgsStatus::kConverged;
      break;
    }
    if (result.iterations >= options.max_iterations) break;

    // Two-loop recursion: direction = -H * grad.
    for (std::size_t i = 0; i < direction.size(); ++i) direction[i] = -current.grad[i];
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * kernels::dot(history[k].s, direction);
      kernels::axpy(-alpha[k], history[k].y, direction);
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double gamma = kernels::dot(last.s, last.y) / kernels::dot(last.y, last.y);
      for (double& v : direction) v *= gamma;
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * kernels::dot(history[k].y, direction);
      kernels::axpy(alpha[k] - beta, history[k].s, direction);
    }

    current.slope = kernels::dot(current.grad, direction);
    if (!(current.slope < 0.0)) {
      history.clear();
      for (std::size_t i = 0; i < direction.size(); ++i) direction[i] = -current.grad[i];
      current.slope = -gnorm * gnorm;
    }
    current.step = 0.0;
    const double initial_step = history.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

    LineSearch search(f, options, current, direction, result.evaluations);
    auto next = search.run(initial_step);
    if (!next) {
      if (!history.empty()) {
        history.clear();  // retry once along steepest descent
        continue;
      }
      result.status = LbfgsStatus::kLineSearchFailed;
      break;
    }

    Pair pair;
    pair.s.resize(current.x.size());
    pair.y.resize(current.x.size());
    for (std::size_t i = 0; i < pair.s.size(); ++i) {
      pair.s[i] = next->x[i] - current.x[i];
      pair.y[i] = next->grad[i] - current.grad[i];
    }
    const double sy = kernels::dot(pair.s, pair.y);
    if (sy > 1e-12 * norm(pair.s) * norm(pair.y)) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > options.history) history.pop_front();
    }

    current = std::move(*next);
    gnorm = norm(current.grad);
    ++result.iterations;
    result.trace.push_back({result.iterations, current.value, gnorm});
  }

  result.x = std::move(current.x);
  result.value = current.value;
  result.gradient_norm = gnorm;
  return result;
}

}  // namespace ahcrf
