#pragma once

// Conditional-gradient (Frank-Wolfe) solver for  min f(x)  s.t.  ||x|| <= alpha,
// generic over the iterate type (Eigen vector or matrix), the objective and
// the ball's linear-minimization oracle.

#include "kpsupport/norms.hpp"
#include "kpsupport/projection.hpp"
#include "kpsupport/spectral.hpp"

#include <algorithm>
#include <concepts>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kpsupport {

template <typename F, typename X>
concept ObjectiveOracle = requires(const F& f, const X& x) {
  { f.value(x) } -> std::convertible_to<typename X::Scalar>;
  { f.gradient(x) } -> std::convertible_to<X>;
};

template <typename B, typename X>
concept ConstraintBall = requires(const B& b, const X& x) {
  { b.lmo(x) } -> std::convertible_to<X>;
  { b.norm(x) } -> std::convertible_to<typename X::Scalar>;
  { b.radius() } -> std::convertible_to<typename X::Scalar>;
};

/// (k,p)-support ball of radius alpha in R^d.
template <typename Scalar>
struct VectorKpBall {
  SupportParams<Scalar> params;

  Vector<Scalar> lmo(const Vector<Scalar>& g) const { return lmo_vector(g, params); }
  Scalar norm(const Vector<Scalar>& x) const { return kp_norm(x, params); }
  Scalar radius() const { return params.alpha(); }
};

/// Spectral (k,p)-support ball of radius alpha in R^{d x m}.
template <typename Scalar>
struct SpectralKpBall {
  SupportParams<Scalar> params;
  TopKSvdOptions svd_options{};

  Matrix<Scalar> lmo(const Matrix<Scalar>& g) const { return lmo_spectral(g, params, svd_options); }
  Scalar norm(const Matrix<Scalar>& x) const { return spectral_kp_norm(x, params); }
  Scalar radius() const { return params.alpha(); }
};

enum class StepRule { fixed_2_over_t_plus_2, exact_line_search_quadratic };

struct SolverConfig {
  int max_iters = 1000;
  double gap_tol = 1e-4;
  /// When set, the stopping threshold is gap_tol * max(f(x0), 1e-300).
  bool relative_gap = true;
  StepRule step_rule = StepRule::fixed_2_over_t_plus_2;
};

enum class Termination { gap_tolerance, max_iterations };

template <typename Scalar>
struct IterationRecord {
  Scalar objective;
  Scalar gap;
  Scalar step;
};

template <typename X>
struct SolverTrace {
  using Scalar = typename X::Scalar;
  std::vector<IterationRecord<Scalar>> iterations;
  X solution;
  Scalar final_objective = 0;
  Scalar final_gap = 0;
  Termination reason = Termination::max_iterations;

  int iteration_count() const { return static_cast<int>(iterations.size()); }
};

template <typename X>
typename X::Scalar inner(const X& a, const X& b) {
  return a.cwiseProduct(b).sum();
}

/// <g, x - s>, an upper bound on f(x) - f* for convex f when s = lmo(g).
/// Round-off negatives down to -1e-12 are reported as 0.
template <typename X>
typename X::Scalar duality_gap(const X& x, const X& g, const X& s) {
  using Scalar = typename X::Scalar;
  if (x.rows() != g.rows() || x.cols() != g.cols() || x.rows() != s.rows() ||
      x.cols() != s.cols())
    throw std::invalid_argument("duality_gap: shape mismatch");
  const Scalar gap = inner(g, (x - s).eval());
  return (gap < Scalar(0) && gap >= Scalar(-1e-12)) ? Scalar(0) : gap;
}

template <typename X, typename Obj, typename Ball>
  requires ObjectiveOracle<Obj, X> && ConstraintBall<Ball, X>
SolverTrace<X> frank_wolfe(const Obj& objective, const Ball& ball, const X& x0,
                           const SolverConfig& config) {
  using Scalar = typename X::Scalar;
  if (config.max_iters < 1) throw std::invalid_argument("frank_wolfe: max_iters must be >= 1");
  if (!(config.gap_tol > 0)) throw std::invalid_argument("frank_wolfe: gap_tol must be > 0");
  if (ball.norm(x0) > ball.radius() * Scalar(1 + 1e-8))
    throw std::invalid_argument("frank_wolfe: starting point outside the ball");

  auto finite_or_throw = [](bool ok, int t, const char* what) {
    if (!ok)
      throw std::runtime_error(std::string("frank_wolfe: non-finite ") + what + " at iteration " +
                               std::to_string(t));
  };

  SolverTrace<X> trace;
  trace.iterations.reserve(static_cast<std::size_t>(std::min(config.max_iters, 100000)));
  X x = x0;
  Scalar threshold = Scalar(config.gap_tol);

  for (int t = 0;; ++t) {
    const Scalar fx = objective.value(x);
    finite_or_throw(std::isfinite(fx), t, "objective");
    if (t == 0 && config.relative_gap)
      threshold = Scalar(config.gap_tol) * std::max(std::abs(fx), Scalar(1e-300));
    const X g = objective.gradient(x);
    finite_or_throw(g.allFinite(), t, "gradient");
    const X s = ball.lmo(g);
    const Scalar gap = duality_gap(x, g, s);

    trace.final_objective = fx;
    trace.final_gap = gap;
    if (gap <= threshold) {
      trace.reason = Termination::gap_tolerance;
      break;
    }
    if (t == config.max_iters) {
      trace.reason = Termination::max_iterations;
      break;
    }

    Scalar step = Scalar(2) / Scalar(t + 2);
    if (config.step_rule == StepRule::exact_line_search_quadratic) {
      // For quadratic f: f(x + c(s - x)) = f(x) - c gap + c^2 curvature.
      const Scalar curvature = objective.value(s) - fx + gap;
      step = curvature > Scalar(0) ? std::clamp(gap / (Scalar(2) * curvature), Scalar(0), Scalar(1))
                                   : Scalar(1);
    }
    trace.iterations.push_back({fx, gap, step});
    x = (Scalar(1) - step) * x + step * s;
  }
  trace.solution = std::move(x);
  return trace;
}

template <typename X>
struct ContinuationCell {
  typename X::Scalar p;
  std::optional<SolverTrace<X>> trace;
  std::string error;

  bool ok() const { return trace.has_value(); }
};

/// Solves over a grid of exponents in ascending p, each solve starting from
/// the previous solution. The ball grows with p, so a previous solution is
/// feasible for the next one; it is rescaled onto the ball otherwise.
template <typename X, typename Obj, typename MakeBall>
  requires ObjectiveOracle<Obj, X>
std::vector<ContinuationCell<X>> continuation_over_p(
    const Obj& objective, const MakeBall& make_ball,
    std::vector<SupportParams<typename X::Scalar>> grid, const X& x0, const SolverConfig& config) {
  using Scalar = typename X::Scalar;
  if (grid.empty()) throw std::invalid_argument("continuation_over_p: empty grid");
  for (const auto& params : grid) {
    if (params.k() != grid.front().k() || params.alpha() != grid.front().alpha())
      throw std::invalid_argument("continuation_over_p: grid entries must share k and alpha");
  }
  std::stable_sort(grid.begin(), grid.end(),
                   [](const auto& a, const auto& b) { return a.p() < b.p(); });

  std::vector<ContinuationCell<X>> cells;
  cells.reserve(grid.size());
  X start = x0;
  for (const auto& params : grid) {
    ContinuationCell<X> cell{params.p(), std::nullopt, {}};
    try {
      const auto ball = make_ball(params);
      const Scalar n = ball.norm(start);
      if (n > ball.radius()) start *= ball.radius() / n;
      auto trace = frank_wolfe(objective, ball, start, config);
      start = trace.solution;
      cell.trace = std::move(trace);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

/// Projected gradient with constant step 1/lipschitz, for balls that have a
/// Euclidean projection (p = inf). Used to cross-check Frank-Wolfe.
template <typename X, typename Obj, typename Project>
  requires ObjectiveOracle<Obj, X>
X projected_gradient(const Obj& objective, const Project& project, const X& x0,
                     typename X::Scalar lipschitz, int iterations) {
  X x = project(x0);
  for (int t = 0; t < iterations; ++t) x = project((x - objective.gradient(x) / lipschitz).eval());
  return x;
}

}  // namespace kpsupport
