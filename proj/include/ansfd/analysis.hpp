#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ansfd/problems.hpp"
#include "ansfd/scheme_spec.hpp"
#include "ansfd/schemes.hpp"

namespace ansfd {

struct ErrorReport {
  double linf = 0.0;
  double l2 = 0.0;  // sqrt(h sum_k e_k^2)
  double final_error = 0.0;
};

/// Pointwise max-norm error against `reference` at the trajectory times.
ErrorReport error_norm(const Trajectory& traj, const Reference& reference);

struct OrderEstimate {
  std::vector<double> h_values;
  std::vector<double> errors;           // final errors
  std::vector<double> pairwise_orders;  // NaN where an error vanishes
  std::optional<double> summary_order;  // median; empty when undefined
};

/// Final-error convergence study. h_values must be strictly decreasing with at
/// least three entries; pairwise orders are log(e_i / e_{i+1}) / log(h_i / h_{i+1}),
/// which is log2 of the error ratio for a halving sequence.
OrderEstimate observed_order(const OdeProblem& problem, const SchemeSpec& spec,
                             const std::vector<double>& h_values);

struct StabilityOptions {
  std::size_t n_steps = 1000;
  double tolerance = 1e-4;
};

/// Whether a run of n_steps on dahlquist(lambda) stays bounded by |y0| (1 + 1e-6).
bool is_stable(const SchemeSpec& spec, double lambda, std::size_t n_steps, double h);

/// Largest stable h on y' = lambda y by bisection over the bracket.
/// Throws BracketError unless lo is stable and hi unstable.
double stability_threshold(const SchemeSpec& spec, double lambda, std::pair<double, double> bracket,
                           StabilityOptions options = {});

struct NoiseRow {
  int eta = 1;
  double algebraic_std = 0.0;
  double two_point_std = 0.0;
  double analytic_std = 0.0;            // sigma sqrt(sum (scale w_j)^2)
  double two_point_analytic_std = 0.0;  // sigma sqrt(2) / h
};

struct NoiseOptions {
  double h = 0.1;
  double sigma = 0.1;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
};

/// Monte-Carlo spread of the calibrated slope estimate on a noisy unit ramp,
/// against the two-point difference (y_eta - y_{eta-1}) / h.
std::vector<NoiseRow> noise_variance_report(const std::vector<int>& eta_values,
                                            const NoiseOptions& options);

}  // namespace ansfd
