#include "ansfd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ansfd/csv.hpp"
#include "ansfd/errors.hpp"
#include "ansfd/estimator.hpp"

namespace ansfd {

namespace {

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double x0 = xs.front();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : xs) {
    const double d = x - x0;
    sum += d;
    sum_sq += d * d;
  }
  const double n = static_cast<double>(xs.size());
  const double var = (sum_sq - sum * sum / n) / (n - 1.0);
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(trial);
}

}  // namespace

ErrorReport error_norm(const Trajectory& traj, const Reference& reference) {
  ErrorReport r;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const State ref = reference(traj.times[k]);
    if (ref.size() != traj.values[k].size()) {
      throw InvalidState("reference dimension does not match trajectory");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) e = std::max(e, std::abs(traj.values[k][i] - ref[i]));
    r.linf = std::max(r.linf, e);
    sum_sq += e * e;
    if (k + 1 == traj.size()) r.final_error = e;
  }
  r.l2 = std::sqrt(traj.meta.h * sum_sq);
  return r;
}

OrderEstimate observed_order(const OdeProblem& problem, const SchemeSpec& spec,
                             const std::vector<double>& h_values) {
  if (!problem.reference) {
    throw InvalidParameter("problem '" + problem.name + "' has no analytic reference");
  }
  if (h_values.size() < 3) throw InvalidParameter("order study needs at least three step sizes");
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    if (!(h_values[i] > 0.0)) throw InvalidParameter("step sizes must be positive");
    if (i && !(h_values[i] < h_values[i - 1])) {
      throw InvalidParameter("step sizes must be strictly decreasing");
    }
  }

  OrderEstimate out;
  out.h_values = h_values;
  for (double h : h_values) {
    try {
      const Trajectory traj = integrate(problem, spec, h);
      out.errors.push_back(error_norm(traj, *problem.reference).final_error);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.step_index(), "order study run with h=" + format_shortest(h));
    }
  }

  std::vector<double> defined;
  for (std::size_t i = 0; i + 1 < out.errors.size(); ++i) {
    const double e0 = out.errors[i];
    const double e1 = out.errors[i + 1];
    double p = std::numeric_limits<double>::quiet_NaN();
    if (e0 > 0.0 && e1 > 0.0) {
      p = std::log(e0 / e1) / std::log(h_values[i] / h_values[i + 1]);
      defined.push_back(p);
    }
    out.pairwise_orders.push_back(p);
  }
  if (!defined.empty()) out.summary_order = median(defined);
  return out;
}

bool is_stable(const SchemeSpec& spec, double lambda, std::size_t n_steps, double h) {
  const OdeProblem problem = dahlquist(lambda);
  auto stepper = make_stepper(spec);
  try {
    const Trajectory traj = integrate_steps(problem, *stepper, h, n_steps);
    return std::abs(traj.back()[0]) <= std::abs(problem.y0[0]) * (1.0 + 1e-6);
  } catch (const DivergenceError&) {
    return false;
  }
}

double stability_threshold(const SchemeSpec& spec, double lambda, std::pair<double, double> bracket,
                           StabilityOptions options) {
  if (!(lambda < 0.0)) throw InvalidParameter("stability scan needs lambda < 0");
  auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(hi > lo)) throw BracketError("bracket must satisfy 0 < lo < hi");
  if (!is_stable(spec, lambda, options.n_steps, lo)) {
    throw BracketError("lower bracket h=" + format_shortest(lo) + " is not stable");
  }
  if (is_stable(spec, lambda, options.n_steps, hi)) {
    throw BracketError("upper bracket h=" + format_shortest(hi) + " is not unstable");
  }
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    (is_stable(spec, lambda, options.n_steps, mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<NoiseRow> noise_variance_report(const std::vector<int>& eta_values,
                                            const NoiseOptions& options) {
  if (options.trials < 1000) throw InvalidParameter("noise study needs at least 1000 trials");
  if (!(options.sigma >= 0.0)) throw InvalidParameter("sigma must be non-negative");

  std::vector<NoiseRow> rows;
  for (int eta : eta_values) {
    const EstimatorCoefficients coeffs = make_coefficients(eta, options.h, Gain::calibrated());
    const auto n = static_cast<std::size_t>(eta) + 1;
    std::vector<double> samples(n);
    std::vector<double> algebraic;
    std::vector<double> two_point;
    algebraic.reserve(options.trials);
    two_point.reserve(options.trials);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
      const std::uint64_t seed = trial_seed(options.seed, trial);
      for (std::size_t j = 0; j < n; ++j) {
        samples[j] = static_cast<double>(j) * options.h + options.sigma * gaussian(seed, j);
      }
      algebraic.push_back(estimate_slope(coeffs, samples));
      two_point.push_back((samples[n - 1] - samples[n - 2]) / options.h);
    }

    double sum_sq = 0.0;
    for (double w : coeffs.raw_weights) sum_sq += (coeffs.scale * w) * (coeffs.scale * w);

    NoiseRow row;
    row.eta = eta;
    row.algebraic_std = sample_std(algebraic);
    row.two_point_std = sample_std(two_point);
    row.analytic_std = options.sigma * std::sqrt(sum_sq);
    row.two_point_analytic_std = options.sigma * std::sqrt(2.0) / options.h;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ansfd
