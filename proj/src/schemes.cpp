#include "ansfd/schemes.hpp"

#include <algorithm>
#include <cmath>

#include "ansfd/errors.hpp"

namespace ansfd {

namespace {

// y + a * d, componentwise.
State axpy(const State& y, double a, const State& d) {
  State out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * d[i];
  return out;
}

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameter("step h must be positive and finite");
}

void check_finite(const State& y, std::size_t step_index) {
  for (double v : y) {
    if (!std::isfinite(v) || std::abs(v) > kDivergenceThreshold) throw DivergenceError(step_index);
  }
}

}  // namespace

State step_baseline(BaselineKind kind, const OdeProblem& problem, const State& y_k, double t_k,
                    std::size_t k, double h) {
  const State k1 = eval_rhs(problem, y_k, t_k, k);
  switch (kind) {
    case BaselineKind::explicit_euler:
      return axpy(y_k, h, k1);
    case BaselineKind::rk2_midpoint: {
      // prediction to the half step, correction with the midpoint slope
      const State mid = axpy(y_k, 0.5 * h, k1);
      return axpy(y_k, h, eval_rhs(problem, mid, t_k + 0.5 * h, k));
    }
    case BaselineKind::rk4_classic: {
      const State k2 = eval_rhs(problem, axpy(y_k, 0.5 * h, k1), t_k + 0.5 * h, k);
      const State k3 = eval_rhs(problem, axpy(y_k, 0.5 * h, k2), t_k + 0.5 * h, k);
      const State k4 = eval_rhs(problem, axpy(y_k, h, k3), t_k + h, k);
      State out(y_k.size());
      for (std::size_t i = 0; i < y_k.size(); ++i) {
        out[i] = y_k[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      return out;
    }
  }
  return y_k;
}

BootstrapResult bootstrap_window(const OdeProblem& problem, double h, int eta, Bootstrap method) {
  check_step(h);
  if (eta < 1) throw InvalidParameter("eta must be >= 1");
  const auto kind =
      method == Bootstrap::rk4 ? BaselineKind::rk4_classic : BaselineKind::explicit_euler;

  BootstrapResult out;
  out.windows.assign(problem.dimension(), HistoryWindow(static_cast<std::size_t>(eta) + 1));
  auto& traj = out.partial;
  traj.meta.problem = problem.name;
  traj.meta.h = h;
  traj.times.push_back(0.0);
  traj.values.push_back(problem.y0);
  for (int k = 0; k + 1 < eta; ++k) {
    const double t = k * h;
    traj.values.push_back(step_baseline(kind, problem, traj.values.back(), t, k, h));
    traj.times.push_back((k + 1) * h);
  }
  for (const auto& y : traj.values) {
    for (std::size_t i = 0; i < y.size(); ++i) out.windows[i].push(y[i]);
  }
  return out;
}

double step_euler_ansfd(const EstimatorCoefficients& coeffs, const HistoryWindow& window,
                        double rhs_value) {
  const auto eta = static_cast<std::size_t>(coeffs.eta);
  if (window.size() < eta) throw WindowUnderflow(window.size(), eta);
  const auto history = window.samples().last(eta);
  const auto& w = coeffs.raw_weights;
  double acc = 0.0;
  for (std::size_t j = 0; j < eta; ++j) acc += w[j] * history[j];
  return (rhs_value / coeffs.scale - acc) / w[eta];
}

DeltaSample sample_deltas(const DeltaMode& mode, int eta, double h, double y_k, double f_k,
                          Rng* rng) {
  if (eta < 1) throw InvalidParameter("eta must be >= 1");
  const double eps = 1e-12 * std::max(1.0, std::abs(y_k));

  DeltaSample s;
  s.delta_min = mode.delta_min.value_or(0.0);
  s.delta_max = mode.delta_max ? *mode.delta_max : s.delta_min + std::max(h * std::abs(f_k), eps);
  s.degenerate = s.delta_max - s.delta_min <= eps;

  const auto n = static_cast<std::size_t>(eta) + 1;
  s.offsets.resize(n);
  const double span = s.delta_max - s.delta_min;
  if (mode.sampling == DeltaSampling::regular_grid) {
    for (std::size_t j = 0; j < n; ++j) s.offsets[j] = s.delta_min + j * span / eta;
  } else {
    if (rng == nullptr) throw InvalidParameter("random delta sampling requires a seeded generator");
    for (auto& d : s.offsets) d = s.delta_min + span * rng->uniform();
    std::sort(s.offsets.begin(), s.offsets.end());
  }
  return s;
}

State step_rk_ansfd(const scheme::RkAnsfd& spec, const OdeProblem& problem, const State& y_k,
                    double t_k, std::size_t k, double h, Rng* rng, RkDiagnostics* diagnostics) {
  check_step(h);
  const State f_k = eval_rhs(problem, y_k, t_k, k);
  const std::size_t dim = y_k.size();

  State slope(dim, 0.0);
  std::vector<double> samples(static_cast<std::size_t>(spec.eta) + 1);
  for (std::size_t i = 0; i < dim; ++i) {
    const DeltaSample d = sample_deltas(spec.delta, spec.eta, h, y_k[i], f_k[i], rng);
    if (d.degenerate) {
      if (diagnostics) ++diagnostics->degenerate_steps;
      continue;
    }
    State probe = y_k;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      probe[i] = y_k[i] + d.offsets[j];
      samples[j] = eval_rhs(problem, probe, t_k, k)[i];
    }
    const double spacing = spec.step_spacing ? h : (d.delta_max - d.delta_min) / spec.eta;
    slope[i] = estimate_slope(make_coefficients(spec.eta, spacing, spec.gain), samples);
  }

  // <f>_h = f(y_k) + h a_1, then the midpoint correction.
  State mid(dim);
  for (std::size_t i = 0; i < dim; ++i) mid[i] = y_k[i] + 0.5 * h * (f_k[i] + h * slope[i]);
  const State f_mid = eval_rhs(problem, mid, t_k + 0.5 * h, k);
  if (diagnostics) diagnostics->last_slope = slope;
  return axpy(y_k, phi(spec.denominator, h), f_mid);
}

State BaselineStepper::step(const OdeProblem& problem, const State& y_k, double t_k,
                            std::size_t k, double h) {
  return step_baseline(kind_, problem, y_k, t_k, k, h);
}

EulerAnsfdStepper::EulerAnsfdStepper(scheme::EulerAnsfd spec) : spec_(std::move(spec)) {
  if (spec_.eta < 1) throw InvalidParameter("eta must be >= 1");
}

void EulerAnsfdStepper::reset(const OdeProblem& problem) {
  windows_.assign(problem.dimension(), HistoryWindow(static_cast<std::size_t>(spec_.eta) + 1));
  coeffs_.reset();
}

const EstimatorCoefficients& EulerAnsfdStepper::coefficients_for(double h) {
  // The generalized denominator replaces h by phi(h) throughout the window.
  const double spacing = phi(spec_.denominator, h);
  if (!coeffs_ || coeffs_->h != spacing) coeffs_ = make_coefficients(spec_.eta, spacing, spec_.gain);
  return *coeffs_;
}

State EulerAnsfdStepper::step(const OdeProblem& problem, const State& y_k, double t_k,
                              std::size_t k, double h) {
  check_step(h);
  if (windows_.size() != y_k.size()) reset(problem);
  for (std::size_t i = 0; i < y_k.size(); ++i) windows_[i].push(y_k[i]);

  if (k + 1 < static_cast<std::size_t>(spec_.eta)) {
    const auto kind = spec_.bootstrap == Bootstrap::rk4 ? BaselineKind::rk4_classic
                                                        : BaselineKind::explicit_euler;
    return step_baseline(kind, problem, y_k, t_k, k, h);
  }

  const State f_k = eval_rhs(problem, y_k, t_k, k);
  const auto& coeffs = coefficients_for(h);
  State next(y_k.size());
  for (std::size_t i = 0; i < y_k.size(); ++i) {
    next[i] = step_euler_ansfd(coeffs, windows_[i], f_k[i]);
  }
  return next;
}

RkAnsfdStepper::RkAnsfdStepper(scheme::RkAnsfd spec) : spec_(std::move(spec)) {
  if (spec_.eta < 1) throw InvalidParameter("eta must be >= 1");
  if (spec_.delta.sampling == DeltaSampling::random_uniform && !spec_.seed) {
    throw InvalidParameter("rk_ansfd with random deltas requires a seed");
  }
}

void RkAnsfdStepper::reset(const OdeProblem&) {
  if (spec_.seed) rng_.emplace(*spec_.seed);
  diagnostics_ = {};
}

State RkAnsfdStepper::step(const OdeProblem& problem, const State& y_k, double t_k,
                           std::size_t k, double h) {
  return step_rk_ansfd(spec_, problem, y_k, t_k, k, h, rng_ ? &*rng_ : nullptr, &diagnostics_);
}

std::unique_ptr<Stepper> make_stepper(const SchemeSpec& spec) {
  spec.validate();
  if (std::holds_alternative<scheme::ExplicitEuler>(spec.kind)) {
    return std::make_unique<BaselineStepper>(BaselineKind::explicit_euler);
  }
  if (std::holds_alternative<scheme::Rk2Midpoint>(spec.kind)) {
    return std::make_unique<BaselineStepper>(BaselineKind::rk2_midpoint);
  }
  if (std::holds_alternative<scheme::Rk4Classic>(spec.kind)) {
    return std::make_unique<BaselineStepper>(BaselineKind::rk4_classic);
  }
  if (const auto* e = std::get_if<scheme::EulerAnsfd>(&spec.kind)) {
    return std::make_unique<EulerAnsfdStepper>(*e);
  }
  return std::make_unique<RkAnsfdStepper>(std::get<scheme::RkAnsfd>(spec.kind));
}

StepPlan plan_steps(double t_final, double h) {
  check_step(h);
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw InvalidParameter("t_final must be positive and finite");
  }
  if (h > t_final * (1.0 + 1e-12)) throw InvalidParameter("step h exceeds t_final");
  const double ratio = t_final / h;
  const double nearest = std::round(ratio);
  StepPlan plan;
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    plan.full_steps = static_cast<std::size_t>(nearest);
    return plan;
  }
  plan.full_steps = static_cast<std::size_t>(std::floor(ratio));
  plan.last_h = t_final - plan.full_steps * h;
  return plan;
}

namespace {

Trajectory march(const OdeProblem& problem, Stepper& stepper, double h, std::size_t n_steps,
                 double last_h, double t_end) {
  check_step(h);
  if (problem.y0.empty()) throw InvalidState("problem '" + problem.name + "' has an empty y0");
  Trajectory traj;
  traj.meta.problem = problem.name;
  traj.meta.h = h;
  const std::size_t total = n_steps + (last_h > 0.0 ? 1 : 0);
  traj.times.reserve(total + 1);
  traj.values.reserve(total + 1);
  traj.times.push_back(0.0);
  traj.values.push_back(problem.y0);

  stepper.reset(problem);
  for (std::size_t k = 0; k < total; ++k) {
    const double t_k = traj.times.back();
    const bool last_partial = k == n_steps;
    const double step = last_partial ? last_h : h;
    State next = stepper.step(problem, traj.values.back(), t_k, k, step);
    check_finite(next, k + 1);
    traj.values.push_back(std::move(next));
    traj.times.push_back(last_partial ? t_end : static_cast<double>(k + 1) * h);
  }
  return traj;
}

}  // namespace

Trajectory integrate_steps(const OdeProblem& problem, Stepper& stepper, double h,
                           std::size_t n_steps) {
  return march(problem, stepper, h, n_steps, 0.0, 0.0);
}

Trajectory integrate(const OdeProblem& problem, Stepper& stepper, double h) {
  const StepPlan plan = plan_steps(problem.t_final, h);
  return march(problem, stepper, h, plan.full_steps, plan.last_h, problem.t_final);
}

Trajectory integrate(const OdeProblem& problem, const SchemeSpec& spec, double h) {
  auto stepper = make_stepper(spec);
  Trajectory traj = integrate(problem, *stepper, h);
  traj.meta.scheme = spec.to_string();
  traj.meta.seed = spec.seed();
  return traj;
}

}  // namespace ansfd
