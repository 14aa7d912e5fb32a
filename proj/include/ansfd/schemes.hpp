#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ansfd/estimator.hpp"
#include "ansfd/problems.hpp"
#include "ansfd/scheme_spec.hpp"

namespace ansfd {

/// |y| beyond this aborts a run with DivergenceError.
inline constexpr double kDivergenceThreshold = 1e12;

struct TrajectoryMeta {
  std::string scheme;
  std::string problem;
  double h = 0.0;
  std::optional<std::uint64_t> seed;
};

/// Fixed-step solution samples. times[i] = i h except for a final step
/// truncated to land on t_final.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> values;
  TrajectoryMeta meta;

  std::size_t size() const { return times.size(); }
  const State& back() const { return values.back(); }
};

/// Seeded uniform source for random delta offsets.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

enum class BaselineKind { explicit_euler, rk2_midpoint, rk4_classic };

/// One explicit step of a classical scheme. Stage inputs reuse sample index k.
State step_baseline(BaselineKind kind, const OdeProblem& problem, const State& y_k, double t_k,
                    std::size_t k, double h);

struct BootstrapResult {
  std::vector<HistoryWindow> windows;  // one per component, capacity eta + 1
  Trajectory partial;                  // y_0 .. y_{eta-1}
};

/// Fills the first eta samples with a classical scheme so the first E-A-NSFD
/// solve targets y_eta.
BootstrapResult bootstrap_window(const OdeProblem& problem, double h, int eta,
                                 Bootstrap method = Bootstrap::explicit_euler);

/// Solves scale (w_eta y_{k+1} + sum_{j<eta} w_j y_{k-eta+1+j}) = rhs_value for
/// y_{k+1}, reading the newest eta samples of `window`.
double step_euler_ansfd(const EstimatorCoefficients& coeffs, const HistoryWindow& window,
                        double rhs_value);

struct DeltaSample {
  std::vector<double> offsets;  // eta + 1 values, ascending
  double delta_min = 0.0;
  double delta_max = 0.0;
  bool degenerate = false;  // span collapsed to the eps floor
};

/// Offsets delta_0..delta_eta for one RK-A-NSFD step. The default span is
/// [delta_min, delta_min + max(h |f_k|, eps)], eps = 1e-12 max(1, |y_k|).
/// `rng` is only drawn from in random_uniform mode.
DeltaSample sample_deltas(const DeltaMode& mode, int eta, double h, double y_k, double f_k,
                          Rng* rng);

struct RkDiagnostics {
  State last_slope;                  // a_1 per component from the latest step
  std::size_t degenerate_steps = 0;  // component-steps with a collapsed span
};

State step_rk_ansfd(const scheme::RkAnsfd& spec, const OdeProblem& problem, const State& y_k,
                    double t_k, std::size_t k, double h, Rng* rng,
                    RkDiagnostics* diagnostics = nullptr);

/// Common contract of all steppers. A stepper may keep history between calls;
/// reset() must be called before the first step of a run.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual void reset(const OdeProblem& problem) = 0;
  /// Advances y_k at t_k (step index k) by h.
  virtual State step(const OdeProblem& problem, const State& y_k, double t_k, std::size_t k,
                     double h) = 0;
};

class BaselineStepper final : public Stepper {
 public:
  explicit BaselineStepper(BaselineKind kind) : kind_(kind) {}
  void reset(const OdeProblem&) override {}
  State step(const OdeProblem& problem, const State& y_k, double t_k, std::size_t k,
             double h) override;

 private:
  BaselineKind kind_;
};

class EulerAnsfdStepper final : public Stepper {
 public:
  explicit EulerAnsfdStepper(scheme::EulerAnsfd spec);
  void reset(const OdeProblem& problem) override;
  State step(const OdeProblem& problem, const State& y_k, double t_k, std::size_t k,
             double h) override;

  const std::vector<HistoryWindow>& windows() const { return windows_; }

 private:
  const EstimatorCoefficients& coefficients_for(double h);

  scheme::EulerAnsfd spec_;
  std::vector<HistoryWindow> windows_;
  std::optional<EstimatorCoefficients> coeffs_;
};

class RkAnsfdStepper final : public Stepper {
 public:
  explicit RkAnsfdStepper(scheme::RkAnsfd spec);
  void reset(const OdeProblem& problem) override;
  State step(const OdeProblem& problem, const State& y_k, double t_k, std::size_t k,
             double h) override;

  const RkDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  scheme::RkAnsfd spec_;
  std::optional<Rng> rng_;
  RkDiagnostics diagnostics_;
};

/// Throws InvalidParameter when a random-delta scheme lacks a seed.
std::unique_ptr<Stepper> make_stepper(const SchemeSpec& spec);

/// Number of steps and final step length for a march over [0, t_final].
struct StepPlan {
  std::size_t full_steps = 0;
  double last_h = 0.0;  // 0 when t_final is a multiple of h
};
StepPlan plan_steps(double t_final, double h);

/// Exactly n_steps steps of size h from y0; throws DivergenceError.
Trajectory integrate_steps(const OdeProblem& problem, Stepper& stepper, double h,
                           std::size_t n_steps);

/// Fixed-step march to problem.t_final; the last step is truncated to land on it.
Trajectory integrate(const OdeProblem& problem, Stepper& stepper, double h);
Trajectory integrate(const OdeProblem& problem, const SchemeSpec& spec, double h);

}  // namespace ansfd
