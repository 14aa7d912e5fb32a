#pragma once

// Moving-window algebraic derivative estimator (first-order annihilator,
// filtering degree 2) realized by trapezoidal quadrature over a window of
// eta + 1 equally spaced samples.

#include <cstddef>
#include <span>
#include <vector>

namespace ansfd {

enum class GainMode { calibrated, unit, manual };

/// How the gain K of the estimator is chosen.
struct Gain {
  GainMode mode = GainMode::calibrated;
  double value = 1.0;  // only read in manual mode

  static Gain calibrated() { return {GainMode::calibrated, 1.0}; }
  static Gain unit() { return {GainMode::unit, 1.0}; }
  static Gain manual(double k) { return {GainMode::manual, k}; }

  friend bool operator==(const Gain&, const Gain&) = default;
};

/// Window weights and scale of the discrete estimator.
///
/// raw_weights are ordered oldest sample first: w_0 = T, w_j = 2(T - 2jh) for
/// 0 < j < eta, w_eta = T - 2 eta h = -T, with T = eta h. The estimate is
/// scale * sum_j w_j y_j with scale = -3 K h / T^3.
struct EstimatorCoefficients {
  int eta = 1;
  double h = 1.0;
  double gain = 1.0;
  std::vector<double> raw_weights;
  double scale = 0.0;

  double window_length() const { return eta * h; }
};

/// Gain that makes the estimator exact on linear ramps: K = eta^2 / (eta^2 + 2).
double calibrated_gain(int eta);

/// Throws InvalidParameter for eta < 1, h <= 0 (or non-finite) and manual K <= 0.
EstimatorCoefficients make_coefficients(int eta, double h, Gain gain = Gain::calibrated());

/// Fixed-capacity buffer of the most recent samples, oldest first.
class HistoryWindow {
 public:
  explicit HistoryWindow(std::size_t capacity);

  /// Appends a sample, discarding the oldest one when the window is full.
  void push(double sample);
  void clear() { samples_.clear(); }

  bool full() const { return samples_.size() == capacity_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::span<const double> samples() const { return samples_; }
  double newest() const { return samples_.back(); }

 private:
  std::size_t capacity_;
  std::vector<double> samples_;
};

/// Derivative estimate at the newest of eta + 1 samples (oldest first).
/// Throws WindowUnderflow when fewer than eta + 1 samples are supplied.
double estimate_slope(const EstimatorCoefficients& coeffs, std::span<const double> samples);
double estimate_slope(const EstimatorCoefficients& coeffs, const HistoryWindow& window);

struct SignSplit {
  int positive = 0;
  int zero = 0;
  int negative = 0;

  friend bool operator==(const SignSplit&, const SignSplit&) = default;
};

/// Sign counts of the raw weights; w_j > 0 iff j < eta/2, w_{eta/2} = 0 for even eta.
SignSplit sign_split(const EstimatorCoefficients& coeffs);

}  // namespace ansfd
