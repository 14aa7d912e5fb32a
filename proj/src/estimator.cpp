#include "ansfd/estimator.hpp"

#include <cmath>
#include <string>

#include "ansfd/errors.hpp"

namespace ansfd {

double calibrated_gain(int eta) {
  if (eta < 1) throw InvalidParameter("eta must be >= 1, got " + std::to_string(eta));
  const double e2 = static_cast<double>(eta) * static_cast<double>(eta);
  return e2 / (e2 + 2.0);
}

EstimatorCoefficients make_coefficients(int eta, double h, Gain gain) {
  if (eta < 1) throw InvalidParameter("eta must be >= 1, got " + std::to_string(eta));
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidParameter("sample spacing h must be positive and finite");
  }

  EstimatorCoefficients c;
  c.eta = eta;
  c.h = h;
  switch (gain.mode) {
    case GainMode::calibrated:
      c.gain = calibrated_gain(eta);
      break;
    case GainMode::unit:
      c.gain = 1.0;
      break;
    case GainMode::manual:
      if (!(gain.value > 0.0) || !std::isfinite(gain.value)) {
        throw InvalidParameter("manual gain K must be positive and finite");
      }
      c.gain = gain.value;
      break;
  }

  // Integer multiples of h keep w_j = -w_{eta-j} exact in floating point.
  c.raw_weights.resize(static_cast<std::size_t>(eta) + 1);
  c.raw_weights.front() = eta * h;
  for (int j = 1; j < eta; ++j) c.raw_weights[j] = 2.0 * (eta - 2 * j) * h;
  c.raw_weights.back() = -eta * h;

  const double t = c.window_length();
  c.scale = -3.0 * c.gain * h / (t * t * t);
  return c;
}

HistoryWindow::HistoryWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidParameter("history window capacity must be positive");
  samples_.reserve(capacity);
}

void HistoryWindow::push(double sample) {
  if (samples_.size() == capacity_) samples_.erase(samples_.begin());
  samples_.push_back(sample);
}

double estimate_slope(const EstimatorCoefficients& coeffs, std::span<const double> samples) {
  const std::size_t need = coeffs.raw_weights.size();
  if (samples.size() < need) throw WindowUnderflow(samples.size(), need);
  // Only the newest eta + 1 samples enter the estimate.
  const auto recent = samples.last(need);
  double acc = 0.0;
  for (std::size_t j = 0; j < need; ++j) acc += coeffs.raw_weights[j] * recent[j];
  return coeffs.scale * acc;
}

double estimate_slope(const EstimatorCoefficients& coeffs, const HistoryWindow& window) {
  if (!window.full() || window.capacity() != coeffs.raw_weights.size()) {
    throw WindowUnderflow(window.size(), coeffs.raw_weights.size());
  }
  return estimate_slope(coeffs, window.samples());
}

SignSplit sign_split(const EstimatorCoefficients& coeffs) {
  SignSplit s;
  for (double w : coeffs.raw_weights) {
    if (w > 0.0) {
      ++s.positive;
    } else if (w < 0.0) {
      ++s.negative;
    } else {
      ++s.zero;
    }
  }
  return s;
}

}  // namespace ansfd
