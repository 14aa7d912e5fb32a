#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ansfd {

using State = std::vector<double>;

class InputSignal;

namespace signal {
struct Zero {};
struct Constant {
  double value = 0.0;
};
struct Step {
  double t_on = 0.0;
  double level = 1.0;
};
struct Sinusoid {
  double amplitude = 1.0;
  double angular_frequency = 1.0;
  double phase = 0.0;
};
/// Base signal plus sigma * N(0, 1), keyed on (seed, sample index).
struct Noisy {
  std::shared_ptr<const InputSignal> base;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};
}  // namespace signal

/// The input u(t) of y' = f(y, u).
class InputSignal {
 public:
  using Variant =
      std::variant<signal::Zero, signal::Constant, signal::Step, signal::Sinusoid, signal::Noisy>;

  InputSignal() = default;
  InputSignal(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  static InputSignal zero() { return {signal::Zero{}}; }
  static InputSignal constant(double c) { return {signal::Constant{c}}; }
  static InputSignal step(double t_on, double level) { return {signal::Step{t_on, level}}; }
  static InputSignal sinusoid(double amplitude, double omega, double phase) {
    return {signal::Sinusoid{amplitude, omega, phase}};
  }
  static InputSignal noisy(InputSignal base, double sigma, std::uint64_t seed);

  const Variant& variant() const { return v_; }
  bool is_zero() const { return std::holds_alternative<signal::Zero>(v_); }

 private:
  Variant v_;
};

/// N(0, 1) draw that depends only on (seed, index).
double gaussian(std::uint64_t seed, std::uint64_t index);

double eval_input(const InputSignal& signal, double t, std::uint64_t sample_index);

using Rhs = std::function<State(const State& y, double u)>;
using Reference = std::function<State(double t)>;

/// Initial-value problem y' = f(y, u(t)), y(0) = y0 on [0, t_final].
struct OdeProblem {
  std::string name;
  Rhs rhs;
  InputSignal input;
  State y0;
  double t_final = 1.0;
  std::optional<Reference> reference;

  std::size_t dimension() const { return y0.size(); }
};

/// f(y, u(t)) with u sampled at `sample_index`; throws InvalidState on dimension mismatch.
State eval_rhs(const OdeProblem& problem, const State& y, double t, std::uint64_t sample_index);

// Catalog constructors.
OdeProblem linear_gain5(InputSignal input = InputSignal::zero());
OdeProblem dahlquist(double lambda);
OdeProblem dahlquist_noisy(double lambda, double sigma, std::uint64_t seed);
OdeProblem logistic();
OdeProblem flat();

/// Every named problem with its default parameters.
std::vector<OdeProblem> catalog();

/// Names accepted by resolve_problem, for diagnostics.
std::vector<std::string> catalog_names();

/// Resolves names such as `linear_gain5`, `dahlquist:-10`, `dahlquist_noisy:-1`.
/// `seed` replaces the noise seed of noisy problems. Throws UnknownProblem.
OdeProblem resolve_problem(std::string_view name, std::optional<std::uint64_t> seed = {});

}  // namespace ansfd
