#include "ansfd/problems.hpp"

#include <cmath>
#include <numbers>

#include "ansfd/csv.hpp"
#include "ansfd/errors.hpp"

namespace ansfd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on (0, 1], 53 bits.
double unit_open_low(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNoiseSigma = 0.1;

}  // namespace

InputSignal InputSignal::noisy(InputSignal base, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidParameter("noise sigma must be non-negative");
  return {signal::Noisy{std::make_shared<const InputSignal>(std::move(base)), sigma, seed}};
}

double gaussian(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed) ^ splitmix64(index * 2 + 0x632BE59BD9B4E019ULL);
  const double u1 = unit_open_low(splitmix64(key));
  const double u2 = unit_open_low(splitmix64(key ^ 0xD1B54A32D192ED03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double eval_input(const InputSignal& signal, double t, std::uint64_t sample_index) {
  return std::visit(
      Overloaded{
          [](const signal::Zero&) { return 0.0; },
          [](const signal::Constant& s) { return s.value; },
          [t](const signal::Step& s) { return t >= s.t_on ? s.level : 0.0; },
          [t](const signal::Sinusoid& s) {
            return s.amplitude * std::sin(s.angular_frequency * t + s.phase);
          },
          [t, sample_index](const signal::Noisy& s) {
            const double base = s.base ? eval_input(*s.base, t, sample_index) : 0.0;
            if (s.sigma == 0.0) return base;
            return base + s.sigma * gaussian(s.seed, sample_index);
          },
      },
      signal.variant());
}

State eval_rhs(const OdeProblem& problem, const State& y, double t, std::uint64_t sample_index) {
  if (y.size() != problem.dimension()) {
    throw InvalidState("state has dimension " + std::to_string(y.size()) + ", problem '" +
                       problem.name + "' expects " + std::to_string(problem.dimension()));
  }
  State out = problem.rhs(y, eval_input(problem.input, t, sample_index));
  if (out.size() != y.size()) {
    throw InvalidState("rhs of '" + problem.name + "' returned dimension " +
                       std::to_string(out.size()));
  }
  return out;
}

OdeProblem linear_gain5(InputSignal input) {
  OdeProblem p;
  p.name = "linear_gain5";
  p.rhs = [](const State& y, double u) { return State{5.0 * y[0] + u}; };
  p.y0 = {1.0};
  p.t_final = 0.5;
  if (const auto* c = std::get_if<signal::Constant>(&input.variant())) {
    const double shift = c->value / 5.0;
    p.reference = [shift](double t) { return State{(1.0 + shift) * std::exp(5.0 * t) - shift}; };
  } else if (input.is_zero()) {
    p.reference = [](double t) { return State{std::exp(5.0 * t)}; };
  }
  p.input = std::move(input);
  return p;
}

OdeProblem dahlquist(double lambda) {
  OdeProblem p;
  p.name = "dahlquist:" + format_shortest(lambda);
  p.rhs = [lambda](const State& y, double u) { return State{lambda * y[0] + u}; };
  p.y0 = {1.0};
  p.t_final = 1.0;
  p.reference = [lambda](double t) { return State{std::exp(lambda * t)}; };
  return p;
}

OdeProblem dahlquist_noisy(double lambda, double sigma, std::uint64_t seed) {
  OdeProblem p = dahlquist(lambda);
  p.name = "dahlquist_noisy:" + format_shortest(lambda);
  p.input = InputSignal::noisy(InputSignal::zero(), sigma, seed);
  p.reference.reset();
  return p;
}

OdeProblem logistic() {
  OdeProblem p;
  p.name = "logistic";
  p.rhs = [](const State& y, double) { return State{y[0] * (1.0 - y[0])}; };
  p.y0 = {0.1};
  p.t_final = 5.0;
  p.reference = [](double t) {
    const double y0 = 0.1;
    return State{1.0 / (1.0 + (1.0 / y0 - 1.0) * std::exp(-t))};
  };
  return p;
}

OdeProblem flat() {
  OdeProblem p;
  p.name = "flat";
  p.rhs = [](const State& y, double) { return State(y.size(), 0.0); };
  p.y0 = {1.0};
  p.t_final = 1.0;
  p.reference = [](double) { return State{1.0}; };
  return p;
}

std::vector<OdeProblem> catalog() {
  std::vector<OdeProblem> all;
  all.push_back(linear_gain5());
  for (double lambda : {-1.0, -10.0, -100.0}) all.push_back(dahlquist(lambda));
  all.push_back(logistic());
  for (double lambda : {-1.0, -10.0, -100.0}) {
    all.push_back(dahlquist_noisy(lambda, kNoiseSigma, 0));
  }
  all.push_back(flat());
  return all;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& p : catalog()) names.push_back(p.name);
  return names;
}

OdeProblem resolve_problem(std::string_view name, std::optional<std::uint64_t> seed) {
  const auto colon = name.find(':');
  const auto head = name.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;

  auto lambda_arg = [&] {
    try {
      return parse_number(name.substr(colon + 1), "lambda");
    } catch (const ParseError& e) {
      throw UnknownProblem(e.what());
    }
  };

  if (head == "dahlquist" && has_arg) return dahlquist(lambda_arg());
  if (head == "dahlquist_noisy" && has_arg) {
    return dahlquist_noisy(lambda_arg(), kNoiseSigma, seed.value_or(0));
  }
  if (!has_arg) {
    if (head == "linear_gain5") return linear_gain5();
    if (head == "logistic") return logistic();
    if (head == "flat") return flat();
  }

  std::string msg = "unknown problem '" + std::string(name) + "'; catalog:";
  for (const auto& n : catalog_names()) msg += " " + n;
  msg += " (dahlquist:<lambda> and dahlquist_noisy:<lambda> accept any lambda)";
  throw UnknownProblem(msg);
}

}  // namespace ansfd
