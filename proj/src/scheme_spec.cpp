#include "ansfd/scheme_spec.hpp"

#include <cmath>
#include <limits>

#include "ansfd/csv.hpp"
#include "ansfd/errors.hpp"

namespace ansfd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int parse_eta(std::string_view v) {
  const long long eta = parse_integer(v, "eta");
  if (eta < 1 || eta > std::numeric_limits<int>::max()) {
    throw InvalidParameter("eta must be >= 1, got " + std::string(v));
  }
  return static_cast<int>(eta);
}

Gain parse_gain(std::string_view v) {
  if (v == "calibrated" || v == "auto") return Gain::calibrated();
  if (v == "unit") return Gain::unit();
  const double k = parse_number(v, "gain");
  if (!(k > 0.0)) throw InvalidParameter("manual gain K must be positive");
  return Gain::manual(k);
}

Denominator parse_phi(std::string_view v) {
  if (v == "identity") return denominator::Identity{};
  if (v.starts_with("exp:")) return denominator::ExpFitted{parse_number(v.substr(4), "phi lambda")};
  throw ParseError("phi must be identity or exp:<lambda>, got '" + std::string(v) + "'");
}

std::optional<double> parse_bound(std::string_view v, std::string_view what) {
  if (v == "auto") return std::nullopt;
  return parse_number(v, what);
}

DeltaMode parse_delta(std::string_view v) {
  const auto parts = split(v, ':');
  DeltaMode d;
  if (parts[0] == "grid") {
    d.sampling = DeltaSampling::regular_grid;
  } else if (parts[0] == "random") {
    d.sampling = DeltaSampling::random_uniform;
  } else {
    throw ParseError("delta sampling must be grid or random, got '" + std::string(parts[0]) + "'");
  }
  if (parts.size() == 3) {
    d.delta_min = parse_bound(parts[1], "delta_min");
    d.delta_max = parse_bound(parts[2], "delta_max");
  } else if (parts.size() != 1) {
    throw ParseError("delta must be grid|random[:<min>:<max>], got '" + std::string(v) + "'");
  }
  return d;
}

std::string gain_text(const Gain& g) {
  switch (g.mode) {
    case GainMode::calibrated:
      return "calibrated";
    case GainMode::unit:
      return "unit";
    case GainMode::manual:
      break;
  }
  return format_shortest(g.value);
}

std::string phi_text(const Denominator& d) {
  if (const auto* e = std::get_if<denominator::ExpFitted>(&d)) {
    return "exp:" + format_shortest(e->lambda_hint);
  }
  return "identity";
}

std::string bound_text(const std::optional<double>& b) {
  return b ? format_shortest(*b) : "auto";
}

void check_eta(int eta) {
  if (eta < 1) throw InvalidParameter("eta must be >= 1, got " + std::to_string(eta));
}

}  // namespace

double phi(const Denominator& d, double h) {
  return std::visit(Overloaded{
                        [h](const denominator::Identity&) { return h; },
                        [h](const denominator::ExpFitted& e) {
                          if (e.lambda_hint == 0.0) return h;
                          return std::expm1(e.lambda_hint * h) / e.lambda_hint;
                        },
                    },
                    d);
}

SchemeSpec SchemeSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  std::vector<std::pair<std::string_view, std::string_view>> params;
  if (colon != std::string_view::npos) {
    for (auto item : split(text.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParseError("scheme parameter must be key=value, got '" + std::string(item) + "'");
      }
      params.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
  }

  auto reject = [&](std::string_view key) {
    throw ParseError("parameter '" + std::string(key) + "' is not valid for scheme '" +
                     std::string(kind) + "'");
  };

  SchemeSpec spec;
  if (kind == "explicit_euler" || kind == "rk2_midpoint" || kind == "rk4_classic") {
    if (!params.empty()) reject(params.front().first);
    if (kind == "explicit_euler") spec.kind = scheme::ExplicitEuler{};
    if (kind == "rk2_midpoint") spec.kind = scheme::Rk2Midpoint{};
    if (kind == "rk4_classic") spec.kind = scheme::Rk4Classic{};
  } else if (kind == "euler_ansfd") {
    scheme::EulerAnsfd s;
    for (auto [key, value] : params) {
      if (key == "eta") {
        s.eta = parse_eta(value);
      } else if (key == "gain") {
        s.gain = parse_gain(value);
      } else if (key == "phi") {
        s.denominator = parse_phi(value);
      } else if (key == "bootstrap") {
        if (value == "euler") {
          s.bootstrap = Bootstrap::explicit_euler;
        } else if (value == "rk4") {
          s.bootstrap = Bootstrap::rk4;
        } else {
          throw ParseError("bootstrap must be euler or rk4, got '" + std::string(value) + "'");
        }
      } else {
        reject(key);
      }
    }
    spec.kind = s;
  } else if (kind == "rk_ansfd") {
    scheme::RkAnsfd s;
    for (auto [key, value] : params) {
      if (key == "eta") {
        s.eta = parse_eta(value);
      } else if (key == "gain") {
        s.gain = parse_gain(value);
      } else if (key == "phi") {
        s.denominator = parse_phi(value);
      } else if (key == "delta") {
        s.delta = parse_delta(value);
      } else if (key == "seed") {
        s.seed = parse_unsigned(value, "seed");
      } else if (key == "slope") {
        if (value == "scaled") {
          s.step_spacing = false;
        } else if (value == "step") {
          s.step_spacing = true;
        } else {
          throw ParseError("slope must be scaled or step, got '" + std::string(value) + "'");
        }
      } else {
        reject(key);
      }
    }
    spec.kind = s;
  } else {
    throw ParseError("unknown scheme '" + std::string(kind) +
                     "'; expected explicit_euler, rk2_midpoint, rk4_classic, euler_ansfd or "
                     "rk_ansfd");
  }
  spec.validate();
  return spec;
}

std::string SchemeSpec::kind_name() const {
  return std::visit(Overloaded{
                        [](const scheme::ExplicitEuler&) { return "explicit_euler"; },
                        [](const scheme::Rk2Midpoint&) { return "rk2_midpoint"; },
                        [](const scheme::Rk4Classic&) { return "rk4_classic"; },
                        [](const scheme::EulerAnsfd&) { return "euler_ansfd"; },
                        [](const scheme::RkAnsfd&) { return "rk_ansfd"; },
                    },
                    kind);
}

std::string SchemeSpec::to_string() const {
  std::string out = kind_name();
  if (const auto* s = std::get_if<scheme::EulerAnsfd>(&kind)) {
    out += ":eta=" + std::to_string(s->eta) + ",gain=" + gain_text(s->gain) +
           ",phi=" + phi_text(s->denominator);
    if (s->bootstrap == Bootstrap::rk4) out += ",bootstrap=rk4";
  } else if (const auto* r = std::get_if<scheme::RkAnsfd>(&kind)) {
    out += ":eta=" + std::to_string(r->eta) + ",gain=" + gain_text(r->gain) +
           ",phi=" + phi_text(r->denominator) + ",delta=" +
           (r->delta.sampling == DeltaSampling::random_uniform ? "random" : "grid");
    if (r->delta.delta_min || r->delta.delta_max) {
      out += ":" + bound_text(r->delta.delta_min) + ":" + bound_text(r->delta.delta_max);
    }
    if (r->step_spacing) out += ",slope=step";
    if (r->seed) out += ",seed=" + std::to_string(*r->seed);
  }
  return out;
}

std::optional<int> SchemeSpec::eta() const {
  if (const auto* s = std::get_if<scheme::EulerAnsfd>(&kind)) return s->eta;
  if (const auto* r = std::get_if<scheme::RkAnsfd>(&kind)) return r->eta;
  return std::nullopt;
}

std::optional<std::uint64_t> SchemeSpec::seed() const {
  if (const auto* r = std::get_if<scheme::RkAnsfd>(&kind)) return r->seed;
  return std::nullopt;
}

void SchemeSpec::validate() const {
  if (const auto* s = std::get_if<scheme::EulerAnsfd>(&kind)) {
    check_eta(s->eta);
  } else if (const auto* r = std::get_if<scheme::RkAnsfd>(&kind)) {
    check_eta(r->eta);
    const auto& d = r->delta;
    if (d.delta_min && !std::isfinite(*d.delta_min)) throw InvalidParameter("delta_min not finite");
    if (d.delta_max && !std::isfinite(*d.delta_max)) throw InvalidParameter("delta_max not finite");
    if (d.delta_min && d.delta_max && !(*d.delta_min < *d.delta_max)) {
      throw InvalidParameter("delta_min must be < delta_max");
    }
  }
}

SchemeSpec with_eta(SchemeSpec spec, int eta) {
  check_eta(eta);
  if (auto* s = std::get_if<scheme::EulerAnsfd>(&spec.kind)) s->eta = eta;
  if (auto* r = std::get_if<scheme::RkAnsfd>(&spec.kind)) r->eta = eta;
  return spec;
}

SchemeSpec with_default_seed(SchemeSpec spec, std::uint64_t seed) {
  if (auto* r = std::get_if<scheme::RkAnsfd>(&spec.kind); r && !r->seed) r->seed = seed;
  return spec;
}

}  // namespace ansfd
