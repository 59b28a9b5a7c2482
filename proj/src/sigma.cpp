#include "crossvar/sigma.hpp"

#include <cmath>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>

#include "crossvar/errors.hpp"

namespace crossvar::young {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!j.is_object()) throw IngestionError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw IngestionError(where + ": unknown key '" + key + "'");
  }
}

double number_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw IngestionError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

double eval_poly(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double transform(PathTransform tr, double x) {
  switch (tr) {
    case PathTransform::identity: return x;
    case PathTransform::sine: return std::sin(x);
    case PathTransform::absolute: return std::abs(x);
  }
  return x;
}

}  // namespace

bool Coefficient::deterministic() const noexcept {
  return !std::holds_alternative<PathCoefficient>(rep_);
}

bool Coefficient::is_constant() const noexcept {
  return std::visit(overloaded{
                        [](const ConstantCoefficient&) { return true; },
                        [](const PolynomialCoefficient& p) {
                          for (std::size_t i = 1; i < p.coefficients.size(); ++i) {
                            if (p.coefficients[i] != 0.0) return false;
                          }
                          return true;
                        },
                        [](const TrigonometricCoefficient& c) {
                          return c.amplitude == 0.0 || c.frequency == 0.0;
                        },
                        [](const PathCoefficient& p) { return p.scale == 0.0; },
                    },
                    rep_);
}

bool Coefficient::is_zero() const noexcept {
  return is_constant() && deterministic() && at(0.0) == 0.0;
}

double Coefficient::at(double t) const {
  return std::visit(
      overloaded{
          [](const ConstantCoefficient& c) { return c.value; },
          [t](const PolynomialCoefficient& p) { return eval_poly(p.coefficients, t); },
          [t](const TrigonometricCoefficient& c) {
            const double x = c.frequency * t + c.phase;
            return c.offset + c.amplitude * (c.function == TrigFunction::sine ? std::sin(x) : std::cos(x));
          },
          [](const PathCoefficient&) -> double {
            throw std::logic_error("path-functional coefficient has no closed form in t");
          },
      },
      rep_);
}

std::vector<double> Coefficient::sample(const fbm::SamplePath& b1, const fbm::SamplePath& b2) const {
  fbm::require_same_grid(b1, b2, "Coefficient::sample");
  if (const auto* p = std::get_if<PathCoefficient>(&rep_)) {
    const fbm::SamplePath& src = p->component == 1 ? b1 : b2;
    std::vector<double> out(src.intervals() + 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = p->offset + p->scale * transform(p->transform, src[k]);
    return out;
  }
  return sample(b1.intervals(), b1.horizon());
}

std::vector<double> Coefficient::sample(std::size_t intervals, double horizon) const {
  std::vector<double> out(intervals + 1);
  if (const auto* c = std::get_if<ConstantCoefficient>(&rep_)) {
    out.assign(intervals + 1, c->value);
    return out;
  }
  for (std::size_t k = 0; k <= intervals; ++k) {
    out[k] = at(horizon * static_cast<double>(k) / static_cast<double>(intervals));
  }
  return out;
}

Coefficient coefficient_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Coefficient::constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw IngestionError("coefficient: expected a number or an object with a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    require_keys(j, {"kind", "value"}, "constant coefficient");
    return Coefficient::constant(number_or(j, "value", 0.0));
  }
  if (kind == "polynomial") {
    require_keys(j, {"kind", "coefficients"}, "polynomial coefficient");
    if (!j.contains("coefficients") || !j.at("coefficients").is_array()) {
      throw IngestionError("polynomial coefficient: 'coefficients' array required");
    }
    std::vector<double> c;
    for (const auto& v : j.at("coefficients")) {
      if (!v.is_number()) throw IngestionError("polynomial coefficient: non-numeric entry");
      c.push_back(v.get<double>());
    }
    return Coefficient::polynomial(std::move(c));
  }
  if (kind == "trigonometric") {
    require_keys(j, {"kind", "function", "amplitude", "frequency", "phase", "offset"},
                 "trigonometric coefficient");
    TrigonometricCoefficient c;
    const std::string fn = j.value("function", std::string("cos"));
    if (fn == "sin") {
      c.function = TrigFunction::sine;
    } else if (fn == "cos") {
      c.function = TrigFunction::cosine;
    } else {
      throw IngestionError("trigonometric coefficient: function must be 'sin' or 'cos'");
    }
    c.amplitude = number_or(j, "amplitude", 1.0);
    c.frequency = number_or(j, "frequency", 1.0);
    c.phase = number_or(j, "phase", 0.0);
    c.offset = number_or(j, "offset", 0.0);
    return Coefficient(c);
  }
  if (kind == "path") {
    require_keys(j, {"kind", "component", "transform", "offset", "scale"}, "path coefficient");
    PathCoefficient c;
    c.component = static_cast<int>(number_or(j, "component", 1.0));
    if (c.component != 1 && c.component != 2) {
      throw IngestionError("path coefficient: component must be 1 or 2");
    }
    const std::string tr = j.value("transform", std::string("identity"));
    if (tr == "identity") {
      c.transform = PathTransform::identity;
    } else if (tr == "sin") {
      c.transform = PathTransform::sine;
    } else if (tr == "abs") {
      c.transform = PathTransform::absolute;
    } else {
      throw IngestionError("path coefficient: transform must be identity, sin or abs");
    }
    c.offset = number_or(j, "offset", 0.0);
    c.scale = number_or(j, "scale", 1.0);
    return Coefficient(c);
  }
  throw IngestionError("coefficient: unknown kind '" + kind + "'");
}

nlohmann::json to_json(const Coefficient& c) {
  return std::visit(
      overloaded{
          [](const ConstantCoefficient& k) {
            return nlohmann::json{{"kind", "constant"}, {"value", k.value}};
          },
          [](const PolynomialCoefficient& p) {
            return nlohmann::json{{"kind", "polynomial"}, {"coefficients", p.coefficients}};
          },
          [](const TrigonometricCoefficient& t) {
            return nlohmann::json{{"kind", "trigonometric"},
                                  {"function", t.function == TrigFunction::sine ? "sin" : "cos"},
                                  {"amplitude", t.amplitude},
                                  {"frequency", t.frequency},
                                  {"phase", t.phase},
                                  {"offset", t.offset}};
          },
          [](const PathCoefficient& p) {
            const char* tr = p.transform == PathTransform::identity ? "identity"
                             : p.transform == PathTransform::sine   ? "sin"
                                                                    : "abs";
            return nlohmann::json{{"kind", "path"},
                                  {"component", p.component},
                                  {"transform", tr},
                                  {"offset", p.offset},
                                  {"scale", p.scale}};
          },
      },
      c.rep());
}

bool SigmaSpec::deterministic() const noexcept {
  for (const auto& e : entries) {
    if (!e.deterministic()) return false;
  }
  return true;
}

bool SigmaSpec::diagonal() const noexcept {
  return (*this)(1, 2).is_zero() && (*this)(2, 1).is_zero();
}

SigmaSpec SigmaSpec::identity(double holder_exponent) {
  SigmaSpec s;
  s(1, 1) = Coefficient::constant(1.0);
  s(2, 2) = Coefficient::constant(1.0);
  s.holder_exponent = holder_exponent;
  return s;
}

double default_holder_exponent(fbm::Hurst hurst) {
  return 0.5 * ((0.25 + 0.5 * hurst.value()) + hurst.value());
}

void check_assumption_a(double alpha, fbm::Hurst hurst) {
  hurst.require_long_memory();
  const double lo = 0.25 + 0.5 * hurst.value();
  if (!(alpha > lo && alpha < hurst.value())) {
    throw AssumptionViolation("assumption (A) violated: alpha=" + std::to_string(alpha) +
                              " not in (" + std::to_string(lo) + ", " +
                              std::to_string(hurst.value()) + ") for H=" +
                              std::to_string(hurst.value()));
  }
}

SigmaSpec sigma_from_json(const nlohmann::json& j, fbm::Hurst hurst) {
  require_keys(j, {"s11", "s12", "s21", "s22", "holder_exponent", "start"}, "sigma");
  SigmaSpec s;
  const char* names[4] = {"s11", "s12", "s21", "s22"};
  for (int i = 0; i < 4; ++i) {
    if (j.contains(names[i])) s.entries[i] = coefficient_from_json(j.at(names[i]));
  }
  s.holder_exponent = number_or(j, "holder_exponent", default_holder_exponent(hurst));
  if (j.contains("start")) {
    const auto& st = j.at("start");
    if (!st.is_array() || st.size() != 2 || !st[0].is_number() || !st[1].is_number()) {
      throw IngestionError("sigma: 'start' must be [x1, x2]");
    }
    s.start = {st[0].get<double>(), st[1].get<double>()};
  }
  return s;
}

nlohmann::json to_json(const SigmaSpec& s) {
  return nlohmann::json{{"s11", to_json(s(1, 1))},
                        {"s12", to_json(s(1, 2))},
                        {"s21", to_json(s(2, 1))},
                        {"s22", to_json(s(2, 2))},
                        {"holder_exponent", s.holder_exponent},
                        {"start", {s.start[0], s.start[1]}}};
}

}  // namespace crossvar::young
