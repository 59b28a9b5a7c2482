#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crossvar/fbm.hpp"

namespace crossvar::young {

struct ConstantCoefficient {
  double value = 0.0;
};

/// sum_i coefficients[i] t^i
struct PolynomialCoefficient {
  std::vector<double> coefficients;
};

enum class TrigFunction { sine, cosine };

/// offset + amplitude * f(frequency t + phase)
struct TrigonometricCoefficient {
  TrigFunction function = TrigFunction::cosine;
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.0;
};

enum class PathTransform { identity, sine, absolute };

/// offset + scale * phi(B^{(component)}_t), evaluated at the grid point itself
/// (non-anticipating). component is 1 or 2.
struct PathCoefficient {
  int component = 1;
  PathTransform transform = PathTransform::identity;
  double offset = 0.0;
  double scale = 1.0;
};

/// One scalar coefficient process t -> sigma_t.
class Coefficient {
 public:
  using Variant = std::variant<ConstantCoefficient, PolynomialCoefficient,
                               TrigonometricCoefficient, PathCoefficient>;

  Coefficient() : rep_(ConstantCoefficient{0.0}) {}
  Coefficient(Variant rep) : rep_(std::move(rep)) {}  // NOLINT(implicit)

  static Coefficient constant(double c) { return Coefficient(ConstantCoefficient{c}); }
  static Coefficient polynomial(std::vector<double> c) {
    return Coefficient(PolynomialCoefficient{std::move(c)});
  }

  bool deterministic() const noexcept;
  bool is_zero() const noexcept;
  bool is_constant() const noexcept;

  /// Value at time t. Throws std::logic_error for path functionals.
  double at(double t) const;

  /// Values on the grid of the driving pair (N+1 points).
  std::vector<double> sample(const fbm::SamplePath& b1, const fbm::SamplePath& b2) const;

  /// Values on a plain uniform grid; deterministic coefficients only.
  std::vector<double> sample(std::size_t intervals, double horizon) const;

  const Variant& rep() const noexcept { return rep_; }

 private:
  Variant rep_;
};

/// {"kind": "constant", "value": c} | {"kind": "polynomial", "coefficients": [...]}
/// | {"kind": "trigonometric", "function": "sin"|"cos", "amplitude", "frequency", "phase", "offset"}
/// | {"kind": "path", "component": 1|2, "transform": "identity"|"sin"|"abs", "offset", "scale"}
/// Unknown keys are rejected.
Coefficient coefficient_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Coefficient& c);

/// The 2x2 coefficient process, its declared Hölder exponent and start point.
struct SigmaSpec {
  std::array<Coefficient, 4> entries{};  // (1,1), (1,2), (2,1), (2,2)
  double holder_exponent = 0.0;
  std::array<double, 2> start{0.0, 0.0};

  const Coefficient& operator()(int i, int j) const { return entries[(i - 1) * 2 + (j - 1)]; }
  Coefficient& operator()(int i, int j) { return entries[(i - 1) * 2 + (j - 1)]; }

  bool deterministic() const noexcept;
  /// sigma^{1,2} and sigma^{2,1} identically zero.
  bool diagonal() const noexcept;

  static SigmaSpec identity(double holder_exponent);
};

/// Midpoint of the admissible window (1/4 + H/2, H).
double default_holder_exponent(fbm::Hurst hurst);

/// Requires H > 1/2 and alpha in (1/4 + H/2, H); throws AssumptionViolation
/// naming the offending pair.
void check_assumption_a(double alpha, fbm::Hurst hurst);

/// Parses {"s11": ..., "s12": ..., "s21": ..., "s22": ..., "holder_exponent": a,
/// "start": [x1, x2]}. Missing entries are zero; a missing exponent takes
/// default_holder_exponent(hurst).
SigmaSpec sigma_from_json(const nlohmann::json& j, fbm::Hurst hurst);
nlohmann::json to_json(const SigmaSpec& s);

}  // namespace crossvar::young
