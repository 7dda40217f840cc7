#include <cmath>
#include <stdexcept>

#include "lyapsip/field.h"

namespace lyapsip {

namespace {

struct BuiltinSpec {
  const char* name;
  int dim;
  ParamMap defaults;
};

const std::vector<BuiltinSpec>& Specs() {
  static const std::vector<BuiltinSpec> specs = {
      {"planar2d", 2, {}},
      {"vanderpol", 2, {{"epsilon", -2.0}}},
      {"whirling", 2, {{"theta_dot_sq", 1.0}, {"g_over_l", 10.0}}},
      {"hyper5d",
       5,
       {{"a", 23.0},
        {"b", 3.0},
        {"c", 18.0},
        {"m", 12.0},
        {"h", 4.0},
        {"k1", 0.0},
        {"k2", 30.0},
        {"k3", 0.0},
        {"k4", 1.0},
        {"k5", 1.0}}},
      {"power4d", 4, {}},
      {"bhatia", 2, {}},
      {"chetaev", 3, {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}}},
  };
  return specs;
}

const BuiltinSpec& FindSpec(std::string_view name) {
  for (const auto& spec : Specs()) {
    if (name == spec.name) return spec;
  }
  throw std::invalid_argument("unknown builtin system '" + std::string(name) +
                              "'");
}

ParamMap Resolve(const BuiltinSpec& spec, const ParamMap& given) {
  ParamMap resolved = spec.defaults;
  for (const auto& [key, value] : given) {
    auto it = resolved.find(key);
    if (it == resolved.end()) {
      throw std::invalid_argument("builtin '" + std::string(spec.name) +
                                  "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw std::invalid_argument("builtin '" + std::string(spec.name) +
                                  "': parameter '" + key + "' is not finite");
    }
    it->second = value;
  }
  return resolved;
}

// Nonlinear planar system; stable equilibria at (2,0) and (0,3), unstable at
// the origin.
Vector Planar2d(const Vector& y) {
  Vector f(2);
  f[0] = 2.0 * y[0] * (1.0 - y[0] / 2.0) - y[0] * y[1];
  f[1] = 3.0 * y[1] * (1.0 - y[1] / 3.0) - 2.0 * y[0] * y[1];
  return f;
}

Vector Power4d(const Vector& y) {
  const double c1 = std::cos(y[0]), s1 = std::sin(y[0]);
  const double c3 = std::cos(y[2]), s3 = std::sin(y[2]);
  Vector f(4);
  f[0] = y[1];
  f[1] = 0.0200 * c1 * c3 - 0.0200 * c1 - 0.9998 * s1 - 0.4000 * y[1] +
         0.4996 * c1 * s3 - 0.4996 * c3 * s1 + 0.0200 * s1 * s3;
  f[2] = y[3];
  f[3] = 0.4996 * c3 * s1 - 0.0299 * c3 - 0.4991 * s3 - 0.0200 * c1 * c3 -
         0.4996 * c1 * s3 - 0.5000 * y[3] - 0.0200 * s1 * s3 + 0.0500;
  return f;
}

// Continuous vector field defined by a case split on x1^2 x2^2.
Vector Bhatia(const Vector& y) {
  Vector f(2);
  const double x1 = y[0], x2 = y[1];
  if (x1 * x1 * x2 * x2 >= 1.0) {
    f[0] = x1;
  } else {
    f[0] = 2.0 * x1 * x1 * x1 * x2 * x2 - x1;
  }
  f[1] = -x2;
  return f;
}

}  // namespace

std::vector<std::string> BuiltinNames() {
  std::vector<std::string> names;
  for (const auto& spec : Specs()) names.emplace_back(spec.name);
  return names;
}

ParamMap BuiltinDefaults(std::string_view name) {
  return FindSpec(name).defaults;
}

VectorField MakeBuiltin(std::string_view name, const ParamMap& params) {
  const BuiltinSpec& spec = FindSpec(name);
  const ParamMap p = Resolve(spec, params);
  const std::string label(spec.name);

  if (label == "planar2d") return VectorField(2, Planar2d, label);
  if (label == "power4d") return VectorField(4, Power4d, label);
  if (label == "bhatia") return VectorField(2, Bhatia, label);

  if (label == "vanderpol") {
    const double eps = p.at("epsilon");
    return VectorField(
        2,
        [eps](const Vector& y) {
          Vector f(2);
          f[0] = y[1];
          f[1] = -y[0] + eps * y[1] * (1.0 - y[0] * y[0]);
          return f;
        },
        label);
  }
  if (label == "whirling") {
    const double w2 = p.at("theta_dot_sq");
    const double gl = p.at("g_over_l");
    return VectorField(
        2,
        [w2, gl](const Vector& y) {
          Vector f(2);
          const double s = std::sin(y[0]);
          f[0] = y[1];
          f[1] = w2 * s * std::cos(y[0]) - gl * s;
          return f;
        },
        label);
  }
  if (label == "hyper5d") {
    const double a = p.at("a"), b = p.at("b"), c = p.at("c"), m = p.at("m"),
                 h = p.at("h");
    const double k1 = p.at("k1"), k2 = p.at("k2"), k3 = p.at("k3"),
                 k4 = p.at("k4"), k5 = p.at("k5");
    return VectorField(
        5,
        [=](const Vector& y) {
          Vector f(5);
          f[0] = a * (y[1] - y[0]) - k1 * y[0];
          f[1] = (c - a) * y[0] + c * y[1] + y[4] - y[0] * y[2] - k2 * y[1];
          f[2] = -b * y[2] + y[0] * y[1] - k3 * y[2];
          f[3] = m * y[4] - k4 * y[3];
          f[4] = -y[1] - h * y[3] - k5 * y[4];
          return f;
        },
        label);
  }
  if (label == "chetaev") {
    const double a = p.at("a"), b = p.at("b"), c = p.at("c");
    return VectorField(
        3,
        [=](const Vector& y) {
          Vector f(3);
          f[0] = a * y[1] * y[2];
          f[1] = -b * y[0] * y[2];
          f[2] = c * y[0] * y[1];
          return f;
        },
        label);
  }
  throw std::logic_error("builtin table out of sync: " + label);
}

}  // namespace lyapsip
