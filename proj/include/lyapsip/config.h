#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyapsip/dictionary.h"
#include "lyapsip/field.h"
#include "lyapsip/synthesis.h"

namespace lyapsip {

/// Malformed configuration; `field()` is the dotted path of the culprit,
/// e.g. "v_dictionary.monomial_degrees[0]".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SystemSpec {
  std::string builtin;  // empty for an external system
  ParamMap params;      // resolved, defaults included
  std::string external_command;
  int external_dim = 0;

  VectorField Make() const;
  int dim() const;
};

struct DictionarySpec {
  std::vector<int> monomial_degrees;
  std::vector<int> cosine_frequencies;

  Dictionary Make(int dim) const;
  bool empty() const { return monomial_degrees.empty() && cosine_frequencies.empty(); }
};

struct OutputSpec {
  std::string dir = "out";
  /// Sphere radii tabulated by verify; 0 skips the curves.
  int curves = 50;
};

/// A validated run description with every default filled in.
struct RunConfig {
  std::string name;
  SystemSpec system;
  Vector equilibrium;
  Mode mode = Mode::kAsymptotic;
  Neighborhood nbhd;
  ClassKBound alpha;
  std::optional<ClassKBound> omega;
  ClassKBound beta;
  DictionarySpec v_dictionary, w_dictionary;
  SynthesisConfig solver;
  OutputSpec output;

  LyapunovTriplet Triplet() const;
  /// The system shifted so the equilibrium is the origin; throws
  /// NotAnEquilibrium otherwise.
  ShiftedField Field() const;
};

/// Parses and validates. Unknown keys are errors.
RunConfig ParseConfig(const nlohmann::json& doc);
/// Reads a JSON file; parse errors become ConfigError on "<file>".
RunConfig LoadConfig(const std::filesystem::path& path);
/// The resolved configuration, defaults included; ParseConfig(ToJson(c))
/// reproduces c.
nlohmann::json ToJson(const RunConfig& config);

}  // namespace lyapsip
