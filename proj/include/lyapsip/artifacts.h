#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyapsip/config.h"
#include "lyapsip/synthesis.h"
#include "lyapsip/verifier.h"

namespace lyapsip {

inline constexpr const char* kCertificateFormat = "lyapsip-certificate/1";

/// A certificate read from disk together with the run it belongs to.
struct LoadedCertificate {
  RunConfig config;
  Certificate cert;
  /// V(0) of the recentred polynomial when the coefficients were given in
  /// original coordinates; 0 otherwise.
  double equilibrium_value = 0.0;
  bool from_original = false;
};

/// Full certificate document: run outcome, coefficients, provenance, the
/// verification summary, theorem checks and the resolved config.
nlohmann::json CertificateJson(const RunConfig& config, const SynthesisResult& run);

nlohmann::json ReportJson(const VerificationReport& report);

/// Parses a certificate document. The config is taken from `config` when
/// given, otherwise from the embedded "config" member (an object, or a path
/// relative to `base_dir`). Coefficients come from "lambda" (an array, or an
/// object keyed by dictionary key, missing keys meaning 0) or from
/// "original_polynomial" (monomial dictionaries only). A stored dictionary
/// that differs from the config's raises ConfigError.
LoadedCertificate ParseCertificate(const nlohmann::json& doc,
                                   const std::filesystem::path& base_dir,
                                   const RunConfig* config = nullptr);
LoadedCertificate LoadCertificate(const std::filesystem::path& path,
                                  const RunConfig* config = nullptr);

/// `iteration,best_score` for the best restart.
std::string ConvergenceCsv(const AnnealResult& anneal);
/// `r,min_V,alpha,max_dVdt,neg_beta`.
std::string CurvesCsv(const std::vector<SphereRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string FormatNumber(double v);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);
/// Indented, newline-terminated.
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace lyapsip
