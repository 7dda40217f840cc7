#include "lyapsip/artifacts.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace lyapsip {

using nlohmann::json;

namespace {

json Num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json Vec(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(Num(v[i]));
  return out;
}

json Vec(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(Num(x));
  return out;
}

json DictionaryJson(const Dictionary& dict) {
  json keys = json::array(), terms = json::array();
  for (const auto& b : dict) {
    keys.push_back(b.Key());
    terms.push_back(b.ToString());
  }
  return {{"keys", keys}, {"terms", terms}};
}

json ResidualJson(const ResidualMin& r) {
  return {{"min", Num(r.value)},
          {"argmin", Vec(r.argmin)},
          {"grid_min", Num(r.grid_value)},
          {"grid_argmin", Vec(r.grid_argmin)}};
}

// Coefficients over `dict` from an array or a key -> value object.
std::vector<double> ReadCoefficients(const json& v, const Dictionary& dict,
                                     const std::string& field) {
  std::vector<double> out(dict.size(), 0.0);
  if (v.is_array()) {
    if (v.size() != dict.size()) {
      throw ConfigError(field, "has " + std::to_string(v.size()) +
                                   " entries, the dictionary has " +
                                   std::to_string(dict.size()));
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(field + "[" + std::to_string(i) + "]", "expected a number");
      }
      out[i] = v[i].get<double>();
    }
    return out;
  }
  if (!v.is_object()) throw ConfigError(field, "expected an array or a key -> value object");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < dict.size(); ++i) index[dict[i].Key()] = i;
  for (const auto& [key, value] : v.items()) {
    const auto it = index.find(key);
    if (it == index.end()) throw ConfigError(field + "." + key, "not in the dictionary");
    if (!value.is_number()) throw ConfigError(field + "." + key, "expected a number");
    out[it->second] = value.get<double>();
  }
  return out;
}

void CheckDictionary(const json& doc, const std::string& member, const Dictionary& dict) {
  if (!doc.contains(member)) return;
  const json& d = doc.at(member);
  if (!d.is_object() || !d.contains("keys") || !d.at("keys").is_array()) {
    throw ConfigError(member, "expected an object with a \"keys\" array");
  }
  std::vector<std::string> keys;
  for (const auto& k : d.at("keys")) {
    if (!k.is_string()) throw ConfigError(member + ".keys", "expected strings");
    keys.push_back(k.get<std::string>());
  }
  std::vector<std::string> expected;
  for (const auto& b : dict) expected.push_back(b.Key());
  if (keys != expected) {
    throw ConfigError(member, "certificate dictionary does not match the config dictionary");
  }
}

Polynomial ReadPolynomial(const json& v, int dim) {
  const std::string field = "original_polynomial";
  if (!v.is_array()) throw ConfigError(field, "expected an array of {exponents, coefficient}");
  Polynomial p(dim);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = field + "[" + std::to_string(i) + "]";
    const json& t = v[i];
    if (!t.is_object() || !t.contains("exponents") || !t.contains("coefficient")) {
      throw ConfigError(at, "expected {exponents, coefficient}");
    }
    const json& e = t.at("exponents");
    if (!e.is_array() || static_cast<int>(e.size()) != dim) {
      throw ConfigError(at + ".exponents", "expected " + std::to_string(dim) + " integers");
    }
    std::vector<int> exps;
    for (const auto& x : e) {
      if (!x.is_number_integer() || x.get<int>() < 0) {
        throw ConfigError(at + ".exponents", "expected nonnegative integers");
      }
      exps.push_back(x.get<int>());
    }
    if (!t.at("coefficient").is_number()) {
      throw ConfigError(at + ".coefficient", "expected a number");
    }
    p.AddTerm(exps, t.at("coefficient").get<double>());
  }
  return p;
}

}  // namespace

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json ReportJson(const VerificationReport& r) {
  json out = {{"verdict", VerdictName(r.verdict)},
              {"tol", r.tol},
              {"violation", Num(r.violation)},
              {"c1", ResidualJson(r.c1)},
              {"c2", ResidualJson(r.c2)},
              {"margin_from_beta", r.margin_from_beta},
              {"grid_points", r.grid_points},
              {"de_population", r.de_population},
              {"de_generations", r.de_generations},
              {"note", r.note}};
  out["c3"] = r.c3 ? ResidualJson(*r.c3) : json(nullptr);
  return out;
}

json CertificateJson(const RunConfig& config, const SynthesisResult& run) {
  const LyapunovTriplet t = config.Triplet();
  json seeds = json::array();
  for (const auto& r : run.anneal.runs) seeds.push_back(r.seed);
  json samples = json::array();
  for (const auto& s : run.best_samples) samples.push_back(Vec(s));
  json checks = json::array();
  for (const auto& c : run.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", Num(c.value)},
                      {"detail", c.detail}});
  }
  json restart_values = json::array();
  for (const auto& r : run.anneal.runs) restart_values.push_back(Num(r.value));

  json doc = {{"format", kCertificateFormat},
              {"name", config.name},
              {"mode", ModeName(config.mode)},
              {"outcome", OutcomeName(run.outcome)},
              {"has_certificate", run.has_certificate},
              {"v_dictionary", DictionaryJson(t.v_dict)},
              {"w_dictionary", DictionaryJson(t.w_dict)}};
  if (run.has_certificate) {
    doc["lambda"] = Vec(run.cert.lambda);
    doc["mu"] = Vec(run.cert.mu);
    doc["objective_value"] = Num(run.cert.objective_value);
    doc["relaxed_value"] = Num(run.cert.relaxed_value);
    doc["value_gap"] = Num(run.value_gap);
    doc["verification"] = ReportJson(run.report);
  }
  doc["provenance"] = {{"seed", config.solver.anneal.seed},
                       {"restart_seeds", seeds},
                       {"restart_values", restart_values},
                       {"best_restart", run.anneal.best_restart},
                       {"iterations", config.solver.anneal.max_iterations},
                       {"restarts", config.solver.anneal.restarts},
                       {"sample_count", run.sample_count}};
  doc["traces"] = "convergence.csv";
  doc["samples"] = samples;
  doc["theorem_checks"] = checks;
  doc["message"] = run.message;
  doc["config"] = ToJson(config);
  return doc;
}

LoadedCertificate ParseCertificate(const json& doc, const std::filesystem::path& base_dir,
                                   const RunConfig* config) {
  if (!doc.is_object()) throw ConfigError("<certificate>", "expected an object");
  if (doc.contains("format") && doc.at("format") != kCertificateFormat) {
    throw ConfigError("format", std::string("expected \"") + kCertificateFormat + "\"");
  }
  LoadedCertificate out;
  if (config) {
    out.config = *config;
  } else if (!doc.contains("config")) {
    throw ConfigError("config", "certificate has no embedded config; pass --config");
  } else if (doc.at("config").is_string()) {
    out.config = LoadConfig(base_dir / doc.at("config").get<std::string>());
  } else {
    out.config = ParseConfig(doc.at("config"));
  }
  const LyapunovTriplet t = out.config.Triplet();
  if (doc.contains("mode")) {
    if (!doc.at("mode").is_string()) throw ConfigError("mode", "expected a string");
    if (doc.at("mode").get<std::string>() != ModeName(t.mode)) {
      throw ConfigError("mode", "certificate mode " + doc.at("mode").get<std::string>() +
                                    " differs from config mode " + ModeName(t.mode));
    }
  }
  CheckDictionary(doc, "v_dictionary", t.v_dict);
  CheckDictionary(doc, "w_dictionary", t.w_dict);

  Certificate& c = out.cert;
  c.mode = t.mode;
  const bool has_lambda = doc.contains("lambda") && !doc.at("lambda").is_null();
  const bool has_poly = doc.contains("original_polynomial");
  if (has_lambda == has_poly) {
    throw ConfigError("lambda", "give exactly one of \"lambda\" or \"original_polynomial\"");
  }
  if (has_lambda) {
    c.lambda = ReadCoefficients(doc.at("lambda"), t.v_dict, "lambda");
  } else {
    const Polynomial p = ReadPolynomial(doc.at("original_polynomial"), t.dim());
    Recentered r;
    try {
      r = RecenterPolynomial(p, out.config.equilibrium, t.v_dict);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("original_polynomial", e.what());
    }
    if (r.max_outside > 1e-9) {
      throw ConfigError("original_polynomial",
                        "has terms outside the V dictionary after recentring (largest " +
                            FormatNumber(r.max_outside) + ")");
    }
    c.lambda = r.lambda;
    out.equilibrium_value = r.equilibrium_value;
    out.from_original = true;
  }
  if (doc.contains("mu") && !doc.at("mu").is_null() &&
      !(doc.at("mu").is_array() && doc.at("mu").empty())) {
    c.mu = ReadCoefficients(doc.at("mu"), t.w_dict, "mu");
  }
  if (doc.contains("objective_value") && doc.at("objective_value").is_number()) {
    c.objective_value = doc.at("objective_value").get<double>();
  }
  if (doc.contains("relaxed_value") && doc.at("relaxed_value").is_number()) {
    c.relaxed_value = doc.at("relaxed_value").get<double>();
  }
  if (doc.contains("provenance") && doc.at("provenance").is_object()) {
    const json& p = doc.at("provenance");
    if (p.contains("seed") && p.at("seed").is_number_unsigned()) c.seed = p.at("seed");
    if (p.contains("iterations") && p.at("iterations").is_number_integer()) {
      c.iterations = p.at("iterations");
    }
    if (p.contains("restarts") && p.at("restarts").is_number_integer()) {
      c.restarts = p.at("restarts");
    }
  }
  try {
    c.CheckAgainst(t);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("lambda", e.what());
  }
  return out;
}

LoadedCertificate LoadCertificate(const std::filesystem::path& path, const RunConfig* config) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return ParseCertificate(doc, path.parent_path(), config);
}

std::string ConvergenceCsv(const AnnealResult& anneal) {
  std::ostringstream out;
  out << "iteration,best_score\n";
  if (anneal.runs.empty()) return out.str();
  const auto& trace = anneal.runs[anneal.best_restart].trace;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i + 1 << ',' << FormatNumber(trace[i]) << '\n';
  }
  return out.str();
}

std::string CurvesCsv(const std::vector<SphereRow>& rows) {
  std::ostringstream out;
  out << "r,min_V,alpha,max_dVdt,neg_beta\n";
  for (const auto& r : rows) {
    out << FormatNumber(r.r) << ',' << FormatNumber(r.min_v) << ',' << FormatNumber(r.alpha)
        << ',' << FormatNumber(r.max_vdot) << ',' << FormatNumber(r.neg_beta) << '\n';
  }
  return out.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void WriteJsonFile(const std::filesystem::path& path, const json& doc) {
  WriteTextFile(path, doc.dump(2) + "\n");
}

}  // namespace lyapsip
