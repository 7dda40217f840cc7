#include "lyapsip/commands.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "lyapsip/artifacts.h"
#include "lyapsip/config.h"
#include "lyapsip/synthesis.h"
#include "lyapsip/verifier.h"

namespace lyapsip {

namespace fs = std::filesystem;

namespace {

void ApplyOverrides(const CommandOptions& opts, RunConfig& c) {
  if (opts.seed) c.solver.anneal.seed = *opts.seed;
  if (opts.restarts) {
    if (*opts.restarts < 1) throw ConfigError("--restarts", "must be >= 1");
    c.solver.anneal.restarts = *opts.restarts;
  }
  if (opts.grid) {
    if (*opts.grid < 1) throw ConfigError("--grid", "must be >= 1");
    c.solver.verify.grid_points = *opts.grid;
  }
  if (!opts.out.empty()) c.output.dir = opts.out;
}

LoadedCertificate LoadForVerify(const CommandOptions& opts) {
  if (opts.cert.empty()) throw ConfigError("--cert", "a certificate path is required");
  std::optional<RunConfig> config;
  if (!opts.config.empty()) config = LoadConfig(opts.config);
  LoadedCertificate lc = LoadCertificate(opts.cert, config ? &*config : nullptr);
  ApplyOverrides(opts, lc.config);
  return lc;
}

std::vector<double> EvenRadii(int count, double r_max) {
  std::vector<double> r;
  for (int i = 1; i <= count; ++i) r.push_back(r_max * i / count);
  return r;
}

void PrintResidual(std::ostream& out, const char* name, const ResidualMin& r) {
  out << "  min " << name << " = " << FormatNumber(r.value) << " at [";
  for (Eigen::Index i = 0; i < r.argmin.size(); ++i) {
    out << (i ? ", " : "") << FormatNumber(r.argmin[i]);
  }
  out << "]\n";
}

void PrintReport(std::ostream& out, const VerificationReport& r) {
  out << "verdict: " << VerdictName(r.verdict) << " (tol " << FormatNumber(r.tol) << ", "
      << r.grid_points << " grid points, DE " << r.de_population << " x "
      << r.de_generations << ")\n";
  PrintResidual(out, "C1", r.c1);
  PrintResidual(out, "C2", r.c2);
  if (r.c3) PrintResidual(out, "C3", *r.c3);
  if (r.verdict != Verdict::kVerified) {
    out << "  worst violation " << FormatNumber(r.violation) << "\n";
  }
  if (!r.note.empty()) out << "  note: " << r.note << "\n";
}

template <class F>
int Guard(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

}  // namespace

std::vector<double> ParseRadii(const std::string& spec, double r_max) {
  std::string s = spec;
  for (char& ch : s) {
    if (ch == ',' || ch == ';') ch = ' ';
  }
  std::istringstream in(s);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  if (tokens.empty()) throw ConfigError("radii", "no radii given");

  if (tokens.size() == 1 && tokens[0].find_first_not_of("0123456789") == std::string::npos) {
    int count = 0;
    const auto r = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), count);
    if (r.ec != std::errc() || count < 1) throw ConfigError("radii", "count must be >= 1");
    return EvenRadii(count, r_max);
  }
  std::vector<double> radii;
  for (const auto& t : tokens) {
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
      throw ConfigError("radii", "not a number: '" + t + "'");
    }
    if (!(v > 0.0) || v > r_max * (1.0 + 1e-12)) {
      throw ConfigError("radii", "radius " + t + " lies outside (0, " + FormatNumber(r_max) + "]");
    }
    radii.push_back(v);
  }
  return radii;
}

int CmdSynth(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    if (opts.config.empty()) throw ConfigError("--config", "a config path is required");
    RunConfig c = LoadConfig(opts.config);
    ApplyOverrides(opts, c);
    const LyapunovTriplet t = c.Triplet();
    const ShiftedField field = c.Field();

    const SynthesisResult run = Synthesize(t, field.field(), c.solver);
    const fs::path dir = c.output.dir;
    WriteJsonFile(dir / "certificate.json", CertificateJson(c, run));
    WriteTextFile(dir / "convergence.csv", ConvergenceCsv(run.anneal));
    if (run.has_certificate) WriteJsonFile(dir / "report.json", ReportJson(run.report));

    out << c.name << ": " << OutcomeName(run.outcome) << "\n";
    if (!run.anneal.runs.empty()) {
      out << "best outer score " << FormatNumber(run.anneal.value) << " (restart "
          << run.anneal.best_restart << " of " << run.anneal.runs.size() << ")\n";
    }
    if (run.has_certificate) {
      out << "V =";
      for (std::size_t i = 0; i < t.v_dict.size(); ++i) {
        out << (i ? " + " : " ") << FormatNumber(run.cert.lambda[i]) << "*"
            << t.v_dict[i].ToString();
      }
      out << "\n";
      PrintReport(out, run.report);
    }
    for (const auto& ch : run.checks) {
      out << "  check " << ch.name << ": " << (ch.pass ? "pass" : "FAIL") << " ("
          << ch.detail << ")\n";
    }
    out << run.message << "\n";
    out << "wrote " << (dir / "certificate.json").string() << "\n";
    return run.outcome == Outcome::kCertified ? kExitOk : kExitNegative;
  });
}

int CmdVerify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    LoadedCertificate lc = LoadForVerify(opts);
    const RunConfig& c = lc.config;
    const LyapunovTriplet t = c.Triplet();
    const ShiftedField field = c.Field();
    const fs::path dir = c.output.dir;

    if (lc.from_original) {
      out << "V(eq) in original coordinates = " << FormatNumber(lc.equilibrium_value) << "\n";
    }
    const VerificationReport report = Verify(t, field.field(), lc.cert, c.solver.verify);
    WriteJsonFile(dir / "report.json", ReportJson(report));
    std::vector<double> radii;
    if (!opts.radii.empty()) {
      radii = ParseRadii(opts.radii, t.nbhd.MaxNorm());
    } else if (c.output.curves > 0) {
      radii = EvenRadii(c.output.curves, t.nbhd.MaxNorm());
    }
    if (!radii.empty()) {
      WriteTextFile(dir / "curves.csv",
                    CurvesCsv(SphereCurves(t, field.field(), lc.cert, radii, c.solver.verify.de)));
    }
    out << c.name << ": ";
    PrintReport(out, report);
    out << "wrote " << (dir / "report.json").string() << "\n";
    return report.verdict == Verdict::kVerified ? kExitOk : kExitNegative;
  });
}

int CmdCurves(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    LoadedCertificate lc = LoadForVerify(opts);
    const RunConfig& c = lc.config;
    const LyapunovTriplet t = c.Triplet();
    const ShiftedField field = c.Field();
    const std::string spec = opts.radii.empty() ? std::to_string(c.output.curves) : opts.radii;
    if (spec == "0") throw ConfigError("radii", "no radii given");
    const std::vector<double> radii = ParseRadii(spec, t.nbhd.MaxNorm());
    const auto rows = SphereCurves(t, field.field(), lc.cert, radii, c.solver.verify.de);
    const fs::path path = fs::path(c.output.dir) / "curves.csv";
    WriteTextFile(path, CurvesCsv(rows));
    out << "wrote " << rows.size() << " rows to " << path.string() << "\n";
    return kExitOk;
  });
}

}  // namespace lyapsip
