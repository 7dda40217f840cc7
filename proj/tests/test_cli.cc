#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "lyapsip/artifacts.h"
#include "lyapsip/commands.h"
#include "lyapsip/config.h"

using namespace lyapsip;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kSource = LYAPSIP_SOURCE_DIR;

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lyapsip_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json Read(const fs::path& p) { return json::parse(Slurp(p)); }

void Write(const fs::path& p, const json& doc) { WriteJsonFile(p, doc); }

json PlanarConfig(const fs::path& out) {
  json c = Read(kSource / "configs/planar2d_20.json");
  c["output"]["dir"] = out.string();
  c["solver"] = {{"anneal", {{"restarts", 2}}}};
  return c;
}

struct Run {
  int code;
  std::string out, err;
};

template <class F>
Run Call(F cmd, const CommandOptions& o) {
  std::ostringstream out, err;
  const int code = cmd(o, out, err);
  return {code, out.str(), err.str()};
}

int Shell(const std::string& args) {
  const std::string cmd = std::string(LYAPSIP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bundled configs parse and round-trip through the resolved form") {
  for (const auto& entry : fs::directory_iterator(kSource / "configs")) {
    if (entry.path().extension() != ".json") continue;
    const RunConfig c = LoadConfig(entry.path());
    const json resolved = ToJson(c);
    CHECK_MESSAGE(ToJson(ParseConfig(resolved)) == resolved, entry.path().string());
  }
}

TEST_CASE("malformed configs name the offending field") {
  const json base = Read(kSource / "configs/vanderpol.json");
  struct Case {
    std::string field;
    std::function<void(json&)> edit;
  };
  const std::vector<Case> cases = {
      {"v_dictionary.monomial_degrees[0]", [](json& c) { c["v_dictionary"]["monomial_degrees"][0] = 0; }},
      {"solver.anneal.restart", [](json& c) { c["solver"] = {{"anneal", {{"restart", 3}}}}; }},
      {"neighborhood.ball.radius", [](json& c) { c["neighborhood"]["ball"]["radius"] = -1; }},
      {"alpha.power", [](json& c) { c["alpha"]["power"] = "two"; }},
      {"system.params.eps", [](json& c) { c["system"]["params"] = {{"eps", 1}}; }},
      {"beta", [](json& c) { c["beta"] = "zero"; }},
      {"colour", [](json& c) { c["colour"] = "blue"; }},
      {"system.builtin", [](json& c) { c["system"]["builtin"] = "lorenz"; }},
  };
  for (const auto& k : cases) {
    json c = base;
    k.edit(c);
    try {
      ParseConfig(c);
      FAIL("accepted a malformed config for " << k.field);
    } catch (const ConfigError& e) {
      CHECK(e.field() == k.field);
    }
  }
}

TEST_CASE("synth writes three files, records the seed and round-trips into verify") {
  const fs::path dir = Scratch("synth");
  Write(dir / "config.json", PlanarConfig(dir / "out"));
  CommandOptions o;
  o.config = (dir / "config.json").string();
  o.seed = 987654321;
  const Run r = Call(CmdSynth, o);
  REQUIRE_MESSAGE(r.code == kExitOk, r.out << r.err);
  for (const char* f : {"certificate.json", "convergence.csv", "report.json"}) {
    CHECK(fs::exists(dir / "out" / f));
  }
  const json cert = Read(dir / "out/certificate.json");
  CHECK(cert["provenance"]["seed"] == 987654321u);
  CHECK(cert["config"]["solver"]["anneal"]["seed"] == 987654321u);
  CHECK(cert["outcome"] == "certified");
  const std::string csv = Slurp(dir / "out/convergence.csv");
  CHECK(csv.rfind("iteration,best_score\n", 0) == 0);

  CommandOptions v;
  v.cert = (dir / "out/certificate.json").string();
  v.out = (dir / "verify").string();
  const Run vr = Call(CmdVerify, v);
  CHECK_MESSAGE(vr.code == kExitOk, vr.out << vr.err);
  CHECK(fs::exists(dir / "verify/curves.csv"));
}

TEST_CASE("emitted files are byte reproducible") {
  const fs::path dir = Scratch("repro");
  Write(dir / "config.json", PlanarConfig(dir / "a"));
  CommandOptions o;
  o.config = (dir / "config.json").string();
  REQUIRE(Call(CmdSynth, o).code == kExitOk);
  o.out = (dir / "b").string();
  REQUIRE(Call(CmdSynth, o).code == kExitOk);
  for (const char* f : {"certificate.json", "convergence.csv", "report.json"}) {
    std::string a = Slurp(dir / "a" / f), b = Slurp(dir / "b" / f);
    // The embedded config records the output directory; normalise it.
    const std::string da = (dir / "a").string(), db = (dir / "b").string();
    for (auto p = b.find(db); p != std::string::npos; p = b.find(db, p)) b.replace(p, db.size(), da);
    CHECK_MESSAGE(a == b, f);
  }
}

TEST_CASE("verify exit codes") {
  const fs::path dir = Scratch("verify");
  CommandOptions o;
  o.out = dir.string();
  o.cert = (kSource / "configs/certificates/whirling_published.json").string();
  CHECK(Call(CmdVerify, o).code == kExitOk);

  json flipped = Read(kSource / "configs/certificates/vanderpol_published.json");
  flipped["config"] = (kSource / "configs/vanderpol.json").string();
  flipped["lambda"]["m:2,0"] = -1.106;
  Write(dir / "flipped.json", flipped);
  o.cert = (dir / "flipped.json").string();
  const Run r = Call(CmdVerify, o);
  CHECK(r.code == kExitNegative);
  CHECK(r.out.find("worst violation") != std::string::npos);

  o.cert = (dir / "missing.json").string();
  CHECK(Call(CmdVerify, o).code == kExitInputError);

  json mismatch = flipped;
  mismatch["lambda"] = {1.0, 0.0, 1.0};
  mismatch["v_dictionary"] = {{"keys", {"m:2,0", "m:0,2", "m:1,1"}}};
  Write(dir / "mismatch.json", mismatch);
  o.cert = (dir / "mismatch.json").string();
  CHECK(Call(CmdVerify, o).code == kExitInputError);

  json unknown = flipped;
  unknown["lambda"] = {{"m:3,0", 1.0}};
  Write(dir / "unknown.json", unknown);
  o.cert = (dir / "unknown.json").string();
  CHECK(Call(CmdVerify, o).code == kExitInputError);

  json bare = flipped;
  bare.erase("config");
  Write(dir / "bare.json", bare);
  o.cert = (dir / "bare.json").string();
  const Run nb = Call(CmdVerify, o);
  CHECK(nb.code == kExitInputError);
  o.config = (kSource / "configs/vanderpol.json").string();
  CHECK(Call(CmdVerify, o).code == kExitNegative);
}

TEST_CASE("curves: counts, lists and rejected radii") {
  const fs::path dir = Scratch("curves");
  CommandOptions o;
  o.out = dir.string();
  o.cert = (kSource / "configs/certificates/vanderpol_published.json").string();
  o.radii = "50";
  REQUIRE(Call(CmdCurves, o).code == kExitOk);
  std::istringstream csv(Slurp(dir / "curves.csv"));
  std::string header, line;
  std::getline(csv, header);
  CHECK(header == "r,min_V,alpha,max_dVdt,neg_beta");
  int rows = 0;
  double last_r = 0.0;
  while (std::getline(csv, line)) {
    ++rows;
    const double r = std::stod(line.substr(0, line.find(',')));
    CHECK(r > last_r);
    last_r = r;
  }
  CHECK(rows == 50);
  CHECK(last_r == doctest::Approx(0.5));

  o.radii = "0.1, 0.25,0.5";
  CHECK(Call(CmdCurves, o).code == kExitOk);
  o.radii = " ";
  CHECK(Call(CmdCurves, o).code == kExitInputError);
  o.radii = "0.1,0.7";
  CHECK(Call(CmdCurves, o).code == kExitInputError);
  o.radii = "0,0.2";
  CHECK(Call(CmdCurves, o).code == kExitInputError);
  CHECK_THROWS_AS(ParseRadii("abc", 1.0), ConfigError);
}

TEST_CASE("binary exit codes") {
  const fs::path dir = Scratch("binary");
  CHECK(Shell("--help") == 0);
  CHECK(Shell("") == kExitInputError);
  CHECK(Shell("synth") == kExitInputError);
  CHECK(Shell("synth --config " + (dir / "nope.json").string()) == kExitInputError);
  json bad = Read(kSource / "configs/vanderpol.json");
  bad["v_dictionary"]["monomial_degrees"] = {0, 2};
  Write(dir / "bad.json", bad);
  CHECK(Shell("synth --config " + (dir / "bad.json").string()) == kExitInputError);
  CHECK(Shell("verify --cert " + (kSource / "configs/certificates/chetaev_published.json").string() +
              " --out " + dir.string()) == kExitOk);
  CHECK(Shell("synth --config " + (kSource / "configs/planar2d_unstable.json").string() +
              " --restarts 1 --out " + (dir / "unstable").string()) == kExitNegative);
  const json cert = Read(dir / "unstable/certificate.json");
  CHECK(cert["outcome"] == "not-found");
}

}  // TEST_SUITE
