#include "lyapsip/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lyapsip {

using nlohmann::json;

namespace {

// A JSON object being read under a dotted path; remembers which keys were
// consumed so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(Where(), "expected an object");
  }

  std::string Sub(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  std::string Where() const { return path_.empty() ? "<root>" : path_; }

  bool Has(const std::string& key) const {
    return node_.contains(key) && !node_.at(key).is_null();
  }

  const json& Get(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) throw ConfigError(Sub(key), "required field is missing");
    return node_.at(key);
  }

  const json* Find(const std::string& key) {
    seen_.insert(key);
    if (!Has(key)) return nullptr;
    return &node_.at(key);
  }

  double Number(const std::string& key, std::optional<double> fallback = {}) {
    const json* v = Find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError(Sub(key), "required field is missing");
    }
    if (!v->is_number()) throw ConfigError(Sub(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(Sub(key), "must be finite");
    return d;
  }

  long long Integer(const std::string& key, long long fallback) {
    const json* v = Find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(Sub(key), "expected an integer");
    return v->get<long long>();
  }

  int Int(const std::string& key, int fallback, int lo) {
    const long long v = Integer(key, fallback);
    if (v < lo || v > std::numeric_limits<int>::max()) {
      throw ConfigError(Sub(key), "must be an integer >= " + std::to_string(lo));
    }
    return static_cast<int>(v);
  }

  std::uint64_t Seed(const std::string& key, std::uint64_t fallback) {
    const json* v = Find(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<long long>() >= 0) return v->get<long long>();
    throw ConfigError(Sub(key), "expected a nonnegative integer");
  }

  bool Bool(const std::string& key, bool fallback) {
    const json* v = Find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(Sub(key), "expected true or false");
    return v->get<bool>();
  }

  std::string String(const std::string& key, std::optional<std::string> fallback = {}) {
    const json* v = Find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError(Sub(key), "required field is missing");
    }
    if (!v->is_string()) throw ConfigError(Sub(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> Numbers(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_array()) throw ConfigError(Sub(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string at = Sub(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) throw ConfigError(at, "expected a number");
      out.push_back(v[i].get<double>());
      if (!std::isfinite(out.back())) throw ConfigError(at, "must be finite");
    }
    return out;
  }

  std::vector<int> Ints(const std::string& key) {
    const json* v = Find(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(Sub(key), "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string at = Sub(key) + "[" + std::to_string(i) + "]";
      if (!(*v)[i].is_number_integer()) throw ConfigError(at, "expected an integer");
      const long long x = (*v)[i].get<long long>();
      if (std::abs(x) > 1000) throw ConfigError(at, "out of range");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

  void Done() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ConfigError(Sub(key), "unknown field");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

SystemSpec ParseSystem(Reader& root) {
  Reader r(root.Get("system"), "system");
  SystemSpec s;
  const bool builtin = r.Has("builtin"), external = r.Has("external");
  if (builtin == external) {
    throw ConfigError("system", "give exactly one of \"builtin\" or \"external\"");
  }
  if (builtin) {
    s.builtin = r.String("builtin");
    try {
      s.params = BuiltinDefaults(s.builtin);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("system.builtin", e.what());
    }
    if (const json* p = r.Find("params")) {
      if (!p->is_object()) throw ConfigError("system.params", "expected an object");
      for (const auto& [key, value] : p->items()) {
        const std::string at = "system.params." + key;
        if (!s.params.count(key)) {
          throw ConfigError(at, "builtin '" + s.builtin + "' has no such parameter");
        }
        if (!value.is_number() || !std::isfinite(value.get<double>())) {
          throw ConfigError(at, "expected a finite number");
        }
        s.params[key] = value.get<double>();
      }
    }
  } else {
    Reader e(r.Get("external"), "system.external");
    s.external_command = e.String("command");
    if (s.external_command.empty()) throw ConfigError("system.external.command", "is empty");
    s.external_dim = e.Int("dim", 0, 1);
    e.Done();
  }
  r.Done();
  return s;
}

Neighborhood ParseNeighborhood(Reader& root, int dim) {
  Reader r(root.Get("neighborhood"), "neighborhood");
  const bool ball = r.Has("ball"), box = r.Has("box");
  if (ball == box) {
    throw ConfigError("neighborhood", "give exactly one of \"ball\" or \"box\"");
  }
  Neighborhood n;
  if (ball) {
    Reader b(r.Get("ball"), "neighborhood.ball");
    const double radius = b.Number("radius");
    if (!(radius > 0.0)) throw ConfigError("neighborhood.ball.radius", "must be > 0");
    b.Done();
    n = Neighborhood::Ball(dim, radius);
  } else {
    Reader b(r.Get("box"), "neighborhood.box");
    const std::vector<double> lo = b.Numbers("lo"), hi = b.Numbers("hi");
    if (static_cast<int>(lo.size()) != dim) {
      throw ConfigError("neighborhood.box.lo", "expected " + std::to_string(dim) + " entries");
    }
    if (static_cast<int>(hi.size()) != dim) {
      throw ConfigError("neighborhood.box.hi", "expected " + std::to_string(dim) + " entries");
    }
    for (int i = 0; i < dim; ++i) {
      if (!(lo[i] < hi[i])) {
        throw ConfigError("neighborhood.box", "lo[" + std::to_string(i) + "] must be < hi[" +
                                                  std::to_string(i) + "]");
      }
    }
    b.Done();
    n = Neighborhood::Box(Eigen::Map<const Vector>(lo.data(), dim),
                          Eigen::Map<const Vector>(hi.data(), dim));
  }
  r.Done();
  return n;
}

std::optional<ClassKBound> ParseBound(Reader& root, const std::string& key, bool required) {
  const json* v = root.Find(key);
  if (!v) {
    if (required) throw ConfigError(key, "required field is missing");
    return std::nullopt;
  }
  if (v->is_string()) {
    if (v->get<std::string>() == "zero") return ClassKBound::Zero();
    throw ConfigError(key, "expected \"zero\" or {coefficient, power}");
  }
  Reader r(*v, key);
  const double c = r.Number("coefficient");
  const double p = r.Number("power");
  r.Done();
  if (!(c > 0.0)) throw ConfigError(key + ".coefficient", "must be > 0 (use \"zero\")");
  if (!(p > 0.0)) throw ConfigError(key + ".power", "must be > 0");
  return ClassKBound::Power(c, p);
}

DictionarySpec ParseDictionary(Reader& root, const std::string& key) {
  DictionarySpec d;
  const json* v = root.Find(key);
  if (!v) return d;
  Reader r(*v, key);
  d.monomial_degrees = r.Ints("monomial_degrees");
  d.cosine_frequencies = r.Ints("cosine_frequencies");
  r.Done();
  for (std::size_t i = 0; i < d.monomial_degrees.size(); ++i) {
    if (d.monomial_degrees[i] < 1) {
      throw ConfigError(key + ".monomial_degrees[" + std::to_string(i) + "]",
                        "degree must be >= 1 (dictionary elements vanish at the origin)");
    }
  }
  for (std::size_t i = 0; i < d.cosine_frequencies.size(); ++i) {
    if (d.cosine_frequencies[i] < 0) {
      throw ConfigError(key + ".cosine_frequencies[" + std::to_string(i) + "]",
                        "frequency must be >= 0");
    }
  }
  return d;
}

BoundaryMode ParseBoundary(const std::string& s, const std::string& at) {
  if (s == "reflect") return BoundaryMode::kReflect;
  if (s == "clamp") return BoundaryMode::kClamp;
  throw ConfigError(at, "expected \"reflect\" or \"clamp\"");
}

std::string BoundaryName(BoundaryMode m) {
  return m == BoundaryMode::kReflect ? "reflect" : "clamp";
}

PolishMode ParsePolish(const std::string& s, const std::string& at) {
  if (s == "none") return PolishMode::kNone;
  if (s == "final") return PolishMode::kFinal;
  if (s == "on-improvement") return PolishMode::kOnImprovement;
  throw ConfigError(at, "expected \"none\", \"final\" or \"on-improvement\"");
}

std::string PolishName(PolishMode m) {
  switch (m) {
    case PolishMode::kNone: return "none";
    case PolishMode::kFinal: return "final";
    case PolishMode::kOnImprovement: return "on-improvement";
  }
  return "on-improvement";
}

void ParseDe(Reader& r, DeConfig& de) {
  de.population = r.Int("population", de.population, 0);
  de.generations = r.Int("generations", de.generations, 0);
  de.tol = r.Number("tol", de.tol);
  de.atol = r.Number("atol", de.atol);
  de.mutation_lo = r.Number("mutation_lo", de.mutation_lo);
  de.mutation_hi = r.Number("mutation_hi", de.mutation_hi);
  de.crossover = r.Number("crossover", de.crossover);
  de.seed = r.Seed("seed", de.seed);
  de.polish = r.Bool("polish", de.polish);
}

json DeJson(const DeConfig& de) {
  return {{"population", de.population}, {"generations", de.generations},
          {"tol", de.tol},               {"atol", de.atol},
          {"mutation_lo", de.mutation_lo}, {"mutation_hi", de.mutation_hi},
          {"crossover", de.crossover},   {"seed", de.seed},
          {"polish", de.polish}};
}

SynthesisConfig ParseSolver(Reader& root, int decision_dim) {
  SynthesisConfig s;
  const json* v = root.Find("solver");
  if (!v) return s;
  Reader r(*v, "solver");
  if (const json* a = r.Find("anneal")) {
    Reader ar(*a, "solver.anneal");
    AnnealConfig& c = s.anneal;
    c.max_iterations = ar.Int("iterations", c.max_iterations, 1);
    c.restarts = ar.Int("restarts", c.restarts, 1);
    c.seed = ar.Seed("seed", c.seed);
    c.initial_temp = ar.Number("initial_temp", c.initial_temp);
    c.restart_temp_ratio = ar.Number("restart_temp_ratio", c.restart_temp_ratio);
    c.visiting_param = ar.Number("visiting_param", c.visiting_param);
    c.accept_param = ar.Number("accept_param", c.accept_param);
    c.chain_length = ar.Int("chain_length", c.chain_length, 0);
    c.boundary = ParseBoundary(ar.String("boundary", BoundaryName(c.boundary)),
                               "solver.anneal.boundary");
    c.polish = ParsePolish(ar.String("polish", PolishName(c.polish)), "solver.anneal.polish");
    c.polish_config.initial_step = ar.Number("polish_initial_step", c.polish_config.initial_step);
    c.polish_config.min_step = ar.Number("polish_min_step", c.polish_config.min_step);
    c.polish_config.max_evaluations =
        ar.Int("polish_max_evaluations", c.polish_config.max_evaluations, 0);
    c.threads = ar.Int("threads", c.threads, 0);
    ar.Done();
    try {
      c.Validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("solver.anneal", e.what());
    }
  }
  if (const json* e = r.Find("exchange")) {
    Reader er(*e, "solver.exchange");
    ExchangeConfig& c = s.exchange;
    c.enabled = er.Bool("enabled", c.enabled);
    c.candidates = er.Int("candidates", c.candidates, 0);
    c.memory_limit_mb = er.Int("memory_limit_mb", static_cast<int>(c.memory_limit_mb), 1);
    c.max_exchanges = er.Int("max_exchanges", c.max_exchanges, 0);
    c.slots_tried = er.Int("slots_tried", c.slots_tried, 1);
    c.tol = er.Number("tol", c.tol);
    c.de_seed_points = er.Int("de_seed_points", c.de_seed_points, 0);
    if (const json* d = er.Find("de")) {
      Reader dr(*d, "solver.exchange.de");
      ParseDe(dr, c.de);
      dr.Done();
    }
    er.Done();
  }
  if (const json* q = r.Find("qp")) {
    Reader qr(*q, "solver.qp");
    s.qp.feasibility_tol = qr.Number("feasibility_tol", s.qp.feasibility_tol);
    s.qp.kkt_tol = qr.Number("kkt_tol", s.qp.kkt_tol);
    s.qp.max_iterations = qr.Int("max_iterations", s.qp.max_iterations, 1);
    qr.Done();
    if (!(s.qp.feasibility_tol > 0.0)) throw ConfigError("solver.qp.feasibility_tol", "must be > 0");
    if (!(s.qp.kkt_tol > 0.0)) throw ConfigError("solver.qp.kkt_tol", "must be > 0");
  }
  if (const json* vv = r.Find("verify")) {
    Reader vr(*vv, "solver.verify");
    s.verify.grid_points = vr.Int("grid_points", s.verify.grid_points, 0);
    s.verify.tol = vr.Number("tol", s.verify.tol);
    s.verify.de_seed_points = vr.Int("de_seed_points", s.verify.de_seed_points, 0);
    if (const json* d = vr.Find("de")) {
      Reader dr(*d, "solver.verify.de");
      ParseDe(dr, s.verify.de);
      dr.Done();
    }
    vr.Done();
    if (!(s.verify.tol >= 0.0)) throw ConfigError("solver.verify.tol", "must be >= 0");
  }
  s.sample_count = r.Int("sample_count", 0, 0);
  if (const json* a = r.Find("anchor")) {
    if (!a->is_array()) throw ConfigError("solver.anchor", "expected an array of numbers");
    const std::vector<double> anchor = r.Numbers("anchor");
    if (!anchor.empty() && static_cast<int>(anchor.size()) != decision_dim) {
      throw ConfigError("solver.anchor", "expected " + std::to_string(decision_dim) +
                                             " entries (q + m)");
    }
    s.anchor = anchor;
  }
  s.grid_feasibility_tol = r.Number("grid_feasibility_tol", s.grid_feasibility_tol);
  r.Done();
  return s;
}

json BoundJson(const ClassKBound& b) {
  if (b.is_zero()) return "zero";
  return {{"coefficient", b.coefficient()}, {"power", b.power()}};
}

json DictJson(const DictionarySpec& d) {
  return {{"monomial_degrees", d.monomial_degrees},
          {"cosine_frequencies", d.cosine_frequencies}};
}

}  // namespace

VectorField SystemSpec::Make() const {
  if (!builtin.empty()) return MakeBuiltin(builtin, params);
  return MakeExternalProcessField(external_command, external_dim);
}

int SystemSpec::dim() const {
  if (!builtin.empty()) return MakeBuiltin(builtin, params).dim();
  return external_dim;
}

Dictionary DictionarySpec::Make(int dim) const {
  Dictionary d;
  if (!monomial_degrees.empty()) d = MonomialDictionary(dim, monomial_degrees);
  if (!cosine_frequencies.empty()) {
    for (auto& b : CosineDictionary(dim, cosine_frequencies)) d.push_back(b);
  }
  return d;
}

LyapunovTriplet RunConfig::Triplet() const {
  LyapunovTriplet t;
  t.nbhd = nbhd;
  t.alpha = alpha;
  t.omega = omega;
  t.beta = beta;
  t.v_dict = v_dictionary.Make(nbhd.dim());
  t.w_dict = w_dictionary.Make(nbhd.dim());
  t.mode = mode;
  return t;
}

ShiftedField RunConfig::Field() const {
  return ShiftToEquilibrium(system.Make(), equilibrium);
}

RunConfig ParseConfig(const json& doc) {
  Reader root(doc, "");
  RunConfig c;
  c.name = root.String("name", std::string("run"));
  c.system = ParseSystem(root);
  const int dim = c.system.dim();

  if (root.Has("equilibrium")) {
    const std::vector<double> eq = root.Numbers("equilibrium");
    if (static_cast<int>(eq.size()) != dim) {
      throw ConfigError("equilibrium", "expected " + std::to_string(dim) + " entries");
    }
    c.equilibrium = Eigen::Map<const Vector>(eq.data(), dim);
  } else {
    root.Find("equilibrium");
    c.equilibrium = Vector::Zero(dim);
  }

  try {
    c.mode = ParseMode(root.String("mode", std::string("asymptotic")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mode", e.what());
  }
  c.nbhd = ParseNeighborhood(root, dim);
  try {
    c.nbhd.Validate(c.mode);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("neighborhood", e.what());
  }

  c.alpha = *ParseBound(root, "alpha", true);
  c.omega = ParseBound(root, "omega", false);
  const auto beta = ParseBound(root, "beta", false);
  c.beta = beta ? *beta : ClassKBound::Zero();
  c.v_dictionary = ParseDictionary(root, "v_dictionary");
  c.w_dictionary = ParseDictionary(root, "w_dictionary");
  if (c.v_dictionary.empty()) throw ConfigError("v_dictionary", "must list at least one element");

  const LyapunovTriplet t = c.Triplet();
  try {
    t.Validate();
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    std::string field = "mode";
    if (msg.find("alpha") != std::string::npos) {
      field = "alpha";
    } else if (msg.find("beta") != std::string::npos) {
      field = "beta";
    } else if (msg.find("W dictionary") != std::string::npos ||
               msg.rfind("dictionary W", 0) == 0) {
      field = "w_dictionary";
    } else if (msg.rfind("dictionary V", 0) == 0) {
      field = "v_dictionary";
    }
    throw ConfigError(field, msg);
  }

  c.solver = ParseSolver(root, t.decision_dim());
  if (const json* o = root.Find("output")) {
    Reader r(*o, "output");
    c.output.dir = r.String("dir", c.output.dir);
    c.output.curves = r.Int("curves", c.output.curves, 0);
    r.Done();
  }
  root.Done();
  return c;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return ParseConfig(doc);
}

json ToJson(const RunConfig& c) {
  json system;
  if (!c.system.builtin.empty()) {
    json params = json::object();
    for (const auto& [k, v] : c.system.params) params[k] = v;
    system = {{"builtin", c.system.builtin}, {"params", params}};
  } else {
    system = {{"external", {{"command", c.system.external_command}, {"dim", c.system.external_dim}}}};
  }
  json nbhd;
  if (c.nbhd.kind() == Neighborhood::Kind::kBall) {
    nbhd = {{"ball", {{"radius", c.nbhd.radius()}}}};
  } else {
    std::vector<double> lo(c.nbhd.lo().data(), c.nbhd.lo().data() + c.nbhd.dim());
    std::vector<double> hi(c.nbhd.hi().data(), c.nbhd.hi().data() + c.nbhd.dim());
    nbhd = {{"box", {{"lo", lo}, {"hi", hi}}}};
  }
  const SynthesisConfig& s = c.solver;
  const AnnealConfig& a = s.anneal;
  json anneal = {{"iterations", a.max_iterations},
                 {"restarts", a.restarts},
                 {"seed", a.seed},
                 {"initial_temp", a.initial_temp},
                 {"restart_temp_ratio", a.restart_temp_ratio},
                 {"visiting_param", a.visiting_param},
                 {"accept_param", a.accept_param},
                 {"chain_length", a.chain_length},
                 {"boundary", BoundaryName(a.boundary)},
                 {"polish", PolishName(a.polish)},
                 {"polish_initial_step", a.polish_config.initial_step},
                 {"polish_min_step", a.polish_config.min_step},
                 {"polish_max_evaluations", a.polish_config.max_evaluations},
                 {"threads", a.threads}};
  const ExchangeConfig& e = s.exchange;
  json exchange = {{"enabled", e.enabled},
                   {"candidates", e.candidates},
                   {"memory_limit_mb", e.memory_limit_mb},
                   {"max_exchanges", e.max_exchanges},
                   {"slots_tried", e.slots_tried},
                   {"tol", e.tol},
                   {"de_seed_points", e.de_seed_points},
                   {"de", DeJson(e.de)}};
  json qp = {{"feasibility_tol", s.qp.feasibility_tol},
             {"kkt_tol", s.qp.kkt_tol},
             {"max_iterations", s.qp.max_iterations}};
  json verify = {{"grid_points", s.verify.grid_points},
                 {"tol", s.verify.tol},
                 {"de_seed_points", s.verify.de_seed_points},
                 {"de", DeJson(s.verify.de)}};
  json solver = {{"anneal", anneal},        {"exchange", exchange},
                 {"qp", qp},                {"verify", verify},
                 {"sample_count", s.sample_count},
                 {"grid_feasibility_tol", s.grid_feasibility_tol}};
  if (!s.anchor.empty()) solver["anchor"] = s.anchor;

  std::vector<double> eq(c.equilibrium.data(), c.equilibrium.data() + c.equilibrium.size());
  json out = {{"name", c.name},
              {"system", system},
              {"equilibrium", eq},
              {"mode", ModeName(c.mode)},
              {"neighborhood", nbhd},
              {"alpha", BoundJson(c.alpha)},
              {"beta", BoundJson(c.beta)},
              {"v_dictionary", DictJson(c.v_dictionary)},
              {"w_dictionary", DictJson(c.w_dictionary)},
              {"solver", solver},
              {"output", {{"dir", c.output.dir}, {"curves", c.output.curves}}}};
  if (c.omega) out["omega"] = BoundJson(*c.omega);
  return out;
}

}  // namespace lyapsip
