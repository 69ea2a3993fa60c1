#include "fheom/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fheom/correlators.hpp"
#include "fheom/lindblad.hpp"
#include "fheom/oracle.hpp"
#include "fheom/parallel.hpp"
#include "json.hpp"

namespace fheom::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// ---------------------------------------------------------------- parsing

class Reader {
 public:
  std::vector<std::string> issues;

  void issue(const std::string& path, const std::string& what) { issues.push_back(path + ": " + what); }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      issue(path, "expected an object");
      return false;
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
      if (!ok.contains(key)) issue(path + "/" + key, "unknown key");
    return true;
  }

  std::optional<double> number(const json& obj, const char* key, const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) issue(path + "/" + key, "missing required number");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      issue(path + "/" + key, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long long> integer(const json& obj, const char* key, const std::string& path,
                                   bool required) {
    if (!obj.contains(key)) {
      if (required) issue(path + "/" + key, "missing required integer");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
      issue(path + "/" + key, "expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::string> string(const json& obj, const char* key, const std::string& path,
                                    bool required) {
    if (!obj.contains(key)) {
      if (required) issue(path + "/" + key, "missing required string");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) {
      issue(path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<cplx> complex(const json& v, const std::string& path) {
    if (v.is_number()) return cplx{v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return cplx{v[0].get<double>(), v[1].get<double>()};
    issue(path, "expected a number or [re, im]");
    return std::nullopt;
  }

  std::optional<DenseMat> matrix(const json& v, const std::string& path, Eigen::Index dim) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
      issue(path, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
      return std::nullopt;
    }
    DenseMat m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto& row = v[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
        issue(path + "/" + std::to_string(r), "expected a row of length " + std::to_string(dim));
        return std::nullopt;
      }
      for (Eigen::Index c = 0; c < dim; ++c) {
        auto z = complex(row[static_cast<std::size_t>(c)], path + "/" + std::to_string(r) + "/" + std::to_string(c));
        if (!z) return std::nullopt;
        m(r, c) = *z;
      }
    }
    return m;
  }

  std::optional<OperatorSpec> operator_spec(const json& v, const std::string& path, int n_modes) {
    if (!object(v, path, {"mode", "dagger", "matrix"})) return std::nullopt;
    if (v.contains("matrix")) {
      if (v.contains("mode") || v.contains("dagger")) issue(path, "give either mode or matrix, not both");
      auto m = matrix(v.at("matrix"), path + "/matrix", Eigen::Index{1} << n_modes);
      if (!m) return std::nullopt;
      return OperatorSpec{*m};
    }
    const auto mode = integer(v, "mode", path, true);
    bool dagger = false;
    if (v.contains("dagger")) {
      if (!v.at("dagger").is_boolean())
        issue(path + "/dagger", "expected a boolean");
      else
        dagger = v.at("dagger").get<bool>();
    }
    if (!mode) return std::nullopt;
    if (*mode < 0 || *mode >= n_modes) {
      issue(path + "/mode", "mode " + std::to_string(*mode) + " out of range for " +
                                std::to_string(n_modes) + " system modes");
      return std::nullopt;
    }
    return OperatorSpec{ModeOperator{static_cast<int>(*mode), dagger}};
  }
};

void parse_system(Reader& r, const json& j, SystemConfig& sys) {
  const std::string path = "/system";
  if (!r.object(j, path, {"n_modes", "energies", "hoppings", "coupling", "initial_state"})) return;
  const auto n = r.integer(j, "n_modes", path, true);
  if (!n) return;
  if (*n < 1 || *n > 10) {
    r.issue(path + "/n_modes", "must be in [1, 10]");
    return;
  }
  sys.n_modes = static_cast<int>(*n);

  if (!j.contains("energies") || !j.at("energies").is_array() ||
      j.at("energies").size() != static_cast<std::size_t>(sys.n_modes)) {
    r.issue(path + "/energies", "expected an array of " + std::to_string(sys.n_modes) + " numbers");
  } else {
    sys.energies.clear();
    for (const auto& e : j.at("energies")) {
      if (!e.is_number()) {
        r.issue(path + "/energies", "entries must be numbers");
        break;
      }
      sys.energies.push_back(e.get<double>());
    }
  }

  sys.hoppings.clear();
  if (j.contains("hoppings")) {
    const auto& hs = j.at("hoppings");
    if (!hs.is_array()) r.issue(path + "/hoppings", "expected an array");
    for (std::size_t k = 0; hs.is_array() && k < hs.size(); ++k) {
      const std::string p = path + "/hoppings/" + std::to_string(k);
      if (!r.object(hs[k], p, {"from", "to", "amplitude"})) continue;
      const auto from = r.integer(hs[k], "from", p, true);
      const auto to = r.integer(hs[k], "to", p, true);
      std::optional<cplx> amp;
      if (!hs[k].contains("amplitude"))
        r.issue(p + "/amplitude", "missing required amplitude");
      else
        amp = r.complex(hs[k].at("amplitude"), p + "/amplitude");
      if (!from || !to || !amp) continue;
      if (*from < 0 || *from >= sys.n_modes || *to < 0 || *to >= sys.n_modes || *from == *to) {
        r.issue(p, "hopping must connect two distinct system modes");
        continue;
      }
      sys.hoppings.push_back({static_cast<int>(*from), static_cast<int>(*to), *amp});
    }
  }

  if (!j.contains("coupling")) {
    r.issue(path + "/coupling", "missing required coupling operator");
  } else if (auto s = r.operator_spec(j.at("coupling"), path + "/coupling", sys.n_modes)) {
    sys.coupling = *s;
  }

  if (!j.contains("initial_state")) {
    r.issue(path + "/initial_state", "missing required initial state");
    return;
  }
  const auto& init = j.at("initial_state");
  const std::string ip = path + "/initial_state";
  if (!r.object(init, ip, {"occupations", "matrix"})) return;
  if (init.contains("occupations") == init.contains("matrix")) {
    r.issue(ip, "give exactly one of occupations or matrix");
    return;
  }
  if (init.contains("matrix")) {
    if (auto m = r.matrix(init.at("matrix"), ip + "/matrix", Eigen::Index{1} << sys.n_modes))
      sys.initial_state = *m;
    return;
  }
  const auto& occ = init.at("occupations");
  if (!occ.is_array() || occ.size() != static_cast<std::size_t>(sys.n_modes)) {
    r.issue(ip + "/occupations", "expected one 0/1 entry per system mode");
    return;
  }
  std::vector<int> o;
  for (const auto& v : occ) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
      r.issue(ip + "/occupations", "entries must be 0 or 1");
      return;
    }
    o.push_back(v.get<int>());
  }
  sys.initial_state = o;
}

void parse_bath(Reader& r, const json& j, BathConfig& bath) {
  const std::string path = "/bath";
  if (!r.object(j, path, {"spectral_density", "beta", "mu", "n_matsubara"})) return;

  if (!j.contains("beta")) {
    r.issue(path + "/beta", "missing required inverse temperature (number or \"inf\")");
  } else if (const auto& b = j.at("beta"); b.is_string() && b.get<std::string>() == "inf") {
    bath.beta = InverseTemperature::zero_temperature();
  } else if (b.is_number() && b.get<double>() >= 0.0 && std::isfinite(b.get<double>())) {
    bath.beta = InverseTemperature::finite(b.get<double>());
  } else {
    r.issue(path + "/beta", "expected a non-negative number or \"inf\"");
  }
  bath.mu = r.number(j, "mu", path, false).value_or(0.0);
  if (const auto n = r.integer(j, "n_matsubara", path, false)) {
    if (*n < 1 || *n > 200)
      r.issue(path + "/n_matsubara", "must be in [1, 200]");
    else
      bath.n_matsubara = static_cast<int>(*n);
  }

  if (!j.contains("spectral_density")) {
    r.issue(path + "/spectral_density", "missing required spectral density");
    return;
  }
  const auto& sd = j.at("spectral_density");
  const std::string sp = path + "/spectral_density";
  if (!sd.is_object() || !sd.contains("type") || !sd.at("type").is_string()) {
    r.issue(sp, "expected an object with a string type");
    return;
  }
  const std::string type = sd.at("type").get<std::string>();
  if (type == "discrete") {
    if (!r.object(sd, sp, {"type", "modes"})) return;
    DiscreteModes d;
    if (!sd.contains("modes") || !sd.at("modes").is_array() || sd.at("modes").empty()) {
      r.issue(sp + "/modes", "expected a nonempty array of {coupling, energy}");
      return;
    }
    for (std::size_t k = 0; k < sd.at("modes").size(); ++k) {
      const auto& m = sd.at("modes")[k];
      const std::string mp = sp + "/modes/" + std::to_string(k);
      if (!r.object(m, mp, {"coupling", "energy"})) continue;
      const auto g = r.number(m, "coupling", mp, true);
      const auto w = r.number(m, "energy", mp, true);
      if (g && w) d.modes.push_back({*g, *w});
    }
    bath.density = d;
  } else if (type == "lorentzian") {
    if (!r.object(sd, sp, {"type", "gamma", "width", "center"})) return;
    const auto g = r.number(sd, "gamma", sp, true);
    const auto w = r.number(sd, "width", sp, true);
    const auto c = r.number(sd, "center", sp, false);
    if (g && *g < 0.0) r.issue(sp + "/gamma", "must be >= 0");
    if (w && *w <= 0.0) r.issue(sp + "/width", "must be > 0");
    if (g && w) bath.density = Lorentzian{*g, *w, c.value_or(0.0)};
  } else if (type == "flat") {
    if (!r.object(sd, sp, {"type", "gamma", "n0"})) return;
    const auto g = r.number(sd, "gamma", sp, true);
    const auto n0 = r.number(sd, "n0", sp, true);
    if (g && *g < 0.0) r.issue(sp + "/gamma", "must be >= 0");
    if (n0 && (*n0 < 0.0 || *n0 > 1.0)) r.issue(sp + "/n0", "must lie in [0, 1]");
    if (g && n0) bath.density = FlatBand{*g, *n0};
  } else {
    r.issue(sp + "/type", "unknown spectral density type '" + type +
                              "' (expected discrete, lorentzian or flat)");
  }
}

void parse_solver(Reader& r, const json& j, SolverConfig& s) {
  const std::string path = "/solver";
  if (!r.object(j, path, {"method", "depth", "rtol", "atol", "alpha", "hierarchy"})) return;
  if (const auto m = r.string(j, "method", path, false)) {
    if (*m == "heom")
      s.method = Method::heom;
    else if (*m == "lindblad")
      s.method = Method::lindblad;
    else if (*m == "oracle")
      s.method = Method::oracle;
    else
      r.issue(path + "/method", "unknown method '" + *m + "' (expected heom, lindblad or oracle)");
  }
  if (const auto d = r.integer(j, "depth", path, false)) {
    if (*d < 0)
      r.issue(path + "/depth", "must be >= 0");
    else
      s.depth = static_cast<std::size_t>(*d);
  }
  if (const auto v = r.number(j, "rtol", path, false)) {
    if (*v <= 0.0) r.issue(path + "/rtol", "must be > 0");
    s.rtol = *v;
  }
  if (const auto v = r.number(j, "atol", path, false)) {
    if (*v <= 0.0) r.issue(path + "/atol", "must be > 0");
    s.atol = *v;
  }
  if (j.contains("alpha")) {
    if (const auto a = r.complex(j.at("alpha"), path + "/alpha")) {
      if (*a == cplx{}) r.issue(path + "/alpha", "must be nonzero");
      s.alpha = *a;
    }
  }
  if (const auto h = r.string(j, "hierarchy", path, false)) {
    if (*h == "generalized")
      s.hierarchy = HierarchyMode::generalized;
    else if (*h == "even_standard")
      s.hierarchy = HierarchyMode::even_standard;
    else
      r.issue(path + "/hierarchy", "expected generalized or even_standard");
  }
}

void parse_time(Reader& r, const json& j, TimeGrid& t) {
  const std::string path = "/time";
  if (!r.object(j, path, {"t_final", "n_points"})) return;
  if (const auto v = r.number(j, "t_final", path, false)) {
    if (!(*v > 0.0)) r.issue(path + "/t_final", "must be > 0");
    t.t_final = *v;
  }
  if (const auto n = r.integer(j, "n_points", path, false)) {
    if (*n < 2 || *n > 10'000'000)
      r.issue(path + "/n_points", "must be in [2, 1e7]");
    else
      t.n_points = static_cast<std::size_t>(*n);
  }
}

void parse_thresholds(Reader& r, const json& j, VerifyThresholds& t) {
  const std::string path = "/task/thresholds";
  if (!r.object(j, path, {"heom_vs_exact", "trace", "reduction", "wick", "discrete_symmetry",
                          "matsubara_symmetry"}))
    return;
  auto set = [&](const char* key, double& field) {
    if (const auto v = r.number(j, key, path, false)) {
      if (!(*v > 0.0)) r.issue(path + "/" + key, "must be > 0");
      field = *v;
    }
  };
  set("heom_vs_exact", t.heom_vs_exact);
  set("trace", t.trace);
  set("reduction", t.reduction);
  set("wick", t.wick);
  set("discrete_symmetry", t.discrete_symmetry);
  set("matsubara_symmetry", t.matsubara_symmetry);
}

void parse_task(Reader& r, const json& j, int n_modes, Task& task) {
  const std::string path = "/task";
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    r.issue(path, "expected an object with a string type");
    return;
  }
  const std::string type = j.at("type").get<std::string>();
  auto ops = [&](OperatorSpec& a, OperatorSpec& b) {
    for (const char* key : {"A", "B"}) {
      if (!j.contains(key)) {
        r.issue(path + "/" + key, "missing required operator");
        continue;
      }
      if (auto op = r.operator_spec(j.at(key), path + "/" + key, n_modes))
        (std::string(key) == "A" ? a : b) = *op;
    }
  };
  if (type == "dynamics") {
    r.object(j, path, {"type"});
    task = DynamicsTask{};
  } else if (type == "correlation") {
    r.object(j, path, {"type", "A", "B"});
    CorrelationTask t;
    ops(t.a, t.b);
    task = t;
  } else if (type == "spectrum") {
    r.object(j, path, {"type", "A", "B", "omega", "damping_time"});
    SpectrumTask t;
    ops(t.a, t.b);
    if (j.contains("omega")) {
      const auto& w = j.at("omega");
      const std::string wp = path + "/omega";
      if (r.object(w, wp, {"min", "max", "n"})) {
        t.omega_min = r.number(w, "min", wp, false).value_or(t.omega_min);
        t.omega_max = r.number(w, "max", wp, false).value_or(t.omega_max);
        if (const auto n = r.integer(w, "n", wp, false)) {
          if (*n < 1)
            r.issue(wp + "/n", "must be >= 1");
          else
            t.n_omega = static_cast<std::size_t>(*n);
        }
        if (!(t.omega_max >= t.omega_min)) r.issue(wp, "max must be >= min");
      }
    }
    if (const auto d = r.number(j, "damping_time", path, false)) {
      if (!(*d > 0.0)) r.issue(path + "/damping_time", "must be > 0");
      t.damping_time = *d;
    }
    task = t;
  } else if (type == "verify") {
    r.object(j, path, {"type", "thresholds"});
    VerifyTask t;
    if (j.contains("thresholds")) parse_thresholds(r, j.at("thresholds"), t.thresholds);
    task = t;
  } else {
    r.issue(path + "/type", "unknown task '" + type +
                                "' (expected dynamics, correlation, spectrum or verify)");
  }
}

void cross_check(Reader& r, const RunConfig& c) {
  const bool flat = std::holds_alternative<FlatBand>(c.bath.density);
  const bool discrete = std::holds_alternative<DiscreteModes>(c.bath.density);
  const bool lorentz = std::holds_alternative<Lorentzian>(c.bath.density);
  switch (c.solver.method) {
    case Method::lindblad:
      if (!flat) r.issue("/solver/method", "lindblad needs a flat spectral density");
      break;
    case Method::heom: {
      if (flat) r.issue("/solver/method", "a flat band has no exponents; use method lindblad");
      const std::size_t k = exponent_count(c.bath);
      if (!flat && c.solver.depth > k)
        r.issue("/solver/depth", "depth " + std::to_string(c.solver.depth) + " exceeds the " +
                                     std::to_string(k) + " bath exponents");
      if (lorentz && c.bath.beta.is_zero_temperature())
        r.issue("/bath/beta", "the Matsubara decomposition needs a finite temperature");
      if (lorentz && !c.bath.beta.is_zero_temperature() && c.bath.beta.value() == 0.0)
        r.issue("/bath/beta", "the Matsubara decomposition needs beta > 0");
      break;
    }
    case Method::oracle:
      if (!discrete) {
        r.issue("/solver/method", "oracle needs a discrete spectral density");
      } else {
        const auto n = std::get<DiscreteModes>(c.bath.density).modes.size() +
                       static_cast<std::size_t>(c.system.n_modes);
        if (n > static_cast<std::size_t>(kMaxOracleModes))
          r.issue("/solver/method", "oracle is limited to " + std::to_string(kMaxOracleModes) +
                                        " total modes, config has " + std::to_string(n));
      }
      break;
  }
  if (std::holds_alternative<DenseMat>(c.system.coupling)) {
    const DenseMat& s = std::get<DenseMat>(c.system.coupling);
    if (parity_violation(s, Parity::odd) > 1e-12)
      r.issue("/system/coupling/matrix", "coupling operator must have odd parity");
  }
}

// ---------------------------------------------------------------- serialization

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const DenseMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json operator_json(const OperatorSpec& op) {
  return std::visit(overloaded{
                        [](const ModeOperator& m) { return json{{"mode", m.mode}, {"dagger", m.dagger}}; },
                        [](const DenseMat& m) { return json{{"matrix", matrix_json(m)}}; },
                    },
                    op);
}

json config_json(const RunConfig& c) {
  json sys{{"n_modes", c.system.n_modes}, {"energies", c.system.energies}};
  json hops = json::array();
  for (const auto& h : c.system.hoppings)
    hops.push_back({{"from", h.from}, {"to", h.to}, {"amplitude", complex_json(h.amplitude)}});
  sys["hoppings"] = hops;
  sys["coupling"] = operator_json(c.system.coupling);
  sys["initial_state"] = std::visit(
      overloaded{
          [](const std::vector<int>& o) { return json{{"occupations", o}}; },
          [](const DenseMat& m) { return json{{"matrix", matrix_json(m)}}; },
      },
      c.system.initial_state);

  json sd = std::visit(
      overloaded{
          [](const FlatBand& f) { return json{{"type", "flat"}, {"gamma", f.gamma}, {"n0", f.n0}}; },
          [](const Lorentzian& l) {
            return json{{"type", "lorentzian"}, {"gamma", l.gamma}, {"width", l.width}, {"center", l.center}};
          },
          [](const DiscreteModes& d) {
            json modes = json::array();
            for (const auto& m : d.modes) modes.push_back({{"coupling", m.coupling}, {"energy", m.energy}});
            return json{{"type", "discrete"}, {"modes", modes}};
          },
      },
      c.bath.density);
  json bath{{"spectral_density", sd},
            {"mu", c.bath.mu},
            {"n_matsubara", c.bath.n_matsubara}};
  if (c.bath.beta.is_zero_temperature())
    bath["beta"] = "inf";
  else
    bath["beta"] = c.bath.beta.value();

  const char* method = c.solver.method == Method::heom       ? "heom"
                       : c.solver.method == Method::lindblad ? "lindblad"
                                                             : "oracle";
  json solver{{"method", method},
              {"depth", c.solver.depth},
              {"rtol", c.solver.rtol},
              {"atol", c.solver.atol},
              {"alpha", complex_json(c.solver.alpha)},
              {"hierarchy", c.solver.hierarchy == HierarchyMode::generalized ? "generalized" : "even_standard"}};

  json task = std::visit(
      overloaded{
          [](const DynamicsTask&) { return json{{"type", "dynamics"}}; },
          [](const CorrelationTask& t) {
            return json{{"type", "correlation"}, {"A", operator_json(t.a)}, {"B", operator_json(t.b)}};
          },
          [](const SpectrumTask& t) {
            json j{{"type", "spectrum"},
                   {"A", operator_json(t.a)},
                   {"B", operator_json(t.b)},
                   {"omega", {{"min", t.omega_min}, {"max", t.omega_max}, {"n", t.n_omega}}}};
            if (t.damping_time) j["damping_time"] = *t.damping_time;
            return j;
          },
          [](const VerifyTask& t) {
            const auto& th = t.thresholds;
            return json{{"type", "verify"},
                        {"thresholds",
                         {{"heom_vs_exact", th.heom_vs_exact},
                          {"trace", th.trace},
                          {"reduction", th.reduction},
                          {"wick", th.wick},
                          {"discrete_symmetry", th.discrete_symmetry},
                          {"matsubara_symmetry", th.matsubara_symmetry}}}};
          },
      },
      c.task);

  return json{{"system", sys},
              {"bath", bath},
              {"solver", solver},
              {"time", {{"t_final", c.time.t_final}, {"n_points", c.time.n_points}}},
              {"task", task},
              {"output", c.output}};
}

// ---------------------------------------------------------------- execution

struct SystemModel {
  FockSpace space;
  FockOperator hamiltonian;
  FockOperator coupling;
  DenseMat rho0;
};

FockOperator make_operator(const FockSpace& space, const OperatorSpec& spec) {
  return std::visit(overloaded{
                        [&](const ModeOperator& m) {
                          return m.dagger ? creation_op(space, m.mode) : annihilation_op(space, m.mode);
                        },
                        [&](const DenseMat& m) { return FockOperator(space, m.sparseView(0.0, 0.0)); },
                    },
                    spec);
}

SystemModel make_system(const SystemConfig& cfg) {
  FockSpace space(cfg.n_modes);
  FockOperator h = quadratic_hamiltonian(space, cfg.energies, cfg.hoppings);
  FockOperator s = make_operator(space, cfg.coupling);
  DenseMat rho0 = std::visit(overloaded{
                                 [&](const std::vector<int>& o) { return occupation_state(space, o).matrix; },
                                 [](const DenseMat& m) { return m; },
                             },
                             cfg.initial_state);
  return {space, std::move(h), std::move(s), std::move(rho0)};
}

BathSpec bath_spec(const BathConfig& b) { return {b.density, b.beta, b.mu}; }

CorrelationDecomposition decomposition_for(const BathConfig& b) {
  const BathSpec spec = bath_spec(b);
  if (std::holds_alternative<DiscreteModes>(b.density)) return decompose_discrete(spec);
  if (std::holds_alternative<Lorentzian>(b.density)) return decompose_matsubara(spec, b.n_matsubara);
  fail(ErrorCode::invalid_argument, "a flat band has no exponential decomposition");
}

Hierarchy hierarchy_for(const RunConfig& c, const SystemModel& m) {
  return Hierarchy(decomposition_for(c.bath), m.coupling, m.hamiltonian,
                   {c.solver.depth, c.solver.hierarchy, c.solver.alpha});
}

IntegratorOptions integrator_for(const SolverConfig& s) {
  IntegratorOptions o;
  o.rtol = s.rtol;
  o.atol = s.atol;
  return o;
}

CompositeModel composite_for(const RunConfig& c, const SystemModel& m) {
  return CompositeModel(std::get<DiscreteModes>(c.bath.density).modes, m.hamiltonian, m.coupling,
                        c.bath.beta, c.bath.mu, m.rho0);
}

double trace_distance(const DenseMat& a, const DenseMat& b) {
  const DenseMat d = a - b;
  const Eigen::SelfAdjointEigenSolver<DenseMat> eig(0.5 * (d + d.adjoint()));
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + dir + "': " + ec.message());
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& content) {
  ensure_dir(dir);
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(ErrorCode::io, "failed writing '" + path + "'");
  return path;
}

std::string trajectory_csv(std::span<const double> times, const std::vector<DenseMat>& rho) {
  std::ostringstream os;
  const Eigen::Index d = rho.empty() ? 0 : rho.front().rows();
  os << "t";
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) os << ",re_" << r << "_" << c << ",im_" << r << "_" << c;
  os << "\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    os << fmt17(times[k]);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        os << "," << fmt17(rho[k](r, c).real()) << "," << fmt17(rho[k](r, c).imag());
    os << "\n";
  }
  return os.str();
}

std::string correlation_csv(const CorrelationResult& c) {
  std::ostringstream os;
  os << "t,re,im\n";
  for (std::size_t k = 0; k < c.times.size(); ++k)
    os << fmt17(c.times[k]) << "," << fmt17(c.values[k].real()) << "," << fmt17(c.values[k].imag()) << "\n";
  return os.str();
}

std::string spectrum_csv(const Spectrum& s) {
  std::ostringstream os;
  os << "omega,S\n";
  for (std::size_t k = 0; k < s.omega.size(); ++k) os << fmt17(s.omega[k]) << "," << fmt17(s.values[k]) << "\n";
  return os.str();
}

// Internal constants that shape results but are not config keys.
json fixed_parameters() {
  const IntegratorOptions defaults;
  return {{"integrator", {{"scheme", "Dormand-Prince 4(5), RMS error norm, fourth-order dense output"},
                          {"max_steps", defaults.max_steps}}},
          {"parity_tolerance", 1e-12},
          {"bath_quadrature", {{"rule", "Gauss-Kronrod 31, adaptive"}, {"tolerance", 1e-12}, {"failure_ratio", 1e-8}}},
          {"threads", worker_count()}};
}

json stats_json(const IntegratorStats& s) {
  return {{"accepted_steps", s.accepted}, {"rejected_steps", s.rejected}, {"rhs_calls", s.rhs_calls}};
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<DenseMat> dynamics(const RunConfig& c, const SystemModel& m, std::span<const double> times,
                               json& summary) {
  switch (c.solver.method) {
    case Method::heom: {
      const Hierarchy h = hierarchy_for(c, m);
      auto traj = evolve_heom(h, m.rho0, times, integrator_for(c.solver));
      summary["hierarchy"] = {{"ado_count", h.ado_count()}, {"exponents", h.exponent_count()}};
      summary["integrator"] = stats_json(traj.stats);
      return std::move(traj.rho);
    }
    case Method::lindblad: {
      const auto& f = std::get<FlatBand>(c.bath.density);
      return evolve_lindblad(LindbladGenerator(m.hamiltonian, m.coupling, f.gamma, f.n0), m.rho0, times);
    }
    case Method::oracle: {
      const CompositeModel model = composite_for(c, m);
      const ExactEvolution ex(model);
      std::vector<DenseMat> out;
      for (double t : times) out.push_back(reduce_parity_aware(model, ex.state(t)));
      return out;
    }
  }
  return {};
}

CorrelationResult correlation(const RunConfig& c, const SystemModel& m, const OperatorSpec& a_spec,
                              const OperatorSpec& b_spec, std::span<const double> times) {
  const FockOperator a = make_operator(m.space, a_spec);
  const FockOperator b = make_operator(m.space, b_spec);
  switch (c.solver.method) {
    case Method::heom:
      return system_correlation(a, b, hierarchy_for(c, m), m.rho0, times, integrator_for(c.solver));
    case Method::lindblad: {
      const auto& f = std::get<FlatBand>(c.bath.density);
      return system_correlation(a, b, LindbladGenerator(m.hamiltonian, m.coupling, f.gamma, f.n0),
                                m.rho0, times);
    }
    case Method::oracle: {
      const CompositeModel model = composite_for(c, m);
      const ExactEvolution ex(model);
      const DenseMat ag = model.embed_system(a).dense();
      const DenseMat start = model.embed_system(b).dense() * model.initial_state();
      CorrelationResult out{{times.begin(), times.end()}, {}, "oracle"};
      for (double t : times) out.values.push_back((ag * ex.evolve(start, t)).trace());
      return out;
    }
  }
  return {};
}

struct Check {
  std::string name;
  double residual;
  double threshold;
};

std::vector<Check> verification_suite(const RunConfig& c, const VerifyThresholds& th, json& details) {
  const SystemModel m = make_system(c.system);
  const auto times = c.time.points();
  std::vector<Check> checks;

  if (const auto* f = std::get_if<FlatBand>(&c.bath.density)) {
    const LindbladGenerator gen(m.hamiltonian, m.coupling, f->gamma, f->n0);
    const auto traj = evolve_lindblad(gen, m.rho0, times);
    double drift = 0.0, negativity = 0.0;
    for (const auto& rho : traj) {
      const DenseMat even = parity_project(rho, Parity::even);
      drift = std::max(drift, std::abs(even.trace() - m.rho0.trace()));
      const Eigen::SelfAdjointEigenSolver<DenseMat> eig(0.5 * (even + even.adjoint()));
      negativity = std::max(negativity, -eig.eigenvalues().minCoeff());
    }
    checks.push_back({"lindblad_even_trace", drift, th.trace});
    checks.push_back({"lindblad_positivity", negativity, th.trace});
    details["symmetries"] = "not applicable (flat band)";
    return checks;
  }

  const BathSpec spec = bath_spec(c.bath);
  const CorrelationDecomposition d = decomposition_for(c.bath);
  const SymmetryReport sym = check_decomposition_symmetries(d, spec);
  const bool discrete = std::holds_alternative<DiscreteModes>(c.bath.density);
  const double sym_th = discrete ? th.discrete_symmetry : th.matsubara_symmetry;
  checks.push_back({"symmetry_conjugation", sym.conjugation, sym_th});
  if (sym.kms >= 0.0) checks.push_back({"symmetry_kms", sym.kms, sym_th});
  if (sym.pairing >= 0.0) checks.push_back({"symmetry_pairing", sym.pairing, sym_th});

  const Hierarchy h(d, m.coupling, m.hamiltonian, {c.solver.depth, c.solver.hierarchy, c.solver.alpha});
  const auto traj = evolve_heom(h, m.rho0, times, integrator_for(c.solver));
  double trace_drift = 0.0;
  for (const auto& rho : traj.rho) trace_drift = std::max(trace_drift, std::abs(rho.trace() - m.rho0.trace()));
  checks.push_back({"heom_trace", trace_drift, th.trace});
  details["integrator"] = stats_json(traj.stats);

  if (!discrete) return checks;
  const auto& modes = std::get<DiscreteModes>(c.bath.density).modes;
  if (modes.size() + static_cast<std::size_t>(c.system.n_modes) <= static_cast<std::size_t>(kMaxOracleModes)) {
    const CompositeModel model = composite_for(c, m);
    const ExactEvolution ex(model);
    std::vector<DenseMat> exact(times.size());
    parallel_for(times.size(), [&](std::size_t k) { exact[k] = ex.state(times[k]); });

    double dist = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      dist = std::max(dist, trace_distance(traj.rho[k], reduce_parity_aware(model, exact[k])));
    checks.push_back({"heom_vs_exact", dist, th.heom_vs_exact});

    // Matrix units span all system operators, so this covers every observable.
    const DenseMat& rho_t = exact.back();
    const DenseMat reduced = reduce_parity_aware(model, rho_t);
    const Eigen::Index ds = model.sys_space().dim();
    double red = 0.0;
    for (Eigen::Index i = 0; i < ds; ++i)
      for (Eigen::Index j = 0; j < ds; ++j) {
        DenseMat unit = DenseMat::Zero(ds, ds);
        unit(i, j) = 1.0;
        const cplx local = (unit * reduced).trace();
        const cplx global = (model.embed_system(unit) * rho_t).trace();
        red = std::max(red, std::abs(local - global));
      }
    checks.push_back({"parity_aware_reduction", red, th.reduction});
  }

  if (modes.size() <= 4) {
    const BathCorrelator bc(modes, c.bath.beta, c.bath.mu);
    const double t4[4] = {1.3, 0.9, 0.4, 0.1};
    double wick = 0.0;
    for (int lam = 0; lam < 16; ++lam)
      for (int q = 0; q < 16; ++q) {
        SuperCorrelationQuery query;
        for (int i = 0; i < 4; ++i)
          query.push_back({bool((lam >> i) & 1), ((q >> i) & 1) ? Action::left : Action::right, t4[i]});
        wick = std::max(wick, std::abs(bc.super_correlation(query) - bc.wick_pairing_sum(query)));
      }
    checks.push_back({"wick_n4", wick, th.wick});
  }
  return checks;
}

RunReport finish(json summary, std::vector<std::string> artifacts, const std::string& dir, int exit_code) {
  summary["exit_code"] = exit_code;
  summary["fixed_parameters"] = fixed_parameters();
  summary["artifacts"] = artifacts;
  const std::string text = summary.dump(2) + "\n";
  artifacts.push_back(write_file(dir, "summary.json", text));
  return {exit_code, text, std::move(artifacts)};
}

json checks_json(const std::vector<Check>& checks, bool& all_pass) {
  json out = json::array();
  all_pass = true;
  for (const auto& ch : checks) {
    const bool pass = std::isfinite(ch.residual) && ch.residual <= ch.threshold;
    all_pass = all_pass && pass;
    out.push_back({{"name", ch.name}, {"residual", ch.residual}, {"threshold", ch.threshold}, {"passed", pass}});
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(ErrorCode::config,
            [&] {
              std::string s = "invalid configuration:";
              for (const auto& i : issues) s += "\n  " + i;
              return s;
            }()),
      issues_(std::move(issues)) {}

std::vector<double> TimeGrid::points() const {
  std::vector<double> t(n_points);
  for (std::size_t k = 0; k < n_points; ++k)
    t[k] = t_final * static_cast<double>(k) / static_cast<double>(n_points - 1);
  return t;
}

std::size_t exponent_count(const BathConfig& bath) {
  if (const auto* d = std::get_if<DiscreteModes>(&bath.density)) return 2 * d->modes.size();
  if (std::holds_alternative<Lorentzian>(bath.density))
    return 2 * (1 + static_cast<std::size_t>(bath.n_matsubara));
  return 0;
}

RunConfig parse_config_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("/: not valid JSON: ") + e.what()});
  }
  Reader r;
  RunConfig c;
  if (!r.object(doc, "", {"system", "bath", "solver", "time", "task", "output"})) throw ConfigError(r.issues);
  if (doc.contains("system"))
    parse_system(r, doc.at("system"), c.system);
  else
    r.issue("/system", "missing required block");
  if (doc.contains("bath"))
    parse_bath(r, doc.at("bath"), c.bath);
  else
    r.issue("/bath", "missing required block");
  if (doc.contains("solver")) parse_solver(r, doc.at("solver"), c.solver);
  if (doc.contains("time")) parse_time(r, doc.at("time"), c.time);
  if (doc.contains("task"))
    parse_task(r, doc.at("task"), c.system.n_modes, c.task);
  else
    r.issue("/task", "missing required block");
  if (const auto out = r.string(doc, "output", "", false)) {
    if (out->empty())
      r.issue("/output", "must be a nonempty path");
    else
      c.output = *out;
  }
  if (r.issues.empty()) cross_check(r, c);
  if (!r.issues.empty()) throw ConfigError(r.issues);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str());
}

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2); }

RunReport run(const RunConfig& c) {
  if (std::holds_alternative<VerifyTask>(c.task)) return verify(c);
  const auto t0 = Clock::now();
  const SystemModel m = make_system(c.system);
  const auto times = c.time.points();
  json summary{{"command", "run"}, {"config", config_json(c)}};
  std::vector<std::string> artifacts;

  std::visit(overloaded{
                 [&](const DynamicsTask&) {
                   const auto traj = dynamics(c, m, times, summary);
                   double trace_drift = 0.0;
                   for (const auto& rho : traj)
                     trace_drift = std::max(trace_drift, std::abs(rho.trace() - m.rho0.trace()));
                   summary["trace_drift"] = trace_drift;
                   artifacts.push_back(write_file(c.output, "trajectory.csv", trajectory_csv(times, traj)));
                 },
                 [&](const CorrelationTask& t) {
                   const auto corr = correlation(c, m, t.a, t.b, times);
                   artifacts.push_back(write_file(c.output, "correlation.csv", correlation_csv(corr)));
                 },
                 [&](const SpectrumTask& t) {
                   const auto corr = correlation(c, m, t.a, t.b, times);
                   std::vector<double> omega(t.n_omega);
                   for (std::size_t k = 0; k < t.n_omega; ++k)
                     omega[k] = t.n_omega == 1 ? t.omega_min
                                               : t.omega_min + (t.omega_max - t.omega_min) * k / (t.n_omega - 1.0);
                   const Spectrum s = spectrum(corr, omega, t.damping_time);
                   summary["spectrum"] = {
                       {"normalization", "S(w) = 2 Re int_0^T exp(i w t) C(t) W(t) dt, trapezoid rule"},
                       {"window", t.damping_time ? "exp(-t/damping_time)" : "none"},
                       {"t_max", s.t_max}};
                   if (t.damping_time) summary["spectrum"]["damping_time"] = *t.damping_time;
                   artifacts.push_back(write_file(c.output, "correlation.csv", correlation_csv(corr)));
                   artifacts.push_back(write_file(c.output, "spectrum.csv", spectrum_csv(s)));
                 },
                 [](const VerifyTask&) {},
             },
             c.task);
  summary["timings_seconds"] = {{"total", seconds_since(t0)}};
  return finish(std::move(summary), std::move(artifacts), c.output, 0);
}

RunReport verify(const RunConfig& c) {
  const auto t0 = Clock::now();
  const VerifyThresholds th =
      std::holds_alternative<VerifyTask>(c.task) ? std::get<VerifyTask>(c.task).thresholds : VerifyThresholds{};
  json summary{{"command", "verify"}, {"config", config_json(c)}};
  json details = json::object();
  const auto checks = verification_suite(c, th, details);
  bool all_pass = true;
  summary["checks"] = checks_json(checks, all_pass);
  summary["details"] = details;
  summary["thresholds"] = {{"heom_vs_exact", th.heom_vs_exact}, {"trace", th.trace},
                           {"reduction", th.reduction}, {"wick", th.wick},
                           {"discrete_symmetry", th.discrete_symmetry},
                           {"matsubara_symmetry", th.matsubara_symmetry}};
  summary["passed"] = all_pass;
  summary["timings_seconds"] = {{"total", seconds_since(t0)}};
  return finish(std::move(summary), {}, c.output, all_pass ? 0 : 2);
}

RunReport decompose(const RunConfig& c) {
  const auto t0 = Clock::now();
  const CorrelationDecomposition d = decomposition_for(c.bath);
  std::vector<std::string> artifacts{write_file(c.output, "decomposition.json", decomposition_to_json(d) + "\n")};
  const SymmetryReport sym = check_decomposition_symmetries(d, bath_spec(c.bath));
  json summary{{"command", "decompose"},
               {"config", config_json(c)},
               {"exponent_count", d.exponents.size()},
               {"symmetry_residuals",
                {{"conjugation", sym.conjugation}, {"kms", sym.kms}, {"pairing", sym.pairing}, {"samples", sym.samples}}}};
  summary["timings_seconds"] = {{"total", seconds_since(t0)}};
  return finish(std::move(summary), std::move(artifacts), c.output, 0);
}

}  // namespace fheom::cli
