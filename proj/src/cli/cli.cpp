#include "qmb/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include "qmb/entanglement.hpp"
#include "qmb/gcs.hpp"
#include "qmb/liecore.hpp"
#include "qmb/meanfield.hpp"
#include "qmb/models.hpp"
#include "qmb/spectral.hpp"

namespace qmb::cli {
namespace {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { Int, Real, Str };

using Check = std::function<std::string(const json&)>;

struct Param {
  std::string name;
  Kind kind;
  json def;  // null: no default
  bool required;
  std::string help;
  Check check;
};

struct Artifact {
  std::string suffix;
  std::string content;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  std::function<void(const json&, std::vector<std::string>&)> cross;
  std::function<std::string(const json&)> plan;
  std::function<std::vector<Artifact>(const json&)> execute;
};

// ---------------------------------------------------------------- checks

Check positive() {
  return [](const json& v) { return v.get<double>() > 0 ? "" : "must be positive"; };
}
Check non_negative() {
  return [](const json& v) { return v.get<double>() >= 0 ? "" : "must be non-negative"; };
}
Check in_range(double lo, double hi) {
  return [lo, hi](const json& v) {
    const double x = v.get<double>();
    if (x >= lo && x <= hi) return std::string();
    std::ostringstream s;
    s << "must lie in [" << lo << ", " << hi << "]";
    return s.str();
  };
}

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Int: return "integer";
    case Kind::Real: return "number";
    default: return "string";
  }
}

// ------------------------------------------------------------ coercion

std::optional<json> from_string(const std::string& s, Kind k) {
  try {
    std::size_t pos = 0;
    if (k == Kind::Int) {
      const long long v = std::stoll(s, &pos);
      if (pos == s.size()) return json(v);
      return std::nullopt;
    }
    if (k == Kind::Real) {
      const double v = std::stod(s, &pos);
      if (pos == s.size() && std::isfinite(v)) return json(v);
      return std::nullopt;
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return json(s);
}

std::optional<json> from_config(const json& v, Kind k) {
  if (k == Kind::Int && v.is_number_integer()) return v;
  if (k == Kind::Real && v.is_number() && std::isfinite(v.get<double>())) return json(v.get<double>());
  if (k == Kind::Str && v.is_string()) return v;
  return std::nullopt;
}

json toml_to_json(const toml::node& n) {
  if (const auto* t = n.as_table()) {
    json j = json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (const auto* a = n.as_array()) {
    json j = json::array();
    for (const auto& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (const auto* v = n.as_integer()) return json(v->get());
  if (const auto* v = n.as_floating_point()) return json(v->get());
  if (const auto* v = n.as_boolean()) return json(v->get());
  if (const auto* v = n.as_string()) return json(v->get());
  throw ConfigError("unsupported TOML value type");
}

json parse_config_text(const std::string& text, bool is_json) {
  if (is_json) {
    try {
      json j = json::parse(text);
      if (!j.is_object()) throw ConfigError("config root must be an object");
      return j;
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
  }
  try {
    return toml_to_json(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream s;
    s << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(s.str());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_json_path(const std::string& path) { return std::filesystem::path(path).extension() == ".json"; }

// defaults <- config <- command line
json resolve(const Command& c, const json& config, const std::map<std::string, std::string>& flags,
             std::vector<std::string>& violations) {
  json p = json::object();
  std::set<std::string> mistyped;
  for (const Param& q : c.params)
    if (!q.def.is_null()) p[q.name] = q.def;
  for (const auto& [k, v] : config.items()) {
    if (k == "subcommand") continue;
    auto it = std::find_if(c.params.begin(), c.params.end(), [&](const Param& q) { return q.name == k; });
    if (it == c.params.end()) {
      violations.push_back("unknown key '" + k + "'");
      continue;
    }
    if (auto x = from_config(v, it->kind)) {
      p[k] = *x;
    } else {
      violations.push_back("key '" + k + "': expected " + kind_name(it->kind));
      mistyped.insert(k);
    }
  }
  for (const auto& [k, v] : flags) {
    const auto& q = *std::find_if(c.params.begin(), c.params.end(), [&](const Param& q) { return q.name == k; });
    if (auto x = from_string(v, q.kind)) {
      p[k] = *x;
      mistyped.erase(k);
    } else {
      violations.push_back("--" + k + ": expected " + kind_name(q.kind) + ", got '" + v + "'");
      mistyped.insert(k);
    }
  }
  bool typed = mistyped.empty();
  for (const Param& q : c.params) {
    if (!p.contains(q.name)) {
      if (q.required && !mistyped.count(q.name)) {
        violations.push_back("missing required key '" + q.name + "'");
        typed = false;
      }
      continue;
    }
    if (q.check) {
      const std::string msg = q.check(p[q.name]);
      if (!msg.empty()) {
        violations.push_back("key '" + q.name + "' " + msg);
        typed = false;
      }
    }
  }
  if (typed && violations.empty() && c.cross) c.cross(p, violations);
  return p;
}

// ------------------------------------------------------------- helpers

std::vector<double> grid(double lo, double hi, int steps) {
  std::vector<double> g;
  for (int i = 0; i < steps; ++i) g.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  return g;
}

json inline_or_file(const std::string& v, const std::string& what) {
  try {
    if (!v.empty() && (v.front() == '[' || v.front() == '{')) return json::parse(v);
    return json::parse(read_file(v));
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

AlgebraSpec load_algebra(const std::string& v) {
  const auto colon = v.find(':');
  const std::string head = v.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : v.substr(colon + 1);
  auto number = [&](Kind k) {
    auto x = from_string(arg, k);
    if (!x) throw ConfigError("algebra '" + v + "': bad argument");
    return *x;
  };
  try {
    if (head == "su2" && colon != std::string::npos) return su2(number(Kind::Real).get<double>());
    if (head == "su2_pauli") return su2_pauli();
    if (head == "su3") return su3();
    if (head == "su4") return su4_two_qubit();
    if (head == "u" && colon != std::string::npos) return uN(number(Kind::Int).get<int>());
    if (head == "local_su2" && colon != std::string::npos) return local_su2(number(Kind::Int).get<int>());
    return algebra_from_json(read_file(v));
  } catch (const std::runtime_error& e) {
    throw ConfigError("algebra '" + v + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("algebra '" + v + "': " + e.what());
  }
}

RVec real_vector(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ConfigError(what + ": expected an array of " + std::to_string(dim) + " numbers");
  RVec v(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw ConfigError(what + ": entry " + std::to_string(i) + " is not a number");
    v[i] = j[i].get<double>();
  }
  return v;
}

CVec complex_vector(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ConfigError(what + ": expected an array of " + std::to_string(dim) + " entries");
  CVec v(dim);
  for (int i = 0; i < dim; ++i) {
    if (j[i].is_number())
      v[i] = j[i].get<double>();
    else if (j[i].is_array() && j[i].size() == 2 && j[i][0].is_number() && j[i][1].is_number())
      v[i] = cplx(j[i][0].get<double>(), j[i][1].get<double>());
    else
      throw ConfigError(what + ": entry " + std::to_string(i) + " must be a number or [re, im]");
  }
  return v;
}

json vector_json(const RVec& v) {
  json j = json::array();
  for (double x : v) j.push_back(x);
  return j;
}

// ------------------------------------------------------------ commands

Param out_param(const std::string& def) {
  return {"out", Kind::Str, def, false, "output path prefix", nullptr};
}

Command fano_spectrum_cmd() {
  Command c;
  c.name = "fano-spectrum";
  c.help = "Spectrum of the Fano-Anderson model from the one-ancilla readout S(t)";
  c.params = {
      {"n", Kind::Int, 1, false, "number of conduction sites", in_range(1, kMaxRegisterQubits - 2)},
      {"eps", Kind::Real, nullptr, true, "impurity energy", nullptr},
      {"ek0", Kind::Real, nullptr, false, "conduction energy, n = 1 only (sets tau = -ek0/2)", nullptr},
      {"tau", Kind::Real, nullptr, false, "hopping; e_k = -2 tau cos(2 pi l / n)", nullptr},
      {"V", Kind::Real, nullptr, true, "impurity coupling", nullptr},
      {"M", Kind::Int, nullptr, true, "number of samples", in_range(2, 1 << 20)},
      {"dt", Kind::Real, nullptr, true, "sampling step", positive()},
      {"threshold", Kind::Real, 0.002, false, "peak threshold relative to max |S~|", in_range(0, 1)},
      {"noise", Kind::Real, 0.0, false, "Gaussian noise E_S added to S(t_j); needs seed", non_negative()},
      {"seed", Kind::Int, nullptr, false, "RNG seed for noise", non_negative()},
      out_param("fano-spectrum")};
  c.cross = [](const json& p, std::vector<std::string>& v) {
    const bool ek = p.contains("ek0"), tau = p.contains("tau");
    if (ek == tau) v.push_back("exactly one of 'ek0' and 'tau' must be given");
    if (ek && p["n"].get<int>() != 1) v.push_back("key 'ek0' requires n = 1");
    if (p["noise"].get<double>() > 0 && !p.contains("seed")) v.push_back("key 'noise' > 0 requires 'seed'");
  };
  c.plan = [](const json& p) {
    return "simulate " + std::to_string(p["M"].get<int>()) + " samples on " + std::to_string(p["n"].get<int>() + 2) +
           " qubits, DFT, peak refinement";
  };
  c.execute = [](const json& p) {
    FanoAnderson m;
    if (p.contains("ek0")) {
      m = FanoAnderson::single_mode(p["ek0"].get<double>(), p["eps"].get<double>(), p["V"].get<double>());
    } else {
      m.n = p["n"].get<int>();
      m.tau = p["tau"].get<double>();
      m.eps = p["eps"].get<double>();
      m.v = p["V"].get<double>();
    }
    TimeSeries ts = fano_spectrum_series(m, p["dt"].get<double>(), p["M"].get<int>());
    const double noise = p["noise"].get<double>();
    if (noise > 0) {
      std::mt19937_64 rng(p["seed"].get<std::uint64_t>());
      std::normal_distribution<double> nd(0.0, noise / std::sqrt(2.0));
      for (cplx& s : ts.values) {
        const double re = nd(rng), im = nd(rng);
        s += cplx(re, im);
      }
      ts.error_std = noise;
    }
    PeakOptions opt;
    opt.rel_threshold = p["threshold"].get<double>();
    const Spectrum sp = analyze(ts, opt);
    std::string csv = "lambda,weight,err_freq,err_amp,bin,refined\n";
    for (const Peak& pk : sp.peaks)
      csv += fmt12(pk.lambda) + "," + fmt12(pk.weight) + "," + fmt12(pk.err_freq) + "," + fmt12(pk.err_amp) + "," +
             std::to_string(pk.bin) + "," + (pk.refined ? "1" : "0") + "\n";
    std::ostringstream series;
    write_series_csv(series, ts);
    return std::vector<Artifact>{{".csv", csv}, {".series.csv", series.str()}};
  };
  return c;
}

Command xy_purity_cmd() {
  Command c;
  c.name = "xy-purity";
  c.help = "Ground-state u(N) purity sweep of the XY chain in a transverse field";
  c.params = {{"N", Kind::Int, nullptr, true, "number of spins (even)", in_range(2, 1e7)},
              {"gamma", Kind::Real, 1.0, false, "anisotropy in (0, 1]", in_range(1e-12, 1)},
              {"g-min", Kind::Real, 0.0, false, "first field value", non_negative()},
              {"g-max", Kind::Real, 1.0, false, "last field value", non_negative()},
              {"steps", Kind::Int, 101, false, "grid points", in_range(1, 1e6)},
              out_param("xy-purity")};
  c.cross = [](const json& p, std::vector<std::string>& v) {
    if (p["N"].get<long long>() % 2) v.push_back("key 'N' must be even");
    if (p["g-max"].get<double>() < p["g-min"].get<double>()) v.push_back("key 'g-max' must not be below 'g-min'");
  };
  c.plan = [](const json& p) { return std::to_string(p["steps"].get<int>()) + " grid points in g"; };
  c.execute = [](const json& p) {
    const XYChain m{p["N"].get<int>(), p["gamma"].get<double>()};
    std::string csv = "g,purity,shifted,gap,fluctuation,purity_thermodynamic\n";
    for (double g : grid(p["g-min"].get<double>(), p["g-max"].get<double>(), p["steps"].get<int>())) {
      const XYSolution s = xy_exact(m, g);
      csv += fmt12(g) + "," + fmt12(s.purity) + "," + fmt12(s.shifted) + "," + fmt12(s.gap) + "," +
             fmt12(xy_number_fluctuation(m, g)) + "," + fmt12(xy_purity_thermodynamic(m.gamma, g)) + "\n";
    }
    return std::vector<Artifact>{{".csv", csv}};
  };
  return c;
}

Command lmg_purity_cmd() {
  Command c;
  c.name = "lmg-purity";
  c.help = "Ground-state su(2) purity sweep of the LMG model along W = |V| - Delta";
  c.params = {{"N", Kind::Int, nullptr, true, "number of particles", in_range(1, kMaxLmgParticles)},
              {"V", Kind::Real, 0.0, false, "pair coupling", nullptr},
              {"delta-min", Kind::Real, 0.2, false, "first Delta", nullptr},
              {"delta-max", Kind::Real, 3.0, false, "last Delta", nullptr},
              {"steps", Kind::Int, 29, false, "grid points", in_range(1, 1e6)},
              out_param("lmg-purity")};
  c.cross = [](const json& p, std::vector<std::string>& v) {
    if (p["delta-max"].get<double>() < p["delta-min"].get<double>())
      v.push_back("key 'delta-max' must not be below 'delta-min'");
  };
  c.plan = [](const json& p) { return std::to_string(p["steps"].get<int>()) + " grid points in Delta"; };
  c.execute = [](const json& p) {
    const double v = p["V"].get<double>();
    std::string csv = "delta,W,energy_per_particle,purity,classical_purity,jz,parity\n";
    for (double d : grid(p["delta-min"].get<double>(), p["delta-max"].get<double>(), p["steps"].get<int>())) {
      const LMG m{p["N"].get<int>(), v, std::abs(v) - d};
      const LMGSolution s = lmg_exact(m);
      csv += fmt12(d) + "," + fmt12(m.w) + "," + fmt12(s.energy_per_particle) + "," + fmt12(s.purity) + "," +
             fmt12(s.classical.purity) + "," + fmt12(s.jz) + "," + std::to_string(s.parity) + "\n";
    }
    return std::vector<Artifact>{{".csv", csv}};
  };
  return c;
}

const char* kAlgebraHelp = "su2:S, su2_pauli, su3, su4, u:N, local_su2:n, or an algebra JSON file";

Command meanfield_cmd() {
  Command c;
  c.name = "meanfield-diag";
  c.help = "Generalized Jacobi diagonalization of a Hermitian algebra element";
  c.params = {{"algebra", Kind::Str, nullptr, true, kAlgebraHelp, nullptr},
              {"coeffs", Kind::Str, nullptr, true, "JSON file or inline array of real coefficients", nullptr},
              {"tol", Kind::Real, 1e-10, false, "stop when d_C <= tol", positive()},
              {"max-iterations", Kind::Int, 0, false, "rotation budget, 0 for the default cap", non_negative()},
              out_param("meanfield-diag")};
  c.plan = [](const json& p) { return "diagonalize in " + p["algebra"].get<std::string>(); };
  c.execute = [](const json& p) {
    const AlgebraSpec spec = load_algebra(p["algebra"].get<std::string>());
    const RVec h = real_vector(inline_or_file(p["coeffs"].get<std::string>(), "coeffs"), spec.dim(), "coeffs");
    DiagonalizeOptions opt;
    opt.tol = p["tol"].get<double>();
    opt.max_iterations = p["max-iterations"].get<int>();
    const DiagonalizationResult r = diagonalize(spec, h, opt);
    json j;
    j["algebra"] = spec.name;
    j["epsilon"] = vector_json(r.epsilon);
    j["iterations"] = r.iterations;
    j["iteration_cap"] = r.iteration_cap;
    j["residual"] = r.residual;
    j["weyl_reflections"] = r.weyl_reflections;
    return std::vector<Artifact>{{".json", j.dump(2) + "\n"}};
  };
  return c;
}

Command gcs_cmd() {
  Command c;
  c.name = "gcs";
  c.help = "Expectation <phi| O_1 ... O_p |phi> on a generalized coherent state";
  c.params = {{"algebra", Kind::Str, nullptr, true, kAlgebraHelp, nullptr},
              {"zeta", Kind::Str, "[]", false, "JSON list of real factor vectors, U = prod exp(i zeta.O)", nullptr},
              {"ops", Kind::Str, nullptr, true, "JSON list of operators, entries number or [re, im]", nullptr},
              out_param("gcs")};
  c.plan = [](const json& p) { return "GCS expectation in " + p["algebra"].get<std::string>(); };
  c.execute = [](const json& p) {
    const AlgebraSpec spec = load_algebra(p["algebra"].get<std::string>());
    const json zj = inline_or_file(p["zeta"].get<std::string>(), "zeta");
    const json oj = inline_or_file(p["ops"].get<std::string>(), "ops");
    if (!zj.is_array()) throw ConfigError("zeta: expected a list");
    if (!oj.is_array() || oj.empty()) throw ConfigError("ops: expected a non-empty list");
    std::vector<RVec> factors;
    for (std::size_t i = 0; i < zj.size(); ++i) factors.push_back(real_vector(zj[i], spec.dim(), "zeta[" + std::to_string(i) + "]"));
    std::vector<CVec> ops;
    for (std::size_t i = 0; i < oj.size(); ++i) ops.push_back(complex_vector(oj[i], spec.dim(), "ops[" + std::to_string(i) + "]"));
    GcsState s;
    try {
      s = make_gcs(spec, factors);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const cplx val = gcs_expectation_higher(spec, s, ops);
    json j;
    j["value_re"] = val.real();
    j["value_im"] = val.imag();
    j["order"] = ops.size();
    return std::vector<Artifact>{{".json", j.dump(2) + "\n"}};
  };
  return c;
}

CVec read_state_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<cplx> amp;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string re, im;
    std::getline(ls, re, ',');
    std::getline(ls, im, ',');
    auto r = from_string(re, Kind::Real), i = from_string(im.empty() ? "0" : im, Kind::Real);
    if (!r || !i) {
      if (lineno == 1) continue;  // header
      throw ConfigError("state line " + std::to_string(lineno) + ": expected re,im");
    }
    amp.emplace_back(r->get<double>(), i->get<double>());
  }
  CVec v(static_cast<Eigen::Index>(amp.size()));
  for (std::size_t k = 0; k < amp.size(); ++k) v[static_cast<Eigen::Index>(k)] = amp[k];
  return v;
}

Command entanglement_cmd() {
  Command c;
  c.name = "entanglement";
  c.help = "Entanglement measures of a pure state given as an amplitude CSV";
  c.params = {{"state", Kind::Str, nullptr, true, "CSV with one 're,im' amplitude per line", nullptr},
              {"dims", Kind::Str, "", false, "subsystem dimensions, e.g. 2,2 (default: qubits)", nullptr},
              out_param("entanglement")};
  c.plan = [](const json& p) { return "measures of " + p["state"].get<std::string>(); };
  c.execute = [](const json& p) {
    const CVec psi = read_state_csv(p["state"].get<std::string>());
    if (psi.size() < 2) throw ConfigError("state: need at least two amplitudes");
    if (std::abs(psi.norm() - 1) > 1e-8) throw ConfigError("state: not normalized");
    std::vector<int> dims;
    const std::string ds = p["dims"].get<std::string>();
    if (ds.empty()) {
      Eigen::Index d = psi.size();
      while (d > 1 && d % 2 == 0) {
        d /= 2;
        dims.push_back(2);
      }
      if (d != 1) throw ConfigError("dims: state size is not a power of two; give 'dims'");
    } else {
      std::istringstream in(ds);
      std::string tok;
      while (std::getline(in, tok, ',')) {
        auto x = from_string(tok, Kind::Int);
        if (!x || x->get<long long>() < 2) throw ConfigError("dims: '" + tok + "' is not an integer >= 2");
        dims.push_back(x->get<int>());
      }
    }
    long long prod = 1;
    for (int d : dims) prod *= d;
    if (prod != psi.size()) throw ConfigError("dims: product does not match the number of amplitudes");
    json j;
    j["dims"] = dims;
    j["local_purity"] = local_purity(psi, dims);
    if (dims.size() == 2) j["schmidt_entropy"] = schmidt_entropy(psi, dims[0], dims[1]);
    if (dims == std::vector<int>{2, 2}) j["concurrence"] = concurrence(density_matrix(psi));
    return std::vector<Artifact>{{".json", j.dump(2) + "\n"}};
  };
  return c;
}

const std::vector<Command>& commands() {
  static const std::vector<Command> all{fano_spectrum_cmd(), xy_purity_cmd(),    lmg_purity_cmd(),
                                        meanfield_cmd(),     gcs_cmd(),          entanglement_cmd()};
  return all;
}

const Command* find_command(const std::string& name) {
  for (const Command& c : commands())
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> validate_config(const json& config) {
  if (!config.contains("subcommand") || !config["subcommand"].is_string()) return {"missing required key 'subcommand'"};
  const Command* c = find_command(config["subcommand"].get<std::string>());
  if (!c) return {"unknown subcommand '" + config["subcommand"].get<std::string>() + "'"};
  std::vector<std::string> v;
  resolve(*c, config, {}, v);
  return v;
}

json load_config(const std::string& path) { return parse_config_text(read_file(path), is_json_path(path)); }

// Resolves, then either prints the plan or computes and writes artifacts.
int execute(const Command& c, const json& config, const std::map<std::string, std::string>& flags, bool dry_run,
            std::ostream& out, std::ostream& err) {
  if (config.contains("subcommand") && config["subcommand"] != c.name) {
    err << "config error: config is for '" << config["subcommand"].get<std::string>() << "', not '" << c.name << "'\n";
    return kConfigError;
  }
  std::vector<std::string> violations;
  const json p = resolve(c, config, flags, violations);
  if (!violations.empty()) {
    for (const auto& v : violations) err << "config error: " << v << "\n";
    return kConfigError;
  }
  const std::string prefix = p["out"].get<std::string>();
  if (dry_run) {
    json plan;
    plan["subcommand"] = c.name;
    plan["parameters"] = p;
    plan["work"] = c.plan(p);
    plan["output_prefix"] = prefix;
    out << plan.dump(2) << "\n";
    return kOk;
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Artifact> arts;
  try {
    arts = c.execute(p);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const NonConvergence& e) {
    err << "not converged: " << e.what() << "\n";
    return kNonConvergence;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["subcommand"] = c.name;
  manifest["parameters"] = p;
  manifest["versions"] = {{"qmb", kVersion},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
  manifest["outputs"] = json::array();
  for (const Artifact& a : arts) {
    const std::string path = prefix + a.suffix;
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << a.content)) {
      err << "config error: cannot write '" << path << "'\n";
      return kConfigError;
    }
    manifest["outputs"].push_back(path);
    out << path << "\n";
  }
  manifest["wall_time_s"] = wall;
  const std::string mpath = prefix + ".manifest.json";
  std::ofstream f(mpath, std::ios::binary);
  if (!f || !(f << manifest.dump(2) << "\n")) {
    err << "config error: cannot write '" << mpath << "'\n";
    return kConfigError;
  }
  out << mpath << "\n";
  return kOk;
}

}  // namespace

std::vector<std::string> validate_config_text(const std::string& text, bool is_json) {
  try {
    return validate_config(parse_config_text(text, is_json));
  } catch (const ConfigError& e) {
    return {e.what()};
  }
}

std::vector<std::string> validate_config_file(const std::string& path) {
  return validate_config_text(read_file(path), is_json_path(path));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum many-body simulation and mean-field toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Sub {
    const Command* cmd;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::string config;
    bool dry_run = false;
  };
  std::vector<Sub> subs;
  subs.reserve(commands().size());
  for (const Command& c : commands()) {
    Sub s{&c, app.add_subcommand(c.name, c.help), {}, {}, false};
    subs.push_back(std::move(s));
  }
  for (Sub& s : subs) {
    for (const Param& q : s.cmd->params) {
      std::string desc = q.help;
      if (q.required) desc += " (required)";
      else if (!q.def.is_null()) desc += " [default " + q.def.dump() + "]";
      s.app->add_option("--" + q.name, s.values[q.name], desc);
    }
    s.app->add_option("--config", s.config, "TOML or JSON config; flags override it");
    s.app->add_flag("--dry-run", s.dry_run, "print the resolved plan without computing");
  }
  std::string validate_path, run_path;
  bool run_dry = false;
  auto* validate = app.add_subcommand("validate-config", "List violations in a run config");
  validate->add_option("file", validate_path, "TOML or JSON config")->required();
  auto* runner = app.add_subcommand("run", "Run the subcommand named in a config file");
  runner->add_option("file", run_path, "TOML or JSON config")->required();
  runner->add_flag("--dry-run", run_dry, "print the resolved plan without computing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (validate->parsed()) {
      const auto v = validate_config_file(validate_path);
      for (const auto& s : v) out << s << "\n";
      if (v.empty()) out << "ok\n";
      return v.empty() ? kOk : kConfigError;
    }
    if (runner->parsed()) {
      const json config = load_config(run_path);
      const auto v = validate_config(config);
      if (!v.empty()) {
        for (const auto& s : v) err << "config error: " << s << "\n";
        return kConfigError;
      }
      return execute(*find_command(config["subcommand"].get<std::string>()), config, {}, run_dry, out, err);
    }
    for (Sub& s : subs) {
      if (!s.app->parsed()) continue;
      std::map<std::string, std::string> flags;
      for (const Param& q : s.cmd->params)
        if (s.app->get_option("--" + q.name)->count() > 0) flags[q.name] = s.values[q.name];
      const json config = s.config.empty() ? json::object() : load_config(s.config);
      return execute(*s.cmd, config, flags, s.dry_run, out, err);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::runtime_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return kUsage;
}

}  // namespace qmb::cli
