#include "mflab/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

#include "mflab/combinatorics.hpp"
#include "mflab/error.hpp"

namespace mflab::harness {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void allow_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) fail(where, "unknown key '" + key + "'");
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  return j.at(key);
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(where, "non-finite number");
  return x;
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto x = j.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(where, "integer out of range");
  return static_cast<int>(x);
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

// A number, or [re, im].
cplx as_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return {as_double(j, where), 0.0};
  if (j.is_array() && j.size() == 2) return {as_double(j[0], where), as_double(j[1], where)};
  fail(where, "expected a number or [re, im]");
}

CVector as_cvector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_complex(j[i], where);
  return v;
}

CVector as_state(const Json& j, const std::string& where) {
  CVector v = as_cvector(j, where);
  const double norm = v.norm();
  if (!(norm > 0.0)) fail(where, "zero vector");
  // Leave already-normalized input bit-identical so canonical JSON round-trips.
  if (std::abs(norm - 1.0) > 1e-14) v /= norm;
  return v;
}

CMatrix as_cmatrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  CMatrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = as_cvector(j[static_cast<std::size_t>(r)], where);
    if (row.size() != rows) fail(where, "matrix must be square");
    m.row(r) = row.transpose();
  }
  return m;
}

Json complex_entry(cplx z) { return Json::array({z.real(), z.imag()}); }

Json cvector_json(const CVector& v) {
  Json a = Json::array();
  for (auto z : v) a.push_back(complex_entry(z));
  return a;
}

ModeSystemConfig parse_mode_system(const Json& j) {
  const std::string where = "mode_system";
  require_object(j, where);
  ModeSystemConfig out;
  const auto geometry = as_string(need(j, "geometry", where), where + ".geometry");
  if (geometry == "lattice") {
    allow_keys(j, {"geometry", "sites", "hopping", "onsite", "potential", "coupling", "range"}, where);
    out.geometry = ModeSystemConfig::Geometry::lattice;
    auto& l = out.lattice;
    l.sites = as_int(need(j, "sites", where), where + ".sites");
    if (j.contains("hopping")) l.hopping = as_double(j["hopping"], where + ".hopping");
    if (j.contains("onsite")) {
      if (!j["onsite"].is_array()) fail(where + ".onsite", "expected an array");
      for (const auto& x : j["onsite"]) l.onsite.push_back(as_double(x, where + ".onsite"));
    }
    if (j.contains("potential")) l.potential = parse_pair_potential(as_string(j["potential"], where + ".potential"));
    if (j.contains("coupling")) l.coupling = as_double(j["coupling"], where + ".coupling");
    if (j.contains("range")) l.range = as_double(j["range"], where + ".range");
  } else if (geometry == "dense") {
    allow_keys(j, {"geometry", "h", "v"}, where);
    out.geometry = ModeSystemConfig::Geometry::dense;
    out.h = as_cmatrix(need(j, "h", where), where + ".h");
    const CMatrix v = as_cmatrix(need(j, "v", where), where + ".v");
    if (v.imag().cwiseAbs().maxCoeff() != 0.0) fail(where + ".v", "pair kernel must be real");
    out.v = v.real();
    if (out.v.rows() != out.h.rows()) fail(where, "h and v differ in size");
  } else {
    fail(where + ".geometry", "expected 'lattice' or 'dense', got '" + geometry + "'");
  }
  out.build();  // surfaces Hermiticity/symmetry violations at load time
  return out;
}

MSchedule parse_m(const Json& j, const std::string& where) {
  MSchedule s;
  if (j.is_number_integer()) {
    s.constant = as_int(j, where);
    if (*s.constant < 0) fail(where, "m must be >= 0");
    return s;
  }
  if (j.is_object()) {
    allow_keys(j, {"a"}, where);
    s.constant.reset();
    s.a = as_double(need(j, "a", where), where + ".a");
    if (s.a < 0.0) fail(where + ".a", "must be >= 0");
    return s;
  }
  fail(where, "expected an integer or {\"a\": <coefficient of ln n>}");
}

StateConfig parse_state(const Json& j) {
  const std::string where = "state";
  require_object(j, where);
  StateConfig s;
  s.family = parse_family(as_string(need(j, "family", where), where + ".family"));
  switch (s.family) {
    case Family::product:
    case Family::coherent:
      allow_keys(j, {"family", "phi"}, where);
      s.phi = as_state(need(j, "phi", where), where + ".phi");
      break;
    case Family::theta:
      allow_keys(j, {"family", "phi", "m", "theta_method"}, where);
      s.phi = as_state(need(j, "phi", where), where + ".phi");
      s.m = parse_m(need(j, "m", where), where + ".m");
      break;
    case Family::superposition: {
      allow_keys(j, {"family", "kind", "coeffs", "phis", "m", "theta_method"}, where);
      s.kind = parse_superposition_kind(as_string(need(j, "kind", where), where + ".kind"));
      const auto& phis = need(j, "phis", where);
      if (!phis.is_array()) fail(where + ".phis", "expected an array of vectors");
      for (const auto& p : phis) s.phis.push_back(as_state(p, where + ".phis"));
      const auto& coeffs = need(j, "coeffs", where);
      if (!coeffs.is_array()) fail(where + ".coeffs", "expected an array");
      for (const auto& c : coeffs) s.coeffs.push_back(as_complex(c, where + ".coeffs"));
      if (s.kind == SuperpositionKind::Theta) {
        s.m = parse_m(need(j, "m", where), where + ".m");
      } else if (j.contains("m")) {
        fail(where + ".m", "only Theta superpositions carry an excitation");
      }
      break;
    }
  }
  if (j.contains("theta_method")) {
    try {
      s.theta_method = parse_theta_method(as_string(j["theta_method"], where + ".theta_method"));
    } catch (const ContractError& e) {
      fail(where + ".theta_method", e.what());
    }
  }
  return s;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Family parse_family(const std::string& s) {
  if (s == "product") return Family::product;
  if (s == "coherent") return Family::coherent;
  if (s == "theta") return Family::theta;
  if (s == "superposition") return Family::superposition;
  throw ConfigError("unknown state family '" + s + "'");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::product: return "product";
    case Family::coherent: return "coherent";
    case Family::theta: return "theta";
    case Family::superposition: return "superposition";
  }
  return "?";
}

SuperpositionKind parse_superposition_kind(const std::string& s) {
  if (s == "Phi") return SuperpositionKind::Phi;
  if (s == "Theta") return SuperpositionKind::Theta;
  if (s == "Psi") return SuperpositionKind::Psi;
  throw ConfigError("unknown superposition kind '" + s + "' (Phi, Theta or Psi)");
}

std::string to_string(SuperpositionKind k) {
  switch (k) {
    case SuperpositionKind::Phi: return "Phi";
    case SuperpositionKind::Theta: return "Theta";
    case SuperpositionKind::Psi: return "Psi";
  }
  return "?";
}

std::string to_string(ThetaMethod m) {
  switch (m) {
    case ThetaMethod::symmetrize: return "symmetrize";
    case ThetaMethod::creation_polynomial: return "creation_polynomial";
    case ThetaMethod::weyl_projection: return "weyl_projection";
  }
  return "?";
}

int MSchedule::at(int n) const {
  if (constant) return *constant;
  const int m = static_cast<int>(std::lround(a * std::log(static_cast<double>(n))));
  return std::clamp(m, 0, std::min(admissible_m(n), n));
}

ModeSystem ModeSystemConfig::build() const {
  return geometry == Geometry::lattice ? ModeSystem::lattice(lattice) : ModeSystem::dense(h, v);
}

int ModeSystemConfig::modes() const {
  return geometry == Geometry::lattice ? lattice.sites : static_cast<int>(h.rows());
}

void validate(const ExperimentConfig& c) {
  const int d = c.mode_system.modes();
  if (c.n_list.empty()) fail("n_list", "must not be empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] < 1) fail("n_list", "entries must be >= 1");
    if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) fail("n_list", "must be strictly increasing");
  }
  if (c.t_list.empty()) fail("t_list", "must not be empty");
  for (double t : c.t_list)
    if (!std::isfinite(t)) fail("t_list", "entries must be finite");
  if (!(c.tolerances.hartree > 0.0)) fail("tolerances.hartree", "must be positive");
  if (!(c.tolerances.krylov > 0.0) || c.tolerances.krylov > 1e-10) fail("tolerances.krylov", "must lie in (0, 1e-10]");
  if (!(c.tolerances.weyl_loss > 0.0)) fail("tolerances.weyl_loss", "must be positive");
  if (c.propagator.krylov_dim < 2) fail("propagator.krylov_dim", "must be >= 2");

  const auto& s = c.state;
  const bool uses_m = s.family == Family::theta ||
                      (s.family == Family::superposition && s.kind == SuperpositionKind::Theta);
  if (s.family != Family::superposition) {
    if (s.phi.size() != d) fail("state.phi", "needs " + std::to_string(d) + " entries");
  } else {
    if (s.phis.size() < 2) fail("state.phis", "a superposition needs at least two components");
    if (s.coeffs.size() != s.phis.size()) fail("state.coeffs", "one coefficient per component");
    bool any = false;
    for (auto z : s.coeffs) any = any || z != cplx(0.0);
    if (!any) fail("state.coeffs", "all coefficients vanish");
    for (const auto& p : s.phis)
      if (p.size() != d) fail("state.phis", "every component needs " + std::to_string(d) + " entries");
  }
  if (uses_m) {
    if (s.m.logarithmic()) {
      const double cap = s.family == Family::theta ? 1.0 : 0.5;
      if (s.m.a >= cap)
        fail("state.m.a", "the ln n coefficient must be below " + std::string(cap == 1.0 ? "1" : "1/2"));
    }
    for (int n : c.n_list) {
      const int m = s.m.at(n);
      if (m > std::min(admissible_m(n), n))
        fail("state.m", "m = " + std::to_string(m) + " exceeds the admissible " + std::to_string(admissible_m(n)) +
                            " at n = " + std::to_string(n));
      if (m > 0 && d < 2) fail("state.m", "excitations need at least two modes");
    }
  }
}

ExperimentConfig parse_config(const Json& j) {
  require_object(j, "config");
  allow_keys(j, {"mode_system", "state", "n_list", "t_list", "tolerances", "propagator", "seed", "output"}, "config");
  ExperimentConfig c;
  c.mode_system = parse_mode_system(need(j, "mode_system", "config"));
  c.state = parse_state(need(j, "state", "config"));

  const auto& ns = need(j, "n_list", "config");
  if (!ns.is_array()) fail("n_list", "expected an array");
  for (const auto& n : ns) c.n_list.push_back(as_int(n, "n_list"));
  const auto& ts = need(j, "t_list", "config");
  if (!ts.is_array()) fail("t_list", "expected an array");
  for (const auto& t : ts) c.t_list.push_back(as_double(t, "t_list"));

  if (j.contains("tolerances")) {
    const auto& tj = j["tolerances"];
    require_object(tj, "tolerances");
    allow_keys(tj, {"hartree", "krylov", "weyl_loss"}, "tolerances");
    if (tj.contains("hartree")) c.tolerances.hartree = as_double(tj["hartree"], "tolerances.hartree");
    if (tj.contains("krylov")) c.tolerances.krylov = as_double(tj["krylov"], "tolerances.krylov");
    if (tj.contains("weyl_loss")) c.tolerances.weyl_loss = as_double(tj["weyl_loss"], "tolerances.weyl_loss");
  }
  if (j.contains("propagator")) {
    const auto& pj = j["propagator"];
    require_object(pj, "propagator");
    allow_keys(pj, {"method", "krylov_dim", "dense_limit"}, "propagator");
    if (pj.contains("method")) c.propagator.method = parse_propagator_method(as_string(pj["method"], "propagator.method"));
    if (pj.contains("krylov_dim")) c.propagator.krylov_dim = as_int(pj["krylov_dim"], "propagator.krylov_dim");
    if (pj.contains("dense_limit")) {
      const int lim = as_int(pj["dense_limit"], "propagator.dense_limit");
      if (lim < 1) fail("propagator.dense_limit", "must be positive");
      c.propagator.dense_limit = static_cast<std::size_t>(lim);
    }
  }
  c.propagator.tol = c.tolerances.krylov;
  if (j.contains("seed")) {
    const auto& sj = j["seed"];
    if (!sj.is_number_unsigned() && !(sj.is_number_integer() && sj.get<long long>() >= 0))
      fail("seed", "expected a non-negative integer");
    c.seed = sj.get<std::uint64_t>();
  }
  if (j.contains("output")) {
    const auto& oj = j["output"];
    require_object(oj, "output");
    allow_keys(oj, {"dir", "stem", "record_timing"}, "output");
    if (oj.contains("dir")) c.output.dir = as_string(oj["dir"], "output.dir");
    if (oj.contains("stem")) c.output.stem = as_string(oj["stem"], "output.stem");
    if (oj.contains("record_timing")) c.output.record_timing = as_bool(oj["record_timing"], "output.record_timing");
    if (c.output.stem.empty() || c.output.stem.find('/') != std::string::npos)
      fail("output.stem", "must be a plain file name");
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

Json config_json(const ExperimentConfig& c) {
  Json ms;
  if (c.mode_system.geometry == ModeSystemConfig::Geometry::lattice) {
    const auto& l = c.mode_system.lattice;
    ms = {{"geometry", "lattice"}, {"sites", l.sites}, {"hopping", l.hopping}, {"onsite", l.onsite},
          {"potential", to_string(l.potential)}, {"coupling", l.coupling}, {"range", l.range}};
  } else {
    Json h = Json::array(), v = Json::array();
    for (Eigen::Index r = 0; r < c.mode_system.h.rows(); ++r) {
      h.push_back(cvector_json(c.mode_system.h.row(r).transpose()));
      Json row = Json::array();
      for (Eigen::Index q = 0; q < c.mode_system.v.cols(); ++q) row.push_back(c.mode_system.v(r, q));
      v.push_back(row);
    }
    ms = {{"geometry", "dense"}, {"h", h}, {"v", v}};
  }

  const auto& s = c.state;
  Json st = {{"family", to_string(s.family)}};
  auto m_json = [&]() -> Json { return s.m.constant ? Json(*s.m.constant) : Json{{"a", s.m.a}}; };
  if (s.family == Family::superposition) {
    st["kind"] = to_string(s.kind);
    Json phis = Json::array(), coeffs = Json::array();
    for (const auto& p : s.phis) phis.push_back(cvector_json(p));
    for (auto z : s.coeffs) coeffs.push_back(complex_entry(z));
    st["phis"] = phis;
    st["coeffs"] = coeffs;
    if (s.kind == SuperpositionKind::Theta) {
      st["m"] = m_json();
      st["theta_method"] = to_string(s.theta_method);
    }
  } else {
    st["phi"] = cvector_json(s.phi);
    if (s.family == Family::theta) {
      st["m"] = m_json();
      st["theta_method"] = to_string(s.theta_method);
    }
  }

  return {{"mode_system", ms},
          {"state", st},
          {"n_list", c.n_list},
          {"t_list", c.t_list},
          {"tolerances",
           {{"hartree", c.tolerances.hartree}, {"krylov", c.tolerances.krylov}, {"weyl_loss", c.tolerances.weyl_loss}}},
          {"propagator",
           {{"method", to_string(c.propagator.method)},
            {"krylov_dim", c.propagator.krylov_dim},
            {"dense_limit", c.propagator.dense_limit}}},
          {"seed", c.seed},
          {"output", {{"dir", c.output.dir}, {"stem", c.output.stem}, {"record_timing", c.output.record_timing}}}};
}

std::string config_hash(const ExperimentConfig& c) {
  // Output location does not change the experiment.
  Json j = config_json(c);
  j.erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

}  // namespace mflab::harness
