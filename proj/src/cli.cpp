#include "domcert/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "domcert/interconnect.hpp"
#include "domcert/models.hpp"
#include "domcert/serialize.hpp"

namespace domcert {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_number_list(const std::string& text, const std::string& where) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',') c = ' ';
  }
  std::vector<double> out;
  std::istringstream is(cleaned);
  std::string tok;
  while (is >> tok) {
    // range syntax lo:step:hi
    const auto c1 = tok.find(':');
    if (c1 != std::string::npos) {
      const auto c2 = tok.find(':', c1 + 1);
      if (c2 == std::string::npos) throw ConfigError(where, "expected lo:step:hi range");
      try {
        const double lo = std::stod(tok.substr(0, c1));
        const double step = std::stod(tok.substr(c1 + 1, c2 - c1 - 1));
        const double hi = std::stod(tok.substr(c2 + 1));
        if (!(step > 0) || hi < lo) throw ConfigError(where, "bad range bounds");
        for (double v = lo; v <= hi + 1e-12 * std::max(1.0, std::abs(hi)); v += step) {
          out.push_back(v);
        }
      } catch (const std::invalid_argument&) {
        throw ConfigError(where, "malformed range '" + tok + "'");
      }
      continue;
    }
    try {
      size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::invalid_argument&) {
      throw ConfigError(where, "not a number: '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError(where, "empty value");
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& text, int rows, int cols,
                             const std::string& where) {
  const std::vector<double> v = parse_number_list(text, where);
  if (static_cast<int>(v.size()) != rows * cols) {
    throw ConfigError(where, "expected " + std::to_string(rows * cols) +
                                 " row-major entries, got " + std::to_string(v.size()));
  }
  Eigen::MatrixXd m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = v[k++];
  }
  return m;
}

struct Timings {
  using Clock = std::chrono::steady_clock;
  Clock::time_point start = Clock::now();
  json out = json::object();

  void lap(const std::string& name) {
    const auto now = Clock::now();
    out[name] = std::chrono::duration<double, std::milli>(now - start).count();
    start = now;
  }
};

json defaults_json() {
  return json{{"epsilon", 0.01},   {"dt", 1e-3},          {"T", 100.0},
              {"norm_bound", 10.0}, {"residual_tol", 1e-7}, {"gap_tol", 1e-10},
              {"gamma_tol", 1e-3}, {"tail_fraction", 0.5}};
}

// Model inputs resolved from a [model]-style section: either a builtin (full
// ModelDef) or explicit vertex matrices (family only).
struct ModelInput {
  std::optional<ModelDef> model;
  VertexFamily family;
  std::optional<OpenVertexFamily> open_family;
};

ModelParams collect_params(const Config& cfg, const std::string& section) {
  ModelParams p;
  const auto* sec = cfg.section(section);
  if (!sec) return p;
  for (const auto& [key, value] : *sec) {
    if (key == "name" || key == "n" || key == "vertices" || key.rfind("vertex.", 0) == 0 ||
        key == "B" || key == "C" || key == "D" || key == "supply" || key == "gamma" ||
        key == "tau" || key == "lambda" || key == "epsilon" || key == "p") {
      continue;
    }
    try {
      size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos == value.size()) {
        p.values[key] = v;
        continue;
      }
    } catch (const std::invalid_argument&) {
    }
    p.options[key] = value;
  }
  return p;
}

ModelInput load_model(const Config& cfg, const std::string& section) {
  ModelInput input;
  if (!cfg.has_section(section)) {
    throw ConfigError(section, "missing section");
  }
  if (cfg.has(section, "name")) {
    input.model = builtin(cfg.require(section, "name"), collect_params(cfg, section));
    input.family = jacobian_vertices(*input.model);
    if (input.model->is_open()) input.open_family = open_vertex_family(*input.model);
    return input;
  }
  const int n = static_cast<int>(cfg.require_number(section, "n"));
  const int count = static_cast<int>(cfg.require_number(section, "vertices"));
  if (n < 1 || count < 1) throw ConfigError(section, "need n >= 1 and vertices >= 1");
  input.family.n = n;
  for (int i = 1; i <= count; ++i) {
    const std::string key = "vertex." + std::to_string(i);
    input.family.vertices.push_back(
        parse_matrix(cfg.require(section, key), n, n, section + "." + key));
  }
  if (cfg.has(section, "B")) {
    OpenVertexFamily open;
    open.n = n;
    const std::vector<double> b = cfg.numbers(section, "B");
    open.m_u = static_cast<int>(b.size()) / n;
    const Eigen::MatrixXd bmat =
        parse_matrix(cfg.require(section, "B"), n, open.m_u, section + ".B");
    const std::vector<double> c = cfg.numbers(section, "C");
    open.m_y = static_cast<int>(c.size()) / n;
    const Eigen::MatrixXd cmat =
        parse_matrix(cfg.require(section, "C"), open.m_y, n, section + ".C");
    Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(open.m_y, open.m_u);
    if (cfg.has(section, "D")) {
      dmat = parse_matrix(cfg.require(section, "D"), open.m_y, open.m_u, section + ".D");
    }
    for (size_t i = 0; i < input.family.vertices.size(); ++i) {
      // an optional per-vertex feedthrough D.k overrides the shared block
      const std::string dkey = "D." + std::to_string(i + 1);
      const Eigen::MatrixXd dv =
          cfg.has(section, dkey)
              ? parse_matrix(cfg.require(section, dkey), open.m_y, open.m_u,
                             section + "." + dkey)
              : dmat;
      open.vertices.push_back(OpenVertex{input.family.vertices[i], bmat, cmat, dv});
    }
    input.open_family = open;
  }
  return input;
}

SupplyRate load_supply(const Config& cfg, const std::string& section, int m_y, int m_u) {
  const std::string kind = cfg.get(section, "supply", "passivity");
  if (kind == "passivity") {
    if (m_y != m_u) throw ConfigError(section + ".supply", "passivity needs m_y == m_u");
    return passivity_supply(m_y);
  }
  if (kind == "gain") {
    return gain_supply(m_y, m_u, cfg.require_number(section, "gamma"));
  }
  if (kind == "zero") return zero_supply(m_y, m_u);
  if (kind == "custom") {
    SupplyRate s;
    s.m_y = m_y;
    s.m_u = m_u;
    s.Q = parse_matrix(cfg.require(section, "Q"), m_y, m_y, section + ".Q");
    s.L = parse_matrix(cfg.require(section, "L"), m_y, m_u, section + ".L");
    s.R = parse_matrix(cfg.require(section, "R"), m_u, m_u, section + ".R");
    check_supply(s);
    return s;
  }
  throw ConfigError(section + ".supply", "expected passivity | gain | zero | custom");
}

std::vector<Eigen::MatrixXd> scan_samples(const Config& cfg, const ModelInput& input) {
  if (input.model) {
    const int axis = static_cast<int>(cfg.number("task", "sample_axis", 0));
    const double lo = cfg.number("task", "sample_min", -5.0);
    const double hi = cfg.number("task", "sample_max", 5.0);
    const int count = static_cast<int>(cfg.number("task", "sample_count", 50));
    return jacobian_samples(*input.model,
                            axis_grid(input.model->n, axis, lo, hi, count));
  }
  return input.family.vertices;
}

void emit_outputs(const Config& cfg, json& report, const std::string& key,
                  const std::string& content) {
  const std::string* path = cfg.find("output", key);
  if (!path) return;
  write_file_atomic(*path, content);
  report["files"][key] = *path;
}

json certificate_with_inertia(const DominanceCertificate& cert) {
  json j = to_json(cert);
  const Inertia in = inertia_of(cert.P);
  j["inertia"] = {{"neg", in.neg}, {"zero", in.zero}, {"pos", in.pos}};
  return j;
}

RunOutcome finish(json report, const std::string& status) {
  report["status"] = status;
  RunOutcome out;
  out.report = std::move(report);
  out.exit_code = status == "ok" ? 0 : status == "infeasible" ? 2 : 1;
  return out;
}

RunOutcome run_analyze(const Config& cfg, json report) {
  Timings timings;
  const ModelInput input = load_model(cfg, "model");
  const double epsilon = cfg.number("task", "epsilon", 0.01);
  report["family"] = {{"n", input.family.n}, {"vertices", input.family.vertices.size()}};

  if (cfg.has("task", "lambda_grid") && cfg.has("task", "p")) {
    const auto grid = cfg.numbers("task", "lambda_grid");
    const int p = static_cast<int>(cfg.require_number("task", "p"));
    const RateSearchResult r = rate_search(input.family, p, grid, epsilon);
    timings.lap("solve_ms");
    report["timings_ms"] = timings.out;
    if (!r.found) {
      report["detail"] = r.detail;
      return finish(std::move(report), "infeasible");
    }
    report["lambda"] = r.lambda;
    report["margin_objective"] = r.margin_objective;
    report["certificate"] = certificate_with_inertia(*r.certificate);
    if (input.family.n == 2) {
      emit_outputs(cfg, report, "cone", cone_region_csv(r.certificate->P));
    }
    return finish(std::move(report), "ok");
  }

  const double lambda = cfg.require_number("task", "lambda");
  const DominanceResult r = solve_dominance(input.family, lambda, epsilon);
  timings.lap("solve_ms");
  report["timings_ms"] = timings.out;
  report["solver_status"] = to_string(r.status);
  if (r.status != DominanceStatus::Feasible) {
    report["detail"] = r.detail;
    // A spectral-scan explanation for the rejection, when the splits disagree.
    json splits = json::array();
    for (const auto& s : r.splits) {
      splits.push_back({{"unstable", s.unstable}, {"stable", s.stable}, {"on_axis", s.on_axis}});
    }
    report["vertex_splits"] = splits;
    return finish(std::move(report),
                  r.status == DominanceStatus::NumericFailure ? "error" : "infeasible");
  }
  report["certificate"] = certificate_with_inertia(*r.certificate);
  if (input.family.n == 2) {
    emit_outputs(cfg, report, "cone", cone_region_csv(r.certificate->P));
  }
  return finish(std::move(report), "ok");
}

RunOutcome run_scan(const Config& cfg, json report) {
  Timings timings;
  const ModelInput input = load_model(cfg, "model");
  const auto grid = parse_number_list(cfg.require("task", "lambda_grid"), "task.lambda_grid");
  const double band = cfg.number("task", "margin_band", -1.0);
  const std::vector<Eigen::MatrixXd> samples = scan_samples(cfg, input);
  const SplittingReport r = spectral_scan(samples, grid, band);
  timings.lap("scan_ms");
  report["timings_ms"] = timings.out;
  report["samples"] = samples.size();
  json per = json::array();
  for (const auto& e : r.per_lambda) {
    json row{{"lambda", e.lambda}};
    if (e.p) {
      row["p"] = *e.p;
    } else {
      row["p"] = nullptr;
    }
    per.push_back(row);
  }
  report["per_lambda"] = per;
  json intervals = json::array();
  for (const auto& iv : r.intervals) {
    intervals.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"p", iv.p}});
  }
  report["intervals"] = intervals;
  emit_outputs(cfg, report, "locus", locus_csv(samples));
  return finish(std::move(report), "ok");
}

RunOutcome run_dissipate(const Config& cfg, json report) {
  Timings timings;
  const ModelInput input = load_model(cfg, "model");
  if (!input.open_family) {
    throw ConfigError("model", "dissipate needs an open model (B and C blocks)");
  }
  const SupplyRate supply =
      load_supply(cfg, "task", input.open_family->m_y, input.open_family->m_u);
  const double lambda = cfg.require_number("task", "lambda");
  const double epsilon = cfg.number("task", "epsilon", 0.01);
  const DissipResult r = solve_dissipativity(*input.open_family, supply, lambda, epsilon);
  timings.lap("solve_ms");
  report["timings_ms"] = timings.out;
  report["solver_status"] = to_string(r.status);
  if (r.status != DissipStatus::Feasible) {
    report["detail"] = r.detail;
    return finish(std::move(report),
                  r.status == DissipStatus::NumericFailure ? "error" : "infeasible");
  }
  report["certificate"] = to_json(*r.certificate);
  return finish(std::move(report), "ok");
}

RunOutcome run_gain(const Config& cfg, json report) {
  Timings timings;
  const ModelInput input = load_model(cfg, "model");
  if (!input.open_family) {
    throw ConfigError("model", "gain needs an open model (B and C blocks)");
  }
  const int p = static_cast<int>(cfg.require_number("task", "p"));
  const double lambda = cfg.require_number("task", "lambda");
  const double epsilon = cfg.number("task", "epsilon", 0.01);
  const double lo = cfg.number("task", "gamma_lo", 0.05);
  const double hi = cfg.number("task", "gamma_hi", 10.0);
  const double tol = cfg.number("task", "gamma_tol", 1e-3);
  const MinGainResult r = min_gain(*input.open_family, p, lambda, epsilon, lo, hi, tol);
  timings.lap("solve_ms");
  report["timings_ms"] = timings.out;
  report["solves"] = r.solves;
  if (!r.found) {
    report["detail"] = r.detail;
    return finish(std::move(report), "infeasible");
  }
  report["gamma"] = r.gamma;
  report["certificate"] = to_json(*r.certificate);
  return finish(std::move(report), "ok");
}

RunOutcome run_compose(const Config& cfg, json report) {
  Timings timings;
  const ModelInput in1 = load_model(cfg, "subsystem.1");
  const ModelInput in2 = load_model(cfg, "subsystem.2");
  if (!in1.open_family || !in2.open_family) {
    throw ConfigError("subsystem", "compose needs open subsystems");
  }
  const double lambda = cfg.require_number("task", "lambda");
  const double epsilon = cfg.number("task", "epsilon", 0.01);
  const SupplyRate s1 =
      load_supply(cfg, "subsystem.1", in1.open_family->m_y, in1.open_family->m_u);
  SupplyRate s2 = load_supply(cfg, "subsystem.2", in2.open_family->m_y, in2.open_family->m_u);
  if (cfg.has("subsystem.2", "tau")) {
    s2 = scale_supply(s2, cfg.require_number("subsystem.2", "tau"));
  }
  const int mu = in1.open_family->m_u + in2.open_family->m_u;
  const int my = in1.open_family->m_y + in2.open_family->m_y;
  const Eigen::MatrixXd h = parse_matrix(cfg.require("task", "H"), mu, my, "task.H");

  const DissipResult r1 = solve_dissipativity(*in1.open_family, s1, lambda, epsilon);
  const DissipResult r2 = solve_dissipativity(*in2.open_family, s2, lambda, epsilon);
  timings.lap("subsystem_solve_ms");
  if (r1.status != DissipStatus::Feasible || r2.status != DissipStatus::Feasible) {
    report["detail"] = std::string("subsystem 1: ") + to_string(r1.status) +
                       ", subsystem 2: " + to_string(r2.status);
    report["timings_ms"] = timings.out;
    return finish(std::move(report), "infeasible");
  }
  report["subsystem_certificates"] = {to_json(*r1.certificate), to_json(*r2.certificate)};

  const ClosedLoopFamily closed =
      build_closed_loop_family(*in1.open_family, *in2.open_family, h);
  if (closed.status != CloseStatus::Ok) {
    report["detail"] = closed.detail;
    report["timings_ms"] = timings.out;
    return finish(std::move(report), "error");
  }
  const AggregateResult agg =
      aggregate_certificates(*r1.certificate, *r2.certificate, h, closed.family);
  timings.lap("compose_ms");
  report["timings_ms"] = timings.out;
  if (agg.status != AggregateStatus::Ok) {
    report["detail"] = agg.detail;
    return finish(std::move(report), "infeasible");
  }
  report["closed_loop"] = {{"n", closed.family.n}, {"vertices", closed.family.vertices.size()}};
  report["certificate"] = certificate_with_inertia(*agg.certificate);
  return finish(std::move(report), "ok");
}

RunOutcome run_simulate(const Config& cfg, json report) {
  Timings timings;
  const ModelInput input = load_model(cfg, "model");
  if (!input.model) {
    throw ConfigError("model", "simulate needs a builtin model (a vector field)");
  }
  const std::vector<double> x0v = cfg.numbers("task", "x0");
  if (static_cast<int>(x0v.size()) != input.model->n) {
    throw ConfigError("task.x0", "expected " + std::to_string(input.model->n) + " entries");
  }
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(x0v.data(), x0v.size());
  const double dt = cfg.number("task", "dt", 1e-3);
  const double horizon = cfg.number("task", "T", 100.0);
  const double tail = cfg.number("task", "tail_fraction", 0.5);

  Trajectory traj;
  try {
    traj = integrate(*input.model, x0, dt, horizon);
  } catch (const BlowUpError& e) {
    report["detail"] = e.what();
    report["blow_up_time"] = e.time;
    timings.lap("simulate_ms");
    report["timings_ms"] = timings.out;
    return finish(std::move(report), "error");
  }
  const AttractorClass cls = classify_attractor(traj, tail);
  timings.lap("simulate_ms");
  report["timings_ms"] = timings.out;

  json attractor{{"kind", to_string(cls.kind)}, {"amplitude", cls.amplitude}};
  if (cls.kind == AttractorClass::Kind::FixedPoint) {
    attractor["fixed_point"] = matrix_to_json(cls.fixed_point);
  }
  if (cls.kind == AttractorClass::Kind::PeriodicOrbit) attractor["period"] = cls.period;
  if (!cls.diagnostics.empty()) attractor["diagnostics"] = cls.diagnostics;
  report["attractor"] = attractor;
  report["endpoint"] = matrix_to_json(traj.endpoint());

  const std::string traj_path = cfg.get("output", "trajectory", "trajectory.csv");
  write_file_atomic(traj_path, trajectory_csv(traj));
  report["files"]["trajectory"] = traj_path;
  return finish(std::move(report), "ok");
}

RunOutcome run_verify(const Config& cfg, json report) {
  Timings timings;
  const std::string cert_path = cfg.require("task", "certificate");
  std::ifstream in(cert_path);
  if (!in) throw ConfigError("task.certificate", "cannot open " + cert_path);
  json cert_json = json::parse(in);

  const ModelInput input = load_model(cfg, "model");
  const double tol = cfg.number("task", "margin_tol", 1e-6);

  SdpProblem prob;
  SymMatrix P = SymMatrix::Identity(1);
  int stated_p = 0;
  if (cert_json.contains("supply")) {
    const DissipativityCertificate cert = dissipativity_certificate_from_json(cert_json);
    if (!input.open_family) throw ConfigError("model", "certificate is open, model is closed");
    prob.n = input.open_family->n;
    for (const auto& v : input.open_family->vertices) {
      prob.constraints.push_back(
          BorderedConstraint{v.A, v.B, v.C, v.D, cert.supply, cert.lambda, cert.epsilon});
    }
    P = cert.P;
    stated_p = cert.p;
  } else {
    const DominanceCertificate cert = dominance_certificate_from_json(cert_json);
    prob.n = input.family.n;
    for (const auto& a : input.family.vertices) {
      prob.constraints.push_back(LyapunovConstraint{a, cert.lambda, cert.epsilon});
    }
    P = cert.P;
    stated_p = cert.p;
  }
  const std::vector<double> margins = verify_solution(P, prob);
  timings.lap("verify_ms");
  report["timings_ms"] = timings.out;
  report["margins"] = margins;
  const Inertia inertia = inertia_of(P);
  report["inertia"] = {{"neg", inertia.neg}, {"zero", inertia.zero}, {"pos", inertia.pos}};
  bool ok = inertia.neg == stated_p && inertia.zero == 0;
  for (size_t i = 0; i < margins.size(); ++i) {
    if (margins[i] > tol * residual_scale(prob.constraints[i])) ok = false;
  }
  return finish(std::move(report), ok ? "ok" : "infeasible");
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("line " + std::to_string(lineno), "malformed section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      if (!cfg.has_section(current)) cfg.sections_.push_back({current, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    if (current.empty()) {
      throw ConfigError("line " + std::to_string(lineno), "key outside any section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    cfg.set(current, key, value);
  }
  return cfg;
}

bool Config::has_section(const std::string& section) const {
  for (const auto& [name, _] : sections_) {
    if (name == section) return true;
  }
  return false;
}

const Config::Section* Config::section(const std::string& name) const {
  for (const auto& [sec, entries] : sections_) {
    if (sec == name) return &entries;
  }
  return nullptr;
}

const std::string* Config::find(const std::string& section, const std::string& key) const {
  const Section* sec = this->section(section);
  if (!sec) return nullptr;
  for (const auto& [k, v] : *sec) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v ? *v : fallback;
}

std::string Config::require(const std::string& section, const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v) throw ConfigError(section + "." + key, "missing required key");
  return *v;
}

double Config::number(const std::string& section, const std::string& key,
                      double fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  try {
    size_t pos = 0;
    const double x = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument(*v);
    return x;
  } catch (const std::invalid_argument&) {
    throw ConfigError(section + "." + key, "not a number: '" + *v + "'");
  }
}

double Config::require_number(const std::string& section, const std::string& key) const {
  require(section, key);
  return number(section, key, 0.0);
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
  return parse_number_list(require(section, key), section + "." + key);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  for (auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (auto& [k, v] : entries) {
      if (k == key) {
        v = value;
        return;
      }
    }
    entries.push_back({key, value});
    return;
  }
  sections_.push_back({section, {{key, value}}});
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [name, entries] : sections_) {
    os << "[" << name << "]\n";
    for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
  }
  return os.str();
}

void apply_override(Config& config, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("--set", "expected section.key=value");
  const std::string path = trim(spec.substr(0, eq));
  const std::string value = trim(spec.substr(eq + 1));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    throw ConfigError("--set", "expected section.key=value, got '" + spec + "'");
  }
  config.set(path.substr(0, dot), path.substr(dot + 1), value);
}

std::string locus_csv(const std::vector<Eigen::MatrixXd>& samples) {
  std::ostringstream os;
  os << "re,im\n" << std::setprecision(12);
  for (const auto& a : samples) {
    const Spectrum s = eig_general(a);
    for (int i = 0; i < s.eigenvalues.size(); ++i) {
      os << s.eigenvalues[i].real() << "," << s.eigenvalues[i].imag() << "\n";
    }
  }
  return os.str();
}

std::string cone_region_csv(const SymMatrix& P, int circle_samples) {
  if (P.dim() != 2) throw std::invalid_argument("cone_region_csv: P must be 2x2");
  std::ostringstream os;
  os << "theta,x,y,V\n" << std::setprecision(12);
  for (int i = 0; i < circle_samples; ++i) {
    const double theta = 2.0 * M_PI * i / circle_samples;
    const Eigen::Vector2d d(std::cos(theta), std::sin(theta));
    const double v = d.dot(P.mat() * d);
    if (v <= 0.0) {
      os << theta << "," << d.x() << "," << d.y() << "," << v << "\n";
    }
  }
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

RunOutcome run_task(const std::string& task, const Config& config) {
  json report;
  report["tool"] = "domcert";
  report["task"] = task;
  report["config_echo"] = config.canonical();
  report["defaults"] = defaults_json();
  const std::string declared = config.get("task", "type", task);
  try {
    if (declared != task) {
      throw ConfigError("task.type", "config declares '" + declared + "', invoked as '" + task +
                                         "'");
    }
    if (task == "analyze") return run_analyze(config, std::move(report));
    if (task == "scan") return run_scan(config, std::move(report));
    if (task == "dissipate") return run_dissipate(config, std::move(report));
    if (task == "gain") return run_gain(config, std::move(report));
    if (task == "compose") return run_compose(config, std::move(report));
    if (task == "simulate") return run_simulate(config, std::move(report));
    if (task == "verify") return run_verify(config, std::move(report));
    throw ConfigError("task", "unknown task '" + task + "'");
  } catch (const ConfigError& e) {
    report["detail"] = e.what();
    report["error_field"] = e.field_path;
    return finish(std::move(report), "error");
  } catch (const std::exception& e) {
    report["detail"] = e.what();
    return finish(std::move(report), "error");
  }
}

}  // namespace domcert
