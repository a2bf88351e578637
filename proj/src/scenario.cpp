#include "crowdctl/scenario.hpp"

#include "crowdctl/error.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace crowdctl {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Parse, "scenario field '" + path + "': " + what);
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::Validation, "scenario invalid: " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) parse_fail(path, "expected a number");
  return v.get<double>();
}

VecX vector(const json& v, Index d, const std::string& path) {
  if (!v.is_array()) parse_fail(path, "expected an array of numbers");
  if (d >= 0 && static_cast<Index>(v.size()) != d) {
    parse_fail(path, "expected " + std::to_string(d) + " components, got " +
                         std::to_string(v.size()));
  }
  VecX out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    out(static_cast<Index>(k)) = number(v[k], path + "[" + std::to_string(k) + "]");
  }
  return out;
}

MatX matrix(const json& v, Index d, const std::string& path) {
  if (!v.is_array() || static_cast<Index>(v.size()) != d) {
    parse_fail(path, "expected " + std::to_string(d) + " rows");
  }
  MatX out(d, d);
  for (Index r = 0; r < d; ++r) {
    out.row(r) = vector(v[r], d, path + "[" + std::to_string(r) + "]").transpose();
  }
  return out;
}

Configuration points(const json& v, Index d, const std::string& path) {
  if (!v.is_array()) parse_fail(path, "expected an array of points");
  MatX out(d, static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.col(static_cast<Index>(i)) = vector(v[i], d, path + "[" + std::to_string(i) + "]");
  }
  return Configuration(out);
}

json to_json(const VecX& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json to_json(const MatX& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) out.push_back(to_json(VecX(m.row(r).transpose())));
  return out;
}

json points_json(const Configuration& c) {
  json out = json::array();
  for (Index i = 0; i < c.size(); ++i) out.push_back(to_json(VecX(c.point(i))));
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double finite_or_inf(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

json times_json(const std::vector<std::optional<double>>& times) {
  json out = json::array();
  for (const auto& t : times) out.push_back(optional_json(t));
  return out;
}

std::vector<std::optional<double>> times_from(const json& v) {
  std::vector<std::optional<double>> out;
  for (const auto& t : v) out.push_back(optional_from(t));
  return out;
}

VecX vec_from(const json& v) {
  VecX out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Index>(k)) = v[k].get<double>();
  return out;
}

const char* mode_name(ControlMode mode) {
  return mode == ControlMode::Exact ? "exact" : "approx";
}

ControlMode mode_from(const std::string& name) {
  if (name == "exact") return ControlMode::Exact;
  if (name == "approx") return ControlMode::Approximate;
  throw Error(ErrorCode::Parse, "unknown control mode '" + name + "'");
}

}  // namespace

FlowSettings Scenario::flow_settings() const {
  FlowSettings s;
  s.step = params.step;
  s.t_max = params.t_max;
  s.working_box = params.working_box;
  return s;
}

PlannerParams Scenario::planner_params() const {
  PlannerParams p;
  p.flow = flow_settings();
  p.delta = params.delta;
  p.epsilon = params.epsilon;
  p.seed = params.seed;
  return p;
}

Scenario parse_scenario(const json& doc) {
  Scenario s;
  const json& dim = require(doc, "dimension", "");
  if (!dim.is_number_integer() || dim.get<long long>() < 1) {
    parse_fail("dimension", "expected an integer >= 1");
  }
  s.dimension = dim.get<Index>();
  const Index d = s.dimension;

  const json& field = require(doc, "field", "");
  const json& type = require(field, "type", "field");
  if (type == "constant") {
    s.field = VectorField::constant(vector(require(field, "value", "field"), d, "field.value"));
  } else if (type == "affine") {
    s.field = VectorField::affine(matrix(require(field, "matrix", "field"), d, "field.matrix"),
                                  vector(require(field, "offset", "field"), d, "field.offset"));
  } else {
    parse_fail("field.type", "expected \"constant\" or \"affine\"");
  }

  // Params first: the region needs the margins.
  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) parse_fail("params", "expected an object");
    auto& sp = s.params;
    const auto num = [&](const char* key, double& slot) {
      if (p.contains(key)) slot = number(p[key], std::string("params.") + key);
    };
    num("step", sp.step);
    num("t_max", sp.t_max);
    num("delta", sp.delta);
    num("epsilon", sp.epsilon);
    num("interior_margin", sp.interior_margin);
    num("boundary_tol", sp.boundary_tol);
    if (p.contains("output_stride")) {
      if (!p["output_stride"].is_number_integer()) parse_fail("params.output_stride", "expected an integer");
      sp.output_stride = p["output_stride"].get<int>();
    }
    if (p.contains("seed")) {
      if (!p["seed"].is_number_unsigned()) parse_fail("params.seed", "expected a non-negative integer");
      sp.seed = p["seed"].get<std::uint64_t>();
    }
    if (p.contains("working_box")) {
      const json& wb = p["working_box"];
      sp.working_box = BoxX(vector(require(wb, "lo", "params.working_box"), d, "params.working_box.lo"),
                            vector(require(wb, "hi", "params.working_box"), d, "params.working_box.hi"));
    }
  }
  if (!s.params.working_box) {
    s.params.working_box = BoxX(VecX::Constant(d, -1e6), VecX::Constant(d, 1e6));
  }

  const json& region = require(doc, "region", "");
  const json& hs = require(region, "halfspaces", "region");
  if (!hs.is_array() || hs.empty()) parse_fail("region.halfspaces", "expected a non-empty array");
  std::vector<HalfSpace<double>> faces;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const std::string path = "region.halfspaces[" + std::to_string(k) + "]";
    faces.push_back({vector(require(hs[k], "normal", path), d, path + ".normal"),
                     number(require(hs[k], "offset", path), path + ".offset")});
  }

  s.initial = points(require(doc, "initial", ""), d, "initial");
  s.target = points(require(doc, "target", ""), d, "target");

  // Validation.
  const auto& sp = s.params;
  if (!(sp.step > 0.0)) invalid("params.step must be positive");
  if (!(sp.t_max > 0.0)) invalid("params.t_max must be positive");
  if (!(sp.delta > 0.0)) invalid("params.delta must be positive");
  if (!(sp.epsilon > 0.0)) invalid("params.epsilon must be positive");
  if (!(sp.interior_margin > 0.0)) invalid("params.interior_margin must be positive");
  if (!(sp.boundary_tol >= 0.0)) invalid("params.boundary_tol must be non-negative");
  if (sp.output_stride < 1) invalid("params.output_stride must be at least 1");
  if (!(sp.working_box->min().array() < sp.working_box->max().array()).all()) {
    invalid("params.working_box must have lo < hi");
  }
  try {
    s.region = ConvexRegion::normalized(faces, sp.interior_margin, sp.boundary_tol);
  } catch (const Error& e) {
    invalid(e.what());
  }
  check_nonempty_interior(s.region);
  if (s.initial.size() != s.target.size()) {
    invalid("initial and target configurations differ in size");
  }
  if (s.initial.size() == 0) invalid("configurations are empty");
  if (!is_disjoint(s.initial)) invalid("configuration not disjoint (initial)");
  if (!is_disjoint(s.target)) invalid("configuration not disjoint (target)");
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << "scenario parse error at line " << line << ", column " << column << ": " << e.what();
    throw Error(ErrorCode::Parse, os.str());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario_text(read_file(path));
}

json scenario_to_json(const Scenario& s) {
  json field;
  if (s.field.kind() == VectorField::Kind::Constant) {
    field = {{"type", "constant"}, {"value", to_json(s.field.offset())}};
  } else {
    field = {{"type", "affine"}, {"matrix", to_json(s.field.matrix())},
             {"offset", to_json(s.field.offset())}};
  }
  json hs = json::array();
  for (const auto& h : s.region.halfspaces()) {
    hs.push_back({{"normal", to_json(h.normal)}, {"offset", h.offset}});
  }
  json params = {
      {"step", s.params.step},
      {"t_max", s.params.t_max},
      {"delta", s.params.delta},
      {"epsilon", s.params.epsilon},
      {"interior_margin", s.params.interior_margin},
      {"boundary_tol", s.params.boundary_tol},
      {"output_stride", s.params.output_stride},
      {"seed", s.params.seed},
  };
  if (s.params.working_box) {
    params["working_box"] = {{"lo", to_json(VecX(s.params.working_box->min()))},
                             {"hi", to_json(VecX(s.params.working_box->max()))}};
  }
  return {{"dimension", s.dimension}, {"field", field},
          {"region", {{"halfspaces", hs}}}, {"initial", points_json(s.initial)},
          {"target", points_json(s.target)}, {"params", params}};
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

json report_to_json(const MinimalTimeReport& r) {
  return {
      {"mode", mode_name(r.mode)},
      {"feasible", r.feasible},
      {"infimum_time", optional_json(r.infimum_time)},
      {"actuation_threshold", optional_json(r.actuation_threshold)},
      {"pairing", r.pairing},
      {"forward_times_sorted", r.forward_times_sorted},
      {"backward_times_sorted", r.backward_times_sorted},
      {"hitting",
       {{"t0", times_json(r.hitting.t0)},
        {"t0_bar", times_json(r.hitting.t0_bar)},
        {"t1", times_json(r.hitting.t1)},
        {"t1_bar", times_json(r.hitting.t1_bar)},
        {"horizon", r.hitting.horizon}}},
  };
}

MinimalTimeReport report_from_json(const json& doc) {
  MinimalTimeReport r;
  r.mode = mode_from(doc.at("mode").get<std::string>());
  r.feasible = doc.at("feasible").get<bool>();
  r.infimum_time = optional_from(doc.at("infimum_time"));
  r.actuation_threshold = optional_from(doc.at("actuation_threshold"));
  r.pairing = doc.at("pairing").get<Permutation>();
  r.forward_times_sorted = doc.at("forward_times_sorted").get<std::vector<double>>();
  r.backward_times_sorted = doc.at("backward_times_sorted").get<std::vector<double>>();
  const json& h = doc.at("hitting");
  r.hitting.t0 = times_from(h.at("t0"));
  r.hitting.t0_bar = times_from(h.at("t0_bar"));
  r.hitting.t1 = times_from(h.at("t1"));
  r.hitting.t1_bar = times_from(h.at("t1_bar"));
  r.hitting.horizon = h.at("horizon").get<double>();
  return r;
}

json plan_to_json(const ControlPlan& plan) {
  json agents = json::array();
  for (const AgentPlan& a : plan.agents) {
    agents.push_back({
        {"start", to_json(a.start)},
        {"target", to_json(a.target)},
        {"entry_time", a.entry_time},
        {"exit_time", a.exit_time},
        {"entry_point", to_json(a.entry_point)},
        {"exit_point", to_json(a.exit_point)},
        {"velocity", to_json(a.velocity)},
        {"inner_radius", a.inner_radius},
        {"outer_radius", a.outer_radius},
    });
  }
  return {
      {"horizon", plan.horizon},
      {"step", plan.step},
      {"permutation", plan.permutation},
      {"control_bound", plan.control_bound},
      {"min_separation", finite_or_null(plan.min_separation)},
      {"agents", agents},
  };
}

ControlPlan plan_from_json(const json& doc) {
  ControlPlan plan;
  plan.horizon = doc.at("horizon").get<double>();
  plan.step = doc.at("step").get<double>();
  plan.permutation = doc.at("permutation").get<Permutation>();
  plan.control_bound = doc.at("control_bound").get<double>();
  plan.min_separation = finite_or_inf(doc.at("min_separation"));
  for (const json& a : doc.at("agents")) {
    AgentPlan p;
    p.start = vec_from(a.at("start"));
    p.target = vec_from(a.at("target"));
    p.entry_time = a.at("entry_time").get<double>();
    p.exit_time = a.at("exit_time").get<double>();
    p.entry_point = vec_from(a.at("entry_point"));
    p.exit_point = vec_from(a.at("exit_point"));
    p.velocity = vec_from(a.at("velocity"));
    p.inner_radius = a.at("inner_radius").get<double>();
    p.outer_radius = a.at("outer_radius").get<double>();
    plan.agents.push_back(std::move(p));
  }
  return plan;
}

json plan_file_to_json(const PlanFile& f) {
  return {{"scenario_hash", f.scenario_hash},
          {"mode", mode_name(f.mode)},
          {"report", report_to_json(f.report)},
          {"plan", plan_to_json(f.plan)}};
}

PlanFile plan_file_from_json(const json& doc) {
  try {
    PlanFile f;
    f.scenario_hash = doc.at("scenario_hash").get<std::string>();
    f.mode = mode_from(doc.at("mode").get<std::string>());
    f.report = report_from_json(doc.at("report"));
    f.plan = plan_from_json(doc.at("plan"));
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed plan file: ") + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string trajectory_csv(const SimulationResult& result) {
  std::string out;
  const Index d = result.samples.empty() ? 0 : result.samples.front().rows();
  out += "t,agent";
  for (Index k = 0; k < d; ++k) out += ",x" + std::to_string(k);
  out += '\n';
  char buf[64];
  for (std::size_t s = 0; s < result.samples.size(); ++s) {
    const MatX& x = result.samples[s];
    for (Index i = 0; i < x.cols(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", result.times[s]);
      out += buf;
      out += ',' + std::to_string(i);
      for (Index k = 0; k < d; ++k) {
        std::snprintf(buf, sizeof(buf), ",%.17g", x(k, i));
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

json simulation_summary(const ControlPlan& plan, const SimulationResult& result) {
  return {{"horizon", plan.horizon},
          {"endpoint_error", result.endpoint_error},
          {"control_sup_norm", result.control_sup_norm},
          {"samples", result.times.size()},
          {"agents", plan.size()}};
}

}  // namespace crowdctl
