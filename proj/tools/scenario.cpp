#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace scenario {

namespace {

// Walks one JSON object, remembering which keys were consumed so that
// leftovers (typos) can be rejected with their path.
class Reader {
 public:
  Reader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw SchemaError(path_.empty() ? "(root)" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return obj_.contains(key); }

  const Json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const Json* j = raw(key);
    if (!j) return fallback;
    return as_number(*j, at(key));
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 0) {
    const Json* j = raw(key);
    if (!j) return fallback;
    if (!j->is_number_integer() && !j->is_number_unsigned()) throw SchemaError(at(key), "expected an integer");
    const auto v = j->get<long long>();
    if (v < static_cast<long long>(min)) throw SchemaError(at(key), "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed = {}) {
    const Json* j = raw(key);
    if (!j) return fallback;
    if (!j->is_string()) throw SchemaError(at(key), "expected a string");
    const std::string v = j->get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw SchemaError(at(key), "unknown value '" + v + "' (expected one of: " + list + ")");
    }
    return v;
  }

  std::vector<double> vector(const std::string& key) {
    const Json* j = raw(key);
    if (!j) return {};
    return as_vector(*j, at(key));
  }

  Matrix matrix(const std::string& key) {
    const Json* j = raw(key);
    if (!j) return {};
    if (!j->is_array()) throw SchemaError(at(key), "expected an array of rows");
    Matrix m;
    for (std::size_t i = 0; i < j->size(); ++i) m.push_back(as_vector((*j)[i], at(key) + "[" + std::to_string(i) + "]"));
    return m;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw SchemaError(at(it.key()), "unknown field");
  }

  static double as_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "must be finite");
    return v;
  }

  static std::vector<double> as_vector(const Json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
  }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

FieldSpec parse_field(const Json& j, const std::string& path) {
  Reader r(j, path);
  FieldSpec f;
  f.type = r.text("type", "zero", {"zero", "constant", "linear", "time_shift", "shear", "nonlinear"});
  f.value = r.vector("value");
  f.matrix = r.matrix("matrix");
  if (f.type == "constant" && !r.has("value")) throw SchemaError(r.at("value"), "required for a constant field");
  if (f.type == "linear" && !r.has("matrix")) throw SchemaError(r.at("matrix"), "required for a linear field");
  r.finish();
  return f;
}

Json field_json(const FieldSpec& f) {
  Json j{{"type", f.type}};
  if (!f.value.empty()) j["value"] = f.value;
  if (!f.matrix.empty()) j["matrix"] = f.matrix;
  return j;
}

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw SchemaError(path, "must be > 0");
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"geodesic",      "forced",        "transport", "flow",      "functionals",
                                              "torsion_probe", "bracket_probe", "validate",  "suspension"};
  return names;
}

Scenario parse(const Json& doc) {
  Reader r(doc, "");
  Scenario s;
  if (!r.has("schema_version")) throw SchemaError("schema_version", "required");
  s.schema_version = static_cast<int>(r.count("schema_version", 0));
  if (s.schema_version != kSchemaVersion)
    throw SchemaError("schema_version", "unsupported version " + std::to_string(s.schema_version) +
                                            " (this build reads " + std::to_string(kSchemaVersion) + ")");
  s.name = r.text("name", "");

  if (!r.has("model")) throw SchemaError("model", "required");
  {
    Reader m(*r.raw("model"), "model");
    if (!m.has("name")) throw SchemaError("model.name", "required");
    s.model = m.text("name", "");
    if (const Json* p = m.raw("params")) {
      Reader pr(*p, "model.params");
      for (auto it = p->begin(); it != p->end(); ++it) s.params[it.key()] = pr.number(it.key(), 0.0);
    }
    m.finish();
  }

  if (!r.has("task")) throw SchemaError("task", "required");
  s.task = r.text("task", "", task_names());
  s.t0 = r.number("t0", 0.0);
  s.t1 = r.number("t1", s.t0);
  s.x0 = r.vector("x0");
  s.v0 = r.vector("v0");
  s.w0 = r.vector("w0");
  s.time_rate = r.number("time_rate", 1.0);
  s.force_convention = r.text("force_convention", "lagrangian", {"lagrangian", "as_printed"});

  if (const Json* j = r.raw("integrator")) {
    Reader ir(*j, "integrator");
    s.integrator.method = ir.text("method", s.integrator.method, {"rk4_fixed", "dopri45_adaptive"});
    s.integrator.step = ir.number("step", s.integrator.step);
    s.integrator.abs_tol = ir.number("abs_tol", s.integrator.abs_tol);
    s.integrator.rel_tol = ir.number("rel_tol", s.integrator.rel_tol);
    s.integrator.max_steps = ir.count("max_steps", s.integrator.max_steps, 1);
    positive(s.integrator.step, "integrator.step");
    positive(s.integrator.abs_tol, "integrator.abs_tol");
    positive(s.integrator.rel_tol, "integrator.rel_tol");
    ir.finish();
  }
  if (const Json* j = r.raw("probe")) {
    Reader pr(*j, "probe");
    if (pr.has("epsilons")) s.probe.epsilons = pr.vector("epsilons");
    s.probe.substeps = pr.count("substeps", s.probe.substeps, 1);
    s.probe.tolerance = pr.number("tolerance", s.probe.tolerance);
    positive(s.probe.tolerance, "probe.tolerance");
    if (s.probe.epsilons.empty()) throw SchemaError("probe.epsilons", "needs at least one value");
    for (std::size_t i = 0; i < s.probe.epsilons.size(); ++i) {
      const std::string at = "probe.epsilons[" + std::to_string(i) + "]";
      positive(s.probe.epsilons[i], at);
      if (i > 0 && !(s.probe.epsilons[i] < s.probe.epsilons[i - 1])) throw SchemaError(at, "must be strictly decreasing");
    }
    pr.finish();
  }
  if (const Json* j = r.raw("validate")) {
    Reader vr(*j, "validate");
    s.validate.samples = vr.count("samples", s.validate.samples, 1);
    s.validate.seed = vr.count("seed", s.validate.seed);
    s.validate.flag_threshold = vr.number("flag_threshold", s.validate.flag_threshold);
    positive(s.validate.flag_threshold, "validate.flag_threshold");
    vr.finish();
  }
  if (const Json* j = r.raw("connection")) {
    Reader cr(*j, "connection");
    s.connection.type = cr.text("type", "metric", {"metric", "synthetic"});
    s.connection.gamma = cr.text("gamma", "zero", {"zero", "levi_civita"});
    s.connection.A = cr.matrix("A");
    s.connection.B = cr.matrix("B");
    s.connection.C = cr.vector("C");
    cr.finish();
  }
  if (const Json* j = r.raw("path")) {
    Reader pr(*j, "path");
    s.path.type = pr.text("type", "linear", {"linear", "geodesic"});
    s.path.samples = pr.count("samples", s.path.samples, 2);
    pr.finish();
  }
  if (const Json* j = r.raw("fields")) {
    Reader fr(*j, "fields");
    if (const Json* x = fr.raw("X")) s.X = parse_field(*x, "fields.X");
    if (const Json* y = fr.raw("Y")) s.Y = parse_field(*y, "fields.Y");
    fr.finish();
  }
  if (const Json* j = r.raw("outputs")) {
    Reader orr(*j, "outputs");
    s.outputs.trajectory = orr.text("trajectory", s.outputs.trajectory);
    s.outputs.report = orr.text("report", s.outputs.report);
    s.outputs.summary = orr.text("summary", s.outputs.summary);
    orr.finish();
  }
  r.finish();
  return s;
}

Scenario parse_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError(file.string(), "cannot open file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(file.string(), std::string("not valid JSON: ") + e.what());
  }
  return parse(doc);
}

Json to_json(const Scenario& s) {
  Json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["model"] = {{"name", s.model}, {"params", s.params}};
  j["task"] = s.task;
  j["t0"] = s.t0;
  j["t1"] = s.t1;
  j["x0"] = s.x0;
  j["v0"] = s.v0;
  j["w0"] = s.w0;
  j["time_rate"] = s.time_rate;
  j["force_convention"] = s.force_convention;
  j["integrator"] = {{"method", s.integrator.method},
                     {"step", s.integrator.step},
                     {"abs_tol", s.integrator.abs_tol},
                     {"rel_tol", s.integrator.rel_tol},
                     {"max_steps", s.integrator.max_steps}};
  j["probe"] = {{"epsilons", s.probe.epsilons}, {"substeps", s.probe.substeps}, {"tolerance", s.probe.tolerance}};
  j["validate"] = {
      {"samples", s.validate.samples}, {"seed", s.validate.seed}, {"flag_threshold", s.validate.flag_threshold}};
  j["connection"] = {{"type", s.connection.type},
                     {"gamma", s.connection.gamma},
                     {"A", s.connection.A},
                     {"B", s.connection.B},
                     {"C", s.connection.C}};
  j["path"] = {{"type", s.path.type}, {"samples", s.path.samples}};
  j["fields"] = {{"X", field_json(s.X)}, {"Y", field_json(s.Y)}};
  j["outputs"] = {
      {"trajectory", s.outputs.trajectory}, {"report", s.outputs.report}, {"summary", s.outputs.summary}};
  return j;
}

namespace {

void need_dim(const std::vector<double>& v, std::size_t n, const std::string& path, bool required) {
  if (v.empty()) {
    if (required) throw SchemaError(path, "required for this task (" + std::to_string(n) + " components)");
    return;
  }
  if (v.size() != n)
    throw SchemaError(path, "expected " + std::to_string(n) + " components, got " + std::to_string(v.size()));
}

void need_square(const Matrix& m, std::size_t n, const std::string& path) {
  if (m.empty()) return;
  if (m.size() != n) throw SchemaError(path, "expected " + std::to_string(n) + " rows");
  for (std::size_t i = 0; i < n; ++i)
    if (m[i].size() != n) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " entries");
}

void check_field(const FieldSpec& f, std::size_t n, const std::string& path) {
  if (f.type == "constant") need_dim(f.value, n, path + ".value", true);
  if (f.type == "linear") need_square(f.matrix, n, path + ".matrix");
  if ((f.type == "shear" || f.type == "nonlinear") && n != 2) throw SchemaError(path + ".type", "'" + f.type + "' needs a 2-dimensional model");
}

}  // namespace

void check_against_model(const Scenario& s, std::size_t n, bool has_potential, bool has_embedding) {
  (void)has_embedding;
  const std::string& t = s.task;
  const bool uses_x = t != "validate";
  const bool uses_v = t == "geodesic" || t == "forced" || t == "transport" || t == "functionals" ||
                      t == "torsion_probe" || t == "suspension";
  const bool uses_w = t == "transport" || t == "torsion_probe";
  need_dim(s.x0, n, "x0", uses_x);
  need_dim(s.v0, n, "v0", uses_v);
  need_dim(s.w0, n, "w0", uses_w);
  if (t == "forced" && !has_potential) throw SchemaError("model", "model '" + s.model + "' has no potential (task forced)");
  if (s.connection.type == "synthetic") {
    need_square(s.connection.A, n, "connection.A");
    need_square(s.connection.B, n, "connection.B");
    need_dim(s.connection.C, n, "connection.C", false);
  } else if (!s.connection.A.empty() || !s.connection.B.empty() || !s.connection.C.empty()) {
    throw SchemaError("connection", "A, B, C are only read for type 'synthetic'");
  }
  if (t == "flow" || t == "bracket_probe") check_field(s.X, n, "fields.X");
  if (t == "bracket_probe") check_field(s.Y, n, "fields.Y");
  if (t == "suspension" && !(s.time_rate != 0.0)) throw SchemaError("time_rate", "must be non-zero");
}

}  // namespace scenario
