#include "dipsqueeze/scenarios.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace dipsqueeze {

using nlohmann::json;

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Uniform: return "uniform";
    case ScenarioKind::Triangle: return "triangle";
    case ScenarioKind::Chain: return "chain";
    case ScenarioKind::Custom: return "custom";
  }
  return "unknown";
}

ScenarioKind parse_kind(std::string_view text) {
  if (text == "uniform") return ScenarioKind::Uniform;
  if (text == "triangle") return ScenarioKind::Triangle;
  if (text == "chain") return ScenarioKind::Chain;
  if (text == "custom") return ScenarioKind::Custom;
  throw Error(ErrorCode::ValidationError, "unknown scenario kind '" + std::string(text) + "'");
}

SpinSystemSpec scenario_uniform(int n, double d_mhz) {
  if (n < 2) throw Error(ErrorCode::InvalidN, "uniform scenario needs n >= 2");
  if (!std::isfinite(d_mhz)) throw Error(ErrorCode::ValidationError, "d_mhz must be finite");
  SpinSystemSpec spec;
  spec.n_spins = n;
  spec.couplings_mhz = Eigen::MatrixXd::Constant(n, n, d_mhz);
  spec.couplings_mhz.diagonal().setZero();
  return spec;
}

SpinSystemSpec scenario_triangle() {
  SpinSystemSpec spec;
  spec.n_spins = 3;
  spec.couplings_mhz.resize(3, 3);
  spec.couplings_mhz << 0.0, -1.0, 1.6,
                        -1.0, 0.0, 1.6,
                        1.6, 1.6, 0.0;
  return spec;
}

SpinSystemSpec scenario_chain(ObservableMode mode) {
  SpinSystemSpec spec;
  spec.n_spins = 3;
  spec.couplings_mhz.resize(3, 3);
  spec.couplings_mhz << 0.0, -1.0, -2.0,
                        -1.0, 0.0, 0.0,
                        -2.0, 0.0, 0.0;
  spec.observable_mode = mode;
  spec.validate();
  return spec;
}

SweepGrid default_grid(ScenarioKind kind) {
  SweepGrid grid;
  switch (kind) {
    case ScenarioKind::Triangle: grid.tau_end_ns = 1100.0; break;
    case ScenarioKind::Chain: grid.tau_end_ns = 2900.0; break;
    case ScenarioKind::Uniform:
    case ScenarioKind::Custom: grid.tau_end_ns = 650.0; break;
  }
  return grid;
}

void ScenarioConfig::validate() const {
  grid.validate();
  switch (kind) {
    case ScenarioKind::Uniform:
      if (n_spins < 2) throw Error(ErrorCode::InvalidN, "uniform scenario needs n >= 2");
      if (!std::isfinite(d_mhz)) throw Error(ErrorCode::ValidationError, "d_mhz must be finite");
      break;
    case ScenarioKind::Triangle:
    case ScenarioKind::Chain:
      if (n_spins != 3) throw Error(ErrorCode::ValidationError, "triangle and chain scenarios have n = 3");
      break;
    case ScenarioKind::Custom:
      if (geometry) {
        geometry->validate();
      } else if (matrix.rows() == 0) {
        throw Error(ErrorCode::ValidationError, "custom scenario needs a coupling matrix or geometry");
      }
      break;
  }
  to_spec().validate();
}

SpinSystemSpec ScenarioConfig::to_spec() const {
  SpinSystemSpec spec;
  switch (kind) {
    case ScenarioKind::Uniform: spec = scenario_uniform(n_spins, d_mhz); break;
    case ScenarioKind::Triangle: spec = scenario_triangle(); break;
    case ScenarioKind::Chain: spec = scenario_chain(); break;
    case ScenarioKind::Custom:
      spec.n_spins = static_cast<int>(geometry ? geometry->positions_nm.size() : matrix.rows());
      spec.couplings_mhz = geometry ? coupling_matrix(*geometry) : matrix;
      break;
  }
  spec.observable_mode = observable_mode;
  return spec;
}

namespace {

bool same_geometry(const GeometrySpec& a, const GeometrySpec& b) {
  return a.positions_nm == b.positions_nm &&
         a.gyromagnetic_ratios_ghz_per_t == b.gyromagnetic_ratios_ghz_per_t &&
         a.spin_magnitude == b.spin_magnitude && a.field_axis == b.field_axis;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

double get_number(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number()) schema_error(std::string("$.") + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) schema_error(std::string("$.") + key, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_string()) schema_error(std::string("$.") + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema_error(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

Eigen::Vector3d vec3(const json& v, const std::string& path) {
  const auto xs = number_list(v, path);
  if (xs.size() != 3) schema_error(path, "expected three components");
  return {xs[0], xs[1], xs[2]};
}

Eigen::MatrixXd parse_matrix(const json& v, const std::string& path = "$.matrix") {
  if (!v.is_array() || v.empty()) schema_error(path, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const auto row = number_list(v[static_cast<std::size_t>(i)], row_path);
    if (static_cast<Eigen::Index>(row.size()) != n) schema_error(row_path, "matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

GeometrySpec parse_geometry(const json& v) {
  static const std::set<std::string> known = {"positions_nm", "gamma_ghz_per_t", "spin", "field_axis"};
  if (!v.is_object()) schema_error("$.geometry", "expected an object");
  for (const auto& [key, _] : v.items()) {
    if (!known.contains(key)) schema_error("$.geometry." + key, "unknown field");
  }
  GeometrySpec g;
  if (!v.contains("positions_nm")) schema_error("$.geometry.positions_nm", "required field missing");
  const json& pos = v.at("positions_nm");
  if (!pos.is_array()) schema_error("$.geometry.positions_nm", "expected an array");
  for (std::size_t i = 0; i < pos.size(); ++i) {
    g.positions_nm.push_back(vec3(pos[i], "$.geometry.positions_nm[" + std::to_string(i) + "]"));
  }
  if (v.contains("gamma_ghz_per_t")) {
    g.gyromagnetic_ratios_ghz_per_t = number_list(v.at("gamma_ghz_per_t"), "$.geometry.gamma_ghz_per_t");
  }
  if (v.contains("spin")) {
    if (!v.at("spin").is_number()) schema_error("$.geometry.spin", "expected a number");
    g.spin_magnitude = v.at("spin").get<double>();
  }
  if (v.contains("field_axis")) g.field_axis = vec3(v.at("field_axis"), "$.geometry.field_axis");
  return g;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  const bool geometry_equal = a.geometry.has_value() == b.geometry.has_value() &&
                              (!a.geometry || same_geometry(*a.geometry, *b.geometry));
  const bool matrix_equal = a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() &&
                            (a.matrix.size() == 0 || a.matrix == b.matrix);
  return a.kind == b.kind && a.n_spins == b.n_spins && a.d_mhz == b.d_mhz && matrix_equal &&
         geometry_equal && a.observable_mode == b.observable_mode && a.grid == b.grid &&
         a.out_dir == b.out_dir;
}

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error("$", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("$", "expected an object");

  static const std::set<std::string> known = {
      "kind", "n", "d_mhz", "matrix", "geometry", "observable_mode", "tau_start_ns",
      "tau_end_ns", "tau_step_ns", "theta_start_deg", "theta_end_deg", "theta_step_deg", "out_dir", "couplings_mhz"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) schema_error("$." + key, "unknown field");
  }
  if (!doc.contains("kind")) schema_error("$.kind", "required field missing");

  ScenarioConfig c;
  c.kind = parse_kind(get_string(doc, "kind"));
  c.grid = default_grid(c.kind);

  switch (c.kind) {
    case ScenarioKind::Uniform:
      if (!doc.contains("n")) schema_error("$.n", "required for kind 'uniform'");
      if (!doc.contains("d_mhz")) schema_error("$.d_mhz", "required for kind 'uniform'");
      c.n_spins = get_int(doc, "n");
      c.d_mhz = get_number(doc, "d_mhz");
      break;
    case ScenarioKind::Triangle:
    case ScenarioKind::Chain:
      c.n_spins = doc.contains("n") ? get_int(doc, "n") : 3;
      break;
    case ScenarioKind::Custom:
      if (doc.contains("matrix")) {
        c.matrix = parse_matrix(doc.at("matrix"));
        c.n_spins = static_cast<int>(c.matrix.rows());
      } else if (doc.contains("geometry")) {
        c.geometry = parse_geometry(doc.at("geometry"));
        c.n_spins = static_cast<int>(c.geometry->positions_nm.size());
      } else {
        schema_error("$.matrix", "custom kind requires 'matrix' or 'geometry'");
      }
      if (doc.contains("n") && get_int(doc, "n") != c.n_spins) {
        throw Error(ErrorCode::ValidationError, "$.n disagrees with the coupling matrix size");
      }
      break;
  }
  if (c.kind != ScenarioKind::Custom && (doc.contains("matrix") || doc.contains("geometry"))) {
    schema_error("$.matrix", "only kind 'custom' accepts explicit couplings");
  }
  if (doc.contains("couplings_mhz")) {
    if (c.kind != ScenarioKind::Triangle && c.kind != ScenarioKind::Chain) {
      schema_error("$.couplings_mhz", "only preset kinds echo their couplings");
    }
    const Eigen::MatrixXd echoed = parse_matrix(doc.at("couplings_mhz"), "$.couplings_mhz");
    const Eigen::MatrixXd preset = c.kind == ScenarioKind::Triangle ? scenario_triangle().couplings_mhz
                                                                     : scenario_chain().couplings_mhz;
    if (echoed.rows() != preset.rows() || echoed != preset) {
      throw Error(ErrorCode::ValidationError, "$.couplings_mhz differs from the preset couplings");
    }
  }

  if (doc.contains("observable_mode")) {
    c.observable_mode = ObservableMode::parse(get_string(doc, "observable_mode"));
  }
  if (doc.contains("tau_start_ns")) c.grid.tau_start_ns = get_number(doc, "tau_start_ns");
  if (doc.contains("tau_end_ns")) c.grid.tau_end_ns = get_number(doc, "tau_end_ns");
  if (doc.contains("tau_step_ns")) c.grid.tau_step_ns = get_number(doc, "tau_step_ns");
  if (doc.contains("theta_start_deg")) c.grid.theta_start_deg = get_number(doc, "theta_start_deg");
  if (doc.contains("theta_end_deg")) c.grid.theta_end_deg = get_number(doc, "theta_end_deg");
  if (doc.contains("theta_step_deg")) c.grid.theta_step_deg = get_number(doc, "theta_step_deg");
  if (doc.contains("out_dir")) c.out_dir = get_string(doc, "out_dir");

  try {
    c.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) throw;
    throw Error(ErrorCode::ValidationError, e.what());
  }
  return c;
}

std::string serialize_config(const ScenarioConfig& c) {
  json doc;
  doc["kind"] = std::string(to_string(c.kind));
  doc["n"] = c.n_spins;
  if (c.kind == ScenarioKind::Uniform) doc["d_mhz"] = c.d_mhz;
  if (c.kind == ScenarioKind::Custom) {
    if (c.geometry) {
      json g;
      json pos = json::array();
      for (const auto& p : c.geometry->positions_nm) pos.push_back({p.x(), p.y(), p.z()});
      g["positions_nm"] = pos;
      if (!c.geometry->gyromagnetic_ratios_ghz_per_t.empty()) {
        g["gamma_ghz_per_t"] = c.geometry->gyromagnetic_ratios_ghz_per_t;
      }
      g["spin"] = c.geometry->spin_magnitude;
      const auto& f = c.geometry->field_axis;
      g["field_axis"] = {f.x(), f.y(), f.z()};
      doc["geometry"] = g;
    } else {
      doc["matrix"] = matrix_json(c.matrix);
    }
  } else if (c.kind != ScenarioKind::Uniform) {
    // Presets echo their couplings for reference; they are not read back.
    doc["couplings_mhz"] = matrix_json(c.to_spec().couplings_mhz);
  }
  doc["observable_mode"] = c.observable_mode.to_string();
  doc["tau_start_ns"] = c.grid.tau_start_ns;
  doc["tau_end_ns"] = c.grid.tau_end_ns;
  doc["tau_step_ns"] = c.grid.tau_step_ns;
  doc["theta_start_deg"] = c.grid.theta_start_deg;
  doc["theta_end_deg"] = c.grid.theta_end_deg;
  doc["theta_step_deg"] = c.grid.theta_step_deg;
  doc["out_dir"] = c.out_dir;
  return doc.dump(2) + "\n";
}

}  // namespace dipsqueeze
