#include "dipsqueeze/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dipsqueeze/io.hpp"
#include "dipsqueeze/scenarios.hpp"

namespace dipsqueeze {

namespace fs = std::filesystem;

namespace {

struct ScenarioFlags {
  std::string config_path;
  std::string kind;
  int n = 0;
  double d_mhz = 0.0;
  double tau_max_ns = 0.0;
  double tau_step_ns = 0.0;
  double theta_step_deg = 0.0;
  std::string mode;
  std::string out;

  CLI::Option* o_kind = nullptr;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_d = nullptr;
  CLI::Option* o_tau_max = nullptr;
  CLI::Option* o_tau_step = nullptr;
  CLI::Option* o_theta_step = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_out = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON scenario configuration");
    o_kind = cmd->add_option("--kind", kind, "uniform | triangle | chain | custom");
    o_n = cmd->add_option("--n", n, "number of spins (uniform)");
    o_d = cmd->add_option("--d-mhz", d_mhz, "uniform coupling d/(2 pi) in MHz");
    o_tau_max = cmd->add_option("--tau-max-ns", tau_max_ns, "end of the tau grid");
    o_tau_step = cmd->add_option("--tau-step-ns", tau_step_ns, "tau grid step");
    o_theta_step = cmd->add_option("--theta-step-deg", theta_step_deg, "theta grid step");
    o_mode = cmd->add_option("--mode", mode, "collective | single_site:<i>");
    o_out = cmd->add_option("--out", out, "output directory");
  }

  // Config file first, then every flag given on the command line on top.
  [[nodiscard]] ScenarioConfig resolve() const {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::SchemaError, "cannot read config file '" + config_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        doc = nlohmann::json::parse(ss.str());
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, std::string("$: malformed JSON: ") + e.what());
      }
      if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "$: expected an object");
    }
    if (o_kind->count()) doc["kind"] = kind;
    if (!doc.contains("kind")) doc["kind"] = "uniform";
    const bool is_uniform = doc["kind"] == "uniform";
    if (o_n->count()) doc["n"] = n;
    if (o_d->count()) doc["d_mhz"] = d_mhz;
    if (is_uniform && !doc.contains("n")) doc["n"] = 3;
    if (is_uniform && !doc.contains("d_mhz")) doc["d_mhz"] = 1.0;
    if (o_tau_max->count()) doc["tau_end_ns"] = tau_max_ns;
    if (o_tau_step->count()) doc["tau_step_ns"] = tau_step_ns;
    if (o_theta_step->count()) {
      doc["theta_step_deg"] = theta_step_deg;
      // Keep the grid's last point below 180 degrees for coarse steps.
      if (!doc.contains("theta_end_deg")) doc["theta_end_deg"] = 180.0 - theta_step_deg;
    }
    if (o_mode->count()) doc["observable_mode"] = mode;
    if (o_out->count()) doc["out_dir"] = out;
    return parse_config(doc.dump());
  }
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::SchemaError:
    case ErrorCode::ValidationError:
    case ErrorCode::InvalidN:
    case ErrorCode::InvalidGrid:
    case ErrorCode::EmptyGrid:
    case ErrorCode::AsymmetricCouplings:
    case ErrorCode::SiteOutOfRange:
    case ErrorCode::CoincidentPositions:
    case ErrorCode::InvalidGeometry:
      return kExitConfigError;
    default:
      return kExitNumericalError;
  }
}

std::vector<double> parse_number_list(const std::string& text, char sep) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ValidationError, "cannot parse number '" + item + "'");
    }
  }
  return values;
}

Eigen::Vector3d parse_vec3(const std::string& text) {
  const auto v = parse_number_list(text, ',');
  if (v.size() != 3) throw Error(ErrorCode::ValidationError, "expected x,y,z but got '" + text + "'");
  return {v[0], v[1], v[2]};
}

int cmd_run(const ScenarioFlags& flags, std::ostream& out) {
  const ScenarioConfig config = flags.resolve();
  const SpinSystemSpec spec = config.to_spec();
  const SweepResult result = tau_sweep(spec, config.grid);
  const SweepSummary& s = result.summary;

  const fs::path dir(config.out_dir);
  write_timeseries(result.points, dir / "timeseries.csv");
  write_summary(s, dir / "summary.json");

  const SpectralPropagator propagator = make_propagator(spec);
  const ThetaSweep at_min = theta_sweep(propagator.state_at(s.tau_min_ns), config.grid, spec.observable_mode);
  const auto it = std::find_if(result.points.begin(), result.points.end(),
                               [&](const SqueezingPoint& p) { return p.tau_ns == s.tau_min_ns; });
  const std::string ellipse = ellipse_filename(s.tau_min_ns);
  write_ellipse(at_min.samples, it->j_mag, dir / ellipse);

  out << "sigma_min=" << format_number(s.sigma_min) << '\n'
      << "tau_min=" << format_number(s.tau_min_ns) << '\n'
      << "theta_min=" << format_number(s.theta_min_deg) << '\n'
      << "sigma_a_min=" << format_number(s.sigma_a_min) << '\n'
      << "sigma_0=" << format_number(s.sigma_0) << '\n'
      << "mode=" << s.observable_mode.to_string() << '\n'
      << "degenerate_points=" << s.degenerate_points << '\n';
  if (s.sigma_min >= s.sigma_0 - 1e-9) out << "note=no squeezing\n";
  out << "outputs=" << (dir / "timeseries.csv").string() << ',' << (dir / "summary.json").string()
      << ',' << (dir / ellipse).string() << '\n';
  return kExitOk;
}

int cmd_entropy(const ScenarioFlags& flags, std::ostream& out) {
  const ScenarioConfig config = flags.resolve();
  const EntropyTrace trace = entropy_trace(config.to_spec(), config.grid);
  const fs::path path = fs::path(config.out_dir) / "entropy.csv";
  write_entropy_trace(trace, path);

  double max_entropy = 0.0;
  for (const auto& row : trace.entropies) {
    for (double v : row) max_entropy = std::max(max_entropy, v);
  }
  const auto crossing = first_plateau_crossing(trace);
  out << "max_entropy=" << format_number(max_entropy) << '\n'
      << "plateau_tau=" << (crossing ? format_number(*crossing) : std::string("none")) << '\n'
      << "outputs=" << path.string() << '\n';
  return kExitOk;
}

int cmd_table1(double d_mhz, int n_max, const std::string& out_dir, std::ostream& out) {
  if (n_max < 2 || n_max > 12) throw Error(ErrorCode::InvalidN, "--n-max must lie in 2..12");
  const auto rows = table1(d_mhz, n_max, default_grid(ScenarioKind::Uniform));
  for (const auto& r : rows) {
    out << "n=" << r.n_spins << " j=" << format_number(r.j) << " sigma_0=" << format_number(r.sigma_0)
        << " sigma_min=" << format_number(r.sigma_min) << " tau_min=" << format_number(r.tau_min_ns)
        << " theta_min=" << format_number(r.theta_min_deg) << " ratio=" << format_number(r.ratio) << '\n';
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const fs::path path = fs::path(out_dir) / "table1.csv";
    std::ofstream csv(path, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    csv << "n,j,sigma_0,sigma_min,tau_min_ns,theta_min_deg,ratio\n";
    for (const auto& r : rows) {
      csv << r.n_spins << ',' << format_number(r.j) << ',' << format_number(r.sigma_0) << ','
          << format_number(r.sigma_min) << ',' << format_number(r.tau_min_ns) << ','
          << format_number(r.theta_min_deg) << ',' << format_number(r.ratio) << '\n';
    }
    if (!csv) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    out << "outputs=" << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_couple(const std::string& positions, const std::string& gammas, double spin,
               const std::string& field_axis, std::ostream& out) {
  GeometrySpec geom;
  std::stringstream ss(positions);
  std::string item;
  while (std::getline(ss, item, ';')) geom.positions_nm.push_back(parse_vec3(item));
  if (!gammas.empty()) {
    geom.gyromagnetic_ratios_ghz_per_t = parse_number_list(gammas, ',');
    if (geom.gyromagnetic_ratios_ghz_per_t.size() == 1) {
      geom.gyromagnetic_ratios_ghz_per_t.assign(geom.positions_nm.size(),
                                                geom.gyromagnetic_ratios_ghz_per_t.front());
    }
  }
  geom.spin_magnitude = spin;
  geom.field_axis = parse_vec3(field_axis);
  if (geom.field_axis.norm() > 0.0) geom.field_axis.normalize();

  const Eigen::MatrixXd d = coupling_matrix(geom);
  const auto n = d.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out << "d_" << i + 1 << '_' << j + 1 << "_mhz=" << format_number(d(i, j)) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out << "row_" << i + 1 << '=';
    for (Eigen::Index j = 0; j < n; ++j) out << (j ? "," : "") << format_number(d(i, j));
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

std::vector<Table1Row> table1(double d_mhz, int n_max, const SweepGrid& grid) {
  std::vector<Table1Row> rows;
  for (int n = 2; n <= n_max; ++n) {
    const SweepSummary s = tau_sweep(scenario_uniform(n, d_mhz), grid).summary;
    rows.push_back({n, 0.5 * n, s.sigma_0, s.sigma_min, s.tau_min_ns, s.theta_min_deg, s.sigma_min / s.sigma_0});
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin-squeezing simulator for dipole-coupled spin-1/2 systems", "dipsqueeze"};
  app.require_subcommand(1, 1);

  ScenarioFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "tau/theta sweep with timeseries, summary and ellipse output");
  run_flags.attach(run);

  ScenarioFlags entropy_flags;
  CLI::App* entropy = app.add_subcommand("entropy", "per-site von Neumann entropy versus tau");
  entropy_flags.attach(entropy);

  double t1_d = 1.0;
  int t1_n_max = 10;
  std::string t1_out;
  CLI::App* t1 = app.add_subcommand("table1", "uniform sweeps for N = 2..n_max");
  t1->add_option("--d-mhz", t1_d, "uniform coupling d/(2 pi) in MHz");
  t1->add_option("--n-max", t1_n_max, "largest spin count (2..12)");
  t1->add_option("--out", t1_out, "directory for table1.csv");

  std::string positions;
  std::string gammas;
  double spin = 0.5;
  std::string field_axis = "0,0,1";
  CLI::App* couple = app.add_subcommand("couple", "dipolar couplings from spin positions");
  couple->add_option("--positions", positions, "x,y,z;x,y,z;... in nm")->required();
  couple->add_option("--gamma", gammas, "gyromagnetic ratio(s) in GHz/T, one or one per spin");
  couple->add_option("--spin", spin, "spin magnitude S");
  couple->add_option("--field-axis", field_axis, "field direction x,y,z");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, out);
    if (entropy->parsed()) return cmd_entropy(entropy_flags, out);
    if (t1->parsed()) return cmd_table1(t1_d, t1_n_max, t1_out, out);
    if (couple->parsed()) return cmd_couple(positions, gammas, spin, field_axis, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalError;
  }
  return kExitConfigError;
}

}  // namespace dipsqueeze
