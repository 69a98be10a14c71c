#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dipsqueeze/spinmodel.hpp"
#include "dipsqueeze/squeezing.hpp"

namespace dipsqueeze {

enum class ScenarioKind { Uniform, Triangle, Chain, Custom };

[[nodiscard]] std::string_view to_string(ScenarioKind kind) noexcept;
[[nodiscard]] ScenarioKind parse_kind(std::string_view text);

/// All couplings equal to `d_mhz`; n >= 2.
[[nodiscard]] SpinSystemSpec scenario_uniform(int n, double d_mhz);

/// Right-triangle molecule: d12 = -1 MHz, d13 = d23 = 1.6 MHz.
[[nodiscard]] SpinSystemSpec scenario_triangle();

/// Central spin 1 coupled to spins 2 and 3: d12 = -1 MHz, d13 = -2 MHz, d23 = 0.
[[nodiscard]] SpinSystemSpec scenario_chain(ObservableMode mode = ObservableMode::collective());

/// Default tau window per scenario, long enough to contain its optimum.
[[nodiscard]] SweepGrid default_grid(ScenarioKind kind);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Uniform;
  int n_spins = 0;
  double d_mhz = 0.0;
  Eigen::MatrixXd matrix;                // custom kind
  std::optional<GeometrySpec> geometry;  // custom kind, alternative to matrix
  ObservableMode observable_mode;
  SweepGrid grid;
  std::string out_dir = "out";

  /// Throws ValidationError / InvalidN for inconsistent settings.
  void validate() const;
  [[nodiscard]] SpinSystemSpec to_spec() const;
};

[[nodiscard]] bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// Parses the JSON configuration document and applies per-kind defaults.
/// Throws SchemaError (with a field path) or ValidationError.
[[nodiscard]] ScenarioConfig parse_config(std::string_view text);

/// Writes every field explicitly, so parse_config(serialize_config(c)) == c.
[[nodiscard]] std::string serialize_config(const ScenarioConfig& config);

}  // namespace dipsqueeze
