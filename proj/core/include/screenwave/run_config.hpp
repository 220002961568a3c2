#pragma once

// Batch run configuration: flat INI-style sections, `key = value` lines,
// `#` comments.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "screenwave/waveguide_mesh.hpp"

namespace screenwave::config {

/// Aperture centred at `center`; `width` is in units of epsilon.
struct HoleSpec {
  double center = 0.5;
  double width = 1.0;
};

enum class CrackKind { disk, rectangle };

struct RunConfig {
  // [problem]
  double kappa = 0.0;
  double epsilon = 0.0;
  std::optional<double> L;
  int q = 1;

  // [geometry]
  std::vector<HoleSpec> holes_left{{0.5, 1.0}};
  std::vector<HoleSpec> holes_right{{0.5, 1.0}};

  // [mesh]
  mesh::MeshOptions mesh;

  // [dtn]
  int n_modes = 15;
  double Z_offset = 1.0;

  // [sweep]
  bool has_sweep = false;
  double L_min = 0.0;
  double L_max = 0.0;
  int n_steps = 0;
  int workers = 0;  // 0: hardware concurrency

  // [resonance]
  std::optional<double> bracket_lo;
  std::optional<double> bracket_hi;
  double tol = 1e-5;

  // [output]
  std::string csv;
  std::string locus;
  std::string field;
  int field_nz = 201;
  int field_ny = 51;

  // [asymptotic]
  std::vector<double> capacities_left;
  std::vector<double> capacities_right;
  double area_left = 1.0;
  double area_right = 1.0;
  double resonator_area = 1.0;
  double beta_min = -10.0;
  double beta_max = 10.0;
  int n_beta = 201;

  // [capacity]
  CrackKind crack = CrackKind::disk;
  double crack_radius = 1.0;
  double crack_width = 1.0;
  double crack_height = 1.0;
  int n_panels = 1024;

  /// Line of each key that was set (0 for command-line overrides).
  std::map<std::string, int> lines;

  /// Truncation half-length shared by every solve of this run.
  double truncation() const;
  /// Screens at +-L with the configured apertures scaled by epsilon.
  mesh::WaveguideGeometry2D geometry(double L) const;
  /// Line of `key`, or 0 if it was never set.
  int line_of(const std::string& key) const;
};

using Override = std::pair<std::string, std::string>;

/// `section.key=value` as given to --set.
Override parse_override(const std::string& text);

/// Throws ConfigError naming the offending key and line.
RunConfig parse_config(const std::string& text,
                       const std::vector<Override>& overrides = {});

RunConfig load_config(const std::string& path,
                      const std::vector<Override>& overrides = {});

}  // namespace screenwave::config
