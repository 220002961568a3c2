// pscreen: batch front-end for the two-screen waveguide solver.
//
//   pscreen <subcommand> <config> [--set section.key=value ...]
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 resonance bracket error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include "screenwave/asym_model.hpp"
#include "screenwave/capacity_bem.hpp"
#include "screenwave/dtn_scatter.hpp"
#include "screenwave/errors.hpp"
#include "screenwave/run_config.hpp"
#include "screenwave/sweep.hpp"

using namespace screenwave;
using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitBracket = 4;

// Output goes to `path` if set, stdout otherwise.
class Sink {
 public:
  Sink(const std::string& path, const std::string& key) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError(key, 0, "cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ordered_json complex_json(std::complex<double> z) {
  return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}, {"arg", std::arg(z)}};
}

void print(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

double require_L(const config::RunConfig& cfg) {
  if (!cfg.L) throw ConfigError("problem.L", 0, "required key is missing for this subcommand");
  return *cfg.L;
}

scatter::SolveOptions solve_options(const config::RunConfig& cfg, bool want_field) {
  scatter::SolveOptions o;
  o.mesh = cfg.mesh;
  o.n_modes = cfg.n_modes;
  o.want_field = want_field;
  return o;
}

int cmd_solve(const config::RunConfig& cfg) {
  const double L = require_L(cfg);
  const auto r = scatter::solve_scattering(cfg.geometry(L), cfg.kappa, solve_options(cfg, false));
  print({{"L", L},
         {"R", complex_json(r.R)},
         {"T", complex_json(r.T)},
         {"energy_residual", r.energy_residual},
         {"amplitude_mid", complex_json(r.amplitude_mid)},
         {"n_dofs", r.n_dofs}});
  return 0;
}

int cmd_sweep(const config::RunConfig& cfg) {
  Sink csv(cfg.csv, "output.csv");
  std::unique_ptr<Sink> locus;
  if (!cfg.locus.empty()) locus = std::make_unique<Sink>(cfg.locus, "output.locus");
  const auto rows = sweep::run_sweep(cfg);
  sweep::write_csv(csv.stream(), rows);
  if (locus) sweep::write_locus(locus->stream(), rows);
  int failed = 0;
  for (const auto& r : rows) failed += !r.ok();
  if (failed) std::cerr << "pscreen: " << failed << " of " << rows.size() << " rows failed\n";
  return failed == int(rows.size()) ? kExitSolver : 0;
}

int cmd_find_resonance(const config::RunConfig& cfg) {
  const auto res = sweep::find_resonance(cfg);
  print({{"L_star", res.L_star},
         {"T", complex_json(res.T)},
         {"R", complex_json(res.R)},
         {"energy_residual", res.energy_residual},
         {"bracket", {res.bracket_lo, res.bracket_hi}},
         {"evaluations", res.evaluations}});
  return 0;
}

int cmd_field(const config::RunConfig& cfg, const std::string& part_name) {
  static const std::map<std::string, scatter::FieldPart> parts = {
      {"real", scatter::FieldPart::real},
      {"imag", scatter::FieldPart::imag},
      {"scattered_real", scatter::FieldPart::scattered_real},
      {"scattered_imag", scatter::FieldPart::scattered_imag}};
  const auto part = parts.find(part_name);
  if (part == parts.end()) throw ConfigError("--part", 0, "unknown field part '" + part_name + "'");
  const double L = require_L(cfg);
  Sink out(cfg.field, "output.field");
  const auto r = scatter::solve_scattering(cfg.geometry(L), cfg.kappa, solve_options(cfg, true));
  const auto s = scatter::export_field(r, *r.mesh, cfg.field_nz, cfg.field_ny, part->second, L);
  scatter::write_field(out.stream(), s);
  return 0;
}

int cmd_asymptotic(const config::RunConfig& cfg) {
  if (cfg.capacities_left.empty())
    throw ConfigError("asymptotic.capacities_left", 0, "required key is missing");
  if (cfg.capacities_right.empty())
    throw ConfigError("asymptotic.capacities_right", 0, "required key is missing");
  asym::ResonatorSpec spec;
  spec.kappa = cfg.kappa;
  spec.q = cfg.q;
  spec.resonator_area = cfg.resonator_area;
  spec.left = {cfg.capacities_left, cfg.area_left};
  spec.right = {cfg.capacities_right, cfg.area_right};
  spec.validate();

  const double Km = asym::side_coupling_K(spec.left);
  const double Kp = asym::side_coupling_K(spec.right);
  const auto best = asym::limit_scattering(spec, {0.0});
  print({{"L0", asym::critical_length(cfg.kappa, cfg.q)},
         {"L_prime", asym::first_order_shift(spec)},
         {"K_minus", Km},
         {"K_plus", Kp},
         {"reflection_floor", asym::reflection_floor(Kp, Km)},
         {"complete_transmission_possible", asym::is_complete_transmission_possible(spec)},
         {"R0_at_zero_detuning", complex_json(best.R0)},
         {"T0_at_zero_detuning", complex_json(best.T0)},
         {"a0_at_zero_detuning", complex_json(best.a0)}});

  if (cfg.csv.empty()) return 0;
  Sink csv(cfg.csv, "output.csv");
  auto& os = csv.stream();
  os << "beta,re_R0,im_R0,abs_R0,re_T0,im_T0,abs_T0\n";
  for (int i = 0; i < cfg.n_beta; ++i) {
    const double beta = cfg.beta_min + (cfg.beta_max - cfg.beta_min) * i / (cfg.n_beta - 1);
    const auto s = asym::limit_scattering(spec, {beta});
    using sweep::format_number;
    os << format_number(beta) << ',' << format_number(s.R0.real()) << ','
       << format_number(s.R0.imag()) << ',' << format_number(std::abs(s.R0)) << ','
       << format_number(s.T0.real()) << ',' << format_number(s.T0.imag()) << ','
       << format_number(std::abs(s.T0)) << '\n';
  }
  return 0;
}

int cmd_capacity(const config::RunConfig& cfg) {
  const auto shape = cfg.crack == config::CrackKind::disk
                         ? bem::CrackShape::disk(cfg.crack_radius)
                         : bem::CrackShape::rectangle(cfg.crack_width, cfg.crack_height);
  const auto panels = bem::panelize(shape, cfg.n_panels);
  const auto fine = bem::solve_capacity(panels);
  const auto coarse = bem::solve_capacity(bem::panelize(shape, std::max(4, cfg.n_panels / 4)));
  print({{"capacity", fine.capacity},
         {"dipole", {fine.dipole.x(), fine.dipole.y(), 0.0}},
         {"n_panels", panels.size()},
         {"est_error", std::abs(fine.capacity - coarse.capacity)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-screen waveguide scattering workbench"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> sets;
  std::string part = "real";

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "configuration file")->required();
    sub->add_option("--set", sets, "override a key, e.g. --set sweep.n_steps=41");
    return sub;
  };
  auto* solve = add("solve", "single solve at problem.L");
  auto* sweep_cmd = add("sweep", "coefficients over the [sweep] grid, CSV output");
  auto* resonance = add("find-resonance", "golden-section maximization of |T| in L");
  auto* field = add("field", "sampled field at problem.L");
  field->add_option("--part", part, "real, imag, scattered_real or scattered_imag");
  auto* asymptotic = add("asymptotic", "closed-form limit model from hole capacities");
  auto* capacity = add("capacity", "harmonic capacity of a planar crack");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    std::vector<config::Override> overrides;
    for (const auto& s : sets) overrides.push_back(config::parse_override(s));
    const auto cfg = config::load_config(config_path, overrides);
    if (solve->parsed()) return cmd_solve(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (resonance->parsed()) return cmd_find_resonance(cfg);
    if (field->parsed()) return cmd_field(cfg, part);
    if (asymptotic->parsed()) return cmd_asymptotic(cfg);
    if (capacity->parsed()) return cmd_capacity(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "pscreen: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BracketError& e) {
    std::cerr << "pscreen: bracket error: " << e.what() << '\n';
    return kExitBracket;
  } catch (const InvalidArgument& e) {
    // Geometry rejected by the mesher after config validation.
    std::cerr << "pscreen: invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "pscreen: solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitConfig;
}
