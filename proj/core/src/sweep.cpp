#include "screenwave/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "screenwave/dtn_scatter.hpp"
#include "screenwave/errors.hpp"

namespace screenwave::sweep {

SweepRow solve_row(const config::RunConfig& cfg, double L) {
  SweepRow row;
  row.L = L;
  try {
    scatter::SolveOptions o;
    o.mesh = cfg.mesh;
    o.n_modes = cfg.n_modes;
    const auto r = scatter::solve_scattering(cfg.geometry(L), cfg.kappa, o);
    row.R = r.R;
    row.T = r.T;
    row.energy_residual = r.energy_residual;
  } catch (const std::exception& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.R = row.T = {nan, nan};
    row.energy_residual = nan;
    row.error = e.what();
    if (row.error.empty()) row.error = "solver failure";
  }
  return row;
}

std::vector<double> sweep_grid(const config::RunConfig& cfg) {
  if (!cfg.has_sweep) throw ConfigError("sweep.L_min", 0, "required key is missing");
  std::vector<double> Ls(std::size_t(cfg.n_steps));
  for (int i = 0; i < cfg.n_steps; ++i)
    Ls[std::size_t(i)] = cfg.L_min + (cfg.L_max - cfg.L_min) * i / (cfg.n_steps - 1);
  return Ls;
}

std::vector<SweepRow> run_sweep(const config::RunConfig& cfg) {
  const auto Ls = sweep_grid(cfg);
  std::vector<SweepRow> rows(Ls.size());
  unsigned n = cfg.workers > 0 ? unsigned(cfg.workers) : std::thread::hardware_concurrency();
  n = std::clamp<unsigned>(n, 1, unsigned(Ls.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < Ls.size();) rows[i] = solve_row(cfg, Ls[i]);
  };
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

// Commas and line breaks would break the CSV framing.
std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "L,re_R,im_R,abs_R,re_T,im_T,abs_T,energy_residual,error\n";
  for (const auto& r : rows) {
    os << format_number(r.L) << ',' << format_number(r.R.real()) << ','
       << format_number(r.R.imag()) << ',' << format_number(std::abs(r.R)) << ','
       << format_number(r.T.real()) << ',' << format_number(r.T.imag()) << ','
       << format_number(std::abs(r.T)) << ',' << format_number(r.energy_residual) << ','
       << sanitize(r.error) << '\n';
  }
}

void write_locus(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "L,re_R,im_R,re_T,im_T\n";
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    os << format_number(r.L) << ',' << format_number(r.R.real()) << ','
       << format_number(r.R.imag()) << ',' << format_number(r.T.real()) << ','
       << format_number(r.T.imag()) << '\n';
  }
}

int golden_evaluation_bound(double width, double tol) {
  return int(std::ceil(std::log(width / tol) / std::log(1.0 / 0.618))) + 3;
}

GoldenResult golden_section_max(const std::function<double(double)>& f, double lo,
                                double hi, double tol) {
  if (!(lo < hi) || !(tol > 0.0)) throw InvalidArgument("need lo < hi and tol > 0");
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evals = 2;
  bool moved_lo = false, moved_hi = false;
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      moved_hi = true;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      moved_lo = true;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  if (!moved_lo || !moved_hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "no interior maximum in [%.12g, %.12g]: optimum at the %s end",
                  lo, hi, moved_lo ? "upper" : "lower");
    throw BracketError(buf);
  }
  return f1 >= f2 ? GoldenResult{x1, f1, evals} : GoldenResult{x2, f2, evals};
}

namespace {

Resonance refine(const config::RunConfig& cfg, double lo, double hi) {
  std::map<double, SweepRow> seen;
  auto objective = [&](double L) {
    auto row = solve_row(cfg, L);
    if (!row.ok()) throw NumericalFailure("solve at L = " + format_number(L) + ": " + row.error);
    const double v = std::abs(row.T);
    seen[L] = std::move(row);
    return v;
  };
  const auto g = golden_section_max(objective, lo, hi, cfg.tol);
  const auto& row = seen.at(g.x);
  Resonance res;
  res.L_star = g.x;
  res.T = row.T;
  res.R = row.R;
  res.energy_residual = row.energy_residual;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.evaluations = g.evaluations;
  return res;
}

}  // namespace

Resonance find_resonance(const config::RunConfig& cfg,
                         const std::vector<SweepRow>& coarse) {
  if (cfg.bracket_lo) return refine(cfg, *cfg.bracket_lo, *cfg.bracket_hi);
  std::size_t best = coarse.size();
  for (std::size_t i = 0; i < coarse.size(); ++i)
    if (coarse[i].ok() && (best == coarse.size() || std::abs(coarse[i].T) > std::abs(coarse[best].T)))
      best = i;
  if (best == coarse.size()) throw BracketError("coarse sweep has no successful rows");
  if (best == 0 || best + 1 == coarse.size())
    throw BracketError("transmission maximum of the coarse sweep lies at L = " +
                       format_number(coarse[best].L) + ", on the sweep boundary");
  return refine(cfg, coarse[best - 1].L, coarse[best + 1].L);
}

Resonance find_resonance(const config::RunConfig& cfg) {
  if (cfg.bracket_lo) return refine(cfg, *cfg.bracket_lo, *cfg.bracket_hi);
  if (!cfg.has_sweep)
    throw ConfigError("resonance.bracket_lo", 0,
                      "needs either a [resonance] bracket or a [sweep] to seed it");
  return find_resonance(cfg, run_sweep(cfg));
}

}  // namespace screenwave::sweep
