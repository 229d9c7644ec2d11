#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "u1lab/error.hpp"
#include "u1lab/parallel.hpp"
#include "u1lab/rp.hpp"
#include "u1lab/spectral.hpp"
#include "u1lab/symmetry.hpp"

namespace u1lab::app {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

namespace {

std::string join(const std::vector<int>& v, char sep = ';') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

long long flag(bool b) { return b ? 1 : 0; }

}  // namespace

namespace {

std::string special_points(const OverlayFlags& f, std::size_t i) {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (on) s += (s.empty() ? "" : ";") + std::string(name);
  };
  add(f.critical[i], "critical");
  add(f.qgroup[i], "qgroup");
  add(f.localization[i], "localization");
  add(f.free_point[i], "free");
  return s.empty() ? "none" : s;
}

}  // namespace

int run_classify(const Globals& g, const GateParams& base, const std::vector<double>& taus, std::ostream& out) {
  if (taus.empty()) throw ConfigError("no durations to classify");
  Run run(g, "classify", {{"base", to_json(base)}, {"taus", taus}});
  const OverlayFlags flags = overlay_flags(base, taus);
  auto csv = run.csv("classify.csv", {"tau", "tau_over_quarter_pi", "frak_d", "phase", "nearest_special_point",
                                      "nearest_p", "nearest_m"});
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const PhasePoint pt = classify(base.with_tau(taus[i]));
    csv.row({taus[i], tau_to_quarter_pi(taus[i]), pt.frak_d ? *pt.frak_d : std::nan(""), std::string(phase_name(pt.phase)),
             special_points(flags, i), static_cast<long long>(pt.nearest_rational ? pt.nearest_rational->p : 0),
             static_cast<long long>(pt.nearest_rational ? pt.nearest_rational->m : 0)});
  }
  if (taus.size() > 1) {
    out << "classify: " << taus.size() << " durations written to " << (g.out_dir / "classify.csv").string() << '\n';
    run.finish();
    return 0;
  }

  const GateParams p = base.with_tau(taus.front());
  const PhasePoint pt = classify(p);
  out << "phase " << phase_name(pt.phase) << '\n';
  out << "frak_d " << (pt.frak_d ? format_double(*pt.frak_d) : "inf") << '\n';
  out << "tau " << format_double(p.tau) << " (" << format_double(tau_to_quarter_pi(p.tau)) << " pi/4)\n";
  out << "theta " << format_double(p.theta()) << '\n';
  if (pt.nearest_rational) out << "nearest p/m " << pt.nearest_rational->p << '/' << pt.nearest_rational->m << '\n';
  nlohmann::json res = {{"phase", phase_name(pt.phase)}};
  if (pt.phase == Phase::critical) {
    const cplx e = screw_phase(p);
    out << "e^{i alpha} " << format_double(e.real()) << (e.imag() < 0 ? " - " : " + ") << format_double(std::abs(e.imag()))
        << "i\n";
    res["alpha"] = std::arg(e);
  }
  run.record("classification", res);
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

OverlayFlags overlay_flags(const GateParams& base, const std::vector<double>& taus) {
  const std::size_t n = taus.size();
  OverlayFlags f{std::vector<bool>(n), std::vector<bool>(n), std::vector<bool>(n), std::vector<bool>(n)};
  std::vector<double> crit(n), qg(n), loc(n), fre(n);
  const double nan = std::nan("");
  for (std::size_t i = 0; i < n; ++i) {
    const GateParams p = base.with_tau(taus[i]);
    const double j = p.j_eff();
    const auto d = p.frak_d();
    crit[i] = d ? std::abs(*d) - 1.0 : nan;
    qg[i] = std::abs(std::sin(2 * p.tau * p.delta)) - std::abs(std::sin(2 * p.tau * j));
    loc[i] = std::sin(2 * p.tau * j);
    fre[i] = d && std::abs(*d) < 1.0 ? *d : nan;
  }
  auto mark = [&](const std::vector<double>& v, std::vector<bool>& out) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = v[i], b = v[i + 1];
      if (std::isnan(a) || std::isnan(b)) continue;
      if (a * b > 0.0) continue;
      const std::size_t k = std::abs(a) <= std::abs(b) ? i : i + 1;
      if (taus[k] != 0.0) out[k] = true;
    }
  };
  mark(crit, f.critical);
  mark(qg, f.qgroup);
  mark(loc, f.localization);
  mark(fre, f.free_point);
  // On delta^2 = J^2 every duration carries U_q symmetry.
  const double j = base.j_eff();
  if (std::abs(base.delta * base.delta - j * j) < kClassifyTolerance)
    for (std::size_t i = 0; i < n; ++i) f.qgroup[i] = taus[i] != 0.0;
  return f;
}

int run_phase_diagram(const Globals& g, const PhaseDiagramOptions& o, std::ostream& out) {
  if (o.axis != "none" && o.axis != "delta" && o.axis != "d" && o.axis != "b")
    throw ConfigError("second axis must be one of none, delta, d, b");
  Run run(g, "phase-diagram",
          {{"base", to_json(o.base)}, {"tau_lo", o.tau_lo}, {"tau_hi", o.tau_hi}, {"tau_n", o.tau_n}, {"axis", o.axis},
           {"axis_lo", o.axis_lo}, {"axis_hi", o.axis_hi}, {"axis_n", o.axis_n}});
  const auto taus = linspace(o.tau_lo, o.tau_hi, o.tau_n);
  const auto second = o.axis == "none" ? std::vector<double>{0.0} : linspace(o.axis_lo, o.axis_hi, o.axis_n);

  struct Row {
    double axis_value;
    GateParams p;
    PhasePoint pt;
    bool c, q, l, f;
  };
  std::vector<std::vector<Row>> rows(second.size());
  parallel_for(second.size(), g.workers, [&](std::size_t a) {
    GateParams base = o.base;
    if (o.axis == "delta") base.delta = second[a];
    if (o.axis == "d") base.d = second[a];
    if (o.axis == "b") base.b = second[a];
    const OverlayFlags fl = overlay_flags(base, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const GateParams p = base.with_tau(taus[i]);
      rows[a].push_back({second[a], p, classify(p), fl.critical[i], fl.qgroup[i], fl.localization[i], fl.free_point[i]});
    }
  });

  const std::string axis_col = o.axis == "none" ? "axis" : o.axis;
  auto csv = run.csv("phase_diagram.csv", {"tau", "tau_over_quarter_pi", axis_col, "phase", "frak_d", "critical",
                                           "qgroup", "localization", "free_point"});
  std::array<long long, 5> counts{};
  for (const auto& block : rows)
    for (const auto& r : block) {
      csv.row({r.p.tau, tau_to_quarter_pi(r.p.tau), r.axis_value, std::string(phase_name(r.pt.phase)),
               r.pt.frak_d ? *r.pt.frak_d : std::nan(""), flag(r.c), flag(r.q), flag(r.l), flag(r.f)});
      ++counts[static_cast<std::size_t>(r.pt.phase)];
    }
  nlohmann::json summary;
  for (Phase ph : {Phase::phase_one, Phase::phase_two, Phase::critical, Phase::localized, Phase::free_point})
    summary[std::string(phase_name(ph))] = counts[static_cast<std::size_t>(ph)];
  run.record("phase_counts", summary);
  out << "phase-diagram: " << taus.size() * second.size() << " points written to "
      << (g.out_dir / "phase_diagram.csv").string() << '\n';
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

int run_spectrum_scan(const Globals& g, const SpectrumScanOptions& o, std::ostream& out) {
  Run run(g, "spectrum-scan",
          {{"base", to_json(o.base)}, {"length", o.length}, {"boundary", boundary_name(o.boundary)}, {"tau_lo", o.tau_lo},
           {"tau_hi", o.tau_hi}, {"tau_n", o.tau_n}, {"tol", o.tol}});
  const auto taus = linspace(o.tau_lo, o.tau_hi, o.tau_n);
  const auto reports = spectrum_vs_tau(o.base, taus, o.length, o.boundary, o.tol, g.workers);

  auto phases = run.csv("spectrum.csv", {"tau", "tau_over_quarter_pi", "index", "eigenphase", "cluster", "degeneracy"});
  auto summary = run.csv("spectrum_summary.csv", {"tau", "tau_over_quarter_pi", "clusters", "degeneracy_multiset",
                                                  "su2_match", "localized", "extra_degeneracy", "ambiguous",
                                                  "min_separation"});
  int su2 = 0;
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.phases.size(); ++i) {
      const int c = r.clustering.cluster_of[i];
      phases.row({r.tau, tau_to_quarter_pi(r.tau), static_cast<long long>(i), r.phases[i], static_cast<long long>(c),
                  static_cast<long long>(r.clustering.clusters[static_cast<std::size_t>(c)].size())});
    }
    summary.row({r.tau, tau_to_quarter_pi(r.tau), static_cast<long long>(r.clustering.clusters.size()),
                 join(r.degeneracy_multiset), flag(r.su2_match), flag(r.localized), flag(r.extra_degeneracy),
                 flag(r.clustering.ambiguous), r.clustering.min_separation});
    if (r.clustering.ambiguous)
      run.warn("ambiguous clustering at tau = " + format_double(r.tau) + " (separation " +
               format_double(r.clustering.min_separation) + ")");
    su2 += r.su2_match ? 1 : 0;
  }
  run.record("su2_points", su2);
  out << "spectrum-scan: " << reports.size() << " durations, " << su2 << " with SU(2) multiplets\n";
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

int run_rp_scan(const Globals& g, const RpScanOptions& o, std::ostream& out) {
  Run run(g, "rp-scan",
          {{"params", to_json(o.params)}, {"ranges", o.ranges}, {"k_n", o.k_n}, {"unit_tol", o.unit_tol}});
  if (o.k_n < 1) throw ConfigError("k grid needs at least one point");
  std::vector<double> ks;
  for (int i = 0; i < o.k_n; ++i) ks.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * i / o.k_n);

  auto spectrum = run.csv("rp.csv", {"range", "k", "rank", "re", "im", "modulus"});
  auto summary = run.csv("rp_summary.csv", {"range", "k", "leading_modulus", "unit_count", "one_count"});
  nlohmann::json results = nlohmann::json::array();
  for (int r : o.ranges) {
    const RpResult res = rp_scan(o.params, r, ks, g.workers, o.unit_tol);
    nlohmann::json peaks = nlohmann::json::array();
    for (const auto& pt : res.points) {
      for (std::size_t i = 0; i < pt.eigenvalues.size(); ++i) {
        const cplx l = pt.eigenvalues[i];
        spectrum.row({static_cast<long long>(r), pt.k, static_cast<long long>(i), l.real(), l.imag(), std::abs(l)});
      }
      summary.row({static_cast<long long>(r), pt.k, pt.eigenvalues.empty() ? 0.0 : std::abs(pt.eigenvalues.front()),
                   static_cast<long long>(pt.unit_count), static_cast<long long>(pt.one_count)});
      if (pt.unit_count > 0) peaks.push_back(pt.k);
    }
    nlohmann::json entry = {{"range", r}, {"unit_modulus_k", peaks}};
    if (res.overlap_plus) entry["overlap_plus"] = *res.overlap_plus;
    if (res.overlap_minus) entry["overlap_minus"] = *res.overlap_minus;
    results.push_back(entry);
    out << "rp-scan r=" << r << ": unit-modulus eigenvalues at k =";
    for (const auto& k : peaks) out << ' ' << format_double(k.get<double>());
    if (res.overlap_plus) out << "; screw overlaps " << format_double(*res.overlap_plus) << ", "
                              << format_double(res.overlap_minus.value_or(0.0));
    out << '\n';
  }
  run.record("ranges", results);
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> sx_tilde_profile(const Profile& pr, const std::vector<double>& phi, double mu) {
  std::vector<double> v(pr.sx.size());
  for (std::size_t l = 0; l < v.size(); ++l) v[l] = (std::cos(phi[l]) * pr.sx[l] + std::sin(phi[l]) * pr.sy[l]) / mu;
  return v;
}

std::vector<double> sy_tilde_profile(const Profile& pr, const std::vector<double>& phi, double mu) {
  std::vector<double> v(pr.sx.size());
  for (std::size_t l = 0; l < v.size(); ++l) v[l] = (-std::sin(phi[l]) * pr.sx[l] + std::cos(phi[l]) * pr.sy[l]) / mu;
  return v;
}

const char* kind_name(QuenchKind k) { return k == QuenchKind::domain_wall_z ? "domain-wall" : "helix"; }

}  // namespace

QuenchConfig quench_from_json(const nlohmann::json& j, TauUnits units, QuenchConfig cfg) {
  if (!j.is_object()) throw ConfigError("quench config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      const auto k = value.get<std::string>();
      if (k == "domain-wall") cfg.kind = QuenchKind::domain_wall_z;
      else if (k == "helix") cfg.kind = QuenchKind::helix_tilde_x;
      else throw ConfigError("unknown quench kind " + k);
    } else if (key == "mu") cfg.mu = value.get<double>();
    else if (key == "length") cfg.length = value.get<int>();
    else if (key == "steps") cfg.steps = value.get<int>();
    else if (key == "chi") cfg.chi = value.get<int>();
    else if (key == "measure_every") cfg.measure_every = value.get<int>();
    else if (key == "cutoff") cfg.cutoff = value.get<double>();
    else if (key == "delta") cfg.params.delta = value.get<double>();
    else if (key == "d") cfg.params.d = value.get<double>();
    else if (key == "b") cfg.params.b = value.get<double>();
    else if (key == "m") cfg.params.m = value.get<double>();
    else if (key == "tau") cfg.params.tau = tau_from_units(value.get<double>(), units);
    else throw ConfigError("unknown quench config key " + key);
  }
  return cfg;
}

int run_quench(const Globals& g, const QuenchConfig& cfg, std::ostream& out, QuenchOutputs* keep) {
  cfg.validate();
  Run run(g, "quench",
          {{"kind", kind_name(cfg.kind)}, {"params", to_json(cfg.params)}, {"mu", cfg.mu}, {"length", cfg.length},
           {"steps", cfg.steps}, {"chi", cfg.chi}, {"measure_every", cfg.measure_every}, {"cutoff", cfg.cutoff}});
  const bool helix = cfg.kind == QuenchKind::helix_tilde_x;
  QuenchOutputs local;
  QuenchOutputs& res = keep ? *keep : local;
  if (helix) res.helix = helix_quench(cfg.params, cfg.length, cfg.mu, cfg.steps, cfg.chi, cfg.measure_every, cfg.cutoff);
  else res.evolution = evolve(cfg);
  const TransportResult& r = helix ? res.helix->evolution : res.evolution;
  const double mu = cfg.mu > 0.0 ? cfg.mu : 1.0;
  const auto phi = helix_angles(cfg.params, cfg.length);

  auto ts = run.csv("timeseries.csv", {"t", "delta_z", "j_mid_over_mu", "trace", "discarded", "max_bond"});
  for (std::size_t i = 0; i < r.times.size(); ++i)
    ts.row({static_cast<long long>(r.times[i]), r.delta_z[i], r.current[i], r.trace[i], r.discarded[i],
            static_cast<long long>(r.max_bond[i])});

  auto prof = run.csv("profiles.csv", {"t", "l", "sz", "sx_tilde", "sy_tilde"});
  for (const auto& pr : r.profiles) {
    const auto tx = sx_tilde_profile(pr, phi, mu);
    const auto ty = sy_tilde_profile(pr, phi, mu);
    for (std::size_t l = 0; l < pr.sz.size(); ++l)
      prof.row({static_cast<long long>(pr.t), static_cast<long long>(l + 1), pr.sz[l], tx[l], ty[l]});
  }

  if (helix) {
    auto fr = run.csv("front.csv", {"t", "front"});
    const auto& fronts = res.helix->front;
    for (std::size_t i = 0; i < fronts.size(); ++i) fr.row({static_cast<long long>(r.profiles[i].t), fronts[i]});
  } else {
    auto px = run.csv("proxy.csv", {"t", "offset", "proxy"});
    for (std::size_t i = 0; i < r.profiles.size(); ++i) {
      const auto v = two_point_proxy(r, i);
      for (std::size_t j = 0; j < v.size(); ++j)
        px.row({static_cast<long long>(r.profiles[i].t), static_cast<long long>(2 * static_cast<long long>(j + 1) - cfg.length / 2),
                v[j]});
    }
  }

  nlohmann::json trunc = {{"discarded", r.discarded}, {"max_bond", r.max_bond}};
  run.record("truncation", trunc);
  for (const auto& w : r.warnings) run.warn(w);
  if (const auto tb = boundary_time(r)) run.record("boundary_time", *tb);
  if (!helix) {
    try {
      const ExponentFit f = fit_exponent(r);
      run.record("fit", {{"z", f.z}, {"z_err", f.z_err}, {"slope", f.slope}, {"r2", f.r2}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi},
                         {"points", f.points}});
      out << "quench: z = " << format_double(f.z) << " +- " << format_double(f.z_err) << " on t in [" << f.t_lo << ", "
          << f.t_hi << "]\n";
    } catch (const FitError& e) {
      run.warn(std::string("exponent fit skipped: ") + e.what());
    }
  }
  out << "quench: " << cfg.steps << " steps, final delta_z " << format_double(r.delta_z.back()) << ", max bond "
      << r.max_bond.back() << '\n';
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  run.finish();
  return 0;
}

int run_scan(const Globals& g, const ScanOptions& o, std::ostream& out, FractalScanResult* keep) {
  Run run(g, "scan",
          {{"base", to_json(o.base)}, {"axis", o.axis == ScanAxis::tau ? "tau" : "delta"}, {"lo", o.lo}, {"hi", o.hi},
           {"n", o.n}, {"t", o.t_fixed}, {"length", o.length}, {"chi", o.chi}, {"mu", o.mu}, {"m_max", o.m_max}});
  FractalScanResult local;
  FractalScanResult& res = keep ? *keep : local;
  res = fractal_scan(o.base, o.axis, linspace(o.lo, o.hi, o.n), o.t_fixed, o.length, o.chi, o.mu, o.m_max, g.workers);
  const bool tau_axis = o.axis == ScanAxis::tau;
  auto scan = run.csv("scan.csv", {tau_axis ? "tau" : "delta", tau_axis ? "tau_over_quarter_pi" : "delta_copy", "j_mid_over_mu"});
  for (std::size_t i = 0; i < res.grid.size(); ++i)
    scan.row({res.grid[i], tau_axis ? tau_to_quarter_pi(res.grid[i]) : res.grid[i], res.current[i]});
  auto marks = run.csv("marks.csv", {"p", "m", "frak_d", "value"});
  for (const auto& m : res.annotations)
    marks.row({static_cast<long long>(m.ratio.p), static_cast<long long>(m.ratio.m), m.target, m.value});
  auto peaks = run.csv("peaks.csv", {"value", "height", "width", "nearest_p", "nearest_m", "distance"});
  for (const auto& pk : res.peaks) {
    const FractalMark* best = nullptr;
    for (const auto& m : res.annotations)
      if (!best || std::abs(m.value - pk.value) < std::abs(best->value - pk.value)) best = &m;
    peaks.row({pk.value, pk.height, pk.width, static_cast<long long>(best ? best->ratio.p : 0),
               static_cast<long long>(best ? best->ratio.m : 0), best ? std::abs(best->value - pk.value) : std::nan("")});
  }
  for (const auto& w : res.warnings) run.warn(w);
  out << "scan: " << res.grid.size() << " points, " << res.peaks.size() << " local maxima, " << res.annotations.size()
      << " commensurate marks\n";
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

int run_symmetry_check(const Globals& g, const SymmetryCheckOptions& o, std::ostream& out) {
  Run run(g, "symmetry-check", {{"params", to_json(o.params)}, {"length", o.length}});
  const GateParams& p = o.params;
  const int n = o.length;
  auto csv = run.csv("symmetry.csv", {"check", "value", "status"});
  auto emit = [&](const std::string& name, double value, const std::string& status) {
    csv.row({name, value, status});
    out << std::left << std::setw(34) << name << std::setw(26) << format_double(value) << status << '\n';
  };

  const PhasePoint pt = classify(p);
  out << "phase " << phase_name(pt.phase) << '\n';
  const auto u = build_propagator(p, n, Boundary::open);

  const SpectrumReport rep = analyze_spectrum(u, p.tau);
  emit("su2_multiset", static_cast<double>(rep.clustering.clusters.size()), rep.su2_match ? "match" : "no-match");

  for (const auto& m : parameter_map_residuals(p, n)) emit("map_" + m.name, m.residual, m.residual < 1e-10 ? "ok" : "FAIL");

  if (pt.phase == Phase::critical) {
    const ScrewGenerator sg = screw_generator(p, n);
    const BoundaryResidual br = almost_commutation_residual(sg.s_plus, u);
    emit("screw_bulk_residual", br.bulk_norm, br.bulk_norm < 1e-10 ? "ok" : "FAIL");
    emit("screw_boundary_residual", br.boundary_norm, br.boundary_norm > 1e-3 ? "nontrivial" : "small");
  } else {
    emit("screw_bulk_residual", std::nan(""), "not-critical");
  }

  try {
    const QGroupGenerator qg = qgroup_generator(p, n);
    const bool half = qg.k && std::abs(*qg.k - std::round(*qg.k)) > 0.25;
    const DenseOp target = half ? build_tilde_propagator(p, n).matrix : u.matrix;
    const double c = std::max(commutator_norm(target, to_dense(qg.s_plus)), commutator_norm(target, to_dense(qg.s_minus)));
    emit(half ? "qgroup_commutator_tilde" : "qgroup_commutator", c, c < 1e-10 ? "ok" : "FAIL");
    emit("q", qg.q, "");
  } catch (const SymmetryError&) {
    emit("qgroup_commutator", std::nan(""), "not-a-qgroup-point");
  }
  run.finish();
  return 0;
}

}  // namespace u1lab::app
