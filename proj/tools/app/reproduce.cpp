#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "app/commands.hpp"
#include "u1lab/error.hpp"
#include "u1lab/pauli.hpp"
#include "u1lab/rp.hpp"
#include "u1lab/spectral.hpp"
#include "u1lab/symmetry.hpp"

namespace u1lab::app {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

GateParams unit_gate(double tau) { return {1.0, 1.0, 1.0, 0.0, tau}; }

double tau_critical() { return critical_taus(unit_gate(0.0), 0.01, 1.0).front(); }
double tau_plus(double k) { return k * std::numbers::pi / (std::sqrt(3.0) + 1.0); }
double tau_localized() { return std::numbers::pi / (2.0 * std::sqrt(3.0)); }

struct Line {
  double slope = 0.0;
  double r2 = 0.0;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  return {cxy / cxx, cyy > 0 ? cxy * cxy / (cxx * cyy) : 1.0};
}

class Checks {
 public:
  Checks(Run& run, std::ostream& out) : run_(run), out_(out) {}
  void operator()(const std::string& name, bool ok, const std::string& detail) {
    out_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    list_.push_back({{"check", name}, {"pass", ok}, {"detail", detail}});
    all_ = all_ && ok;
  }
  int finish() {
    run_.record("checks", list_);
    run_.finish();
    return all_ ? 0 : 1;
  }

 private:
  Run& run_;
  std::ostream& out_;
  nlohmann::json list_ = nlohmann::json::array();
  bool all_ = true;
};

Globals sub(const Globals& g, const std::string& figure) {
  Globals s = g;
  s.out_dir = g.out_dir / figure;
  return s;
}

// ---------------------------------------------------------------------------

int fig1(const Globals& g, std::ostream& out) {
  PhaseDiagramOptions o;
  o.tau_lo = 0.0;
  o.tau_hi = 2.0 * kQuarterPi;
  o.tau_n = 801;
  Globals s = sub(g, "fig1");
  run_phase_diagram(s, o, out);

  Run run(s, "reproduce", {{"figure", "fig1"}});
  Checks check(run, out);
  const auto taus = linspace(o.tau_lo, o.tau_hi, o.tau_n);
  const auto flags = overlay_flags(o.base, taus);
  const double step = taus[1] - taus[0];
  auto flagged_near = [&](const std::vector<bool>& f, double target) {
    for (std::size_t i = 0; i < taus.size(); ++i)
      if (f[i] && std::abs(taus[i] - target) <= step) return true;
    return false;
  };
  check("critical overlay at tau_c", flagged_near(flags.critical, tau_critical()),
        "tau_c/(pi/4) = " + format_double(tau_critical() / kQuarterPi));
  check("U_q overlay at tau_+(k=1)", flagged_near(flags.qgroup, tau_plus(1.0)),
        "tau_+/(pi/4) = " + format_double(tau_plus(1.0) / kQuarterPi));
  check("localization overlay at pi/(2 sqrt 3)", flagged_near(flags.localization, tau_localized()),
        "tau/(pi/4) = " + format_double(tau_localized() / kQuarterPi));
  return check.finish();
}

int fig2(const Globals& g, std::ostream& out) {
  SpectrumScanOptions o;
  o.length = 4;
  o.tau_lo = 0.0;
  o.tau_hi = 2.0 * kQuarterPi;
  o.tau_n = 201;
  Globals s = sub(g, "fig2");
  run_spectrum_scan(s, o, out);

  Run run(s, "reproduce", {{"figure", "fig2"}});
  Checks check(run, out);
  const auto plus = analyze_spectrum(build_propagator(unit_gate(tau_plus(1.0)), 4, Boundary::open), tau_plus(1.0));
  std::string ms;
  for (int d : plus.degeneracy_multiset) ms += std::to_string(d) + ' ';
  check("multiplets at tau_+(k=1)", plus.degeneracy_multiset == std::vector<int>{1, 1, 3, 3, 3, 5}, "multiset " + ms);
  const auto crit = analyze_spectrum(build_propagator(unit_gate(tau_critical()), 4, Boundary::open), tau_critical());
  check("no multiplets at tau_c", !crit.su2_match,
        std::to_string(crit.clustering.clusters.size()) + " clusters");
  return check.finish();
}

int fig3(const Globals& g, std::ostream& out) {
  RpScanOptions o;
  o.params = unit_gate(tau_critical());
  o.ranges = {1, 3};
  o.k_n = 64;
  Globals s = sub(g, "fig3");
  run_rp_scan(s, o, out);

  Run run(s, "reproduce", {{"figure", "fig3"}});
  Checks check(run, out);
  std::vector<double> ks;
  for (int i = 0; i < o.k_n; ++i) ks.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * i / o.k_n);
  for (int r : o.ranges) {
    const auto res = rp_scan(o.params, r, ks, g.workers);
    bool only = true;
    int k0 = -1;
    for (const auto& pt : res.points) {
      const bool allowed = std::abs(pt.k) < 1e-12 || std::abs(std::abs(pt.k) - std::numbers::pi / 2) < 1e-12;
      if (pt.unit_count > 0 && !allowed) only = false;
      if (allowed && pt.unit_count == 0) only = false;
      if (std::abs(pt.k) < 1e-12) k0 = pt.one_count;
    }
    const std::string rs = "r=" + std::to_string(r);
    check(rs + " unit modulus only at k = 0, +-pi/2", only, "");
    check(rs + " k=0 multiplicity", k0 == r, std::to_string(k0));
    const double op = res.overlap_plus.value_or(0.0), om = res.overlap_minus.value_or(0.0);
    check(rs + " screw overlaps", op > 0.999 && om > 0.999, format_double(op) + ", " + format_double(om));
  }
  return check.finish();
}

QuenchConfig desk_quench(double tau, int length, int steps, int chi) {
  QuenchConfig c;
  c.params = unit_gate(tau);
  c.length = length;
  c.steps = steps;
  c.chi = chi;
  c.measure_every = std::max(1, steps / 10);
  return c;
}

int fig4b(const Globals& g, std::ostream& out) {
  const QuenchConfig c = desk_quench(tau_critical(), 128, 60, 64);
  Globals s = sub(g, "fig4b");
  QuenchOutputs q;
  run_quench(s, c, out, &q);
  Run run(s, "reproduce", {{"figure", "fig4b"}});
  Checks check(run, out);
  const auto& r = q.evolution;
  const auto v = two_point_proxy(r, r.profiles.size() - 1);
  double sum = 0.0;
  for (double x : v) sum += x;
  const auto peak = std::max_element(v.begin(), v.end()) - v.begin();
  const long long offset = 2 * (peak + 1) - c.length / 2;
  check("two-point sum rule", std::abs(2.0 * sum - 1.0) < 0.02, "2 sum = " + format_double(2.0 * sum));
  check("two-point peak at the centre", std::llabs(offset) <= 2, "offset " + std::to_string(offset));
  return check.finish();
}

int fig4c(const Globals& g, std::ostream& out) {
  QuenchConfig c = desk_quench(tau_critical(), 96, 20, 64);
  c.kind = QuenchKind::helix_tilde_x;
  Globals s = sub(g, "fig4c");
  QuenchOutputs q;
  run_quench(s, c, out, &q);
  Run run(s, "reproduce", {{"figure", "fig4c"}});
  Checks check(run, out);
  const auto& h = *q.helix;
  // Sites outside both causal cones, 2t + 2 from each edge.
  double dev = 0.0;
  for (std::size_t i = 0; i < h.sx_tilde.size(); ++i) {
    const int reach = 2 * h.evolution.profiles[i].t + 2;
    for (int l = reach; l < c.length - reach; ++l) dev = std::max(dev, std::abs(h.sx_tilde[i][static_cast<std::size_t>(l)] - 1.0));
  }
  check("helix bulk stays polarized", dev < 1e-4, "max |sx~/mu - 1| = " + format_double(dev));
  check("helix front leaves the edge", h.front.back() > h.front.front(),
        "front " + format_double(h.front.front()) + " -> " + format_double(h.front.back()));
  return check.finish();
}

int fig4d(const Globals& g, std::ostream& out) {
  const QuenchConfig c = desk_quench(tau_critical(), 128, 120, 64);
  Globals s = sub(g, "fig4d");
  QuenchOutputs q;
  run_quench(s, c, out, &q);
  Run run(s, "reproduce", {{"figure", "fig4d"}});
  Checks check(run, out);
  const auto f = fit_exponent(q.evolution);
  check("superdiffusive exponent", std::abs(f.z - 1.5) < 0.15, "z = " + format_double(f.z));
  return check.finish();
}

int fig4e(const Globals& g, std::ostream& out) {
  const GateParams base = unit_gate(0.0);
  const auto windows = ballistic_windows(base, 1e-9, std::numbers::pi);
  if (windows.size() < 2) throw SymmetryError("fewer than two ballistic windows");
  const auto win = windows[1];
  ScanOptions o;
  o.lo = win.first;
  o.hi = win.second;
  o.n = 41;
  o.t_fixed = 60;
  o.length = 128;
  o.chi = 32;
  o.m_max = 3;
  Globals s = sub(g, "fig4e");
  FractalScanResult res;
  run_scan(s, o, out, &res);

  Run run(s, "reproduce", {{"figure", "fig4e"}});
  Checks check(run, out);
  const double step = (o.hi - o.lo) / (o.n - 1);
  auto peak_at = [&](int p, int m) -> std::optional<double> {
    for (const auto& mk : res.annotations) {
      if (mk.ratio.p != p || mk.ratio.m != m) continue;
      for (const auto& pk : res.peaks)
        if (std::abs(pk.value - mk.value) <= 1.5 * step) return pk.height;
    }
    return std::nullopt;
  };
  const auto half = peak_at(1, 2), two_thirds = peak_at(2, 3);
  check("peak at p/m = 1/2", half.has_value(), half ? "height " + format_double(*half) : "none");
  check("peak at p/m = 2/3", two_thirds.has_value(), two_thirds ? "height " + format_double(*two_thirds) : "none");
  check("2/3 peak above 1/2 peak", half && two_thirds && *two_thirds > *half, "");
  return check.finish();
}

int fig5(const Globals& g, std::ostream& out) {
  Globals s = sub(g, "fig5");
  Run run(s, "reproduce", {{"figure", "fig5"}, {"tau", tau_plus(1.0)}, {"lengths", {2, 4, 6, 8, 10}}});
  Checks check(run, out);
  auto csv = run.csv("casimir_weights.csv", {"length", "p", "w"});
  for (int length = 2; length <= 10; length += 2) {
    const auto gen = reconstruct_su2(build_propagator(unit_gate(tau_plus(1.0)), length, Boundary::open));
    const auto w = locality_weights(poly_from_dense(gen.casimir())).body_weight;
    std::vector<double> p, lw;
    for (std::size_t i = 0; i < w.size(); ++i) {
      csv.row({static_cast<long long>(length), static_cast<long long>(i), w[i]});
      if (i >= 2 && w[i] > 0.0) {
        p.push_back(static_cast<double>(i));
        lw.push_back(std::log(w[i]));
      }
    }
    if (length >= 6) {
      const Line fit = fit_line(p, lw);
      check("L=" + std::to_string(length) + " Casimir weights decay", fit.slope < 0.0 && fit.r2 > 0.95,
            "slope " + format_double(fit.slope) + ", R2 " + format_double(fit.r2));
    }
  }
  return check.finish();
}

int fig6(const Globals& g, std::ostream& out) {
  constexpr int kLength = 6;
  Globals s = sub(g, "fig6");
  Run run(s, "reproduce", {{"figure", "fig6"}, {"tau", tau_plus(1.0)}, {"length", kLength}});
  Checks check(run, out);
  const auto gen = reconstruct_su2(build_propagator(unit_gate(tau_plus(1.0)), kLength, Boundary::open));
  const auto opt = optimize_gauge(gen);
  const auto rep = locality_weights(poly_from_dense(opt.generators.s_plus()));
  auto csv = run.csv("locality.csv", {"p", "r", "total_weight", "count", "average"});
  for (const auto& c : rep.cells)
    csv.row({static_cast<long long>(c.body), static_cast<long long>(c.range), c.total_weight,
             static_cast<long long>(c.count), c.average()});
  const auto& w = rep.body_weight;
  check("w_1 > w_2 > w_3", w[1] > w[2] && w[2] > w[3],
        format_double(w[1]) + ", " + format_double(w[2]) + ", " + format_double(w[3]));
  const double near = rep.average(2, 2), edge = rep.average(2, kLength);
  check("range-L two-body weight within 5x of nearest neighbour", edge > near / 5.0,
        format_double(edge) + " vs " + format_double(near));
  return check.finish();
}

int fig7a(const Globals& g, std::ostream& out) {
  Globals s = sub(g, "fig7a");
  Run run(s, "reproduce", {{"figure", "fig7a"}, {"length", 96}, {"steps", 80}, {"chi", 48}});
  Checks check(run, out);
  auto csv = run.csv("delta_z.csv", {"point", "tau", "t", "delta_z"});
  const std::vector<std::pair<std::string, double>> points = {
      {"critical", tau_critical()}, {"diffusive", tau_plus(1.0)}, {"ballistic", 0.1 * std::numbers::pi}, {"localized", tau_localized()}};
  std::vector<double> final_dz;
  double loc_max = 0.0;
  for (const auto& [name, tau] : points) {
    const auto r = evolve(desk_quench(tau, 96, 80, 48));
    for (std::size_t i = 0; i < r.times.size(); ++i)
      csv.row({name, tau, static_cast<long long>(r.times[i]), r.delta_z[i]});
    final_dz.push_back(r.delta_z.back());
    if (name == "localized") loc_max = *std::max_element(r.delta_z.begin(), r.delta_z.end());
  }
  check("ballistic > critical > diffusive", final_dz[2] > final_dz[0] && final_dz[0] > final_dz[1],
        format_double(final_dz[2]) + " > " + format_double(final_dz[0]) + " > " + format_double(final_dz[1]));
  check("localized transfer bounded", loc_max < 1.0, "max delta_z " + format_double(loc_max));
  return check.finish();
}

int fig7b(const Globals& g, std::ostream& out) {
  constexpr int kLength = 64, kSteps = 30;
  constexpr double kMu = 1e-3;
  Globals s = sub(g, "fig7b");
  Run run(s, "reproduce", {{"figure", "fig7b"}, {"length", kLength}, {"steps", kSteps}});
  Checks check(run, out);
  const auto h = helix_quench(unit_gate(tau_critical()), kLength, kMu, kSteps, 64, kSteps);
  const Profile& last = h.evolution.profiles.back();
  auto csv = run.csv("transverse.csv", {"t", "l", "class", "sx_over_mu", "sy_over_mu"});
  for (std::size_t l = 0; l < last.sx.size(); ++l)
    csv.row({static_cast<long long>(last.t), static_cast<long long>(l + 1), static_cast<long long>(l % 8), last.sx[l] / kMu,
             last.sy[l] / kMu});

  // Left half, away from the origin: every point's nearest neighbour in the xy plane has the same residue mod 8.
  int points = 0, foreign = 0;
  for (int a = 0; a < kLength / 2; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (std::hypot(last.sx[ua], last.sy[ua]) < 0.5 * kMu) continue;
    int nearest = -1;
    double best = 0.0;
    for (int b = 0; b < kLength / 2; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      const double d = std::hypot(last.sx[ua] - last.sx[ub], last.sy[ua] - last.sy[ub]);
      if (b != a && (nearest < 0 || d < best)) {
        nearest = b;
        best = d;
      }
    }
    ++points;
    if ((nearest - a) % 8 != 0) ++foreign;
  }
  check("8 transverse curves", points >= kLength / 4 && foreign == 0,
        std::to_string(foreign) + " of " + std::to_string(points) + " points nearest to another residue");
  return check.finish();
}

int fig7c(const Globals& g, std::ostream& out) {
  // The two edge fronts meet at the centre near t = L/4.
  constexpr int kLength = 128, kSteps = 32;
  Globals s = sub(g, "fig7c");
  Run run(s, "reproduce", {{"figure", "fig7c"}, {"length", kLength}, {"steps", kSteps}});
  Checks check(run, out);
  const auto h = helix_quench(unit_gate(tau_critical()), kLength, 1e-3, kSteps, 64, 2);
  auto csv = run.csv("front.csv", {"t", "front"});
  std::vector<double> t;
  for (std::size_t i = 0; i < h.front.size(); ++i) {
    csv.row({static_cast<long long>(h.evolution.profiles[i].t), h.front[i]});
    t.push_back(h.evolution.profiles[i].t);
  }
  const auto f = fit_power_law(t, h.front, kSteps / 4.0, kSteps);
  check("front exponent 2/3", std::abs(f.slope - 2.0 / 3.0) < 0.08, "slope " + format_double(f.slope));
  return check.finish();
}

using Fn = int (*)(const Globals&, std::ostream&);

const std::vector<std::pair<std::string, Fn>>& table() {
  static const std::vector<std::pair<std::string, Fn>> t = {
      {"fig1", fig1},   {"fig2", fig2}, {"fig3", fig3}, {"fig4b", fig4b}, {"fig4c", fig4c}, {"fig4d", fig4d},
      {"fig4e", fig4e}, {"fig5", fig5}, {"fig6", fig6}, {"fig7a", fig7a}, {"fig7b", fig7b}, {"fig7c", fig7c}};
  return t;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : table()) v.push_back(e.first);
    return v;
  }();
  return ids;
}

int run_reproduce(const Globals& g, const std::string& figure, std::ostream& out) {
  for (const auto& [id, fn] : table())
    if (id == figure) return fn(g, out);
  throw ConfigError("unknown figure id " + figure);
}

}  // namespace u1lab::app
