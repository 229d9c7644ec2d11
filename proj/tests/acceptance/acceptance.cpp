// Acceptance run: one PASS/FAIL line per criterion. Arguments select
// criteria by number; without arguments the quick ones (1-6, 10, 11) run.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "u1lab/error.hpp"
#include "u1lab/pauli.hpp"
#include "u1lab/rp.hpp"
#include "u1lab/spectral.hpp"
#include "u1lab/symmetry.hpp"
#include "u1lab/transport.hpp"

using namespace u1lab;

namespace {

const double kPi = std::numbers::pi;
const double kTauPlus = kPi / (std::sqrt(3.0) + 1.0);
const double kTauLocalized = kPi / (2.0 * std::sqrt(3.0));
const double kTauBallistic = 0.4 * kPi / 4.0;

GateParams unit_gate(double tau) { return {1.0, 1.0, 1.0, 0.0, tau}; }
double tau_critical() { return critical_taus(unit_gate(0.0), 0.01, 1.0).front(); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "!") << what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Least-squares slope and R^2 of y against x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
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
  return {cxy / cxx, cxy * cxy / (cxx * cyy)};
}

// ---------------------------------------------------------------------------

void multiplets(Verdict& v) {
  const auto plus = analyze_spectrum(build_propagator(unit_gate(kTauPlus), 4, Boundary::open), kTauPlus, 1e-8);
  v.require(plus.degeneracy_multiset == std::vector<int>{1, 1, 3, 3, 3, 5}, "tau_+ multiset {1,1,3,3,3,5}");
  const auto crit = analyze_spectrum(build_propagator(unit_gate(tau_critical()), 4, Boundary::open), tau_critical(), 1e-8);
  v.require(!crit.su2_match, "no SU(2) multiplets at tau_c");
}

void screw(Verdict& v) {
  const GateParams p = unit_gate(tau_critical());
  for (int length : {6, 8, 10}) {
    const auto u = build_propagator(p, length, Boundary::open);
    const auto g = screw_generator(p, length);
    const auto r = almost_commutation_residual(g.s_plus, u);
    const auto off = screw_generator(p.theta(), g.e_i_alpha * std::polar(1.0, 0.1), length);
    const double bulk_off = almost_commutation_residual(off.s_plus, u).bulk_norm;
    const std::string l = "L=" + std::to_string(length);
    v.require(r.bulk_norm < 1e-10, l + " bulk " + num(r.bulk_norm));
    v.require(r.boundary_norm > 1e-3, l + " boundary " + num(r.boundary_norm));
    v.require(bulk_off > 1e-3, l + " perturbed bulk " + num(bulk_off));
  }
}

void qgroup(Verdict& v) {
  constexpr int kLength = 6;
  const auto g = qgroup_generator(unit_gate(kTauPlus), kLength);
  const double q_ref = (std::sqrt(6.0) - std::sqrt(2.0)) / 2.0;
  v.require(std::abs(g.q - q_ref) < 1e-12, "q = " + num(g.q));
  const DenseOp u = oracle::brickwall(unit_gate(kTauPlus), kLength);
  const double c = std::max(commutator_norm(u, to_dense(g.s_plus)), commutator_norm(u, to_dense(g.s_minus)));
  v.require(c < 1e-10, "[U, S_q] " + num(c));

  const double half = kTauPlus / 2.0;
  const auto gh = qgroup_generator(unit_gate(half), kLength);
  const DenseOp z1zl = oracle::site_op(kLength, 1, oracle::pauli(3)) * oracle::site_op(kLength, kLength, oracle::pauli(3));
  const DenseOp ut = oracle::brickwall(unit_gate(half), kLength) * z1zl;
  const double ch = std::max(commutator_norm(ut, to_dense(gh.s_plus)), commutator_norm(ut, to_dense(gh.s_minus)));
  v.require(ch < 1e-10, "[U~, S_q] at k=1/2 " + num(ch));

  // q^{Z/2} S^+- q^{-Z/2} = q^{+-1} S^+- and [S^+, S^-] = [Z]_q, built densely.
  const DenseOp sp = to_dense(g.s_plus), sm = to_dense(g.s_minus);
  const DenseOp z = oracle::total_z(kLength);
  Eigen::VectorXcd qz(z.rows()), qnum(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z(i, i).real();
    qz(i) = std::pow(g.q, m / 2.0);
    qnum(i) = (std::pow(g.q, m) - std::pow(g.q, -m)) / (g.q - 1.0 / g.q);
  }
  const DenseOp kp = qz.asDiagonal(), km = qz.cwiseInverse().asDiagonal();
  double alg = oracle::max_abs(kp * sp * km - g.q * sp);
  alg = std::max(alg, oracle::max_abs(kp * sm * km - sm / g.q));
  alg = std::max(alg, oracle::max_abs(sp * sm - sm * sp - DenseOp(qnum.asDiagonal())));
  v.require(alg < 1e-10, "algebra " + num(alg));
}

void ruelle_pollicott(Verdict& v) {
  const GateParams p = unit_gate(tau_critical());
  std::vector<double> ks;
  for (int i = 0; i < 64; ++i) ks.push_back(-kPi + 2.0 * kPi * i / 64);
  for (int r : {1, 3}) {
    const auto res = rp_scan(p, r, ks);
    bool only = true;
    int ones = -1;
    for (const auto& pt : res.points) {
      const bool zero = std::abs(pt.k) < 1e-12, screw = std::abs(std::abs(pt.k) - kPi / 2) < 1e-12;
      if ((pt.unit_count > 0) != (zero || screw)) only = false;
      if (zero) ones = pt.one_count;
    }
    const std::string rs = "r=" + std::to_string(r);
    v.require(ones == r, rs + " k=0 multiplicity " + std::to_string(ones));
    v.require(only, rs + " unit modulus only at 0, +-pi/2");
    const double a = res.overlap_plus.value_or(0.0), b = res.overlap_minus.value_or(0.0);
    v.require(a > 0.999 && b > 0.999, rs + " overlaps " + num(std::min(a, b)));
  }
}

void current(Verdict& v) {
  constexpr int n = 8;
  oracle::Rng rng(2024);
  const auto op = [&](std::string letters) { return oracle::pauli_string(letters); };
  // Pauli strings on sites 2, 3 of an 8-site chain.
  const DenseOp xy = op("IXYIIIII"), z2 = op("IZIIIIII"), xx = op("IXXIIIII");
  const DenseOp z34 = op("IIZIIIII") + op("IIIZIIII");
  const double dim = static_cast<double>(xy.rows());
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const GateParams p{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0),
                       rng.uniform(0.05, 1.5)};
    const DenseOp u = oracle::brickwall(p, n);
    const DenseOp d = u.adjoint() * z34 * u - z34;
    const double a = (xy * d).trace().real() / dim, f = (z2 * d).trace().real() / dim, c = (xx * d).trace().real() / dim;
    const CurrentOperator j = current_operator(p);
    worst = std::max({worst, std::abs(a - j.a), std::abs(f - j.f), std::abs(c - j.c)});
  }
  v.require(worst < 1e-10, "100 draws, worst " + num(worst));
  double at_pole = 0.0;
  for (int i = 0; i < 20; ++i) {
    GateParams p{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), 0.0, 0.0};
    p.tau = kPi / (2.0 * p.j_eff());
    const CurrentOperator j = current_operator(p);
    at_pole = std::max({at_pole, std::abs(j.a), std::abs(j.f), std::abs(j.c)});
  }
  v.require(at_pole < 1e-12, "vanishing at 2 J tau = pi " + num(at_pole));
}

void tebd_oracle(Verdict& v) {
  constexpr int n = 8, steps = 20;
  for (double tau : {tau_critical(), kTauPlus, kTauBallistic, kTauLocalized}) {
    QuenchConfig cfg;
    cfg.params = unit_gate(tau);
    cfg.length = n;
    cfg.steps = steps;
    cfg.chi = 256;
    cfg.cutoff = 0.0;
    cfg.mu = 0.3;
    const TransportResult r = evolve(cfg);

    std::vector<Eigen::Matrix2cd> f;
    for (int l = 0; l < n; ++l) f.push_back((Eigen::Matrix2cd::Identity() + (l < n / 2 ? 0.3 : -0.3) * oracle::pauli(3)) / 2.0);
    DenseOp rho = oracle::product(f);
    const DenseOp u = oracle::brickwall(cfg.params, n);
    double worst = 0.0;
    std::size_t next = 0;
    for (int t = 0; t <= steps; ++t) {
      if (next < r.profiles.size() && r.profiles[next].t == t) {
        for (int l = 1; l <= n; ++l) {
          const double ref = (rho * oracle::site_op(n, l, oracle::pauli(3))).trace().real();
          worst = std::max(worst, std::abs(ref - r.profiles[next].sz[static_cast<std::size_t>(l - 1)]));
        }
        ++next;
      }
      rho = u * rho * u.adjoint();
    }
    v.require(worst < 1e-8 && next == r.profiles.size(), "tau/(pi/4)=" + num(tau / (kPi / 4)) + " " + num(worst));
  }
}

TransportResult desk_quench(double tau) {
  QuenchConfig cfg;
  cfg.params = unit_gate(tau);
  cfg.length = 256;
  cfg.chi = 96;
  cfg.steps = 300;
  cfg.mu = 1e-3;
  cfg.keep_profiles = false;
  return evolve(cfg);
}

void exponents(Verdict& v) {
  const struct {
    const char* name;
    double tau;
    double z;
    double tol;
  } points[] = {{"critical", tau_critical(), 1.5, 0.15}, {"diffusive", kTauPlus, 2.0, 0.25}, {"ballistic", kTauBallistic, 1.0, 0.1}};
  for (const auto& pt : points) {
    const auto r = desk_quench(pt.tau);
    const ExponentFit f = fit_exponent(r);
    v.require(std::abs(f.z - pt.z) <= pt.tol, std::string(pt.name) + " z " + num(f.z) + " on [" + num(f.t_lo) + ", " +
                                                  num(f.t_hi) + "]");
  }
  const auto r = desk_quench(kTauLocalized);
  const double peak = *std::max_element(r.delta_z.begin(), r.delta_z.end());
  v.require(peak < 1.0, "localized max dZ " + num(peak));
}

void fractal(Verdict& v) {
  const GateParams base = unit_gate(0.0);
  const auto windows = ballistic_windows(base, 1e-9, kPi);
  if (windows.size() < 2) {
    v.require(false, "second ballistic window not found");
    return;
  }
  const auto [lo, hi] = windows[1];
  constexpr int kPoints = 41;
  std::vector<double> grid;
  for (int i = 0; i < kPoints; ++i) grid.push_back(lo + (hi - lo) * (i + 0.5) / kPoints);
  const double step = (hi - lo) / kPoints;
  const FractalScanResult res = fractal_scan(base, ScanAxis::tau, grid, 150, 512, 32, 1e-3, 3);
  auto peak_near = [&](int p, int m) -> std::optional<double> {
    for (const auto& mk : res.annotations) {
      if (mk.ratio.p != p || mk.ratio.m != m) continue;
      std::optional<double> best;
      for (const auto& pk : res.peaks)
        if (std::abs(pk.value - mk.value) <= step && (!best || pk.height > *best)) best = pk.height;
      return best;
    }
    return std::nullopt;
  };
  const auto half = peak_near(1, 2), two = peak_near(2, 3);
  v.require(half.has_value(), "maximum at 1/2" + (half ? " height " + num(*half) : std::string()));
  v.require(two.has_value(), "maximum at 2/3" + (two ? " height " + num(*two) : std::string()));
  v.require(half && two && *two > *half, "2/3 above 1/2");
}

void helix(Verdict& v) {
  constexpr int kLength = 128, kSteps = 200, kEvery = 2;
  const auto h = helix_quench(unit_gate(tau_critical()), kLength, 1e-3, kSteps, 64, kEvery);
  const auto& prof = h.evolution.profiles;

  // Sites outside both causal cones.
  double bulk = 0.0;
  int last_bulk = 0;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const int reach = 2 * prof[i].t + 2;
    for (int l = reach; l < kLength - reach; ++l) {
      bulk = std::max(bulk, std::abs(h.sx_tilde[i][static_cast<std::size_t>(l)] - 1.0));
      last_bulk = prof[i].t;
    }
  }
  v.require(bulk < 1e-4 && last_bulk > 0, "bulk deviation " + num(bulk) + " up to t=" + std::to_string(last_bulk));

  // Fit until the two edge fronts meet at the centre.
  int meet = kSteps;
  for (std::size_t i = 0; i < prof.size() && meet == kSteps; ++i)
    for (int l = kLength / 2 - 8; l < kLength / 2 + 8; ++l)
      if (std::abs(h.sx_tilde[i][static_cast<std::size_t>(l)] - 1.0) > 1e-4) meet = prof[i].t;
  std::vector<double> lt, lf;
  for (std::size_t i = 0; i < h.front.size(); ++i) {
    const int t = prof[i].t;
    if (4 * t >= meet && t <= meet && h.front[i] > 0.0) {
      lt.push_back(std::log(t));
      lf.push_back(std::log(h.front[i]));
    }
  }
  const auto [slope, r2] = line_fit(lt, lf);
  v.require(lt.size() >= 4 && std::abs(slope - 2.0 / 3.0) <= 0.08,
            "front exponent " + num(slope) + " R2 " + num(r2) + " on t<=" + std::to_string(meet));

  // Left half when the fronts meet, away from the origin: each point's nearest
  // neighbour in the xy plane has the same residue mod 8.
  const Profile* at = &prof.back();
  for (const auto& pr : prof)
    if (pr.t == meet) at = &pr;
  int points = 0, foreign = 0;
  for (int a = 0; a < kLength / 2; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (std::hypot(at->sx[ua], at->sy[ua]) < 0.5e-3) continue;
    int nearest = -1;
    double best = 0.0;
    for (int b = 0; b < kLength / 2; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      const double d = std::hypot(at->sx[ua] - at->sx[ub], at->sy[ua] - at->sy[ub]);
      if (b != a && (nearest < 0 || d < best)) {
        nearest = b;
        best = d;
      }
    }
    ++points;
    if ((nearest - a) % 8 != 0) ++foreign;
  }
  v.require(points >= kLength / 4 && foreign == 0,
            "8 curves at t=" + std::to_string(at->t) + ": " + std::to_string(foreign) + " of " + std::to_string(points) +
                " points nearest to another residue");
}

void locality(Verdict& v) {
  constexpr int kLength = 6;
  const auto g = reconstruct_su2(build_propagator(unit_gate(kTauPlus), kLength, Boundary::open));
  const auto w = locality_weights(poly_from_dense(g.casimir())).body_weight;
  std::vector<double> p, lw;
  for (std::size_t i = 2; i < w.size(); ++i) {
    p.push_back(static_cast<double>(i));
    lw.push_back(std::log(w[i]));
  }
  const auto [slope, r2] = line_fit(p, lw);
  v.require(slope < 0.0 && r2 > 0.95, "Casimir log-slope " + num(slope) + " R2 " + num(r2));

  const auto opt = optimize_gauge(g);
  const auto rep = locality_weights(poly_from_dense(opt.generators.s_plus()));
  const auto& ws = rep.body_weight;
  v.require(ws[1] > ws[2] && ws[2] > ws[3], "w1 " + num(ws[1]) + " w2 " + num(ws[2]) + " w3 " + num(ws[3]));
  const double near = rep.average(2, 2), edge = rep.average(2, kLength);
  v.require(edge > near / 5.0, "r=L two-body " + num(edge) + " vs nearest " + num(near));
}

void parameter_maps(Verdict& v) {
  oracle::Rng rng(11);
  std::vector<GateParams> points = {unit_gate(tau_critical()), unit_gate(kTauPlus)};
  for (int i = 0; i < 4; ++i)
    points.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0),
                      rng.uniform(0.05, 1.5)});
  double worst = 0.0;
  for (const auto& p : points)
    for (const auto& m : parameter_map_residuals(p, 6)) worst = std::max(worst, m.residual);
  v.require(worst < 1e-10, "worst residual " + num(worst));
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<void(Verdict&)>>> criteria = {
      {1, {"exact multiplet structure", multiplets}},
      {2, {"screw SU(2) almost-commutation", screw}},
      {3, {"U_q(sl2) exactness", qgroup}},
      {4, {"Ruelle-Pollicott spectra", ruelle_pollicott}},
      {5, {"current operator", current}},
      {6, {"TEBD oracle equivalence", tebd_oracle}},
      {7, {"dynamical exponents", exponents}},
      {8, {"fractal scan", fractal}},
      {9, {"helix quench", helix}},
      {10, {"generator locality", locality}},
      {11, {"parameter-map identities", parameter_maps}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 10, 11};

  int failed = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      it->second.second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", id, it->second.first, secs, v.detail.str().c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
