#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "app/commands.hpp"
#include "u1lab/error.hpp"

using namespace u1lab;
using namespace u1lab::app;

namespace {

struct GateFlags {
  double delta = 1.0, d = 1.0, b = 1.0, m = 0.0, tau = 0.0;

  void attach(CLI::App* app, bool with_tau = true) {
    app->add_option("--delta", delta, "anisotropy")->capture_default_str();
    app->add_option("--d", d, "twist coupling D")->capture_default_str();
    app->add_option("--b", b, "coupling B")->capture_default_str();
    app->add_option("--m", m, "field m")->capture_default_str();
    if (with_tau) app->add_option("--tau", tau, "gate duration (in --tau-units)")->capture_default_str();
  }
  GateParams params(TauUnits u) const { return {delta, d, b, m, tau_from_units(tau, u)}; }
};

struct Range {
  double lo = 0.0, hi = 2.0;
  int n = 201;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrable U(1) brickwall circuit laboratory"};
  app.require_subcommand(1);
  Globals g;
  std::string out_dir = "out", units = "quarter-pi";
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads for scans")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--seedless", g.seedless, "fail if any random number is drawn");
  app.add_option("--tau-units", units, "raw or quarter-pi")->capture_default_str()->check(CLI::IsMember({"raw", "quarter-pi"}));

  auto* classify_cmd = app.add_subcommand("classify", "phase of one gate or a range of durations");
  GateFlags classify_gate;
  classify_gate.attach(classify_cmd);
  std::vector<double> tau_range;
  classify_cmd->add_option("--tau-range", tau_range, "lo hi n")->expected(3);

  auto* pd_cmd = app.add_subcommand("phase-diagram", "classification and overlays on a tau x axis grid");
  GateFlags pd_gate;
  pd_gate.attach(pd_cmd, false);
  Range pd_tau;
  std::string pd_axis = "none";
  Range pd_second{0.0, 0.0, 1};
  pd_cmd->add_option("--tau-lo", pd_tau.lo)->capture_default_str();
  pd_cmd->add_option("--tau-hi", pd_tau.hi)->capture_default_str();
  pd_cmd->add_option("--tau-n", pd_tau.n)->capture_default_str();
  pd_cmd->add_option("--axis", pd_axis, "none, delta, d or b")->capture_default_str();
  pd_cmd->add_option("--axis-lo", pd_second.lo)->capture_default_str();
  pd_cmd->add_option("--axis-hi", pd_second.hi)->capture_default_str();
  pd_cmd->add_option("--axis-n", pd_second.n)->capture_default_str();

  auto* spec_cmd = app.add_subcommand("spectrum-scan", "eigenphases and multiplets versus tau");
  GateFlags spec_gate;
  spec_gate.attach(spec_cmd, false);
  SpectrumScanOptions spec;
  Range spec_tau;
  std::string boundary = "obc";
  spec_cmd->add_option("--length", spec.length)->capture_default_str();
  spec_cmd->add_option("--boundary", boundary)->capture_default_str()->check(CLI::IsMember({"obc", "pbc"}));
  spec_cmd->add_option("--tau-lo", spec_tau.lo)->capture_default_str();
  spec_cmd->add_option("--tau-hi", spec_tau.hi)->capture_default_str();
  spec_cmd->add_option("--tau-n", spec_tau.n)->capture_default_str();
  spec_cmd->add_option("--tol", spec.tol)->capture_default_str();

  auto* rp_cmd = app.add_subcommand("rp-scan", "spectra of the truncated momentum-resolved propagator");
  GateFlags rp_gate;
  rp_gate.attach(rp_cmd);
  RpScanOptions rp;
  rp_cmd->add_option("--ranges", rp.ranges)->capture_default_str();
  rp_cmd->add_option("--k-n", rp.k_n)->capture_default_str();
  rp_cmd->add_option("--unit-tol", rp.unit_tol)->capture_default_str();

  auto* quench_cmd = app.add_subcommand("quench", "domain-wall or helix quench");
  GateFlags quench_gate;
  quench_gate.attach(quench_cmd);
  QuenchConfig qc;
  std::string config_path, kind = "domain-wall";
  quench_cmd->add_option("--config", config_path, "JSON config; flags given explicitly override it");
  quench_cmd->add_option("--kind", kind)->capture_default_str()->check(CLI::IsMember({"domain-wall", "helix"}));
  quench_cmd->add_option("--mu", qc.mu)->capture_default_str();
  quench_cmd->add_option("--length", qc.length)->capture_default_str();
  quench_cmd->add_option("--steps", qc.steps)->capture_default_str();
  quench_cmd->add_option("--chi", qc.chi)->capture_default_str();
  quench_cmd->add_option("--measure-every", qc.measure_every)->capture_default_str();
  quench_cmd->add_option("--cutoff", qc.cutoff)->capture_default_str();

  auto* scan_cmd = app.add_subcommand("scan", "mid-chain current at fixed time across a parameter axis");
  GateFlags scan_gate;
  scan_gate.attach(scan_cmd);
  ScanOptions scan;
  std::string scan_axis = "tau";
  scan_cmd->add_option("--axis", scan_axis)->capture_default_str()->check(CLI::IsMember({"tau", "delta"}));
  scan_cmd->add_option("--lo", scan.lo)->required();
  scan_cmd->add_option("--hi", scan.hi)->required();
  scan_cmd->add_option("--n", scan.n)->capture_default_str();
  scan_cmd->add_option("--t", scan.t_fixed)->capture_default_str();
  scan_cmd->add_option("--length", scan.length)->capture_default_str();
  scan_cmd->add_option("--chi", scan.chi)->capture_default_str();
  scan_cmd->add_option("--mu", scan.mu)->capture_default_str();
  scan_cmd->add_option("--m-max", scan.m_max)->capture_default_str();

  auto* sym_cmd = app.add_subcommand("symmetry-check", "exact symmetry residuals at small size");
  GateFlags sym_gate;
  sym_gate.attach(sym_cmd);
  SymmetryCheckOptions sym;
  sym_cmd->add_option("--length", sym.length)->capture_default_str();

  auto* rep_cmd = app.add_subcommand("reproduce", "canned desk-scale run for one figure");
  std::string figure;
  rep_cmd->add_option("figure", figure, "figure id")->required()->check(CLI::IsMember(figure_ids()));

  CLI11_PARSE(app, argc, argv);

  try {
    g.out_dir = out_dir;
    g.tau_units = parse_tau_units(units);
    const TauUnits u = g.tau_units;
    if (*classify_cmd) {
      std::vector<double> taus;
      if (!tau_range.empty()) {
        for (double t : linspace(tau_range[0], tau_range[1], static_cast<int>(tau_range[2]))) taus.push_back(tau_from_units(t, u));
      } else {
        taus.push_back(tau_from_units(classify_gate.tau, u));
      }
      return run_classify(g, classify_gate.params(u), taus, std::cout);
    }
    if (*pd_cmd) {
      PhaseDiagramOptions o;
      o.base = pd_gate.params(u);
      o.tau_lo = tau_from_units(pd_tau.lo, u);
      o.tau_hi = tau_from_units(pd_tau.hi, u);
      o.tau_n = pd_tau.n;
      o.axis = pd_axis;
      o.axis_lo = pd_second.lo;
      o.axis_hi = pd_second.hi;
      o.axis_n = pd_second.n;
      return run_phase_diagram(g, o, std::cout);
    }
    if (*spec_cmd) {
      spec.base = spec_gate.params(u);
      spec.boundary = boundary == "pbc" ? Boundary::periodic : Boundary::open;
      spec.tau_lo = tau_from_units(spec_tau.lo, u);
      spec.tau_hi = tau_from_units(spec_tau.hi, u);
      spec.tau_n = spec_tau.n;
      return run_spectrum_scan(g, spec, std::cout);
    }
    if (*rp_cmd) {
      rp.params = rp_gate.params(u);
      return run_rp_scan(g, rp, std::cout);
    }
    if (*quench_cmd) {
      QuenchConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read " + config_path);
        cfg = quench_from_json(nlohmann::json::parse(in), u);
      }
      auto given = [&](const char* name) { return quench_cmd->count(name) > 0; };
      if (given("--kind") || config_path.empty())
        cfg.kind = kind == "helix" ? QuenchKind::helix_tilde_x : QuenchKind::domain_wall_z;
      if (given("--mu") || config_path.empty()) cfg.mu = qc.mu;
      if (given("--length") || config_path.empty()) cfg.length = qc.length;
      if (given("--steps") || config_path.empty()) cfg.steps = qc.steps;
      if (given("--chi") || config_path.empty()) cfg.chi = qc.chi;
      if (given("--measure-every") || config_path.empty()) cfg.measure_every = qc.measure_every;
      if (given("--cutoff") || config_path.empty()) cfg.cutoff = qc.cutoff;
      const GateParams fp = quench_gate.params(u);
      if (given("--delta") || config_path.empty()) cfg.params.delta = fp.delta;
      if (given("--d") || config_path.empty()) cfg.params.d = fp.d;
      if (given("--b") || config_path.empty()) cfg.params.b = fp.b;
      if (given("--m") || config_path.empty()) cfg.params.m = fp.m;
      if (given("--tau") || config_path.empty()) cfg.params.tau = fp.tau;
      return run_quench(g, cfg, std::cout);
    }
    if (*scan_cmd) {
      scan.base = scan_gate.params(u);
      scan.axis = scan_axis == "tau" ? ScanAxis::tau : ScanAxis::delta;
      if (scan.axis == ScanAxis::tau) {
        scan.lo = tau_from_units(scan.lo, u);
        scan.hi = tau_from_units(scan.hi, u);
      }
      return run_scan(g, scan, std::cout);
    }
    if (*sym_cmd) {
      sym.params = sym_gate.params(u);
      return run_symmetry_check(g, sym, std::cout);
    }
    if (*rep_cmd) return run_reproduce(g, figure, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
