#pragma once
// Subcommand implementations. Each writes CSV tables plus a manifest into
// the output directory and returns a process exit code.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "app/output.hpp"
#include "u1lab/gate.hpp"
#include "u1lab/transport.hpp"

namespace u1lab::app {

/// Evenly spaced grid of n points on [lo, hi] (n = 1 gives lo).
std::vector<double> linspace(double lo, double hi, int n);

/// One row per duration; a single duration also prints a summary.
int run_classify(const Globals& g, const GateParams& base, const std::vector<double>& taus, std::ostream& out);

struct PhaseDiagramOptions {
  GateParams base{1.0, 1.0, 1.0, 0.0, 0.0};
  double tau_lo = 0.0;  // raw units
  double tau_hi = 0.0;
  int tau_n = 201;
  std::string axis = "none";  // none, delta, d, b
  double axis_lo = 0.0;
  double axis_hi = 0.0;
  int axis_n = 1;
};

/// Overlay flags of one grid row: index i is flagged when the condition
/// changes sign between i and a neighbour and i is the closer sample.
struct OverlayFlags {
  std::vector<bool> critical;
  std::vector<bool> qgroup;
  std::vector<bool> localization;
  std::vector<bool> free_point;
};
OverlayFlags overlay_flags(const GateParams& base, const std::vector<double>& taus);

int run_phase_diagram(const Globals& g, const PhaseDiagramOptions& o, std::ostream& out);

struct SpectrumScanOptions {
  GateParams base{1.0, 1.0, 1.0, 0.0, 0.0};
  int length = 4;
  Boundary boundary = Boundary::open;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  int tau_n = 201;
  double tol = 1e-8;
};
int run_spectrum_scan(const Globals& g, const SpectrumScanOptions& o, std::ostream& out);

struct RpScanOptions {
  GateParams params{1.0, 1.0, 1.0, 0.0, 0.0};
  std::vector<int> ranges{1, 3};
  int k_n = 64;
  double unit_tol = 1e-8;
};
int run_rp_scan(const Globals& g, const RpScanOptions& o, std::ostream& out);

/// Helix quenches fill `helix`; domain-wall quenches fill `evolution`.
struct QuenchOutputs {
  TransportResult evolution;
  std::optional<HelixResult> helix;
};
int run_quench(const Globals& g, const QuenchConfig& cfg, std::ostream& out, QuenchOutputs* keep = nullptr);

struct ScanOptions {
  GateParams base{1.0, 1.0, 1.0, 0.0, 0.0};
  ScanAxis axis = ScanAxis::tau;
  double lo = 0.0;  // raw units on the tau axis
  double hi = 0.0;
  int n = 41;
  int t_fixed = 150;
  int length = 512;
  int chi = 32;
  double mu = 1e-3;
  int m_max = 5;
};
int run_scan(const Globals& g, const ScanOptions& o, std::ostream& out, FractalScanResult* keep = nullptr);

struct SymmetryCheckOptions {
  GateParams params{1.0, 1.0, 1.0, 0.0, 0.0};
  int length = 6;
};
int run_symmetry_check(const Globals& g, const SymmetryCheckOptions& o, std::ostream& out);

const std::vector<std::string>& figure_ids();
int run_reproduce(const Globals& g, const std::string& figure, std::ostream& out);

/// Quench configuration from a JSON object (keys: kind, mu, length, steps,
/// chi, measure_every, cutoff, delta, d, b, m, tau); tau is read in `units`.
QuenchConfig quench_from_json(const nlohmann::json& j, TauUnits units, QuenchConfig base = {});

}  // namespace u1lab::app
