#pragma once
// Closed-form symmetry machinery: phase classification, the screw SU(2)
// generators of the critical manifold, U_q(sl2) generators and their special
// gate durations, and commensurate (fractal) anisotropy points.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <string_view>
#include <vector>

#include "u1lab/gate.hpp"
#include "u1lab/pauli.hpp"

namespace u1lab {

inline constexpr double kClassifyTolerance = 1e-9;

enum class Phase { phase_one, phase_two, critical, localized, free_point };
std::string_view phase_name(Phase p);

struct Fraction {
  int p = 0;
  int m = 1;
  double value() const { return static_cast<double>(p) / m; }
};

struct PhasePoint {
  GateParams params;
  Phase phase = Phase::phase_one;
  std::optional<double> frak_d;  // nullopt where it diverges
  /// Phase II only: coprime p/m (m <= 12) with cos(pi p/m) closest to frak_d.
  std::optional<Fraction> nearest_rational;
};

/// Ties resolve as localized > critical > free point > phase I/II.
PhasePoint classify(const GateParams& p, double tol = kClassifyTolerance);

/// Right-hand side of the phase equation,
/// frak_d cos(2 tau J)/cos(2 tau delta) - i B/sqrt(1+D^2) tan(2 tau delta).
/// Unit modulus exactly on the critical manifold.
cplx screw_phase(const GateParams& p);

/// alpha from tan(alpha) = -(B/J) tan(2 tau J), in (-pi/2, pi/2]. Fixes
/// alpha only modulo pi.
double screw_phase_tangent(const GateParams& p);

struct ScrewGenerator {
  double theta = 0.0;
  cplx e_i_alpha = 1.0;
  int length = 0;
  PauliPoly s_plus;

  PauliPoly s_minus() const { return s_plus.adjoint(); }
};

/// sum_l (sigma+_{2l-1} + e^{-i(2 theta - alpha)} sigma+_{2l}) e^{-i 4 l theta}
/// for any phase (no criticality check).
ScrewGenerator screw_generator(double theta, cplx e_i_alpha, int length);

/// Generator at critical parameters; throws SymmetryError otherwise.
ScrewGenerator screw_generator(const GateParams& p, int length, double tol = kClassifyTolerance);

struct BoundaryResidual {
  PauliPoly bulk;      // strings acting as identity on sites 1 and L
  PauliPoly boundary;  // everything else
  double bulk_norm = 0.0;
  double boundary_norm = 0.0;
  double total_norm = 0.0;
};

/// sqrt(<C,C>) for C = ab - ba, the normalized Hilbert-Schmidt norm used
/// for every residual in this module.
double commutator_norm(const DenseOp& a, const DenseOp& b);

/// U^dagger G U - G split into bulk and boundary parts (OBC, L <= 12).
BoundaryResidual almost_commutation_residual(const PauliPoly& generator, const DensePropagator& u);

struct QGroupPoint {
  double tau = 0.0;
  double k = 0.0;  // half-integer index
  int s = 0;       // -1 on the tau_+ branch, +1 on tau_-
  bool degenerate = false;  // coincides with sin(2 tau J) = 0
};

/// tau_+ = k pi/|J + delta| and tau_- = k pi/|J - delta| for k = 1/2, 1, ..., k_max.
/// Branches with a vanishing denominator are skipped.
std::vector<QGroupPoint> qgroup_points(const GateParams& p, double k_max);

/// (q^x - q^-x)/(q - q^-1), x for q = 1.
double q_number(double x, double q);

struct QGroupGenerator {
  double q = 1.0;
  int s = 1;
  std::optional<double> k;  // nullopt on the delta^2 = J^2 manifold (any tau)
  double theta = 0.0;
  int length = 0;
  PauliPoly s_plus;
  PauliPoly s_minus;
};

/// Generators at a U_q point, either |sin(2 tau delta)/sin(2 tau J)| = 1 or
/// delta^2 = J^2. The branch s is the sign with 2 tau (J - s delta) a multiple
/// of pi (the ratio itself equals s (-1)^{2k}); `branch` forces one when both
/// apply. Throws SymmetryError elsewhere.
QGroupGenerator qgroup_generator(const GateParams& p, int length, std::optional<int> branch = std::nullopt,
                                 double tol = kClassifyTolerance);

/// q-number [Z]_q of the total magnetization as a diagonal Pauli polynomial.
PauliPoly q_number_of_z(int length, double q);

struct FractalPoint {
  Fraction ratio;
  double target = 0.0;  // cos(pi p/m)
  double tau = 0.0;
};

/// tau in [tau_lo, tau_hi] with frak_d(tau) = cos(pi p/m), 0 < p < m <= m_max
/// coprime; sorted by tau.
std::vector<FractalPoint> fractal_rationals(const GateParams& base, double tau_lo, double tau_hi, int m_max);

/// Durations in [tau_lo, tau_hi] where |frak_d| = 1.
std::vector<double> critical_taus(const GateParams& base, double tau_lo, double tau_hi);

/// Durations 2 J tau = k pi, k >= 1, in [tau_lo, tau_hi].
std::vector<double> localization_taus(const GateParams& base, double tau_lo, double tau_hi);

/// Maximal tau intervals inside (tau_lo, tau_hi) classified as phase II,
/// bounded by critical durations, poles of frak_d or the scan ends.
std::vector<std::pair<double, double>> ballistic_windows(const GateParams& base, double tau_lo, double tau_hi);

struct MapIdentity {
  std::string name;
  double residual = 0.0;  // distance up to a global phase
};

/// The four conjugation identities relating parameter sets, evaluated densely
/// with OBC: twist (D removed), half-pi twist, particle-hole, reflection.
std::vector<MapIdentity> parameter_map_residuals(const GateParams& p, int length);

/// Bracketing root search of f on [lo, hi] with `samples` uniform probes;
/// brackets across which pole(x) changes sign are skipped.
std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi, int samples,
                               const std::function<double(double)>& pole = nullptr);

}  // namespace u1lab
