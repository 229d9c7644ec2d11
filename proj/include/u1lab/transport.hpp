#pragma once
// Density-operator evolution in a real Pauli-coefficient MPS form:
// rho = 2^-L sum c_{a_1..a_L} P_{a_1} ... P_{a_L}, with c_{0..0} = tr rho = 1.
// Gates act as 16x16 real transfer matrices on neighbouring sites.

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "u1lab/gate.hpp"
#include "u1lab/kernels.hpp"
#include "u1lab/pauli.hpp"
#include "u1lab/symmetry.hpp"

namespace u1lab {

inline constexpr double kTruncationCutoff = 1e-10;
inline constexpr double kAccuracyWarning = 1e-4;

/// Even-bond current j_l = A (x_l y_{l+1} - y_l x_{l+1}) + F (z_l - z_{l+1})
///                        + C (x_l x_{l+1} + y_l y_{l+1}).
struct CurrentOperator {
  double a = 0.0;
  double f = 0.0;
  double c = 0.0;
};

CurrentOperator current_operator(const GateParams& p);

/// j_bond as a Pauli polynomial on `length` sites (bond = its left site).
PauliPoly current_poly(const CurrentOperator& j, int length, int bond);

class MpoState {
 public:
  using SiteVector = std::array<double, 4>;

  /// Product state rho = prod_l (1 + sum_a v_l[a] P_a)/2, v_l[0] ignored (set to 1).
  static MpoState product(const std::vector<SiteVector>& sites, int chi_max, double cutoff = kTruncationCutoff);

  int length() const { return static_cast<int>(sites_.size()); }
  int chi_max() const { return chi_max_; }
  int max_bond() const;
  std::vector<int> bond_dims() const;

  /// One Floquet step, rho -> U rho U^dag with U = U_odd U_even (OBC).
  /// Returns the summed discarded weight of the step, each relative to the
  /// weight beyond the leading singular value of its bond.
  double step(const kernels::Transfer16& r);
  /// A single gate on sites (site, site+1), 1-based; moves the orthogonality centre there.
  double apply_gate(int site, const kernels::Transfer16& r);

  /// c_{0..0}.
  double trace() const;
  /// Raw Pauli coefficient <P_letter at each site>, unnormalized by the trace.
  std::vector<double> site_coefficients(int letter) const;
  /// <O_site O'_{site+1}> coefficient, unnormalized.
  double pair_coefficient(int site, int letter_a, int letter_b) const;
  /// <j_bond>, unnormalized.
  double current(const CurrentOperator& j, int bond) const;

  /// Dense coefficient vector (L <= 10), digit of site 1 most significant.
  std::vector<double> dense_coefficients() const;

 private:
  MpoState() = default;
  void move_center(int target);
  double split(int left, const Eigen::MatrixXd& theta, bool center_left);
  double update(int left, const kernels::Transfer16& r, bool center_left);

  // Dl x 4 x Dr, element (a, s, b) at a + Dl (s + 4 b).
  struct Site {
    int dl = 1;
    int dr = 1;
    Eigen::VectorXd data;
  };

  std::vector<Site> sites_;
  int center_ = 0;
  int chi_max_ = 0;
  double cutoff_ = kTruncationCutoff;
};

enum class QuenchKind { domain_wall_z, helix_tilde_x };

struct QuenchConfig {
  QuenchKind kind = QuenchKind::domain_wall_z;
  double mu = 1e-3;
  int length = 64;
  int steps = 100;
  int chi = 64;
  int measure_every = 1;  // profile stride; scalar series are recorded every step
  GateParams params;
  double cutoff = kTruncationCutoff;
  bool keep_profiles = true;

  void validate() const;
};

struct Profile {
  int t = 0;
  std::vector<double> sz;
  std::vector<double> sx;
  std::vector<double> sy;
};

struct TransportResult {
  QuenchConfig config;
  std::vector<int> times;            // 0..steps
  std::vector<double> delta_z;       // transferred magnetization
  std::vector<double> current;       // <j_{L/2}>/mu at the start of each step
  std::vector<double> trace;         // c_{0..0}
  std::vector<double> discarded;     // per step (index t -> step t-1 -> t), 0 at t = 0
  std::vector<int> max_bond;
  std::vector<Profile> profiles;     // normalized by the trace
  std::vector<double> helix_angles;  // helix quenches only
  std::vector<std::string> warnings;
};

/// Initial single-site vectors of a quench.
std::vector<MpoState::SiteVector> initial_sites(const QuenchConfig& cfg);

TransportResult evolve(const QuenchConfig& cfg);

/// phi_l = 2 theta (l+1) - alpha for even l, 2 theta (l+1) for odd l.
std::vector<double> helix_angles(const GateParams& p, int length);

struct ExponentFit {
  double z = 0.0;
  double z_err = 0.0;
  double slope = 0.0;
  double slope_err = 0.0;
  double r2 = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int points = 0;
};

/// Least-squares slope of log y against log t on [t_lo, t_hi]; z = 1/slope.
ExponentFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi);

/// First time at which an edge site deviates from its initial value by more
/// than threshold * mu; nullopt if never.
std::optional<int> boundary_time(const TransportResult& r, double threshold = 1e-6);

/// Default window: the last decade of times before any boundary signal.
ExponentFit fit_exponent(const TransportResult& r);
ExponentFit fit_exponent(const TransportResult& r, double t_lo, double t_hi);

/// (mbar_j - mbar_{j+1})/(4 mu) for j = 1..L/2-1, mbar_j the average over
/// sites 2j-1 and 2j; entry j-1 sits at offset 2j - L/2 from the centre.
std::vector<double> two_point_proxy(const TransportResult& r, std::size_t profile_index);

enum class ScanAxis { tau, delta };

/// Commensurate point along the scan axis, frak_d = cos(pi p/m).
struct FractalMark {
  Fraction ratio;
  double target = 0.0;
  double value = 0.0;
};

struct FractalPeak {
  double value = 0.0;
  double height = 0.0;
  double width = 0.0;  // full width at half prominence
};

struct FractalScanResult {
  GateParams base;
  ScanAxis axis = ScanAxis::tau;
  int t_fixed = 0;
  int length = 0;
  int chi = 0;
  std::vector<double> grid;
  std::vector<double> current;  // j_mid(t_fixed)/mu
  std::vector<FractalMark> annotations;
  std::vector<FractalPeak> peaks;
  std::vector<std::string> warnings;
};

FractalScanResult fractal_scan(const GateParams& base, ScanAxis axis, const std::vector<double>& grid, int t_fixed,
                               int length, int chi, double mu = 1e-3, int m_max = 5, unsigned workers = 1);

/// Commensurate points with m <= m_max along the axis inside [lo, hi].
std::vector<FractalMark> fractal_marks(const GateParams& base, ScanAxis axis, double lo, double hi, int m_max);

/// Local maxima of y over x with their prominence-based widths.
std::vector<FractalPeak> find_peaks(const std::vector<double>& x, const std::vector<double>& y);

struct HelixResult {
  TransportResult evolution;
  std::vector<double> phi;
  /// Per profile: <sigma~x_l>/mu and <sigma~y_l>/mu.
  std::vector<std::vector<double>> sx_tilde;
  std::vector<std::vector<double>> sy_tilde;
  /// Per profile: distance from the left edge of the deviation's first moment.
  std::vector<double> front;
};

/// Transversely polarized quench at critical parameters; throws SymmetryError otherwise.
HelixResult helix_quench(const GateParams& p, int length, double mu, int steps, int chi, int measure_every = 1,
                         double cutoff = kTruncationCutoff);

/// First moment sum_l l |d_l| / sum_l |d_l| over the left half, d_l = <sigma~x_l>/mu - 1;
/// |d_l| < 1e-9 counts as undisturbed, and an undisturbed half gives 0.
double helix_front(const std::vector<double>& sx_tilde_over_mu);

}  // namespace u1lab
