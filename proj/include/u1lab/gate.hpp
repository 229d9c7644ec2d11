#pragma once
// The U(1)-conserving two-qubit gate exp(-i h tau),
//   h = XX + YY + delta ZZ + b (Z_2 - Z_1) + d (X_1 Y_2 - Y_1 X_2) + m (Z_1 + Z_2),
// and the one-step brickwall propagator built from it.

#include <Eigen/Dense>
#include <optional>
#include <string_view>

#include "u1lab/kernels.hpp"
#include "u1lab/pauli.hpp"

namespace u1lab {

using Gate = Eigen::Matrix4cd;
using Transfer = Eigen::Matrix<double, 16, 16>;

struct GateParams {
  double delta = 1.0;
  double d = 0.0;
  double b = 0.0;
  double m = 0.0;
  double tau = 0.0;

  /// sqrt(1 + D^2 + B^2).
  double j_eff() const;
  /// Generalized anisotropy; nullopt where sin(2 tau J_eff) vanishes (the
  /// value is infinite there).
  std::optional<double> frak_d() const;
  /// Twist angle with tan(2 theta) = D, 2 theta in (-pi/2, pi/2).
  double theta() const;

  GateParams with_tau(double t) const {
    GateParams p = *this;
    p.tau = t;
    return p;
  }
};

enum class TauUnits { raw, quarter_pi };
/// Converts a user-facing tau value (quarter_pi: value * pi/4) to raw units.
double tau_from_units(double value, TauUnits units);
double tau_to_quarter_pi(double tau);
TauUnits parse_tau_units(std::string_view s);

enum class Boundary { open, periodic };
std::string_view boundary_name(Boundary b);

/// Which brickwall layer acts on states first. U = U_odd U_even (even first)
/// is the convention under which the even-bond current is the two-site
/// operator with the analytic coefficients; odd_first exists so tests can
/// demonstrate that the other ordering fails that check.
enum class LayerOrder { even_first, odd_first };

/// exp(-i h tau) in the basis |00>,|01>,|10>,|11> (site 1 = left qubit),
/// assembled from the analytic 2x2 spectral decomposition.
Gate gate_matrix(const GateParams& p);

/// The gate Hamiltonian h itself.
Gate gate_hamiltonian(const GateParams& p);

kernels::Gate4 to_kernel(const Gate& g);

struct DensePropagator {
  DenseOp matrix;
  int length = 0;
  Boundary boundary = Boundary::open;
  LayerOrder layer_order = LayerOrder::even_first;
};

inline constexpr int kMaxDenseSites = 14;

/// One Floquet step. Even L, 2 <= L <= 14.
DensePropagator build_propagator(const GateParams& p, int length, Boundary boundary,
                                 LayerOrder order = LayerOrder::even_first);

/// U * sigma^z_1 sigma^z_L (OBC only).
DensePropagator build_tilde_propagator(const GateParams& p, int length);

/// Pauli transfer matrix of the gate in the Schroedinger picture,
/// R[a][b] = tr(P_a g P_b g^dagger)/4 with pair index 4*first + second.
/// The Heisenberg-picture map is the transpose.
Transfer pauli_transfer(const Gate& g);
kernels::Transfer16 to_kernel(const Transfer& r);

/// Dense matrices of the transformations relating parameter sets.
DenseOp twist_operator(double theta, int length);   // exp(-i theta sum_l l Z_l)
DenseOp half_pi_twist(int length);                  // prod_l Z_{2l-1}
DenseOp particle_hole(int length);                  // prod_l X_l
DenseOp reflection(int length);                     // site l -> L+1-l

/// Minimum over global phases of ||a - e^{i phi} b||_F.
double distance_up_to_phase(const DenseOp& a, const DenseOp& b);

/// max |(U^dagger U - 1)_{ij}|.
double unitarity_error(const DenseOp& u);

}  // namespace u1lab
