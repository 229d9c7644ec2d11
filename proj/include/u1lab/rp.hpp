#pragma once
// Momentum-resolved operator propagator on the infinite chain, truncated to
// operators of range <= r, and its Ruelle-Pollicott spectrum.
//
// Unit cell n holds sites 2n+1 (sublattice A) and 2n+2 (sublattice B); k is
// conjugate to translations by one cell.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "u1lab/gate.hpp"
#include "u1lab/pauli.hpp"

namespace u1lab {

inline constexpr int kMaxRpRange = 5;

/// Pauli strings of range <= r anchored at their first non-identity site:
/// sublattice (A, B) x first letter (X, Y, Z) x any r-1 further letters.
/// Index = sublattice * 3*4^(r-1) + (first-1) * 4^(r-1) + rest, where rest
/// holds the later letters with the leftmost most significant.
class OperatorBasis {
 public:
  explicit OperatorBasis(int range);

  int range() const { return range_; }
  int size() const { return size_; }

  int sublattice(int index) const { return index / (3 * tail_); }
  /// Letters (0..3) of the r sites starting at the anchor.
  std::vector<int> letters(int index) const;
  int index_of(int sublattice, const std::vector<int>& letters) const;

  /// Element as an operator on r+1 sites, site 1 = sublattice A of cell 0.
  PauliString cell_string(int index) const;

 private:
  int range_;
  int tail_;  // 4^(r-1)
  int size_;
};

/// M(k) = sum_d e^{-ikd} M_d with M_d[a][b] = <O_{a,d}, U^dag O_{b,0} U>,
/// U = U_odd U_even on the infinite chain. The real cell-shift blocks M_d are
/// computed once; M(k) for any k is a cheap combination.
class MomentumPropagator {
 public:
  MomentumPropagator(const GateParams& p, int range, unsigned workers = 1);

  const OperatorBasis& basis() const { return basis_; }
  const std::map<int, Eigen::MatrixXd>& shifts() const { return shifts_; }
  Eigen::MatrixXcd matrix(double k) const;

 private:
  OperatorBasis basis_;
  std::map<int, Eigen::MatrixXd> shifts_;
};

/// M(k) for a single quasi-momentum.
Eigen::MatrixXcd build_m(const GateParams& p, int range, double k);

/// Coefficient vector (in the basis of `to`) of a density expressed in the
/// basis of `from` (requires from.range() <= to.range()).
Eigen::VectorXcd embed_density(const Eigen::VectorXcd& v, const OperatorBasis& from, const OperatorBasis& to);

/// Density as a Pauli polynomial on r+1 sites (site 1 = sublattice A).
PauliPoly density_poly(const Eigen::VectorXcd& v, const OperatorBasis& basis);

/// Unit-cell densities of the screw generators, in the basis.
Eigen::VectorXcd screw_plus_density(double theta, cplx e_i_alpha, const OperatorBasis& basis);
Eigen::VectorXcd screw_minus_density(double theta, cplx e_i_alpha, const OperatorBasis& basis);
/// sigma^z_A + sigma^z_B.
Eigen::VectorXcd magnetization_density(const OperatorBasis& basis);

struct RpPoint {
  double k = 0.0;
  std::vector<cplx> eigenvalues;  // sorted by decreasing modulus
  int unit_count = 0;             // | |lambda| - 1 | < unit_tol
  int one_count = 0;              // |lambda - 1| < unit_tol
  std::vector<Eigen::VectorXcd> unit_vectors;
};

struct RpResult {
  GateParams params;
  int range = 0;
  double unit_tol = 1e-8;
  std::vector<RpPoint> points;
  /// Overlap |<v, q>|/(|v||q|) of the unit eigenvector at k = -4 theta (+4
  /// theta) with the S~+ (S~-) density; nullopt when the parameters are not
  /// critical or no unit eigenvalue exists there.
  std::optional<double> overlap_plus;
  std::optional<double> overlap_minus;
};

/// Full spectra on a k grid, plus the screw-generator comparison.
RpResult rp_scan(const GateParams& p, int range, const std::vector<double>& k_grid, unsigned workers = 1,
                 double unit_tol = 1e-8);

/// Spectrum of one matrix, sorted by decreasing modulus.
RpPoint rp_spectrum(const Eigen::MatrixXcd& m, double k, double unit_tol = 1e-8, bool keep_vectors = true);

/// Best overlap between `q` and the eigenvectors of `m` with |lambda - 1| < unit_tol.
std::optional<double> unit_overlap(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& q, double unit_tol = 1e-8);

}  // namespace u1lab
