#pragma once
// Exact diagonalization of the Floquet propagator: eigenphase clustering,
// SU(2) multiplet bookkeeping and reconstruction of SU(2) generators from
// degenerate blocks.

#include <Eigen/Dense>
#include <vector>

#include "u1lab/gate.hpp"
#include "u1lab/pauli.hpp"

namespace u1lab {

inline constexpr double kClusterTolerance = 1e-8;

/// Number of spin-s multiplets among L spins 1/2, C(L+1, L/2-s)(1+2s)/(L+1).
/// Spin is passed doubled (twice_spin = 2s) so half-integer values are exact.
long long multiplet_count(int length, int twice_spin);

/// Sorted dimensions of all SU(2) multiplets of L spins 1/2.
std::vector<int> su2_multiset(int length);

struct Clustering {
  /// Cluster index of every phase (same order as the input).
  std::vector<int> cluster_of;
  /// Members of every cluster, ordered by representative phase.
  std::vector<std::vector<int>> clusters;
  /// Smallest gap separating two clusters; set `ambiguous` when below 10x tol.
  double min_separation = 0.0;
  bool ambiguous = false;
};

/// Gap-based clustering of angles on the unit circle (wrap-around aware).
Clustering cluster_phases(const std::vector<double>& phases, double tol = kClusterTolerance);

struct SpectrumReport {
  double tau = 0.0;
  std::vector<double> phases;  // in (-pi, pi]
  Clustering clustering;
  std::vector<int> degeneracy_multiset;
  std::vector<int> multiplet_prediction;
  bool su2_match = false;
  bool localized = false;           // exactly L distinct eigenphases
  bool extra_degeneracy = false;    // fewer clusters than SU(2) multiplets, no match
};

SpectrumReport analyze_spectrum(const DensePropagator& u, double tau, double tol = kClusterTolerance);

/// One report per tau; `base` supplies the remaining gate parameters.
std::vector<SpectrumReport> spectrum_vs_tau(const GateParams& base, const std::vector<double>& taus, int length,
                                            Boundary boundary, double tol = kClusterTolerance,
                                            unsigned workers = 1);

/// S^+ reconstructed from multiplets, S^+ = sum_t e^{i theta_t} amp_t |up_t><low_t|,
/// one transition t per adjacent pair of Z eigenstates inside a multiplet.
/// Rephasing eigenvectors only changes the transition phases theta_t.
struct Su2Generators {
  struct Transition {
    Eigen::VectorXcd low;
    Eigen::VectorXcd up;
    double amplitude = 0.0;
  };

  int length = 0;
  std::vector<int> multiplet_dims;
  std::vector<Transition> transitions;
  std::vector<double> gauge_phases;  // theta_t

  DenseOp s_plus() const;
  DenseOp s_minus() const { return s_plus().adjoint(); }
  DenseOp z() const;
  /// X^2 + Y^2 + Z^2 = 2(S+S- + S-S+) + Z^2; independent of the gauge.
  DenseOp casimir() const;
};

/// Throws SymmetryError when the degeneracy multiset is not the SU(2) one or
/// when Z is degenerate inside a block.
Su2Generators reconstruct_su2(const DensePropagator& u, double tol = kClusterTolerance);

struct GaugeResult {
  Su2Generators generators;
  /// Total 1-body weight of S^+ after every sweep of the winning start.
  std::vector<double> objective_history;
  int restarts = 0;
};

/// Total weight of 1-body Pauli strings in S^+.
double one_body_weight(const Su2Generators& g);

/// Cyclic coordinate ascent over the transition phases with exact per-phase
/// updates; the start from the given gauge plus `extra_starts` deterministic
/// quasi-random starts, best result kept.
GaugeResult optimize_gauge(const Su2Generators& g, int extra_starts = 2, double tol = 1e-10,
                           int max_sweeps = 5000);

}  // namespace u1lab
