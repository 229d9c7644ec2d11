#include "u1lab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "u1lab/error.hpp"
#include "u1lab/parallel.hpp"

namespace u1lab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double wrapped_phase(cplx z) {
  const double a = std::arg(z);
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

Eigen::VectorXd z_diagonal(int length) {
  const Eigen::Index dim = Eigen::Index{1} << length;
  Eigen::VectorXd z(dim);
  for (Eigen::Index i = 0; i < dim; ++i) z(i) = length - 2.0 * std::popcount(static_cast<std::uint64_t>(i));
  return z;
}

struct Eigensystem {
  Eigen::MatrixXcd vectors;
  std::vector<double> phases;
};

// The propagator is normal, so its Schur form is diagonal and the Schur
// vectors are an orthonormal eigenbasis, also inside near-degenerate blocks.
Eigensystem diagonalize(const DenseOp& u) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  if (schur.info() != Eigen::Success) throw Error("Schur decomposition did not converge");
  Eigensystem es;
  es.vectors = schur.matrixU();
  es.phases.resize(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) es.phases[static_cast<std::size_t>(i)] = wrapped_phase(schur.matrixT()(i, i));
  return es;
}

// <low| sigma_letter(site) |up> for every single-site string, scaled.
Eigen::MatrixXcd one_body_matrix(const Su2Generators& g) {
  const int length = g.length;
  const Eigen::Index dim = Eigen::Index{1} << length;
  const auto nt = static_cast<Eigen::Index>(g.transitions.size());
  Eigen::MatrixXcd a(3 * length, nt);
  Eigen::VectorXcd image(dim);
  for (Eigen::Index t = 0; t < nt; ++t) {
    const auto& tr = g.transitions[static_cast<std::size_t>(t)];
    const double scale = tr.amplitude / static_cast<double>(dim);
    for (int site = 1; site <= length; ++site) {
      const Eigen::Index mask = Eigen::Index{1} << (length - site);
      for (int letter = 1; letter <= 3; ++letter) {
        for (Eigen::Index i = 0; i < dim; ++i) {
          const bool bit = i & mask;
          switch (letter) {
            case 1: image(i ^ mask) = tr.up(i); break;
            case 2: image(i ^ mask) = (bit ? cplx(0, -1) : cplx(0, 1)) * tr.up(i); break;
            default: image(i) = bit ? -tr.up(i) : tr.up(i); break;
          }
        }
        a(3 * (site - 1) + letter - 1, t) = scale * tr.low.dot(image);
      }
    }
  }
  return a;
}

Eigen::VectorXcd phase_vector(const std::vector<double>& theta) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(theta.size()));
  for (std::size_t t = 0; t < theta.size(); ++t) v(static_cast<Eigen::Index>(t)) = std::polar(1.0, theta[t]);
  return v;
}

struct AscentRun {
  std::vector<double> theta;
  std::vector<double> history;
};

AscentRun coordinate_ascent(const Eigen::MatrixXcd& a, std::vector<double> theta, double tol, int max_sweeps) {
  Eigen::VectorXcd p = a * phase_vector(theta);
  AscentRun run;
  run.history.push_back(p.squaredNorm());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index t = 0; t < a.cols(); ++t) {
      const Eigen::VectorXcd rest = p - std::polar(1.0, theta[static_cast<std::size_t>(t)]) * a.col(t);
      const cplx g = rest.dot(a.col(t));  // sum_alpha conj(rest_alpha) a_alpha
      if (std::abs(g) == 0.0) continue;
      theta[static_cast<std::size_t>(t)] = -std::arg(g);
      p = rest + std::polar(1.0, theta[static_cast<std::size_t>(t)]) * a.col(t);
    }
    const double value = p.squaredNorm();
    const double gain = value - run.history.back();
    run.history.push_back(value);
    if (gain < tol) break;
  }
  run.theta = std::move(theta);
  return run;
}

}  // namespace

long long multiplet_count(int length, int twice_spin) {
  if (length < 1 || twice_spin < 0 || twice_spin > length || (length - twice_spin) % 2 != 0) {
    throw DomainError("spin must satisfy 0 <= s <= L/2 and s = L/2 mod 1");
  }
  const int k = (length - twice_spin) / 2;
  return binomial(length + 1, k) * (1 + twice_spin) / (length + 1);
}

std::vector<int> su2_multiset(int length) {
  std::vector<int> out;
  for (int ts = length % 2; ts <= length; ts += 2) {
    const long long n = multiplet_count(length, ts);
    for (long long i = 0; i < n; ++i) out.push_back(ts + 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Clustering cluster_phases(const std::vector<double>& phases, double tol) {
  Clustering c;
  const std::size_t n = phases.size();
  c.cluster_of.assign(n, -1);
  if (n == 0) return c;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return phases[a] < phases[b]; });

  c.min_separation = kTwoPi;
  std::vector<std::vector<int>> groups{{order[0]}};
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = phases[order[i]] - phases[order[i - 1]];
    if (gap > tol) {
      c.min_separation = std::min(c.min_separation, gap);
      groups.emplace_back();
    }
    groups.back().push_back(order[i]);
  }
  const double wrap_gap = phases[order[0]] + kTwoPi - phases[order[n - 1]];
  if (groups.size() > 1) {
    if (wrap_gap <= tol) {
      groups.front().insert(groups.front().begin(), groups.back().begin(), groups.back().end());
      groups.pop_back();
    } else {
      c.min_separation = std::min(c.min_separation, wrap_gap);
    }
  }
  c.ambiguous = groups.size() > 1 && c.min_separation < 10.0 * tol;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int idx : groups[g]) c.cluster_of[static_cast<std::size_t>(idx)] = static_cast<int>(g);
  c.clusters = std::move(groups);
  return c;
}

SpectrumReport analyze_spectrum(const DensePropagator& u, double tau, double tol) {
  SpectrumReport r;
  r.tau = tau;
  r.phases = diagonalize(u.matrix).phases;
  r.clustering = cluster_phases(r.phases, tol);
  for (const auto& c : r.clustering.clusters) r.degeneracy_multiset.push_back(static_cast<int>(c.size()));
  std::sort(r.degeneracy_multiset.begin(), r.degeneracy_multiset.end());
  r.multiplet_prediction = su2_multiset(u.length);
  r.su2_match = r.degeneracy_multiset == r.multiplet_prediction;
  r.localized = static_cast<int>(r.clustering.clusters.size()) == u.length;
  r.extra_degeneracy =
      !r.su2_match && !r.localized && r.clustering.clusters.size() < r.multiplet_prediction.size();
  return r;
}

std::vector<SpectrumReport> spectrum_vs_tau(const GateParams& base, const std::vector<double>& taus, int length,
                                            Boundary boundary, double tol, unsigned workers) {
  if (length > 12) throw ResourceError("spectrum scans are limited to L <= 12");
  std::vector<SpectrumReport> out(taus.size());
  parallel_for(taus.size(), workers, [&](std::size_t i) {
    const auto u = build_propagator(base.with_tau(taus[i]), length, boundary);
    out[i] = analyze_spectrum(u, taus[i], tol);
  });
  return out;
}

DenseOp Su2Generators::s_plus() const {
  const Eigen::Index dim = Eigen::Index{1} << length;
  const auto nt = static_cast<Eigen::Index>(transitions.size());
  Eigen::MatrixXcd up(dim, nt), low(dim, nt);
  for (Eigen::Index t = 0; t < nt; ++t) {
    const auto& tr = transitions[static_cast<std::size_t>(t)];
    up.col(t) = std::polar(tr.amplitude, gauge_phases[static_cast<std::size_t>(t)]) * tr.up;
    low.col(t) = tr.low;
  }
  return up * low.adjoint();
}

DenseOp Su2Generators::z() const { return z_diagonal(length).cast<cplx>().asDiagonal(); }

DenseOp Su2Generators::casimir() const {
  const DenseOp sp = s_plus();
  const DenseOp sm = sp.adjoint();
  const Eigen::VectorXd zd = z_diagonal(length);
  DenseOp c = 2.0 * (sp * sm + sm * sp);
  c.diagonal() += zd.cwiseProduct(zd).cast<cplx>();
  return c;
}

Su2Generators reconstruct_su2(const DensePropagator& u, double tol) {
  const Eigensystem es = diagonalize(u.matrix);
  const Clustering c = cluster_phases(es.phases, tol);
  std::vector<int> dims;
  for (const auto& cl : c.clusters) dims.push_back(static_cast<int>(cl.size()));
  std::vector<int> sorted = dims;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != su2_multiset(u.length)) throw SymmetryError("spectrum is not SU(2)-compatible");

  const Eigen::VectorXd zd = z_diagonal(u.length);
  Su2Generators g;
  g.length = u.length;
  for (std::size_t k = 0; k < c.clusters.size(); ++k) {
    const auto& members = c.clusters[k];
    const auto n = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXcd q(u.matrix.rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) q.col(j) = es.vectors.col(members[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXcd zc = q.adjoint() * zd.cast<cplx>().asDiagonal() * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> zs(zc);
    const Eigen::VectorXd& m2 = zs.eigenvalues();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double expected = static_cast<double>(2 * j - (n - 1));
      if (std::abs(m2(j) - expected) > 1e-6) {
        std::ostringstream msg;
        msg << "gauge ambiguity: block " << k << " of size " << n << " has Z eigenvalues";
        for (Eigen::Index i = 0; i < n; ++i) msg << ' ' << m2(i);
        msg << " (expected a single spin-" << (n - 1) << "/2 ladder)";
        throw SymmetryError(msg.str());
      }
    }
    const Eigen::MatrixXcd states = q * zs.eigenvectors();
    const double s = 0.5 * static_cast<double>(n - 1);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
      const double m = -s + static_cast<double>(j);
      g.transitions.push_back({states.col(j), states.col(j + 1), std::sqrt(s * (s + 1) - m * (m + 1))});
    }
    g.multiplet_dims.push_back(static_cast<int>(n));
  }
  g.gauge_phases.assign(g.transitions.size(), 0.0);
  return g;
}

double one_body_weight(const Su2Generators& g) {
  return (one_body_matrix(g) * phase_vector(g.gauge_phases)).squaredNorm();
}

GaugeResult optimize_gauge(const Su2Generators& g, int extra_starts, double tol, int max_sweeps) {
  const Eigen::MatrixXcd a = one_body_matrix(g);
  // Weyl-sequence starting points keep the optimization reproducible
  // without a random number generator.
  constexpr double kGolden = 0.6180339887498949;
  constexpr double kSqrt2 = 1.4142135623730951;
  AscentRun best = coordinate_ascent(a, g.gauge_phases, tol, max_sweeps);
  for (int k = 1; k <= extra_starts; ++k) {
    std::vector<double> start(g.gauge_phases.size());
    for (std::size_t t = 0; t < start.size(); ++t) {
      const double u = static_cast<double>(t + 1) * kGolden + static_cast<double>(k) * kSqrt2;
      start[t] = kTwoPi * (u - std::floor(u));
    }
    AscentRun run = coordinate_ascent(a, std::move(start), tol, max_sweeps);
    if (run.history.back() > best.history.back() + tol) best = std::move(run);
  }
  GaugeResult r{g, std::move(best.history), extra_starts};
  r.generators.gauge_phases = std::move(best.theta);
  return r;
}

}  // namespace u1lab
