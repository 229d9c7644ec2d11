#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support/oracles.hpp"
#include "u1lab/error.hpp"
#include "u1lab/rp.hpp"
#include "u1lab/symmetry.hpp"

using namespace u1lab;

namespace {

const double kPi = std::numbers::pi;

GateParams unit_params(double tau) { return GateParams{1.0, 1.0, 1.0, 0.0, tau}; }

double tau_crit() { return critical_taus(unit_params(0.0), 0.01, 1.0).front(); }

// Basis element `index` placed at cell `cell` of an 8-site chain whose site 1
// is absolute site -1.
DenseOp chain_op(const OperatorBasis& basis, int index, int cell) {
  std::vector<Eigen::Matrix2cd> f(8, Eigen::Matrix2cd::Identity());
  const int anchor = 2 * cell + 1 + basis.sublattice(index) + 2;
  const auto ls = basis.letters(index);
  for (int i = 0; i < basis.range(); ++i) {
    const int site = anchor + i;
    if (site < 1 || site > 8) return DenseOp();
    f[static_cast<std::size_t>(site - 1)] = oracle::pauli(ls[static_cast<std::size_t>(i)]);
  }
  return oracle::product(f);
}

}  // namespace

TEST_CASE("operator basis indexing") {
  for (int r = 1; r <= 4; ++r) {
    OperatorBasis b(r);
    CHECK(b.size() == 6 * (1 << (2 * (r - 1))));
    for (int i = 0; i < b.size(); ++i) {
      CHECK(b.letters(i)[0] != 0);
      CHECK(b.index_of(b.sublattice(i), b.letters(i)) == i);
    }
  }
  CHECK_THROWS_AS(OperatorBasis(0), DomainError);
  CHECK_THROWS_AS(OperatorBasis(kMaxRpRange + 1), ResourceError);
}

TEST_CASE("cell blocks match dense Heisenberg evolution") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    GateParams p{rng.uniform(0.2, 1.5), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5),
                 rng.uniform(0.1, 1.2)};
    const int r = 2;
    MomentumPropagator prop(p, r);
    const auto& basis = prop.basis();
    const DenseOp u = oracle::brickwall(p, 8);
    double worst = 0.0;
    for (int b = 0; b < basis.size(); ++b) {
      const DenseOp ob = chain_op(basis, b, 0);
      const DenseOp evolved = u.adjoint() * ob * u;
      for (int d = -1; d <= 2; ++d) {
        for (int a = 0; a < basis.size(); ++a) {
          const DenseOp oa = chain_op(basis, a, d);
          if (oa.size() == 0) continue;
          const double expect = (oa.adjoint() * evolved).trace().real() / 256.0;
          const auto it = prop.shifts().find(d);
          const double got = it == prop.shifts().end() ? 0.0 : it->second(a, b);
          worst = std::max(worst, std::abs(expect - got));
        }
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("M(k) structure") {
  oracle::Rng rng(11);
  GateParams p{0.7, 0.3, -0.4, 0.2, 0.9};
  MomentumPropagator prop(p, 2);
  for (int i = 0; i < 20; ++i) {
    const double k = rng.uniform(-kPi, kPi);
    CHECK((prop.matrix(-k) - prop.matrix(k).conjugate()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((prop.matrix(k + 2 * kPi) - prop.matrix(k)).cwiseAbs().maxCoeff() < 1e-12);
  }
  MomentumPropagator idle(p.with_tau(0.0), 3);
  const Eigen::MatrixXcd m = idle.matrix(0.37);
  CHECK((m - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("magnetization density is a unit eigenvector at k = 0") {
  oracle::Rng rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    GateParams p{rng.uniform(0.2, 1.5), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5),
                 rng.uniform(0.1, 1.2)};
    for (int r : {1, 3}) {
      MomentumPropagator prop(p, r);
      const Eigen::VectorXcd q = magnetization_density(prop.basis());
      CHECK((prop.matrix(0.0) * q - q).norm() < 1e-12);
    }
  }
}

TEST_CASE("screw densities are unit eigenvectors on the critical manifold") {
  const GateParams p = unit_params(tau_crit());
  const double theta = p.theta();
  const cplx e = screw_phase(p);
  for (int r : {1, 3}) {
    MomentumPropagator prop(p, r);
    const double k = std::remainder(-4.0 * theta, 2 * kPi);
    const Eigen::VectorXcd qp = screw_plus_density(theta, e, prop.basis());
    const Eigen::VectorXcd qm = screw_minus_density(theta, e, prop.basis());
    CHECK((prop.matrix(k) * qp - qp).norm() < 1e-9);
    CHECK((prop.matrix(-k) * qm - qm).norm() < 1e-9);
    // Still an eigenvector after embedding at a larger range.
    if (r == 1) {
      MomentumPropagator wide(p, 3);
      const Eigen::VectorXcd big = embed_density(qp, prop.basis(), wide.basis());
      CHECK((wide.matrix(k) * big - big).norm() < 1e-9);
    }
  }
}

TEST_CASE("spectrum at the critical point") {
  const GateParams p = unit_params(tau_crit());
  const double k_screw = std::abs(std::remainder(4.0 * p.theta(), 2 * kPi));
  std::vector<double> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(-kPi + 2 * kPi * i / 64);
  grid.push_back(k_screw);
  grid.push_back(-k_screw);

  const RpResult r1 = rp_scan(p, 1, grid, 2);
  for (const auto& pt : r1.points) {
    const bool peak = std::abs(std::abs(pt.k) - k_screw) < 1e-12;
    const bool zero = std::abs(pt.k) < 1e-12;
    CHECK(pt.unit_count == (peak || zero ? 1 : 0));
    if (zero) CHECK(pt.one_count == 1);
    for (const auto& l : pt.eigenvalues) CHECK(std::abs(l) < 1.0 + 1e-9);
  }
  REQUIRE(r1.overlap_plus.has_value());
  REQUIRE(r1.overlap_minus.has_value());
  CHECK(*r1.overlap_plus > 0.999);
  CHECK(*r1.overlap_minus > 0.999);

  const RpResult r3 = rp_scan(p, 3, {0.0, k_screw}, 2);
  CHECK(r3.points[0].one_count == 3);
  CHECK(r3.points[1].unit_count >= 1);
  CHECK(*r3.overlap_plus > 0.999);
}

TEST_CASE("no screw peak away from criticality") {
  const GateParams p = unit_params(0.4 * kPi / 4);
  const double k_screw = std::abs(std::remainder(4.0 * p.theta(), 2 * kPi));
  const RpResult res = rp_scan(p, 3, {k_screw, -k_screw, 0.0});
  CHECK(res.points[0].unit_count == 0);
  CHECK(res.points[1].unit_count == 0);
  CHECK(res.points[2].one_count >= 1);
  CHECK_FALSE(res.overlap_plus.has_value());
}
