#include "u1lab/rp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "u1lab/error.hpp"
#include "u1lab/kernels.hpp"
#include "u1lab/parallel.hpp"
#include "u1lab/symmetry.hpp"

namespace u1lab {
namespace {

int pow4(int e) { return 1 << (2 * e); }

// Absolute site -> (cell, sublattice); site 1 is sublattice A of cell 0.
int cell_of(int site) { return (site % 2 != 0) ? (site - 1) / 2 : (site - 2) / 2; }
int sublattice_of(int site) { return (site % 2 != 0) ? 0 : 1; }

}  // namespace

OperatorBasis::OperatorBasis(int range) : range_(range) {
  if (range < 1) throw DomainError("operator range must be >= 1");
  if (range > kMaxRpRange) throw ResourceError("operator range limited to r <= 5");
  tail_ = pow4(range - 1);
  size_ = 6 * tail_;
}

std::vector<int> OperatorBasis::letters(int index) const {
  std::vector<int> out(static_cast<std::size_t>(range_));
  const int within = index % (3 * tail_);
  out[0] = within / tail_ + 1;
  int rest = within % tail_;
  for (int i = range_ - 1; i >= 1; --i) {
    out[static_cast<std::size_t>(i)] = rest & 3;
    rest >>= 2;
  }
  return out;
}

int OperatorBasis::index_of(int sublattice, const std::vector<int>& letters) const {
  if (letters.empty() || letters[0] == 0) throw DomainError("basis strings start with a non-identity letter");
  int rest = 0;
  for (int i = 1; i < range_; ++i) rest = rest * 4 + (i < static_cast<int>(letters.size()) ? letters[static_cast<std::size_t>(i)] : 0);
  return sublattice * 3 * tail_ + (letters[0] - 1) * tail_ + rest;
}

PauliString OperatorBasis::cell_string(int index) const {
  PauliString s(range_ + 1);
  const int offset = sublattice(index);
  const auto ls = letters(index);
  for (int i = 0; i < range_; ++i) s.set(offset + i + 1, static_cast<Letter>(ls[static_cast<std::size_t>(i)]));
  return s;
}

MomentumPropagator::MomentumPropagator(const GateParams& p, int range, unsigned workers) : basis_(range) {
  const int r = range;
  const int width = r + 4;
  const auto size = std::size_t{1} << (2 * width);
  const kernels::Transfer16 heis = to_kernel(Transfer(pauli_transfer(gate_matrix(p)).transpose()));
  const int n = basis_.size();

  for (int d = -1; d <= (r + 4) / 2; ++d) shifts_[d] = Eigen::MatrixXd::Zero(n, n);

  parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t col) {
    const int b = static_cast<int>(col);
    const int anchor = basis_.sublattice(b) + 1;  // absolute site of the first letter
    const int first = anchor - 2;                 // window start
    // window position w <-> base-4 digit (width - 1 - w)
    auto digit = [&](int w) { return static_cast<unsigned>(width - 1 - w); };

    std::vector<double> c(size, 0.0);
    std::size_t idx = 0;
    const auto ls = basis_.letters(b);
    for (int i = 0; i < r; ++i) idx |= static_cast<std::size_t>(ls[static_cast<std::size_t>(i)]) << (2 * digit(2 + i));
    c[idx] = 1.0;

    // U^dag O U = U_even^dag (U_odd^dag O U_odd) U_even: odd bonds first.
    for (int parity : {1, 0}) {
      for (int w = 0; w + 1 < width; ++w) {
        const int site = first + w;
        if (((site % 2) + 2) % 2 != parity) continue;
        kernels::apply_pair_transfer(c, digit(w), digit(w + 1), heis);
      }
    }

    std::vector<int> window(static_cast<std::size_t>(width));
    std::vector<int> out(static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < size; ++i) {
      const double v = c[i];
      if (std::abs(v) < 1e-15) continue;
      int lo = -1, hi = -1;
      for (int w = 0; w < width; ++w) {
        window[static_cast<std::size_t>(w)] = static_cast<int>((i >> (2 * digit(w))) & 3);
        if (window[static_cast<std::size_t>(w)] != 0) {
          if (lo < 0) lo = w;
          hi = w;
        }
      }
      if (lo < 0 || hi - lo + 1 > r) continue;  // identity, or beyond the truncation
      for (int j = 0; j < r; ++j) out[static_cast<std::size_t>(j)] = lo + j < width ? window[static_cast<std::size_t>(lo + j)] : 0;
      const int site = first + lo;
      const int a = basis_.index_of(sublattice_of(site), out);
      shifts_.at(cell_of(site))(a, b) = v;
    }
  });

  for (auto it = shifts_.begin(); it != shifts_.end();) {
    it = it->second.cwiseAbs().maxCoeff() == 0.0 ? shifts_.erase(it) : std::next(it);
  }
}

Eigen::MatrixXcd MomentumPropagator::matrix(double k) const {
  const int n = basis_.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [d, block] : shifts_) m += std::polar(1.0, -k * d) * block.cast<cplx>();
  return m;
}

Eigen::MatrixXcd build_m(const GateParams& p, int range, double k) { return MomentumPropagator(p, range).matrix(k); }

Eigen::VectorXcd embed_density(const Eigen::VectorXcd& v, const OperatorBasis& from, const OperatorBasis& to) {
  if (from.range() > to.range()) throw DomainError("cannot embed into a smaller range");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(to.size());
  for (int i = 0; i < from.size(); ++i) {
    if (v(i) == cplx(0.0)) continue;
    out(to.index_of(from.sublattice(i), from.letters(i))) += v(i);
  }
  return out;
}

PauliPoly density_poly(const Eigen::VectorXcd& v, const OperatorBasis& basis) {
  PauliPoly out(basis.range() + 1);
  for (int i = 0; i < basis.size(); ++i) out.add(basis.cell_string(i), v(i));
  return out;
}

namespace {

Eigen::VectorXcd ladder_density(cplx a_coeff, cplx b_coeff, int sign, const OperatorBasis& basis) {
  // sigma^{+-} = (X +- iY)/2
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(basis.size());
  std::vector<int> ls(static_cast<std::size_t>(basis.range()), 0);
  for (int sub = 0; sub < 2; ++sub) {
    const cplx c = sub == 0 ? a_coeff : b_coeff;
    ls[0] = 1;
    q(basis.index_of(sub, ls)) += 0.5 * c;
    ls[0] = 2;
    q(basis.index_of(sub, ls)) += cplx(0.0, 0.5 * sign) * c;
  }
  return q;
}

}  // namespace

Eigen::VectorXcd screw_plus_density(double theta, cplx e_i_alpha, const OperatorBasis& basis) {
  return ladder_density(1.0, std::polar(1.0, -2.0 * theta) * e_i_alpha, 1, basis);
}

Eigen::VectorXcd screw_minus_density(double theta, cplx e_i_alpha, const OperatorBasis& basis) {
  return ladder_density(1.0, std::conj(std::polar(1.0, -2.0 * theta) * e_i_alpha), -1, basis);
}

Eigen::VectorXcd magnetization_density(const OperatorBasis& basis) {
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(basis.size());
  std::vector<int> ls(static_cast<std::size_t>(basis.range()), 0);
  ls[0] = 3;
  q(basis.index_of(0, ls)) = 1.0;
  q(basis.index_of(1, ls)) = 1.0;
  return q;
}

RpPoint rp_spectrum(const Eigen::MatrixXcd& m, double k, double unit_tol, bool keep_vectors) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, keep_vectors);
  if (es.info() != Eigen::Success) throw Error("eigensolver did not converge");
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(ev(a)), mb = std::abs(ev(b));
    if (ma != mb) return ma > mb;
    return std::arg(ev(a)) < std::arg(ev(b));
  });
  RpPoint pt;
  pt.k = k;
  for (int i : order) {
    const cplx l = ev(i);
    pt.eigenvalues.push_back(l);
    if (std::abs(std::abs(l) - 1.0) < unit_tol) {
      ++pt.unit_count;
      if (keep_vectors) pt.unit_vectors.push_back(es.eigenvectors().col(i));
    }
    if (std::abs(l - 1.0) < unit_tol) ++pt.one_count;
  }
  return pt;
}

std::optional<double> unit_overlap(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& q, double unit_tol) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, true);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (std::abs(es.eigenvalues()(i) - 1.0) < unit_tol) cols.push_back(i);
  if (cols.empty()) return std::nullopt;
  Eigen::MatrixXcd v(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(cols[j]);
  // Projection onto the span of the unit eigenvectors.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(v);
  const Eigen::MatrixXcd basis = qr.householderQ() * Eigen::MatrixXcd::Identity(v.rows(), v.cols());
  return (basis.adjoint() * q).norm() / q.norm();
}

RpResult rp_scan(const GateParams& p, int range, const std::vector<double>& k_grid, unsigned workers,
                 double unit_tol) {
  const MomentumPropagator prop(p, range, workers);
  RpResult res;
  res.params = p;
  res.range = range;
  res.unit_tol = unit_tol;
  res.points.resize(k_grid.size());
  parallel_for(k_grid.size(), workers, [&](std::size_t i) {
    res.points[i] = rp_spectrum(prop.matrix(k_grid[i]), k_grid[i], unit_tol, true);
  });

  if (classify(p).phase == Phase::critical) {
    const double theta = p.theta();
    const cplx e = screw_phase(p);
    const cplx unit = e / std::abs(e);
    const double k_plus = std::remainder(-4.0 * theta, 2.0 * std::numbers::pi);
    res.overlap_plus = unit_overlap(prop.matrix(k_plus), screw_plus_density(theta, unit, prop.basis()), unit_tol);
    res.overlap_minus = unit_overlap(prop.matrix(-k_plus), screw_minus_density(theta, unit, prop.basis()), unit_tol);
  }
  return res;
}

}  // namespace u1lab
