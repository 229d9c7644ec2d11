#include "u1lab/transport.hpp"

#include <lapacke.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>

#include "u1lab/error.hpp"
#include "u1lab/parallel.hpp"

namespace u1lab {

CurrentOperator current_operator(const GateParams& p) {
  const double j = p.j_eff();
  const double s2 = std::sin(2.0 * p.tau * j);
  const double s4 = std::sin(4.0 * p.tau * j);
  const double sq = s2 * s2 / (j * j);
  return {s4 / (2.0 * j) + p.b * p.d * sq, (1.0 + p.d * p.d) * sq, p.b * sq - p.d * s4 / (2.0 * j)};
}

PauliPoly current_poly(const CurrentOperator& j, int length, int bond) {
  if (bond < 1 || bond >= length) throw DomainError("bond outside the chain");
  auto pair = [&](Letter a, Letter b) {
    PauliString s(length);
    if (a != Letter::I) s.set(bond, a);
    if (b != Letter::I) s.set(bond + 1, b);
    return s;
  };
  PauliPoly out(length);
  out.add(pair(Letter::X, Letter::Y), j.a);
  out.add(pair(Letter::Y, Letter::X), -j.a);
  out.add(pair(Letter::Z, Letter::I), j.f);
  out.add(pair(Letter::I, Letter::Z), -j.f);
  out.add(pair(Letter::X, Letter::X), j.c);
  out.add(pair(Letter::Y, Letter::Y), j.c);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using StridedMap = Eigen::Map<const MatrixXd, 0, Eigen::OuterStride<>>;

struct Svd {
  MatrixXd u;
  VectorXd s;
  MatrixXd vt;
  double residual = 0.0;  // squared weight outside the returned factors
};

Svd svd(const MatrixXd& input) {
  MatrixXd a = input;
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const auto k = std::min(m, n);
  Svd out{MatrixXd(m, k), VectorXd(k), MatrixXd(k, n)};
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, a.data(), m, out.s.data(), out.u.data(), m,
                                         out.vt.data(), k);
  if (info == 0) return out;
  // Divide and conquer occasionally fails to converge; fall back to Eigen.
  Eigen::BDCSVD<MatrixXd> bdc(input, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {bdc.matrixU(), bdc.singularValues(), bdc.matrixV().transpose()};
}

struct ThinQr {
  MatrixXd q;
  MatrixXd r;
};

ThinQr thin_qr(const MatrixXd& a) {
  const Eigen::Index k = std::min(a.rows(), a.cols());
  Eigen::HouseholderQR<MatrixXd> qr(a);
  ThinQr out;
  out.q = qr.householderQ() * MatrixXd::Identity(a.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

// Fixed pseudo-noise in [-1, 1) from an integer hash, so the sketch is
// identical on every run.
double sketch_entry(std::uint64_t i, std::uint64_t j) {
  std::uint64_t z = (i << 32 | j) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-52 - 1.0;
}

constexpr int kSketchOversample = 16;
constexpr int kSketchPowerSteps = 2;

// Leading `rank` singular triplets from a range finder with power steps.
Svd sketch_svd(const MatrixXd& a, int rank) {
  MatrixXd omega(a.cols(), rank);
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    for (Eigen::Index j = 0; j < rank; ++j)
      omega(i, j) = sketch_entry(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
  MatrixXd q = thin_qr(a * omega).q;
  for (int step = 0; step < kSketchPowerSteps; ++step) {
    const MatrixXd w = thin_qr(a.transpose() * q).q;
    q = thin_qr(a * w).q;
  }
  const MatrixXd b = q.transpose() * a;
  Svd small = svd(b);
  Svd out{q * small.u, small.s, small.vt};
  out.residual = (a - q * b).squaredNorm();
  return out;
}

}  // namespace

MpoState MpoState::product(const std::vector<SiteVector>& sites, int chi_max, double cutoff) {
  if (sites.size() < 2) throw DomainError("MPO needs at least two sites");
  if (chi_max < 1) throw ConfigError("bond cap must be positive");
  MpoState st;
  st.chi_max_ = chi_max;
  st.cutoff_ = cutoff;
  double scale = 1.0;
  for (const auto& v : sites) {
    Site s;
    s.data = VectorXd(4);
    s.data << 1.0, v[1], v[2], v[3];
    const double n = s.data.norm();
    s.data /= n;
    scale *= n;
    st.sites_.push_back(std::move(s));
  }
  st.sites_[0].data *= scale;
  st.center_ = 0;
  return st;
}

int MpoState::max_bond() const {
  int m = 1;
  for (const auto& s : sites_) m = std::max(m, s.dr);
  return m;
}

std::vector<int> MpoState::bond_dims() const {
  std::vector<int> out;
  for (std::size_t i = 0; i + 1 < sites_.size(); ++i) out.push_back(sites_[i].dr);
  return out;
}

void MpoState::move_center(int target) {
  while (center_ < target) {
    Site& a = sites_[static_cast<std::size_t>(center_)];
    Site& b = sites_[static_cast<std::size_t>(center_ + 1)];
    const ThinQr qr = thin_qr(Eigen::Map<const MatrixXd>(a.data.data(), 4 * a.dl, a.dr));
    const auto k = static_cast<int>(qr.q.cols());
    const MatrixXd next = qr.r * Eigen::Map<const MatrixXd>(b.data.data(), b.dl, 4 * b.dr);
    a.data = Eigen::Map<const VectorXd>(qr.q.data(), qr.q.size());
    a.dr = k;
    b.data = Eigen::Map<const VectorXd>(next.data(), next.size());
    b.dl = k;
    ++center_;
  }
  while (center_ > target) {
    Site& b = sites_[static_cast<std::size_t>(center_)];
    Site& a = sites_[static_cast<std::size_t>(center_ - 1)];
    const ThinQr qr = thin_qr(Eigen::Map<const MatrixXd>(b.data.data(), b.dl, 4 * b.dr).transpose());
    const auto k = static_cast<int>(qr.q.cols());
    const MatrixXd right = qr.q.transpose();
    const MatrixXd prev = Eigen::Map<const MatrixXd>(a.data.data(), 4 * a.dl, a.dr) * qr.r.transpose();
    b.data = Eigen::Map<const VectorXd>(right.data(), right.size());
    b.dl = k;
    a.data = Eigen::Map<const VectorXd>(prev.data(), prev.size());
    a.dr = k;
    --center_;
  }
}

double MpoState::split(int left, const MatrixXd& theta, bool center_left) {
  Site& a = sites_[static_cast<std::size_t>(left)];
  Site& b = sites_[static_cast<std::size_t>(left + 1)];
  // A full decomposition is wasted when the cap keeps a small fraction.
  const int sketch = chi_max_ + kSketchOversample;
  Svd f = 2 * sketch < std::min(theta.rows(), theta.cols()) ? sketch_svd(theta, sketch) : svd(theta);

  const auto n = static_cast<int>(f.s.size());
  if (f.s(0) == 0.0) throw Error("density operator vanished");
  // Weights are measured relative to everything beyond the leading singular
  // value, which carries the identity and would otherwise swamp the signal.
  // The floor keeps rounding noise on product-like bonds from counting as signal.
  const double total = std::max(f.s.tail(n - 1).squaredNorm() + f.residual, 1e-20 * f.s(0) * f.s(0));
  // Smallest k whose discarded tail is below the cutoff, then the cap.
  int k = n;
  double tail = f.residual;
  while (k > 1) {
    const double next = tail + f.s(k - 1) * f.s(k - 1);
    if (next / total >= cutoff_) break;
    tail = next;
    --k;
  }
  k = std::min(k, chi_max_);
  const double discarded = (f.s.tail(n - k).squaredNorm() + f.residual) / total;

  // Largest-magnitude entry of each left vector made positive.
  for (int j = 0; j < k; ++j) {
    Eigen::Index imax = 0;
    f.u.col(j).cwiseAbs().maxCoeff(&imax);
    if (f.u(imax, j) < 0.0) {
      f.u.col(j) *= -1.0;
      f.vt.row(j) *= -1.0;
    }
  }

  MatrixXd lu = f.u.leftCols(k);
  MatrixXd rv = f.vt.topRows(k);
  if (center_left) {
    lu *= f.s.head(k).asDiagonal();
  } else {
    rv = f.s.head(k).asDiagonal() * rv;
  }
  a.data = Eigen::Map<const VectorXd>(lu.data(), lu.size());
  a.dr = k;
  b.data = Eigen::Map<const VectorXd>(rv.data(), rv.size());
  b.dl = k;
  center_ = center_left ? left : left + 1;
  return discarded;
}

namespace {

// theta'(a, s', t', b) = sum R[4s'+t'][4s+t] theta(a, s, t, b); rows a + dl s, columns t + 4 b.
void apply_transfer(MatrixXd& theta, int dl, int dr, const kernels::Transfer16& r) {
  Eigen::Matrix<double, 16, 16, Eigen::RowMajor> rm;
  for (int i = 0; i < 256; ++i) rm(i / 16, i % 16) = r[static_cast<std::size_t>(i)];
  Eigen::Matrix<double, 16, Eigen::Dynamic> block(16, dl);
  for (int b = 0; b < dr; ++b) {
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t) block.row(4 * s + t) = theta.block(s * dl, t + 4 * b, dl, 1).transpose();
    const Eigen::Matrix<double, 16, Eigen::Dynamic> out = rm * block;
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t) theta.block(s * dl, t + 4 * b, dl, 1) = out.row(4 * s + t).transpose();
  }
}

}  // namespace

double MpoState::update(int i, const kernels::Transfer16& r, bool center_left) {
  if (center_ < i) move_center(i);
  if (center_ > i + 1) move_center(i + 1);
  const Site& a = sites_[static_cast<std::size_t>(i)];
  const Site& b = sites_[static_cast<std::size_t>(i + 1)];
  MatrixXd theta = Eigen::Map<const MatrixXd>(a.data.data(), 4 * a.dl, a.dr) *
                   Eigen::Map<const MatrixXd>(b.data.data(), b.dl, 4 * b.dr);
  apply_transfer(theta, a.dl, b.dr, r);
  return split(i, theta, center_left);
}

double MpoState::apply_gate(int site, const kernels::Transfer16& r) {
  if (site < 1 || site >= length()) throw DomainError("gate outside the chain");
  return update(site - 1, r, false);
}

double MpoState::step(const kernels::Transfer16& r) {
  const int n = length();
  double discarded = 0.0;
  // Even bonds (2,3), (4,5), ... act first, swept left to right.
  for (int l = 2; l + 1 <= n; l += 2) discarded += update(l - 1, r, false);
  // Odd bonds (1,2), (3,4), ..., swept right to left.
  for (int l = (n % 2 == 0 ? n - 1 : n - 2); l >= 1; l -= 2) discarded += update(l - 1, r, true);
  return discarded;
}

namespace {

StridedMap letter_block(const VectorXd& data, int dl, int dr, int letter) {
  return StridedMap(data.data() + dl * letter, dl, dr, Eigen::OuterStride<>(4 * dl));
}

}  // namespace

double MpoState::trace() const {
  VectorXd env = VectorXd::Ones(1);
  for (const auto& s : sites_) env = letter_block(s.data, s.dl, s.dr, 0).transpose() * env;
  return env(0);
}

std::vector<double> MpoState::site_coefficients(int letter) const {
  const auto n = sites_.size();
  std::vector<VectorXd> right(n + 1);
  right[n] = VectorXd::Ones(1);
  for (std::size_t i = n; i-- > 0;) {
    const auto& s = sites_[i];
    right[i] = letter_block(s.data, s.dl, s.dr, 0) * right[i + 1];
  }
  std::vector<double> out(n);
  VectorXd left = VectorXd::Ones(1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = sites_[i];
    out[i] = left.dot(letter_block(s.data, s.dl, s.dr, letter) * right[i + 1]);
    left = letter_block(s.data, s.dl, s.dr, 0).transpose() * left;
  }
  return out;
}

double MpoState::pair_coefficient(int site, int letter_a, int letter_b) const {
  const int i = site - 1;
  if (i < 0 || i + 1 >= length()) throw DomainError("pair outside the chain");
  VectorXd left = VectorXd::Ones(1);
  for (int j = 0; j < i; ++j) {
    const auto& s = sites_[static_cast<std::size_t>(j)];
    left = letter_block(s.data, s.dl, s.dr, 0).transpose() * left;
  }
  VectorXd right = VectorXd::Ones(1);
  for (int j = length() - 1; j > i + 1; --j) {
    const auto& s = sites_[static_cast<std::size_t>(j)];
    right = letter_block(s.data, s.dl, s.dr, 0) * right;
  }
  const auto& a = sites_[static_cast<std::size_t>(i)];
  const auto& b = sites_[static_cast<std::size_t>(i + 1)];
  return left.dot(letter_block(a.data, a.dl, a.dr, letter_a) * (letter_block(b.data, b.dl, b.dr, letter_b) * right));
}

double MpoState::current(const CurrentOperator& j, int bond) const {
  const int i = bond - 1;
  if (i < 0 || i + 1 >= length()) throw DomainError("bond outside the chain");
  VectorXd left = VectorXd::Ones(1);
  for (int k = 0; k < i; ++k) {
    const auto& s = sites_[static_cast<std::size_t>(k)];
    left = letter_block(s.data, s.dl, s.dr, 0).transpose() * left;
  }
  VectorXd right = VectorXd::Ones(1);
  for (int k = length() - 1; k > i + 1; --k) {
    const auto& s = sites_[static_cast<std::size_t>(k)];
    right = letter_block(s.data, s.dl, s.dr, 0) * right;
  }
  const auto& a = sites_[static_cast<std::size_t>(i)];
  const auto& b = sites_[static_cast<std::size_t>(i + 1)];
  std::array<VectorXd, 4> l;
  std::array<VectorXd, 4> r;
  for (int x = 0; x < 4; ++x) {
    l[static_cast<std::size_t>(x)] = letter_block(a.data, a.dl, a.dr, x).transpose() * left;
    r[static_cast<std::size_t>(x)] = letter_block(b.data, b.dl, b.dr, x) * right;
  }
  auto c = [&](int x, int y) { return l[static_cast<std::size_t>(x)].dot(r[static_cast<std::size_t>(y)]); };
  return j.a * (c(1, 2) - c(2, 1)) + j.f * (c(3, 0) - c(0, 3)) + j.c * (c(1, 1) + c(2, 2));
}

std::vector<double> MpoState::dense_coefficients() const {
  if (length() > 10) throw ResourceError("dense coefficients limited to L <= 10");
  // Rows: left index (site 1 most significant); columns: bond.
  MatrixXd acc = MatrixXd::Ones(1, 1);
  for (const auto& s : sites_) {
    MatrixXd next(acc.rows() * 4, s.dr);
    for (int x = 0; x < 4; ++x) {
      const MatrixXd piece = acc * letter_block(s.data, s.dl, s.dr, x);
      for (Eigen::Index row = 0; row < acc.rows(); ++row) next.row(4 * row + x) = piece.row(row);
    }
    acc = std::move(next);
  }
  return {acc.data(), acc.data() + acc.size()};
}

// ---------------------------------------------------------------------------

void QuenchConfig::validate() const {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("polarization mu must lie in [0, 1]");
  if (length < 4 || length % 2 != 0) throw ConfigError("chain length must be even and >= 4");
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (chi < 4) throw ConfigError("bond cap chi must be >= 4");
  if (measure_every < 1) throw ConfigError("measure_every must be >= 1");
  if (!(cutoff >= 0.0 && cutoff < 1.0)) throw ConfigError("truncation cutoff must lie in [0, 1)");
}

std::vector<double> helix_angles(const GateParams& p, int length) {
  const double theta = p.theta();
  const double alpha = std::arg(screw_phase(p));
  std::vector<double> phi(static_cast<std::size_t>(length));
  for (int l = 1; l <= length; ++l) phi[static_cast<std::size_t>(l - 1)] = 2.0 * theta * (l + 1) - (l % 2 == 0 ? alpha : 0.0);
  return phi;
}

std::vector<MpoState::SiteVector> initial_sites(const QuenchConfig& cfg) {
  std::vector<MpoState::SiteVector> v(static_cast<std::size_t>(cfg.length));
  if (cfg.kind == QuenchKind::domain_wall_z) {
    for (int l = 0; l < cfg.length; ++l) v[static_cast<std::size_t>(l)] = {1.0, 0.0, 0.0, l < cfg.length / 2 ? cfg.mu : -cfg.mu};
  } else {
    const auto phi = helix_angles(cfg.params, cfg.length);
    for (std::size_t l = 0; l < v.size(); ++l) v[l] = {1.0, cfg.mu * std::cos(phi[l]), cfg.mu * std::sin(phi[l]), 0.0};
  }
  return v;
}

TransportResult evolve(const QuenchConfig& cfg) {
  cfg.validate();
  TransportResult res;
  res.config = cfg;
  const int n = cfg.length;
  const bool helix = cfg.kind == QuenchKind::helix_tilde_x;
  if (helix) res.helix_angles = helix_angles(cfg.params, n);

  MpoState st = MpoState::product(initial_sites(cfg), cfg.chi, cfg.cutoff);
  const kernels::Transfer16 r = to_kernel(pauli_transfer(gate_matrix(cfg.params)));
  const CurrentOperator j = current_operator(cfg.params);
  const double norm = cfg.mu > 0.0 ? cfg.mu : 1.0;

  std::vector<double> sz0;
  bool warned = false;
  double last_discarded = 0.0;
  for (int t = 0; t <= cfg.steps; ++t) {
    const double tr = st.trace();
    std::vector<double> sz = st.site_coefficients(3);
    for (double& v : sz) v /= tr;
    if (t == 0) sz0 = sz;
    double dz = 0.0;
    for (int l = n / 2; l < n; ++l) dz += sz[static_cast<std::size_t>(l)] - sz0[static_cast<std::size_t>(l)];
    res.times.push_back(t);
    res.trace.push_back(tr);
    res.delta_z.push_back(dz / (2.0 * norm));
    res.current.push_back(st.current(j, n / 2) / tr / norm);
    res.discarded.push_back(last_discarded);
    res.max_bond.push_back(st.max_bond());
    if (cfg.keep_profiles && (t % cfg.measure_every == 0 || t == cfg.steps)) {
      Profile pr;
      pr.t = t;
      pr.sz = std::move(sz);
      pr.sx = st.site_coefficients(1);
      pr.sy = st.site_coefficients(2);
      for (double& v : pr.sx) v /= tr;
      for (double& v : pr.sy) v /= tr;
      res.profiles.push_back(std::move(pr));
    }
    if (t == cfg.steps) break;
    last_discarded = st.step(r);
    if (last_discarded > kAccuracyWarning && !warned) {
      std::ostringstream msg;
      msg << "discarded weight " << last_discarded << " exceeds " << kAccuracyWarning << " at step " << t + 1
          << "; results beyond this point are inaccurate";
      res.warnings.push_back(msg.str());
      warned = true;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

ExponentFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi) {
  if (t.size() != y.size()) throw ShapeError("time and value series differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi || t[i] <= 0.0) continue;
    if (!(y[i] > 0.0)) throw FitError("non-positive value inside the fit window");
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto n = lx.size();
  if (n < 10) throw FitError("fewer than 10 points in the fit window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw FitError("degenerate fit window");
  ExponentFit f;
  f.slope = sxy / sxx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.slope_err = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (f.slope == 0.0) throw FitError("zero slope");
  f.z = 1.0 / f.slope;
  f.z_err = f.slope_err / (f.slope * f.slope);
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.points = static_cast<int>(n);
  return f;
}

std::optional<int> boundary_time(const TransportResult& r, double threshold) {
  if (r.profiles.empty()) return std::nullopt;
  const double mu = r.config.mu > 0.0 ? r.config.mu : 1.0;
  const auto& first = r.profiles.front().sz;
  for (const auto& p : r.profiles) {
    const double left = std::abs(p.sz.front() - first.front());
    const double right = std::abs(p.sz.back() - first.back());
    if (std::max(left, right) > threshold * mu) return p.t;
  }
  return std::nullopt;
}

ExponentFit fit_exponent(const TransportResult& r, double t_lo, double t_hi) {
  std::vector<double> t(r.times.begin(), r.times.end());
  return fit_power_law(t, r.delta_z, t_lo, t_hi);
}

ExponentFit fit_exponent(const TransportResult& r) {
  double t_hi = r.times.empty() ? 0.0 : r.times.back();
  if (const auto tb = boundary_time(r)) t_hi = std::min(t_hi, static_cast<double>(*tb - 1));
  return fit_exponent(r, t_hi / 10.0, t_hi);
}

std::vector<double> two_point_proxy(const TransportResult& r, std::size_t profile_index) {
  if (r.config.kind != QuenchKind::domain_wall_z) throw ConfigError("two-point proxy needs a domain-wall quench");
  if (profile_index >= r.profiles.size()) throw DomainError("profile index out of range");
  const auto& sz = r.profiles[profile_index].sz;
  const double mu = r.config.mu > 0.0 ? r.config.mu : 1.0;
  const std::size_t pairs = sz.size() / 2;
  std::vector<double> mbar(pairs);
  for (std::size_t j = 0; j < pairs; ++j) mbar[j] = 0.5 * (sz[2 * j] + sz[2 * j + 1]);
  std::vector<double> out(pairs - 1);
  for (std::size_t j = 0; j + 1 < pairs; ++j) out[j] = (mbar[j] - mbar[j + 1]) / (4.0 * mu);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

GateParams on_axis(GateParams p, ScanAxis axis, double v) {
  (axis == ScanAxis::tau ? p.tau : p.delta) = v;
  return p;
}

}  // namespace

std::vector<FractalMark> fractal_marks(const GateParams& base, ScanAxis axis, double lo, double hi, int m_max) {
  std::vector<FractalMark> out;
  if (axis == ScanAxis::tau) {
    for (const auto& fp : fractal_rationals(base, lo, hi, m_max)) out.push_back({fp.ratio, fp.target, fp.tau});
    return out;
  }
  for (int m = 2; m <= m_max; ++m) {
    for (int p = 1; p < m; ++p) {
      if (std::gcd(p, m) != 1) continue;
      const double target = std::cos(std::numbers::pi * p / m);
      auto f = [&](double v) {
        const auto d = on_axis(base, axis, v).frak_d();
        return d ? *d - target : std::nan("");
      };
      auto pole = [&](double v) { return std::sin(2.0 * on_axis(base, axis, v).tau * on_axis(base, axis, v).j_eff()); };
      for (double v : find_roots(f, lo, hi, 2000, pole)) out.push_back({{p, m}, target, v});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

std::vector<FractalPeak> find_peaks(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("grid and values differ in length");
  std::vector<FractalPeak> out;
  const auto n = y.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    // Bases: minima up to the next higher sample on each side.
    std::size_t lo = i, hi = i;
    double left_min = y[i], right_min = y[i];
    while (lo > 0 && y[lo - 1] <= y[i]) left_min = std::min(left_min, y[--lo]);
    while (hi + 1 < n && y[hi + 1] <= y[i]) right_min = std::min(right_min, y[++hi]);
    const double prominence = y[i] - std::max(left_min, right_min);
    const double level = y[i] - 0.5 * prominence;
    auto cross = [&](std::size_t from, int dir, std::size_t stop) {
      std::size_t k = from;
      while (k != stop) {
        const std::size_t next = dir > 0 ? k + 1 : k - 1;
        if (y[next] <= level) {
          const double w = (y[k] - level) / (y[k] - y[next]);
          return x[k] + w * (x[next] - x[k]);
        }
        k = next;
      }
      return x[stop];
    };
    out.push_back({x[i], y[i], cross(i, +1, hi) - cross(i, -1, lo)});
  }
  return out;
}

FractalScanResult fractal_scan(const GateParams& base, ScanAxis axis, const std::vector<double>& grid, int t_fixed,
                               int length, int chi, double mu, int m_max, unsigned workers) {
  if (grid.empty()) throw ConfigError("empty scan grid");
  FractalScanResult res;
  res.base = base;
  res.axis = axis;
  res.t_fixed = t_fixed;
  res.length = length;
  res.chi = chi;
  res.grid = grid;
  std::sort(res.grid.begin(), res.grid.end());
  res.current.resize(res.grid.size());
  std::vector<std::vector<std::string>> warnings(res.grid.size());
  parallel_for(res.grid.size(), workers, [&](std::size_t i) {
    QuenchConfig cfg;
    cfg.params = on_axis(base, axis, res.grid[i]);
    cfg.length = length;
    cfg.chi = chi;
    cfg.mu = mu;
    cfg.steps = t_fixed;
    cfg.keep_profiles = false;
    const TransportResult r = evolve(cfg);
    res.current[i] = r.current.back();
    warnings[i] = r.warnings;
  });
  for (std::size_t i = 0; i < warnings.size(); ++i)
    for (const auto& w : warnings[i]) res.warnings.push_back("grid value " + std::to_string(res.grid[i]) + ": " + w);
  res.annotations = fractal_marks(base, axis, res.grid.front(), res.grid.back(), m_max);
  res.peaks = find_peaks(res.grid, res.current);
  return res;
}

// ---------------------------------------------------------------------------

namespace {
// Deviations below this are rounding noise of the trace normalization.
constexpr double kFrontFloor = 1e-9;
}  // namespace

double helix_front(const std::vector<double>& sx_tilde_over_mu) {
  const std::size_t half = sx_tilde_over_mu.size() / 2;
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < half; ++l) {
    const double d = std::abs(sx_tilde_over_mu[l] - 1.0);
    if (d < kFrontFloor) continue;
    num += static_cast<double>(l + 1) * d;
    den += d;
  }
  return den > 0.0 ? num / den : 0.0;
}

HelixResult helix_quench(const GateParams& p, int length, double mu, int steps, int chi, int measure_every,
                         double cutoff) {
  if (classify(p).phase != Phase::critical) throw SymmetryError("helix quench requires critical parameters");
  if (!(mu > 0.0)) throw ConfigError("helix quench needs mu > 0");
  QuenchConfig cfg;
  cfg.kind = QuenchKind::helix_tilde_x;
  cfg.params = p;
  cfg.length = length;
  cfg.mu = mu;
  cfg.steps = steps;
  cfg.chi = chi;
  cfg.measure_every = measure_every;
  cfg.cutoff = cutoff;
  HelixResult out;
  out.evolution = evolve(cfg);
  out.phi = out.evolution.helix_angles;
  for (const auto& pr : out.evolution.profiles) {
    std::vector<double> tx(pr.sx.size()), ty(pr.sx.size());
    for (std::size_t l = 0; l < pr.sx.size(); ++l) {
      const double c = std::cos(out.phi[l]), s = std::sin(out.phi[l]);
      tx[l] = (c * pr.sx[l] + s * pr.sy[l]) / mu;
      ty[l] = (-s * pr.sx[l] + c * pr.sy[l]) / mu;
    }
    out.front.push_back(helix_front(tx));
    out.sx_tilde.push_back(std::move(tx));
    out.sy_tilde.push_back(std::move(ty));
  }
  return out;
}

}  // namespace u1lab
