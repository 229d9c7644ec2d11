#include "u1lab/gate.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "u1lab/error.hpp"

namespace u1lab {
namespace {

const Eigen::Matrix2cd& pauli2(int letter) {
  static const Eigen::Matrix2cd mats[4] = {
      Eigen::Matrix2cd::Identity(),
      (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
      (Eigen::Matrix2cd() << 0, cplx(0, -1), cplx(0, 1), 0).finished(),
      (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(),
  };
  return mats[letter];
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

unsigned bit_of_site(int length, int site) { return static_cast<unsigned>(length - site); }

void apply_gate(DenseOp& m, int length, int first_site, int second_site, const kernels::Gate4& g) {
  std::span<cplx> data(m.data(), static_cast<std::size_t>(m.size()));
  kernels::apply_two_qubit(data, bit_of_site(length, first_site), bit_of_site(length, second_site), g);
}

void apply_layer(DenseOp& m, int length, Boundary boundary, bool even, const kernels::Gate4& g) {
  if (even) {
    for (int s = 2; s + 1 <= length; s += 2) apply_gate(m, length, s, s + 1, g);
    if (boundary == Boundary::periodic) apply_gate(m, length, length, 1, g);
  } else {
    for (int s = 1; s + 1 <= length; s += 2) apply_gate(m, length, s, s + 1, g);
  }
}

}  // namespace

double GateParams::j_eff() const { return std::sqrt(1.0 + d * d + b * b); }

std::optional<double> GateParams::frak_d() const {
  const double j = j_eff();
  const double den = std::sin(2.0 * tau * j);
  if (std::abs(den) < 1e-13) return std::nullopt;
  return std::sin(2.0 * tau * delta) / den * j / std::sqrt(1.0 + d * d);
}

double GateParams::theta() const { return 0.5 * std::atan(d); }

double tau_from_units(double value, TauUnits units) {
  return units == TauUnits::quarter_pi ? value * std::numbers::pi / 4.0 : value;
}

double tau_to_quarter_pi(double tau) { return tau / (std::numbers::pi / 4.0); }

TauUnits parse_tau_units(std::string_view s) {
  if (s == "raw") return TauUnits::raw;
  if (s == "quarter-pi") return TauUnits::quarter_pi;
  throw ConfigError("unknown tau units '" + std::string(s) + "' (expected raw|quarter-pi)");
}

std::string_view boundary_name(Boundary b) { return b == Boundary::open ? "obc" : "pbc"; }

Gate gate_hamiltonian(const GateParams& p) {
  Gate h = Gate::Zero();
  h(0, 0) = p.delta + 2.0 * p.m;
  h(3, 3) = p.delta - 2.0 * p.m;
  h(1, 1) = -p.delta - 2.0 * p.b;
  h(2, 2) = -p.delta + 2.0 * p.b;
  h(1, 2) = cplx(2.0, 2.0 * p.d);
  h(2, 1) = cplx(2.0, -2.0 * p.d);
  return h;
}

Gate gate_matrix(const GateParams& p) {
  // Middle block = -delta + K with K^2 = 4 J^2, so
  // exp(-i tau K) = cos(2 J tau) - i sin(2 J tau) K / (2 J).
  const double j = p.j_eff();
  const double c = std::cos(2.0 * j * p.tau);
  const double s = std::sin(2.0 * j * p.tau) / (2.0 * j);
  const cplx shift = std::exp(cplx(0.0, p.tau * p.delta));
  const cplx mi(0.0, -1.0);

  Gate u = Gate::Zero();
  u(0, 0) = std::exp(cplx(0.0, -p.tau * (p.delta + 2.0 * p.m)));
  u(3, 3) = std::exp(cplx(0.0, -p.tau * (p.delta - 2.0 * p.m)));
  u(1, 1) = shift * (c + mi * s * (-2.0 * p.b));
  u(2, 2) = shift * (c + mi * s * (2.0 * p.b));
  u(1, 2) = shift * (mi * s * cplx(2.0, 2.0 * p.d));
  u(2, 1) = shift * (mi * s * cplx(2.0, -2.0 * p.d));
  return u;
}

kernels::Gate4 to_kernel(const Gate& g) {
  kernels::Gate4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[static_cast<std::size_t>(4 * r + c)] = g(r, c);
  return out;
}

DensePropagator build_propagator(const GateParams& p, int length, Boundary boundary, LayerOrder order) {
  if (length < 2 || length % 2 != 0) throw ConfigError("propagator needs an even number of sites >= 2");
  if (length > kMaxDenseSites) {
    throw ConfigError("dense propagator limited to L <= " + std::to_string(kMaxDenseSites));
  }
  if (boundary == Boundary::periodic && length < 4) throw ConfigError("periodic boundary needs L >= 4");

  const Eigen::Index dim = Eigen::Index{1} << length;
  DensePropagator out{DenseOp::Identity(dim, dim), length, boundary, order};
  const kernels::Gate4 g = to_kernel(gate_matrix(p));
  const bool even_first = order == LayerOrder::even_first;
  apply_layer(out.matrix, length, boundary, even_first, g);
  apply_layer(out.matrix, length, boundary, !even_first, g);
  return out;
}

DensePropagator build_tilde_propagator(const GateParams& p, int length) {
  DensePropagator u = build_propagator(p, length, Boundary::open);
  const Eigen::Index dim = u.matrix.rows();
  const std::uint64_t m1 = std::uint64_t{1} << bit_of_site(length, 1);
  const std::uint64_t ml = std::uint64_t{1} << bit_of_site(length, length);
  // right-multiply by the diagonal sigma^z_1 sigma^z_L
  for (Eigen::Index col = 0; col < dim; ++col) {
    const auto c = static_cast<std::uint64_t>(col);
    const double sign = (((c & m1) != 0) != ((c & ml) != 0)) ? -1.0 : 1.0;
    if (sign < 0) u.matrix.col(col) *= -1.0;
  }
  return u;
}

Transfer pauli_transfer(const Gate& g) {
  Transfer r;
  const Gate gd = g.adjoint();
  Eigen::Matrix4cd pa[16];
  for (int a = 0; a < 16; ++a) pa[a] = kron2(pauli2(a / 4), pauli2(a % 4));
  for (int b = 0; b < 16; ++b) {
    const Eigen::Matrix4cd image = g * pa[b] * gd;
    for (int a = 0; a < 16; ++a) r(a, b) = (pa[a] * image).trace().real() / 4.0;
  }
  return r;
}

kernels::Transfer16 to_kernel(const Transfer& r) {
  kernels::Transfer16 out;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) out[static_cast<std::size_t>(16 * a + b)] = r(a, b);
  return out;
}

DenseOp twist_operator(double theta, int length) {
  const Eigen::Index dim = Eigen::Index{1} << length;
  DenseOp w = DenseOp::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double phase = 0.0;
    for (int l = 1; l <= length; ++l) {
      const bool down = (static_cast<std::uint64_t>(i) >> bit_of_site(length, l)) & 1U;
      phase += l * (down ? -1.0 : 1.0);
    }
    w(i, i) = std::exp(cplx(0.0, -theta * phase));
  }
  return w;
}

DenseOp half_pi_twist(int length) {
  const Eigen::Index dim = Eigen::Index{1} << length;
  DenseOp w = DenseOp::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    int downs = 0;
    for (int l = 1; l <= length; l += 2) downs += (static_cast<std::uint64_t>(i) >> bit_of_site(length, l)) & 1U;
    w(i, i) = downs % 2 ? -1.0 : 1.0;
  }
  return w;
}

DenseOp particle_hole(int length) {
  const Eigen::Index dim = Eigen::Index{1} << length;
  DenseOp p = DenseOp::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) p(i ^ (dim - 1), i) = 1.0;
  return p;
}

DenseOp reflection(int length) {
  const Eigen::Index dim = Eigen::Index{1} << length;
  DenseOp r = DenseOp::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index j = 0;
    for (int bit = 0; bit < length; ++bit) {
      if ((i >> bit) & 1) j |= Eigen::Index{1} << (length - 1 - bit);
    }
    r(j, i) = 1.0;
  }
  return r;
}

double distance_up_to_phase(const DenseOp& a, const DenseOp& b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
  return (a - phase * b).norm();
}

double unitarity_error(const DenseOp& u) {
  const DenseOp e = u.adjoint() * u - DenseOp::Identity(u.rows(), u.cols());
  return e.cwiseAbs().maxCoeff();
}

}  // namespace u1lab
