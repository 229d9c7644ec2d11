#pragma once
// Test-side reference implementations. Deliberately naive: they build every
// operator from Kronecker products or explicit index loops and never call
// into the library kernels, so they can serve as independent oracles.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "u1lab/gate.hpp"
#include "u1lab/pauli.hpp"

namespace oracle {

using u1lab::cplx;
using u1lab::DenseOp;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  cplx complex_normal() {
    std::normal_distribution<double> n;
    return {n(eng_), n(eng_)};
  }

 private:
  std::mt19937_64 eng_;
};

inline Eigen::Matrix2cd pauli(int letter) {
  Eigen::Matrix2cd m;
  switch (letter) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline DenseOp kron(const DenseOp& a, const DenseOp& b) {
  DenseOp out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Kronecker product of single-site matrices, site 1 leftmost.
inline DenseOp product(const std::vector<Eigen::Matrix2cd>& sites) {
  DenseOp out = DenseOp::Identity(1, 1);
  for (const auto& s : sites) out = kron(out, s);
  return out;
}

inline DenseOp site_op(int length, int site, const Eigen::Matrix2cd& m) {
  std::vector<Eigen::Matrix2cd> f(static_cast<std::size_t>(length), Eigen::Matrix2cd::Identity());
  f[static_cast<std::size_t>(site - 1)] = m;
  return product(f);
}

inline DenseOp pauli_string(std::string_view letters) {
  std::vector<Eigen::Matrix2cd> f;
  for (char c : letters) f.push_back(pauli(c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3));
  return product(f);
}

inline DenseOp total_z(int length) {
  DenseOp z = DenseOp::Zero(1 << length, 1 << length);
  for (int l = 1; l <= length; ++l) z += site_op(length, l, pauli(3));
  return z;
}

/// The gate Hamiltonian assembled from Kronecker products.
inline Eigen::Matrix4cd hamiltonian(const u1lab::GateParams& p) {
  auto k2 = [](int a, int b) -> Eigen::Matrix4cd { return kron(pauli(a), pauli(b)); };
  return k2(1, 1) + k2(2, 2) + p.delta * k2(3, 3) + p.b * (k2(0, 3) - k2(3, 0)) +
         p.d * (k2(1, 2) - k2(2, 1)) + p.m * (k2(3, 0) + k2(0, 3));
}

/// exp(-i h tau) by Eigen's scaling-and-squaring Pade exponential.
inline Eigen::Matrix4cd gate_expm(const u1lab::GateParams& p) {
  const Eigen::Matrix4cd a = cplx(0, -p.tau) * hamiltonian(p);
  return a.exp();
}

/// A 4x4 gate acting on sites (first, second) of an L-site register,
/// assembled entry by entry.
inline DenseOp embed(int length, int first, int second, const Eigen::Matrix4cd& g) {
  const Eigen::Index dim = Eigen::Index{1} << length;
  const int ba = length - first, bb = length - second;
  DenseOp out = DenseOp::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int ca = static_cast<int>((col >> ba) & 1), cb = static_cast<int>((col >> bb) & 1);
    const Eigen::Index rest = col & ~((Eigen::Index{1} << ba) | (Eigen::Index{1} << bb));
    for (int ra = 0; ra < 2; ++ra)
      for (int rb = 0; rb < 2; ++rb) {
        const Eigen::Index row = rest | (Eigen::Index{ra} << ba) | (Eigen::Index{rb} << bb);
        out(row, col) = g(2 * ra + rb, 2 * ca + cb);
      }
  }
  return out;
}

/// U = U_odd U_even (the even-bond layer acts first) from explicit products.
inline DenseOp brickwall(const u1lab::GateParams& p, int length, bool periodic = false,
                         bool even_first = true) {
  const Eigen::Matrix4cd g = gate_expm(p);
  const Eigen::Index dim = Eigen::Index{1} << length;
  DenseOp even = DenseOp::Identity(dim, dim), odd = DenseOp::Identity(dim, dim);
  for (int s = 1; s < length; s += 2) odd = embed(length, s, s + 1, g) * odd;
  for (int s = 2; s < length; s += 2) even = embed(length, s, s + 1, g) * even;
  if (periodic) even = embed(length, length, 1, g) * even;
  return even_first ? DenseOp(odd * even) : DenseOp(even * odd);
}

inline u1lab::PauliPoly random_poly(int length, int terms, Rng& rng) {
  u1lab::PauliPoly a(length);
  const int mask = (1 << length) - 1;
  for (int t = 0; t < terms; ++t) {
    u1lab::PauliString s(length, static_cast<std::uint32_t>(rng.integer(0, mask)),
                         static_cast<std::uint32_t>(rng.integer(0, mask)));
    a.add(s, rng.complex_normal());
  }
  return a;
}

inline double max_abs(const DenseOp& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace oracle
