#pragma once
// Operator algebra over complex-weighted Pauli strings.
//
// Conventions used throughout the library:
//   * sites are numbered 1..L; site 1 is the most significant qubit of a
//     basis index, i.e. site s lives in bit (L - s);
//   * |0> is spin up, sigma^z|0> = +|0>;
//   * sigma^+ = (X + iY)/2 = |0><1| raises the magnetization;
//   * <A,B> = tr(A^dagger B) / 2^L, under which Pauli strings are orthonormal.

#include <Eigen/Dense>
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace u1lab {

using cplx = std::complex<double>;
using DenseOp = Eigen::MatrixXcd;

inline constexpr int kMaxPauliSites = 32;

enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(Letter l);

/// Tensor product of single-site Paulis, stored as x/z bit planes
/// (X = x, Z = z, Y = x&z; the Y phase is tracked by multiply()).
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int length);
  PauliString(int length, std::uint32_t x_bits, std::uint32_t z_bits);

  static PauliString from_letters(std::string_view letters);
  static PauliString single(int length, int site, Letter letter);

  int length() const { return length_; }
  std::uint32_t x_bits() const { return x_; }
  std::uint32_t z_bits() const { return z_; }

  Letter letter(int site) const;
  void set(int site, Letter letter);

  bool is_identity() const { return (x_ | z_) == 0; }
  /// Non-identity sites, ascending.
  std::vector<int> support() const;
  /// Number of non-identity letters (p).
  int body() const;
  /// max(support) - min(support) + 1, 0 for the identity (r).
  int range() const;

  std::string to_string() const;

  auto operator<=>(const PauliString&) const = default;

 private:
  std::uint32_t x_ = 0;
  std::uint32_t z_ = 0;
  int length_ = 0;
};

/// Product a*b = i^phase * result.
struct PhasedString {
  PauliString string;
  int phase = 0;  // power of i, 0..3
};
PhasedString multiply(const PauliString& a, const PauliString& b);

/// Sparse complex combination of Pauli strings on a fixed number of sites.
/// Coefficients with modulus below kDropTolerance are never stored.
class PauliPoly {
 public:
  static constexpr double kDropTolerance = 1e-14;
  using TermMap = std::map<PauliString, cplx>;

  PauliPoly() = default;
  explicit PauliPoly(int length);
  PauliPoly(const PauliString& s, cplx coefficient = 1.0);

  static PauliPoly identity(int length, cplx coefficient = 1.0);
  /// sigma^letter on one site.
  static PauliPoly single(int length, int site, Letter letter, cplx coefficient = 1.0);
  static PauliPoly sigma_plus(int length, int site);
  static PauliPoly sigma_minus(int length, int site);
  /// Sum of sigma^z over all sites.
  static PauliPoly total_z(int length);

  int length() const { return length_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  void add(const PauliString& s, cplx coefficient);
  cplx coefficient(const PauliString& s) const;

  PauliPoly adjoint() const;
  /// sqrt(<A,A>).
  double norm() const;

  PauliPoly& operator+=(const PauliPoly& other);
  PauliPoly& operator-=(const PauliPoly& other);
  PauliPoly& operator*=(cplx scalar);

 private:
  void require_same_length(const PauliPoly& other) const;

  int length_ = 0;
  TermMap terms_;
};

PauliPoly operator+(PauliPoly a, const PauliPoly& b);
PauliPoly operator-(PauliPoly a, const PauliPoly& b);
PauliPoly operator*(PauliPoly a, cplx scalar);
PauliPoly operator*(cplx scalar, PauliPoly a);
PauliPoly operator*(const PauliPoly& a, const PauliPoly& b);

/// ab - ba.
PauliPoly commutator(const PauliPoly& a, const PauliPoly& b);

/// tr(A^dagger B) / 2^L from coefficients.
cplx inner(const PauliPoly& a, const PauliPoly& b);

DenseOp to_dense(const PauliString& s);
DenseOp to_dense(const PauliPoly& a);

/// Expansion c_s = tr(s^dagger op)/2^L, computed with one Walsh-Hadamard
/// transform per x-pattern: O(L 4^L).
PauliPoly poly_from_dense(const DenseOp& op);

/// Number of sites of a 2^L x 2^L matrix; throws DimensionError otherwise.
int sites_of_dimension(Eigen::Index dim);

/// Pauli weight of an operator resolved by body p and range r.
struct LocalityReport {
  struct Cell {
    int body = 0;
    int range = 0;
    double total_weight = 0.0;
    std::size_t count = 0;
    double average() const { return count ? total_weight / static_cast<double>(count) : 0.0; }
  };

  int length = 0;
  /// w_p = sum of |c_s|^2 over strings with body p, p = 0..L.
  std::vector<double> body_weight;
  /// Non-empty (p, r) cells, sorted by (p, r).
  std::vector<Cell> cells;

  const Cell* find(int body, int range) const;
  double average(int body, int range) const;
};

LocalityReport locality_weights(const PauliPoly& a);

/// [[letters, re, im], ...] in string order.
nlohmann::json to_json(const PauliPoly& a);
/// `length` is only needed to decode an empty array.
PauliPoly poly_from_json(const nlohmann::json& j, int length = 0);

}  // namespace u1lab
