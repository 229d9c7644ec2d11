#include "u1lab/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "u1lab/error.hpp"

namespace u1lab {
namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

std::uint32_t site_mask(int length, int site) {
  if (site < 1 || site > length) throw DomainError("site index out of range");
  return std::uint32_t{1} << (length - site);
}

void check_length(int length) {
  if (length < 1 || length > kMaxPauliSites) throw DomainError("Pauli string length out of range");
}

}  // namespace

char letter_char(Letter l) {
  constexpr char chars[4] = {'I', 'X', 'Y', 'Z'};
  return chars[static_cast<int>(l)];
}

PauliString::PauliString(int length) : length_(length) { check_length(length); }

PauliString::PauliString(int length, std::uint32_t x_bits, std::uint32_t z_bits)
    : x_(x_bits), z_(z_bits), length_(length) {
  check_length(length);
  const std::uint64_t limit = std::uint64_t{1} << length;
  if (x_bits >= limit || z_bits >= limit) throw DomainError("Pauli bits exceed string length");
}

PauliString PauliString::from_letters(std::string_view letters) {
  PauliString s(static_cast<int>(letters.size()));
  for (std::size_t i = 0; i < letters.size(); ++i) {
    Letter l;
    switch (letters[i]) {
      case 'I': l = Letter::I; break;
      case 'X': l = Letter::X; break;
      case 'Y': l = Letter::Y; break;
      case 'Z': l = Letter::Z; break;
      default: throw DomainError("invalid Pauli letter '" + std::string(1, letters[i]) + "'");
    }
    s.set(static_cast<int>(i) + 1, l);
  }
  return s;
}

PauliString PauliString::single(int length, int site, Letter letter) {
  PauliString s(length);
  s.set(site, letter);
  return s;
}

Letter PauliString::letter(int site) const {
  const std::uint32_t m = site_mask(length_, site);
  const bool x = x_ & m;
  const bool z = z_ & m;
  if (x && z) return Letter::Y;
  if (x) return Letter::X;
  if (z) return Letter::Z;
  return Letter::I;
}

void PauliString::set(int site, Letter letter) {
  const std::uint32_t m = site_mask(length_, site);
  x_ &= ~m;
  z_ &= ~m;
  if (letter == Letter::X || letter == Letter::Y) x_ |= m;
  if (letter == Letter::Z || letter == Letter::Y) z_ |= m;
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int s = 1; s <= length_; ++s) {
    if ((x_ | z_) & (std::uint32_t{1} << (length_ - s))) out.push_back(s);
  }
  return out;
}

int PauliString::body() const { return std::popcount(x_ | z_); }

int PauliString::range() const {
  const std::uint32_t bits = x_ | z_;
  if (bits == 0) return 0;
  // highest set bit is the leftmost site
  const int hi = 31 - std::countl_zero(bits);
  const int lo = std::countr_zero(bits);
  return hi - lo + 1;
}

std::string PauliString::to_string() const {
  std::string out(static_cast<std::size_t>(length_), 'I');
  for (int s = 1; s <= length_; ++s) out[static_cast<std::size_t>(s - 1)] = letter_char(letter(s));
  return out;
}

PhasedString multiply(const PauliString& a, const PauliString& b) {
  if (a.length() != b.length()) throw ShapeError("Pauli strings of different length");
  const std::uint32_t x = a.x_bits() ^ b.x_bits();
  const std::uint32_t z = a.z_bits() ^ b.z_bits();
  // Strings are i^{|x&z|} X^x Z^z; moving Z^{z_a} through X^{x_b} costs (-1)^{|z_a&x_b|}.
  const int e = std::popcount(a.x_bits() & a.z_bits()) + std::popcount(b.x_bits() & b.z_bits()) -
                std::popcount(x & z) + 2 * std::popcount(a.z_bits() & b.x_bits());
  return {PauliString(a.length(), x, z), ((e % 4) + 4) % 4};
}

// ---------------------------------------------------------------------------

PauliPoly::PauliPoly(int length) : length_(length) { check_length(length); }

PauliPoly::PauliPoly(const PauliString& s, cplx coefficient) : length_(s.length()) {
  add(s, coefficient);
}

PauliPoly PauliPoly::identity(int length, cplx coefficient) {
  return PauliPoly(PauliString(length), coefficient);
}

PauliPoly PauliPoly::single(int length, int site, Letter letter, cplx coefficient) {
  return PauliPoly(PauliString::single(length, site, letter), coefficient);
}

PauliPoly PauliPoly::sigma_plus(int length, int site) {
  PauliPoly p(length);
  p.add(PauliString::single(length, site, Letter::X), 0.5);
  p.add(PauliString::single(length, site, Letter::Y), cplx(0, 0.5));
  return p;
}

PauliPoly PauliPoly::sigma_minus(int length, int site) {
  PauliPoly p(length);
  p.add(PauliString::single(length, site, Letter::X), 0.5);
  p.add(PauliString::single(length, site, Letter::Y), cplx(0, -0.5));
  return p;
}

PauliPoly PauliPoly::total_z(int length) {
  PauliPoly p(length);
  for (int s = 1; s <= length; ++s) p.add(PauliString::single(length, s, Letter::Z), 1.0);
  return p;
}

void PauliPoly::add(const PauliString& s, cplx coefficient) {
  if (s.length() != length_) throw ShapeError("Pauli string length does not match polynomial");
  auto it = terms_.find(s);
  if (it == terms_.end()) {
    if (std::abs(coefficient) >= kDropTolerance) terms_.emplace(s, coefficient);
    return;
  }
  it->second += coefficient;
  if (std::abs(it->second) < kDropTolerance) terms_.erase(it);
}

cplx PauliPoly::coefficient(const PauliString& s) const {
  auto it = terms_.find(s);
  return it == terms_.end() ? cplx{} : it->second;
}

PauliPoly PauliPoly::adjoint() const {
  PauliPoly out(*this);
  for (auto& [s, c] : out.terms_) c = std::conj(c);
  return out;
}

double PauliPoly::norm() const {
  double acc = 0.0;
  for (const auto& [s, c] : terms_) acc += std::norm(c);
  return std::sqrt(acc);
}

void PauliPoly::require_same_length(const PauliPoly& other) const {
  if (other.length_ != length_) throw ShapeError("Pauli polynomials of different length");
}

PauliPoly& PauliPoly::operator+=(const PauliPoly& other) {
  require_same_length(other);
  if (&other == this) return *this *= 2.0;
  for (const auto& [s, c] : other.terms_) add(s, c);
  return *this;
}

PauliPoly& PauliPoly::operator-=(const PauliPoly& other) {
  require_same_length(other);
  if (&other == this) {
    terms_.clear();
    return *this;
  }
  for (const auto& [s, c] : other.terms_) add(s, -c);
  return *this;
}

PauliPoly& PauliPoly::operator*=(cplx scalar) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= scalar;
    if (std::abs(it->second) < kDropTolerance) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

PauliPoly operator+(PauliPoly a, const PauliPoly& b) { return a += b; }
PauliPoly operator-(PauliPoly a, const PauliPoly& b) { return a -= b; }
PauliPoly operator*(PauliPoly a, cplx scalar) { return a *= scalar; }
PauliPoly operator*(cplx scalar, PauliPoly a) { return a *= scalar; }

PauliPoly operator*(const PauliPoly& a, const PauliPoly& b) {
  if (a.length() != b.length()) throw ShapeError("Pauli polynomials of different length");
  // Accumulate before dropping so cancellations below the tolerance are exact.
  std::map<PauliString, cplx> acc;
  for (const auto& [sa, ca] : a.terms()) {
    for (const auto& [sb, cb] : b.terms()) {
      const PhasedString p = multiply(sa, sb);
      acc[p.string] += kIPow[p.phase] * ca * cb;
    }
  }
  PauliPoly out(a.length());
  for (const auto& [s, c] : acc) out.add(s, c);
  return out;
}

PauliPoly commutator(const PauliPoly& a, const PauliPoly& b) {
  if (a.length() != b.length()) throw ShapeError("commutator of polynomials with different length");
  // Strings either commute or anticommute; only anticommuting pairs survive,
  // each contributing 2*ab.
  std::map<PauliString, cplx> acc;
  for (const auto& [sa, ca] : a.terms()) {
    for (const auto& [sb, cb] : b.terms()) {
      const int sym = std::popcount(sa.x_bits() & sb.z_bits()) + std::popcount(sa.z_bits() & sb.x_bits());
      if (sym % 2 == 0) continue;
      const PhasedString p = multiply(sa, sb);
      acc[p.string] += 2.0 * kIPow[p.phase] * ca * cb;
    }
  }
  PauliPoly out(a.length());
  for (const auto& [s, c] : acc) out.add(s, c);
  return out;
}

cplx inner(const PauliPoly& a, const PauliPoly& b) {
  if (a.length() != b.length()) throw ShapeError("inner product of polynomials with different length");
  cplx acc = 0.0;
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() && ib != b.terms().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      acc += std::conj(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

int sites_of_dimension(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) throw DimensionError("operator dimension is not a power of two");
  const int sites = std::countr_zero(static_cast<std::uint64_t>(dim));
  if (sites > kMaxPauliSites) throw DimensionError("operator too large");
  return sites;
}

DenseOp to_dense(const PauliString& s) {
  const Eigen::Index dim = Eigen::Index{1} << s.length();
  DenseOp out = DenseOp::Zero(dim, dim);
  const cplx phase = kIPow[std::popcount(s.x_bits() & s.z_bits()) % 4];
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto col = static_cast<std::uint32_t>(i);
    const double sign = (std::popcount(col & s.z_bits()) % 2) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(col ^ s.x_bits()), i) = phase * sign;
  }
  return out;
}

DenseOp to_dense(const PauliPoly& a) {
  const Eigen::Index dim = Eigen::Index{1} << a.length();
  DenseOp out = DenseOp::Zero(dim, dim);
  for (const auto& [s, c] : a.terms()) {
    const cplx phase = c * kIPow[std::popcount(s.x_bits() & s.z_bits()) % 4];
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto col = static_cast<std::uint32_t>(i);
      const double sign = (std::popcount(col & s.z_bits()) % 2) ? -1.0 : 1.0;
      out(static_cast<Eigen::Index>(col ^ s.x_bits()), i) += phase * sign;
    }
  }
  return out;
}

PauliPoly poly_from_dense(const DenseOp& op) {
  if (op.rows() != op.cols()) throw DimensionError("operator is not square");
  const int length = sites_of_dimension(op.rows());
  const std::size_t dim = static_cast<std::size_t>(op.rows());
  const double norm = 1.0 / static_cast<double>(dim);
  PauliPoly out(length);
  std::vector<cplx> f(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    for (std::size_t i = 0; i < dim; ++i) {
      f[i] = op(static_cast<Eigen::Index>(i ^ x), static_cast<Eigen::Index>(i));
    }
    // f[z] <- sum_i (-1)^{|z&i|} f[i]
    for (std::size_t h = 1; h < dim; h <<= 1) {
      for (std::size_t i = 0; i < dim; i += 2 * h) {
        for (std::size_t j = i; j < i + h; ++j) {
          const cplx u = f[j];
          const cplx v = f[j + h];
          f[j] = u + v;
          f[j + h] = u - v;
        }
      }
    }
    for (std::size_t z = 0; z < dim; ++z) {
      if (std::abs(f[z]) * norm < PauliPoly::kDropTolerance) continue;
      const int a = std::popcount(static_cast<std::uint32_t>(x & z));
      const cplx c = std::conj(kIPow[a % 4]) * f[z] * norm;
      out.add(PauliString(length, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(z)), c);
    }
  }
  return out;
}

const LocalityReport::Cell* LocalityReport::find(int body, int range) const {
  auto it = std::find_if(cells.begin(), cells.end(),
                         [&](const Cell& c) { return c.body == body && c.range == range; });
  return it == cells.end() ? nullptr : &*it;
}

double LocalityReport::average(int body, int range) const {
  const Cell* c = find(body, range);
  return c ? c->average() : 0.0;
}

LocalityReport locality_weights(const PauliPoly& a) {
  LocalityReport rep;
  rep.length = a.length();
  rep.body_weight.assign(static_cast<std::size_t>(a.length()) + 1, 0.0);
  std::map<std::pair<int, int>, LocalityReport::Cell> cells;
  for (const auto& [s, c] : a.terms()) {
    const int p = s.body();
    const int r = s.range();
    const double w = std::norm(c);
    rep.body_weight[static_cast<std::size_t>(p)] += w;
    auto& cell = cells[{p, r}];
    cell.body = p;
    cell.range = r;
    cell.total_weight += w;
    ++cell.count;
  }
  for (const auto& [key, cell] : cells) rep.cells.push_back(cell);
  return rep;
}

nlohmann::json to_json(const PauliPoly& a) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [s, c] : a.terms()) out.push_back({s.to_string(), c.real(), c.imag()});
  return out;
}

PauliPoly poly_from_json(const nlohmann::json& j, int length) {
  if (!j.is_array()) throw DomainError("PauliPoly JSON must be an array");
  if (j.empty()) {
    if (length < 1) throw DomainError("empty PauliPoly JSON needs an explicit length");
    return PauliPoly(length);
  }
  length = static_cast<int>(j.front().at(0).get<std::string>().size());
  PauliPoly out(length);
  for (const auto& term : j) {
    out.add(PauliString::from_letters(term.at(0).get<std::string>()),
            cplx(term.at(1).get<double>(), term.at(2).get<double>()));
  }
  return out;
}

}  // namespace u1lab
