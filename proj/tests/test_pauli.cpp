#include <doctest.h>

#include "support/oracles.hpp"
#include "u1lab/error.hpp"
#include "u1lab/gate.hpp"
#include "u1lab/pauli.hpp"

using namespace u1lab;

TEST_CASE("string descriptors") {
  const auto s = PauliString::from_letters("IXIZYI");
  CHECK(s.body() == 3);
  CHECK(s.range() == 4);
  CHECK(s.support() == std::vector<int>{2, 4, 5});
  CHECK(s.to_string() == "IXIZYI");
  CHECK(PauliString(5).range() == 0);
  CHECK_THROWS_AS(PauliString::from_letters("XQ"), DomainError);
}

TEST_CASE("two-site multiplication table matches dense products") {
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const PauliString sa(2, static_cast<std::uint32_t>(a & 3), static_cast<std::uint32_t>(a >> 2));
      const PauliString sb(2, static_cast<std::uint32_t>(b & 3), static_cast<std::uint32_t>(b >> 2));
      const PhasedString p = multiply(sa, sb);
      const cplx phase = std::pow(cplx(0, 1), p.phase);
      const DenseOp lhs = oracle::pauli_string(sa.to_string()) * oracle::pauli_string(sb.to_string());
      const DenseOp rhs = phase * oracle::pauli_string(p.string.to_string());
      CHECK(oracle::max_abs(lhs - rhs) < 1e-15);
    }
  }
}

TEST_CASE("to_dense agrees with Kronecker products") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int length = rng.integer(1, 5);
    const auto s = PauliString(length, static_cast<std::uint32_t>(rng.integer(0, (1 << length) - 1)),
                               static_cast<std::uint32_t>(rng.integer(0, (1 << length) - 1)));
    CHECK(oracle::max_abs(to_dense(s) - oracle::pauli_string(s.to_string())) < 1e-15);
  }
}

TEST_CASE("inner product equals normalized trace") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int length = rng.integer(1, 6);
    const auto a = oracle::random_poly(length, 12, rng);
    const auto b = oracle::random_poly(length, 12, rng);
    const cplx dense = (to_dense(a).adjoint() * to_dense(b)).trace() / double(1 << length);
    CHECK(std::abs(inner(a, b) - dense) < 1e-12);
    CHECK(std::abs(a.norm() * a.norm() - inner(a, a).real()) < 1e-12);
  }
}

TEST_CASE("commutator matches dense commutator") {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int length = rng.integer(1, 5);
    const auto a = oracle::random_poly(length, 8, rng);
    const auto b = oracle::random_poly(length, 8, rng);
    const DenseOp da = to_dense(a), db = to_dense(b);
    CHECK(oracle::max_abs(to_dense(commutator(a, b)) - (da * db - db * da)) < 1e-12);
    CHECK(oracle::max_abs(to_dense(a * b) - da * db) < 1e-12);
    CHECK(commutator(a, a).empty());
    CHECK((commutator(a, b) + commutator(b, a)).empty());
  }
}

TEST_CASE("elementary commutators") {
  const auto x = PauliPoly::single(1, 1, Letter::X);
  const auto y = PauliPoly::single(1, 1, Letter::Y);
  const auto c = commutator(x, y);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c.coefficient(PauliString::from_letters("Z")) - cplx(0, 2)) < 1e-15);

  const auto z = PauliPoly::total_z(4);
  auto sp = PauliPoly(4);
  for (int l = 1; l <= 4; ++l) sp += PauliPoly::sigma_plus(4, l);
  CHECK((commutator(z, sp) - 2.0 * sp).empty());
  CHECK_THROWS_AS(commutator(PauliPoly(2), PauliPoly(3)), ShapeError);
}

TEST_CASE("dense round trip") {
  oracle::Rng rng(14);
  for (int length = 1; length <= 6; ++length) {
    const auto a = oracle::random_poly(length, 20, rng);
    const auto back = poly_from_dense(to_dense(a));
    CHECK((back - a).norm() < 1e-12);
    const Eigen::Index dim = Eigen::Index{1} << length;
    DenseOp m(dim, dim);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.complex_normal();
    CHECK(oracle::max_abs(to_dense(poly_from_dense(m)) - m) < 1e-12);
  }
}

TEST_CASE("poly_from_dense on named operators") {
  const auto id = poly_from_dense(DenseOp::Identity(4, 4));
  REQUIRE(id.size() == 1);
  CHECK(std::abs(id.coefficient(PauliString(2)) - 1.0) < 1e-15);

  const auto zz = poly_from_dense(oracle::pauli_string("ZZ"));
  REQUIRE(zz.size() == 1);
  CHECK(std::abs(zz.coefficient(PauliString::from_letters("ZZ")) - 1.0) < 1e-15);

  GateParams p;
  p.delta = p.d = p.b = 1.0;
  const auto h = poly_from_dense(gate_hamiltonian(p));
  const std::pair<const char*, double> expected[] = {{"XX", 1}, {"YY", 1}, {"ZZ", 1}, {"IZ", 1},
                                                     {"ZI", -1}, {"XY", 1}, {"YX", -1}};
  CHECK(h.size() == 7);
  for (const auto& [letters, value] : expected) {
    CHECK(std::abs(h.coefficient(PauliString::from_letters(letters)) - value) < 1e-14);
  }
  CHECK_THROWS_AS(poly_from_dense(DenseOp::Identity(3, 3)), DimensionError);
}

TEST_CASE("locality weights") {
  const auto sp = PauliPoly::sigma_plus(3, 1);
  const auto rep = locality_weights(sp);
  REQUIRE(rep.body_weight.size() == 4);
  CHECK(rep.body_weight[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.body_weight[0] == 0.0);
  CHECK(rep.body_weight[2] == 0.0);
  const auto* cell = rep.find(1, 1);
  REQUIRE(cell != nullptr);
  CHECK(cell->count == 2);
  CHECK(cell->average() == doctest::Approx(0.25));

  oracle::Rng rng(15);
  const auto a = oracle::random_poly(5, 30, rng);
  const auto r = locality_weights(a);
  double total = 0.0;
  for (double w : r.body_weight) total += w;
  CHECK(total == doctest::Approx(a.norm() * a.norm()).epsilon(1e-12));
}

TEST_CASE("adjoint and drop tolerance") {
  auto a = PauliPoly::sigma_plus(2, 2);
  CHECK(oracle::max_abs(to_dense(a.adjoint()) - to_dense(a).adjoint()) < 1e-15);
  a.add(PauliString::from_letters("XX"), 1e-15);
  CHECK(a.size() == 2);
  a -= a;
  CHECK(a.empty());
}

TEST_CASE("json round trip") {
  oracle::Rng rng(16);
  const auto a = oracle::random_poly(4, 10, rng);
  const auto j = to_json(a);
  CHECK(j.is_array());
  CHECK(j.size() == a.size());
  CHECK((poly_from_json(j) - a).norm() == 0.0);
  CHECK(poly_from_json(nlohmann::json::array(), 3).length() == 3);
}
