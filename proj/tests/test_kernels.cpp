#include <doctest.h>

#include <vector>

#include "support/oracles.hpp"
#include "u1lab/error.hpp"
#include "u1lab/kernels.hpp"

using namespace u1lab;
namespace k = u1lab::kernels;

namespace {

bool have_avx2() { return k::detected_isa() == k::Isa::avx2; }

k::Gate4 random_gate(oracle::Rng& rng) {
  k::Gate4 g;
  for (auto& x : g) x = rng.complex_normal();
  return g;
}

k::Transfer16 random_transfer(oracle::Rng& rng) {
  k::Transfer16 r;
  for (auto& x : r) x = rng.uniform(-1, 1);
  return r;
}

// Straight loop over every index with the (a, b) bits cleared.
std::vector<cplx> naive_two_qubit(std::vector<cplx> v, unsigned ba, unsigned bb, const k::Gate4& g) {
  const std::size_t ma = std::size_t{1} << ba, mb = std::size_t{1} << bb;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & (ma | mb)) continue;
    const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};
    cplx in[4], out[4] = {};
    for (int j = 0; j < 4; ++j) in[j] = v[idx[j]];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) out[r] += g[static_cast<std::size_t>(4 * r + c)] * in[c];
    for (int j = 0; j < 4; ++j) v[idx[j]] = out[j];
  }
  return v;
}

std::vector<double> naive_pair(std::vector<double> v, unsigned da, unsigned db, const k::Transfer16& r) {
  const std::size_t sa = std::size_t{1} << (2 * da), sb = std::size_t{1} << (2 * db);
  const std::size_t mask = 3 * sa | 3 * sb;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & mask) continue;
    double in[16], out[16] = {};
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) in[4 * a + b] = v[i + a * sa + b * sb];
    for (int x = 0; x < 16; ++x)
      for (int y = 0; y < 16; ++y) out[x] += r[static_cast<std::size_t>(16 * x + y)] * in[y];
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) v[i + a * sa + b * sb] = out[4 * a + b];
  }
  return v;
}

}  // namespace

TEST_CASE("two-qubit kernel variants agree with the naive loop") {
  oracle::Rng rng(31);
  for (unsigned n = 2; n <= 7; ++n) {
    for (unsigned ba = 0; ba < n; ++ba) {
      for (unsigned bb = 0; bb < n; ++bb) {
        if (ba == bb) continue;
        std::vector<cplx> v(std::size_t{1} << n);
        for (auto& x : v) x = rng.complex_normal();
        const auto g = random_gate(rng);
        const auto ref = naive_two_qubit(v, ba, bb, g);
        auto s = v;
        k::scalar::apply_two_qubit(s, ba, bb, g);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(s[i] - ref[i]) < 1e-13);
        if (have_avx2()) {
          auto a = v;
          k::avx2::apply_two_qubit(a, ba, bb, g);
          for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(a[i] - s[i]) < 1e-13);
        }
      }
    }
  }
}

TEST_CASE("pair transfer kernel variants agree with the naive loop") {
  oracle::Rng rng(32);
  for (unsigned n = 2; n <= 5; ++n) {
    for (unsigned da = 0; da < n; ++da) {
      for (unsigned db = 0; db < n; ++db) {
        if (da == db) continue;
        std::vector<double> v(std::size_t{1} << (2 * n));
        for (auto& x : v) x = rng.uniform(-1, 1);
        const auto r = random_transfer(rng);
        const auto ref = naive_pair(v, da, db, r);
        auto s = v;
        k::scalar::apply_pair_transfer(s, da, db, r);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(s[i] - ref[i]) < 1e-13);
        if (have_avx2()) {
          auto a = v;
          k::avx2::apply_pair_transfer(a, da, db, r);
          for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(a[i] - s[i]) < 1e-13);
        }
      }
    }
  }
}

TEST_CASE("dispatch and argument checks") {
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::force_isa(std::nullopt);
  CHECK(k::active_isa() == k::detected_isa());
  std::vector<cplx> v(8);
  CHECK_THROWS_AS(k::apply_two_qubit(v, 1, 1, k::Gate4{}), DomainError);
  CHECK_THROWS_AS(k::apply_two_qubit(v, 0, 3, k::Gate4{}), DomainError);
  std::vector<cplx> bad(6);
  CHECK_THROWS_AS(k::apply_two_qubit(bad, 0, 1, k::Gate4{}), DimensionError);
  std::vector<double> c(32);
  CHECK_THROWS_AS(k::apply_pair_transfer(c, 0, 1, k::Transfer16{}), DimensionError);
}
