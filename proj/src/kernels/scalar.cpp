#include "u1lab/kernels.hpp"

#include <algorithm>

namespace u1lab::kernels::scalar {

using detail::insert_zero;
using detail::insert_zero_digit;

void apply_two_qubit(std::span<std::complex<double>> amps, unsigned bit_a, unsigned bit_b,
                     const Gate4& g) {
  const unsigned lo = std::min(bit_a, bit_b);
  const unsigned hi = std::max(bit_a, bit_b);
  const std::size_t ma = std::size_t{1} << bit_a;
  const std::size_t mb = std::size_t{1} << bit_b;
  const std::size_t groups = amps.size() / 4;
  for (std::size_t k = 0; k < groups; ++k) {
    const std::size_t base = insert_zero(insert_zero(k, lo), hi);
    const std::size_t idx[4] = {base, base | mb, base | ma, base | ma | mb};
    const std::complex<double> in[4] = {amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      std::complex<double> acc = 0.0;
      for (int c = 0; c < 4; ++c) acc += g[4 * r + c] * in[c];
      amps[idx[r]] = acc;
    }
  }
}

void apply_pair_transfer(std::span<double> coeffs, unsigned digit_a, unsigned digit_b,
                         const Transfer16& r) {
  const unsigned lo = std::min(digit_a, digit_b);
  const unsigned hi = std::max(digit_a, digit_b);
  const unsigned sa = 2 * digit_a;
  const unsigned sb = 2 * digit_b;
  const std::size_t groups = coeffs.size() / 16;
  std::size_t idx[16];
  double in[16];
  for (std::size_t k = 0; k < groups; ++k) {
    const std::size_t base = insert_zero_digit(insert_zero_digit(k, lo), hi);
    for (std::size_t p = 0; p < 16; ++p) {
      idx[p] = base | ((p >> 2) << sa) | ((p & 3) << sb);
      in[p] = coeffs[idx[p]];
    }
    for (std::size_t row = 0; row < 16; ++row) {
      double acc = 0.0;
      for (std::size_t c = 0; c < 16; ++c) acc += r[16 * row + c] * in[c];
      coeffs[idx[row]] = acc;
    }
  }
}

}  // namespace u1lab::kernels::scalar
