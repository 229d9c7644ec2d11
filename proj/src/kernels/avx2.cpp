// Compiled with -mavx2 -mfma; only reached after the dispatcher has verified
// CPU support.
#include <immintrin.h>

#include <algorithm>

#include "u1lab/kernels.hpp"

namespace u1lab::kernels::avx2 {

using detail::insert_zero;
using detail::insert_zero_digit;

namespace {

// (gr + i gi) * v for two packed complex numbers.
inline __m256d cmul2(__m256d gr, __m256d gi, __m256d v) {
  const __m256d swapped = _mm256_permute_pd(v, 0b0101);
  return _mm256_fmaddsub_pd(gr, v, _mm256_mul_pd(gi, swapped));
}

inline __m128d cmul1(__m128d gr, __m128d gi, __m128d v) {
  const __m128d swapped = _mm_permute_pd(v, 0b01);
  return _mm_fmaddsub_pd(gr, v, _mm_mul_pd(gi, swapped));
}

}  // namespace

void apply_two_qubit(std::span<std::complex<double>> amps, unsigned bit_a, unsigned bit_b,
                     const Gate4& g) {
  const unsigned lo = std::min(bit_a, bit_b);
  const unsigned hi = std::max(bit_a, bit_b);
  const std::size_t ma = std::size_t{1} << bit_a;
  const std::size_t mb = std::size_t{1} << bit_b;
  const std::size_t offs[4] = {0, mb, ma, ma | mb};
  const std::size_t groups = amps.size() / 4;
  auto* data = reinterpret_cast<double*>(amps.data());

  if (lo > 0) {
    __m256d gr[16], gi[16];
    for (int e = 0; e < 16; ++e) {
      gr[e] = _mm256_set1_pd(g[e].real());
      gi[e] = _mm256_set1_pd(g[e].imag());
    }
    // Groups k and k+1 differ only in bit 0, so their amplitudes sit next to
    // each other and share one 256-bit register per gate input.
    for (std::size_t k = 0; k < groups; k += 2) {
      const std::size_t base = insert_zero(insert_zero(k, lo), hi);
      __m256d in[4];
      for (int c = 0; c < 4; ++c) in[c] = _mm256_loadu_pd(data + 2 * (base + offs[c]));
      for (int r = 0; r < 4; ++r) {
        __m256d acc = cmul2(gr[4 * r], gi[4 * r], in[0]);
        for (int c = 1; c < 4; ++c) acc = _mm256_add_pd(acc, cmul2(gr[4 * r + c], gi[4 * r + c], in[c]));
        _mm256_storeu_pd(data + 2 * (base + offs[r]), acc);
      }
    }
    return;
  }

  __m128d gr[16], gi[16];
  for (int e = 0; e < 16; ++e) {
    gr[e] = _mm_set1_pd(g[e].real());
    gi[e] = _mm_set1_pd(g[e].imag());
  }
  for (std::size_t k = 0; k < groups; ++k) {
    const std::size_t base = insert_zero(insert_zero(k, lo), hi);
    __m128d in[4];
    for (int c = 0; c < 4; ++c) in[c] = _mm_loadu_pd(data + 2 * (base + offs[c]));
    for (int r = 0; r < 4; ++r) {
      __m128d acc = cmul1(gr[4 * r], gi[4 * r], in[0]);
      for (int c = 1; c < 4; ++c) acc = _mm_add_pd(acc, cmul1(gr[4 * r + c], gi[4 * r + c], in[c]));
      _mm_storeu_pd(data + 2 * (base + offs[r]), acc);
    }
  }
}

void apply_pair_transfer(std::span<double> coeffs, unsigned digit_a, unsigned digit_b,
                         const Transfer16& r) {
  const unsigned lo = std::min(digit_a, digit_b);
  const unsigned hi = std::max(digit_a, digit_b);
  const unsigned sa = 2 * digit_a;
  const unsigned sb = 2 * digit_b;
  std::size_t offs[16];
  for (std::size_t p = 0; p < 16; ++p) offs[p] = ((p >> 2) << sa) | ((p & 3) << sb);
  const std::size_t groups = coeffs.size() / 16;
  double* data = coeffs.data();

  if (lo > 0) {
    // Four consecutive groups differ only in the lowest digit: one register
    // carries the same pair index for all four.
    for (std::size_t k = 0; k < groups; k += 4) {
      const std::size_t base = insert_zero_digit(insert_zero_digit(k, lo), hi);
      __m256d in[16];
      for (int c = 0; c < 16; ++c) in[c] = _mm256_loadu_pd(data + base + offs[c]);
      for (int row = 0; row < 16; ++row) {
        const double* rr = r.data() + 16 * row;
        __m256d acc = _mm256_mul_pd(_mm256_set1_pd(rr[0]), in[0]);
        for (int c = 1; c < 16; ++c) acc = _mm256_fmadd_pd(_mm256_set1_pd(rr[c]), in[c], acc);
        _mm256_storeu_pd(data + base + offs[row], acc);
      }
    }
    return;
  }

  alignas(32) double col[16][16];
  for (int row = 0; row < 16; ++row)
    for (int c = 0; c < 16; ++c) col[c][row] = r[16 * row + c];
  alignas(32) double out[16];
  for (std::size_t k = 0; k < groups; ++k) {
    const std::size_t base = insert_zero_digit(insert_zero_digit(k, lo), hi);
    __m256d acc[4] = {_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd(),
                      _mm256_setzero_pd()};
    for (int c = 0; c < 16; ++c) {
      const __m256d x = _mm256_set1_pd(data[base + offs[c]]);
      for (int q = 0; q < 4; ++q) acc[q] = _mm256_fmadd_pd(x, _mm256_load_pd(&col[c][4 * q]), acc[q]);
    }
    for (int q = 0; q < 4; ++q) _mm256_store_pd(out + 4 * q, acc[q]);
    for (int p = 0; p < 16; ++p) data[base + offs[p]] = out[p];
  }
}

}  // namespace u1lab::kernels::avx2
