#pragma once
// Data-parallel inner loops shared by the dense propagator builder, the
// Heisenberg-picture operator evolution and the dense density-matrix oracle.
//
// Every kernel has a portable scalar reference implementation and an AVX2/FMA
// implementation. The active variant is chosen once at startup from CPUID and
// can be pinned with the environment variable U1LAB_ISA=scalar|avx2 or, in
// tests, with force_isa().

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace u1lab::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best variant supported by the running CPU.
Isa detected_isa();

/// Variant used by the dispatching entry points below.
Isa active_isa();

/// Pins the dispatch target (nullopt restores automatic selection).
/// Requesting avx2 on a CPU without it throws.
void force_isa(std::optional<Isa> isa);

/// Row-major 4x4 complex matrix acting on |ab> with `a` the more significant qubit.
using Gate4 = std::array<std::complex<double>, 16>;

/// Row-major 16x16 real matrix acting on a pair of base-4 digits, pair
/// index 4*digit_a + digit_b.
using Transfer16 = std::array<double, 256>;

/// amps[i] <- sum_j g[(a_i b_i), j] amps[...] for every index, where a/b are
/// the bits at positions bit_a/bit_b (bit 0 least significant). The span
/// length must be a power of two larger than both bit positions, so a
/// column-major 2^n x m block is processed in one call as long as the bits
/// address the row index.
void apply_two_qubit(std::span<std::complex<double>> amps, unsigned bit_a, unsigned bit_b,
                     const Gate4& g);

/// Same contraction over base-4 digits (two bits each) of a real coefficient
/// vector; digit positions count from the least significant digit.
void apply_pair_transfer(std::span<double> coeffs, unsigned digit_a, unsigned digit_b,
                         const Transfer16& r);

namespace scalar {
void apply_two_qubit(std::span<std::complex<double>> amps, unsigned bit_a, unsigned bit_b,
                     const Gate4& g);
void apply_pair_transfer(std::span<double> coeffs, unsigned digit_a, unsigned digit_b,
                         const Transfer16& r);
}  // namespace scalar

namespace avx2 {
void apply_two_qubit(std::span<std::complex<double>> amps, unsigned bit_a, unsigned bit_b,
                     const Gate4& g);
void apply_pair_transfer(std::span<double> coeffs, unsigned digit_a, unsigned digit_b,
                         const Transfer16& r);
}  // namespace avx2

namespace detail {
// Inserts a zero bit at `pos`, shifting higher bits up.
constexpr std::size_t insert_zero(std::size_t v, unsigned pos) {
  const std::size_t low = v & ((std::size_t{1} << pos) - 1);
  return ((v >> pos) << (pos + 1)) | low;
}
// Inserts a zero base-4 digit (two bits) at digit position `pos`.
constexpr std::size_t insert_zero_digit(std::size_t v, unsigned pos) {
  const unsigned shift = 2 * pos;
  const std::size_t low = v & ((std::size_t{1} << shift) - 1);
  return ((v >> shift) << (shift + 2)) | low;
}
void check_two_qubit_args(std::size_t size, unsigned bit_a, unsigned bit_b);
void check_pair_args(std::size_t size, unsigned digit_a, unsigned digit_b);
}  // namespace detail

}  // namespace u1lab::kernels
