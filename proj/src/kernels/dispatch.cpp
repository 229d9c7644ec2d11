#include "u1lab/kernels.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <string>

#include "u1lab/error.hpp"

namespace u1lab::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const Isa best = detected_isa();
  if (const char* env = std::getenv("U1LAB_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && best == Isa::avx2) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
  static const Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return isa;
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(std::optional<Isa> isa) {
  if (isa && *isa == Isa::avx2 && detected_isa() != Isa::avx2) {
    throw ConfigError("AVX2/FMA requested but not supported by this CPU");
  }
  selected().store(isa.value_or(initial_isa()), std::memory_order_relaxed);
}

void apply_two_qubit(std::span<std::complex<double>> amps, unsigned bit_a, unsigned bit_b,
                     const Gate4& g) {
  detail::check_two_qubit_args(amps.size(), bit_a, bit_b);
  if (active_isa() == Isa::avx2) {
    avx2::apply_two_qubit(amps, bit_a, bit_b, g);
  } else {
    scalar::apply_two_qubit(amps, bit_a, bit_b, g);
  }
}

void apply_pair_transfer(std::span<double> coeffs, unsigned digit_a, unsigned digit_b,
                         const Transfer16& r) {
  detail::check_pair_args(coeffs.size(), digit_a, digit_b);
  if (active_isa() == Isa::avx2) {
    avx2::apply_pair_transfer(coeffs, digit_a, digit_b, r);
  } else {
    scalar::apply_pair_transfer(coeffs, digit_a, digit_b, r);
  }
}

namespace detail {

void check_two_qubit_args(std::size_t size, unsigned bit_a, unsigned bit_b) {
  if (size < 4 || (size & (size - 1)) != 0) {
    throw DimensionError("amplitude vector length must be a power of two >= 4");
  }
  if (bit_a == bit_b || (std::size_t{1} << bit_a) >= size || (std::size_t{1} << bit_b) >= size) {
    throw DomainError("two-qubit kernel: invalid bit positions");
  }
}

void check_pair_args(std::size_t size, unsigned digit_a, unsigned digit_b) {
  if (size < 16 || (size & (size - 1)) != 0 || (std::countr_zero(size) % 2) != 0) {
    throw DimensionError("coefficient vector length must be a power of four >= 16");
  }
  const unsigned digits = static_cast<unsigned>(std::countr_zero(size)) / 2;
  if (digit_a == digit_b || digit_a >= digits || digit_b >= digits) {
    throw DomainError("pair transfer kernel: invalid digit positions");
  }
}

}  // namespace detail
}  // namespace u1lab::kernels
