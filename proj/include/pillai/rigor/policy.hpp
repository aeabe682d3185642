#pragma once

#include <cstdint>
#include <optional>
#include <type_traits>
#include <string>

#include "pillai/error.hpp"
#include "pillai/rigor/ball.hpp"

namespace pillai {

/// Precision schedule for computations that retry until decidable:
/// initial_bits, then initial_bits * growth, ... capped by max_bits.
struct PrecisionPolicy {
  mpfr_prec_t initial_bits = 192;
  mpfr_prec_t max_bits = mpfr_prec_t{1} << 16;
  std::uint32_t growth_num = 2;
  std::uint32_t growth_den = 1;

  static PrecisionPolicy make(mpfr_prec_t initial, mpfr_prec_t max, std::uint32_t num = 2, std::uint32_t den = 1) {
    PrecisionPolicy p{initial, max, num, den};
    p.validate();
    return p;
  }

  void validate() const {
    if (initial_bits < MPFR_PREC_MIN || max_bits < MPFR_PREC_MIN)
      throw Error(ErrorKind::InvalidArgument, "precision must be positive");
    if (initial_bits > max_bits)
      throw Error(ErrorKind::InvalidArgument, "initial_bits exceeds max_bits");
    if (growth_den == 0 || growth_num <= growth_den)
      throw Error(ErrorKind::InvalidArgument, "growth factor must be a rational > 1");
  }

  /// Next precision in the schedule (strictly larger than `bits`).
  mpfr_prec_t next(mpfr_prec_t bits) const {
    const auto grown = static_cast<mpfr_prec_t>(
        (static_cast<std::int64_t>(bits) * growth_num + growth_den - 1) / growth_den);
    return grown > bits ? grown : bits + 1;
  }

  /// Same schedule, but never starting below `bits`.
  PrecisionPolicy starting_at_least(mpfr_prec_t bits) const {
    PrecisionPolicy p = *this;
    if (p.initial_bits < bits) p.initial_bits = std::min(bits, max_bits);
    return p;
  }
};

/// Runs `computation(bits)` at increasing precision until it returns a value.
/// The computation signals "undecidable at this precision" with std::nullopt.
template <class F>
auto with_refinement(F&& computation, const PrecisionPolicy& policy, const std::string& what = "computation")
    -> typename std::invoke_result_t<F, mpfr_prec_t>::value_type {
  mpfr_prec_t bits = policy.initial_bits;
  mpfr_prec_t last_tried = 0;
  while (bits <= policy.max_bits && policy.initial_bits <= policy.max_bits) {
    if (auto r = computation(bits)) return std::move(*r);
    last_tried = bits;
    bits = policy.next(bits);
    if (bits > policy.max_bits && last_tried < policy.max_bits) bits = policy.max_bits;
  }
  throw Error(ErrorKind::PrecisionExhausted,
              what + " still undecidable at max_bits = " + std::to_string(policy.max_bits));
}

}  // namespace pillai
