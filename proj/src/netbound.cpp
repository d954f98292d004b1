#include "mpst/netbound.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpst/resources.hpp"

namespace mpst {

namespace {

void check_rate(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(what) +
                                " must be a probability in [0, 1]");
}

// Network teleoperation total at party count k: cat fusion uses
// ceil(k/2) - 1 long-range CNOTs; each of the k - 1 swap rounds consumes
// per_round Bell-mediated operations (3n telegate, 2n teledata).
std::int64_t teleops(std::int32_t k, std::int64_t per_round) {
  return ((k + 1) / 2 - 1) + static_cast<std::int64_t>(k - 1) * per_round;
}

}  // namespace

FidelityBound bell_fidelity_bounds(double p) {
  check_rate(p, "bell depolarizing probability");
  FidelityBound b;
  b.f_cnot = 1.0 - 0.75 * p;
  b.f_toffoli = 1.0 - 0.75 * p;
  b.f_state = 1.0 - 0.5 * p;
  return b;
}

double total_fidelity(const Scheme& scheme, std::int32_t n, double p) {
  if (scheme.variant == Variant::naive)
    throw std::invalid_argument(
        "no network fidelity bound is defined for the naive baseline");
  if (n < 1) throw std::invalid_argument("total_fidelity needs n >= 1");
  check_rate(p, "bell depolarizing probability");
  const auto exponent =
      static_cast<double>(closed_form(scheme, n, 3).bell_pairs);
  return std::pow(1.0 - 0.75 * p, exponent);
}

KBound k_max(double epsilon, std::int32_t n, double p, const Scheme& scheme) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("k_max needs n >= 1");
  check_rate(p, "bell depolarizing probability");
  if (scheme.variant == Variant::naive)
    throw std::invalid_argument(
        "no network fidelity bound is defined for the naive baseline");

  const std::int64_t per_round =
      (scheme.variant == Variant::telegate ? 3 : 2) *
      static_cast<std::int64_t>(n);
  const double f = 1.0 - 0.75 * p;
  const double target = 1.0 - epsilon;
  auto ok = [&](std::int64_t k) {
    return std::pow(f, static_cast<double>(teleops(static_cast<std::int32_t>(
                           std::min<std::int64_t>(k, INT32_MAX)),
                                                   per_round))) >= target;
  };

  KBound out;
  const std::int64_t cap = std::numeric_limits<std::int32_t>::max();
  if (p == 0.0 || ok(cap)) {
    out.k_max = static_cast<std::int32_t>(cap);
    out.diagnostic = "bound never binds at this noise level; capped at the "
                     "integer range";
  } else if (!ok(2)) {
    out.k_max = 1;
    out.diagnostic = "even k = 2 misses the target fidelity";
  } else {
    std::int64_t lo = 2, hi = cap;  // ok(lo), !ok(hi)
    while (hi - lo > 1) {
      std::int64_t mid = lo + (hi - lo) / 2;
      (ok(mid) ? lo : hi) = mid;
    }
    out.k_max = static_cast<std::int32_t>(lo);
  }
  // For the k_max = 1 failure case this reports the k = 2 count that missed.
  out.teleops = teleops(std::max<std::int32_t>(out.k_max, 2), per_round);
  out.exact_bound = std::pow(f, static_cast<double>(out.teleops));
  out.linear_bound = 1.0 - 0.75 * p * static_cast<double>(out.teleops);
  return out;
}

double overall_fidelity_estimate(std::int32_t n, std::int32_t k, double p_ghz,
                                 double p_cswap) {
  if (n < 1 || k < 2)
    throw std::invalid_argument(
        "overall_fidelity_estimate needs n >= 1 and k >= 2");
  check_rate(p_ghz, "measured cat-state error rate");
  check_rate(p_cswap, "measured controlled-swap error rate");
  return (1.0 - p_ghz) * std::pow(1.0 - p_cswap, k - 1);
}

}  // namespace mpst
