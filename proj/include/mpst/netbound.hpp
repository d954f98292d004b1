#pragma once
// Closed-form network-level fidelity bounds for Bell-pair depolarizing noise
// and the composed overall fidelity estimate, plus the largest party count
// that keeps the total bound above a target.

#include <cstdint>
#include <string>

#include "mpst/compiler.hpp"

namespace mpst {

// Per-operation lower bounds under a Bell pair depolarized with
// probability p: the teleported CNOT (and Toffoli, same shell twice) keep
// fidelity >= 1 - 3p/4; a teleported state keeps >= 1 - p/2.
struct FidelityBound {
  double f_cnot = 1.0;
  double f_toffoli = 1.0;
  double f_state = 1.0;
};

// Throws std::invalid_argument unless p is in [0, 1].
FidelityBound bell_fidelity_bounds(double p);

// Whole-test lower bound per participating QPU: (1 - 3p/4)^(2+6n) for
// telegate, (1 - 3p/4)^(2+4n) for teledata; the exponents are exactly the
// per-QPU Bell counts reported by resources::closed_form. The naive
// baseline has no such bound and throws std::invalid_argument.
double total_fidelity(const Scheme& scheme, std::int32_t n, double p);

struct KBound {
  std::int32_t k_max = 1;
  std::int64_t teleops = 0;    // network teleoperation count at k_max
  double exact_bound = 1.0;    // (1 - 3p/4)^teleops
  double linear_bound = 1.0;   // 1 - (3p/4) * teleops (Bernoulli form)
  std::string diagnostic;      // non-empty when even k = 2 misses the target
};

// Largest k with (1 - 3p/4)^T(k) >= 1 - epsilon, where the network
// teleoperation total T(k) counts ceil(k/2) - 1 long-range cat-fusion CNOTs
// plus (k - 1) swap rounds at 3n (telegate) or 2n (teledata) Bell-mediated
// operations each. Exact integer search on the product bound; the
// linearized value is reported alongside. Returns k_max = 1 with a
// diagnostic when k = 2 already misses; p = 0 never binds and reports the
// integer-range cap.
KBound k_max(double epsilon, std::int32_t n, double p, const Scheme& scheme);

// Composed lower bound from measured error rates:
// (1 - p_ghz) * (1 - p_cswap)^(k-1); n tags the p_cswap measurement and is
// validated only. Throws std::invalid_argument for rates outside [0, 1].
double overall_fidelity_estimate(std::int32_t n, std::int32_t k, double p_ghz,
                                 double p_cswap);

}  // namespace mpst
