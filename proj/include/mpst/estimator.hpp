#pragma once
// Monte-Carlo estimators over shot streams: the multiplicative trace
// Tr(rho_1 ... rho_k), Renyi entropies, Newton-Girard entanglement
// spectroscopy, virtual-distillation expectation values, and the
// classical-fidelity metric used by the noise studies.
//
// Sign calibration (frozen): the X-basis run's mean cat parity estimates
// +Re Tr(rho_1...rho_k) and the Y-basis run's mean cat parity estimates
// -Im Tr(rho_1...rho_k), independent of k, n and scheme. The assignment was
// fixed once against oracle_trace on |0..0> inputs, a k=2 phase sweep and a
// k=3 chirality test, and is not re-derived at runtime.
//
// Circuits whose readout declares parity groups (one local test per QPU) are
// combined as a product of per-group complex estimates; ungrouped readouts
// are a single global test. Either way the estimator needs only the circuit's
// own annotations, not the scheme that produced it.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mpst/circuit.hpp"
#include "mpst/compiler.hpp"
#include "mpst/noise.hpp"
#include "mpst/states.hpp"

namespace mpst {

struct TraceEstimate {
  double re = 0.0;
  double im = 0.0;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::int64_t shots_per_basis = 0;
  double sign_calibration_x = +1.0;  // X-run parity -> +Re
  double sign_calibration_y = -1.0;  // Y-run parity -> -Im
};

struct EstimateOptions {
  std::int64_t shots = 100000;  // per basis
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = MPST_THREADS env var or hardware concurrency
  int max_live_qubits = 24;
};

// Compiles and runs the X- and Y-basis circuits (opts.shots each) and folds
// the calibrated parity means into a complex trace estimate. Noiseless,
// injection-free runs use an exact-marginal fast path; anything else runs one
// full statevector simulation per shot. Both paths draw ensemble members per
// shot from the same counter-based streams, so results are independent of
// thread count.
TraceEstimate estimate_trace(const PartySpec& spec, const Scheme& scheme,
                             const NoiseModel& noise,
                             const EstimateOptions& opts);

// Exact Tr(rho_1 rho_2 ... rho_k) by dense products; when every input is
// pure the cyclic inner-product chain prod_i <psi_i|psi_{i+1}> is evaluated
// as a cross-check (they must agree to 1e-12). Throws CapacityError for
// n > 10.
std::complex<double> oracle_trace(const PartySpec& spec);

struct EntropyEstimate {
  double value = 0.0;         // bits (log base 2)
  double stderr_value = 0.0;  // delta-method propagation from the trace
  TraceEstimate trace;
};

// S_order(rho) = log2(Tr(rho^order)) / (1 - order) from an `order`-party run
// on identical copies. Throws std::runtime_error when the estimated trace is
// <= 0 (entropy undefined, typically under noise).
EntropyEstimate renyi_entropy(const StateSpec& rho, std::int32_t order,
                              const Scheme& scheme, const NoiseModel& noise,
                              const EstimateOptions& opts);

struct Spectrum {
  std::vector<double> eigenvalues;  // descending, clipped to [0, 1]
  double residual = 0.0;            // max |Im root| before clipping
  bool ill_conditioned = false;     // residual beyond 1e-6 * max(1, |root|)
  std::vector<double> power_sums;   // p_1..p_max (p_1 = 1 by normalization)
};

// Estimates power sums p_m = Tr(rho^m) for m = 2..max_order (one trace run
// each, seeds decorrelated per order), then inverts them through Newton's
// identities and a companion-matrix root solve.
Spectrum entanglement_spectrum(const StateSpec& rho, std::int32_t max_order,
                               const Scheme& scheme, const NoiseModel& noise,
                               const EstimateOptions& opts);

// Exact inversion path: power_sums = [p_1, p_2, ..., p_M] -> spectrum.
Spectrum spectrum_from_power_sums(const std::vector<double>& power_sums);

struct VirtualExpectation {
  double value = 0.0;  // Tr(O rho^copies) / Tr(rho^copies)
  double stderr_value = 0.0;
  double numerator = 0.0;  // parity * observable mean (calibrated)
  double denominator = 0.0;
  double stderr_num = 0.0;
  double stderr_den = 0.0;
};

// Virtual-distillation expectation <O> on chi ~ rho^copies: the Pauli string
// O rides the X-basis readout on the first party's state qubits; numerator
// and denominator come from the same shot stream so their covariance cancels
// in the delta-method error. Throws std::runtime_error when any denominator
// factor is within 3 standard errors of zero (ill-conditioned ratio).
VirtualExpectation virtual_expectation(const StateSpec& rho,
                                       const std::string& observable,
                                       std::int32_t copies,
                                       const Scheme& scheme,
                                       const NoiseModel& noise,
                                       const EstimateOptions& opts);

// Fraction of noisy-run readout records (over the circuit's parity bits)
// that land in the support of the noiseless outcome distribution.
double classical_fidelity(const Circuit& c, const NoiseModel& noise,
                          const EstimateOptions& opts);

}  // namespace mpst
