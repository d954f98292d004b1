#pragma once
// Dense statevector simulator over a dynamic set of live qubits.
//
// Qubits come alive on first touch (|0>) or via BellPrep/initial states, and
// die on Measure (the amplitude axis is contracted away). Touching a dead
// QubitId revives it in |0>. The capacity limit applies to simultaneously
// live qubits.
//
// Deferred-measurement mode keeps measured qubits live (rotated to Z basis)
// and turns classically conditioned corrections into controlled gates; use it
// to check gadget channel identities exactly.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mpst/circuit.hpp"
#include "mpst/noise.hpp"
#include "mpst/rng.hpp"

namespace mpst {

// Low-level kernels on raw amplitude vectors (bit = qubit axis, LSB first).
namespace kernels {
void apply_1q(Eigen::VectorXcd& amps, int bit, const Eigen::Matrix2cd& m);
void apply_cnot(Eigen::VectorXcd& amps, int control, int target);
void apply_cz(Eigen::VectorXcd& amps, int a, int b);
void apply_swap_masked(Eigen::VectorXcd& amps, int control_bit,
                       const std::vector<int>& bits_a,
                       const std::vector<int>& bits_b);
void apply_fanout(Eigen::VectorXcd& amps, int control_bit, std::uint64_t target_mask);
void apply_toffoli(Eigen::VectorXcd& amps, int c1, int c2, int target);
double prob_zero(const Eigen::VectorXcd& amps, int bit);
void collapse(Eigen::VectorXcd& amps, int bit, int outcome, double prob);
const Eigen::Matrix2cd& gate_matrix(GateOp op);
}  // namespace kernels

class StatevectorSim {
 public:
  explicit StatevectorSim(int max_live_qubits = 24, bool defer_measurements = false);

  void set_rng(RngStream r) { rng_ = r; }
  RngStream& rng() { return rng_; }

  // Run a full circuit (initial states applied first) or a single layer.
  void run(const Circuit& c, const NoiseModel& noise);
  void run_layers(const Circuit& c, const NoiseModel& noise,
                  std::int32_t first, std::int32_t last);
  void apply_gate(const Gate& g, const NoiseModel& noise);
  void apply_initial_states(const Circuit& c);

  // State access.
  int num_live() const { return static_cast<int>(slot_qubit_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  bool is_live(const QubitId& q) const { return slot_of_.count(q) != 0; }

  // Prepare a joint state on (fresh) qubits; order gives bit significance
  // (first qubit = least significant amplitude index bit).
  void prepare(const std::vector<QubitId>& qs, const Eigen::VectorXcd& psi);

  // Joint outcome distribution of `qs` in Z basis (others traced out);
  // element index bit i corresponds to qs[i].
  std::vector<double> marginal_probs(const std::vector<QubitId>& qs) const;

  // Fidelity <ideal| rho_sub |ideal> where rho_sub traces everything not in
  // `qs`; ideal's index bit i corresponds to qs[i].
  double fidelity_on(const std::vector<QubitId>& qs, const Eigen::VectorXcd& ideal) const;

  std::vector<std::uint8_t> bits;  // classical record, size num_bits

  void apply_pauli_char(const QubitId& q, char p);  // 'I','X','Y','Z'

 private:
  int slot(const QubitId& q) const;
  int ensure_live(const QubitId& q);
  void add_qubit(const QubitId& q);
  void remove_qubit(const QubitId& q, int outcome);
  void depolarize1(const QubitId& q, double p);
  void depolarize2(const QubitId& a, const QubitId& b, double p);
  int measure_z(const QubitId& q);  // collapse + remove, returns outcome
  bool parity(const ParityExpr& e) const;
  void controlled_from_bits(const ParityExpr& e, const QubitId& target, GateOp pauli);

  void rebind_synthetic(const QubitId& q);  // deferred mode: freeze old axis

  Eigen::VectorXcd amps_;
  std::vector<QubitId> slot_qubit_;
  std::unordered_map<QubitId, int, QubitIdHash> slot_of_;
  std::unordered_map<std::int32_t, QubitId> deferred_bit_qubit_;
  std::unordered_map<QubitId, int, QubitIdHash> deferred_measured_;
  int max_live_;
  bool defer_;
  int synth_counter_ = 0;  // synthetic ids for deferred Reset rebinding
  RngStream rng_;
};

struct RunOptions {
  std::int64_t shots = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = MPST_THREADS env var or hardware concurrency
  int max_live_qubits = 24;
};

struct RunResult {
  std::int64_t shots = 0;
  std::int32_t num_bits = 0;
  std::vector<std::uint8_t> records;  // shots x num_bits, row-major
  std::uint8_t bit(std::int64_t shot, std::int32_t b) const {
    return records[static_cast<std::size_t>(shot) * num_bits + b];
  }
};

int resolve_threads(int requested);

// Samples `shots` runs of the circuit; per-shot counter RNG keyed by seed.
RunResult run_statevector(const Circuit& c, const NoiseModel& noise,
                          const RunOptions& opts);

}  // namespace mpst
