#pragma once
// Layered circuit IR for distributed multi-party SWAP-test compilation.
//
// Conventions:
//  - A circuit is a list of layers; gates within a layer act on disjoint
//    qubits, with one exception: Toffolis may share their control (first
//    operand). That shared-control layer is the commuting parallel form the
//    fanout rewrite turns into a constant-depth window.
//  - depth() counts every layer except layers consisting purely of BellPrep
//    gates (entanglement distribution is pipelined off the critical path).
//    Deliberately empty layers count as idle ticks.
//  - Measure frees its qubit. A later gate addressing the same QubitId revives
//    it in |0>; this is what lets ancilla ids be reused across sequential
//    gadgets without extra Reset layers.
//  - Only BellPrep may span two QPUs, and only adjacent ones (linear network).

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace mpst {

// Thrown when a simulation would exceed the live-qubit capacity.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QubitKind : std::uint8_t { data, ghz, ancilla, bell_half };
enum class Basis : std::uint8_t { Z, X, Y };
enum class GateOp : std::uint8_t {
  H, X, Y, Z, S, Sdg, T, Tdg,
  CNOT, Toffoli, CSwap, Fanout,
  Measure, Reset, BellPrep, PauliCorrect,
};
enum class Level : std::uint8_t { macro, lowered, expanded };
enum class Schedule : std::uint8_t { new_layer, earliest };

struct QubitId {
  std::int32_t qpu = 0;
  QubitKind kind = QubitKind::data;
  std::int32_t index = 0;
  friend auto operator<=>(const QubitId&, const QubitId&) = default;
};

struct QubitIdHash {
  std::size_t operator()(const QubitId& q) const noexcept {
    std::uint64_t v = (std::uint64_t(std::uint32_t(q.qpu)) << 34) ^
                      (std::uint64_t(static_cast<std::uint8_t>(q.kind)) << 32) ^
                      std::uint32_t(q.index);
    v ^= v >> 33;
    v *= 0xff51afd7ed558ccdULL;
    v ^= v >> 33;
    return static_cast<std::size_t>(v);
  }
};

// XOR of classical bits; empty list means the constant 0.
struct ParityExpr {
  std::vector<std::int32_t> bits;
  bool empty() const { return bits.empty(); }
};

struct Gate {
  GateOp op = GateOp::H;
  std::vector<QubitId> operands;
  Basis basis = Basis::Z;        // Measure: measurement basis (X/Y carry their
                                 // basis rotation implicitly, one layer total)
  std::int32_t result_bit = -1;  // Measure: classical bit receiving the outcome
  ParityExpr cond_x, cond_z;     // PauliCorrect: applies X^{cond_x} Z^{cond_z}
  ParityExpr condition;          // optional classical control on other ops
};

struct Layer {
  std::vector<Gate> gates;
};

// Post-hoc sampled-error injection site (macro-level black-boxing of gadget
// noise): after executing `layer`, apply a Pauli string over `targets` drawn
// from `histogram` (strings over {I,X,Y,Z}, probabilities sum to <= 1; the
// remainder is identity).
struct Injection {
  std::int32_t layer = 0;
  std::vector<QubitId> targets;
  std::vector<std::pair<std::string, double>> histogram;
};

// Initial joint state for a group of qubits (prepared at simulation start).
struct InitialState {
  std::vector<QubitId> qubits;
  Eigen::VectorXcd amps;
};

struct Circuit {
  static constexpr std::int32_t kFormatVersion = 1;

  std::int32_t k = 0;         // parties
  std::int32_t n = 0;         // qubits per party state
  std::int32_t num_qpus = 1;  // linear network 0..num_qpus-1
  Level level = Level::macro;
  bool fanout_expanded = false;

  std::vector<QubitId> qubits;  // declaration order
  std::vector<Layer> layers;
  std::int32_t num_bits = 0;

  std::vector<InitialState> initial_states;
  std::vector<std::int32_t> parity_bits;  // readout parity set (estimator)
  // Per-QPU parity subsets for schemes whose readout is a product of local
  // tests (naive distribution); empty for the single-test schemes.
  std::vector<std::vector<std::int32_t>> parity_groups;
  std::vector<std::int32_t> obs_bits;     // observable bits (virtual expectation)
  std::vector<Injection> injections;
  // Step tags: (name, first layer, one past last layer).
  std::vector<std::tuple<std::string, std::int32_t, std::int32_t>> steps;

  std::int32_t declare_qubit(const QubitId& q);  // idempotent, returns index
  bool declared(const QubitId& q) const { return declared_.count(q) != 0; }
  std::int32_t new_bit() { return num_bits++; }

  void append(Gate g, Schedule s = Schedule::new_layer);
  // Append `g` into the existing layer with this index (builder use; the layer
  // must not touch g's qubits yet and must respect BellPrep purity).
  void append_at(Gate g, std::int32_t layer_index);
  std::int32_t new_layer() {
    layers.emplace_back();
    return static_cast<std::int32_t>(layers.size()) - 1;
  }

  std::int32_t depth() const;
  void pad_to_depth(std::int32_t d);
  void begin_step(const std::string& name);
  void end_step();

  void validate() const;  // throws std::runtime_error on violation
  void rebuild_index();   // after direct layer edits / deserialization

 private:
  std::unordered_map<QubitId, std::int32_t, QubitIdHash> declared_;
  std::unordered_map<QubitId, std::int32_t, QubitIdHash> last_touch_;
  std::vector<std::int32_t> bit_written_;  // layer index, -1 = never
  std::string open_step_;
  std::int32_t open_step_start_ = 0;

  void note_placement(const Gate& g, std::int32_t layer_index);
};

Circuit new_circuit(int k, int n);

// All qubits a gate addresses.
std::vector<QubitId> gate_qubits(const Gate& g);
bool is_pure_bellprep(const Layer& l);

std::string serialize(const Circuit& c);
Circuit deserialize(const std::string& json_text);

const char* to_string(GateOp op);
const char* to_string(QubitKind k);
const char* to_string(Basis b);
const char* to_string(Level l);

}  // namespace mpst
