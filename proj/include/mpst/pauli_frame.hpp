#pragma once
// Pauli-frame simulator for Clifford circuits (H, S/Sdg, Paulis, CNOT, Fanout,
// Measure, Reset, BellPrep, PauliCorrect). Non-Clifford ops are rejected.
//
// Per shot it tracks the Pauli frame (the net error conjugated through the
// ideal circuit). Measurement records are reference XOR frame-flip XOR
// measurement noise, with references drawn uniformly — exact for the gadget
// family simulated here, where every mid-circuit outcome is maximally random.
// PauliCorrect multiplies the frame by the difference between the correction
// that fired and the one that would have fired noiselessly.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpst/circuit.hpp"
#include "mpst/noise.hpp"
#include "mpst/rng.hpp"

namespace mpst {

class FrameSim {
 public:
  void run(const Circuit& c, const NoiseModel& noise, RngStream rng);

  // Net frame Pauli on a qubit after the run ('I','X','Y','Z').
  char frame_on(const QubitId& q) const;
  std::string frame_string(const std::vector<QubitId>& qs) const;

  std::vector<std::uint8_t> recorded;  // per classical bit
  std::vector<std::uint8_t> flips;     // recorded XOR ideal-reference

 private:
  struct XZ { std::uint8_t x = 0, z = 0; };
  XZ& at(const QubitId& q) { return frames_[q]; }
  void depolarize1(const QubitId& q);
  void depolarize2(const QubitId& a, const QubitId& b);
  bool rec_parity(const ParityExpr& e) const;
  bool flip_parity(const ParityExpr& e) const;

  std::unordered_map<QubitId, XZ, QubitIdHash> frames_;
  RngStream rng_;
  double p1_ = 0, p2_ = 0;
};

struct ErrorHistogram {
  std::int64_t shots = 0;
  std::vector<QubitId> tracked;
  std::unordered_map<std::string, std::int64_t> counts;  // includes identity
};

// Samples shot frames and histograms the net Pauli over `tracked` qubits.
ErrorHistogram run_pauli_frame(const Circuit& c, const NoiseModel& noise,
                               const std::vector<QubitId>& tracked,
                               std::int64_t shots, std::uint64_t seed,
                               int threads = 0);

// CSV rows "pauli_string,count,probability" excluding the identity string,
// sorted by count descending then string ascending.
std::string histogram_csv(const ErrorHistogram& h,
                          const std::vector<std::string>& header_comments = {});

// Most probable non-identity string (empty if none).
std::pair<std::string, double> top_error(const ErrorHistogram& h);

}  // namespace mpst
