#pragma once
// Static per-QPU resource accounting for compiled circuits -- Bell-pair
// consumption, peak ancilla occupancy, layered depth, and the derived
// memory estimate -- plus closed-form cost tables for the three
// distribution schemes and a ranked comparison.
//
// Conventions (shared by account() and closed_form()):
//   * bell_pairs counts Bell halves landing on a QPU; both endpoints of a
//     pair count, so one inter-QPU pair adds 1 to each side.
//   * ancilla is the peak number of simultaneously occupied ancilla-kind
//     qubits on any single QPU. A slot is occupied from its first gate
//     until it is measured or explicitly Reset (either releases it for
//     reuse); later gates re-occupy it.
//   * memory_estimate = 3 * bell_pairs + ancilla exactly (raw-to-distilled
//     Bell ratio 3:1, plus one slot per ancilla).

#include <cstdint>
#include <string>
#include <vector>

#include "mpst/circuit.hpp"
#include "mpst/compiler.hpp"

namespace mpst {

// One annotated step's slice of the accounting, under the same
// per-QPU-maximum convention as the report totals.
struct StepCost {
  std::string name;
  std::int32_t depth = 0;
  std::int64_t bell = 0;          // Bell halves landed on the busiest QPU
  std::int32_t ancilla_peak = 0;  // peak occupied ancillas on the busiest QPU
};

struct ResourceReport {
  std::string scheme;  // filled by closed_form/compare; empty from account
  std::int32_t k = 0;
  std::int32_t n = 0;
  std::int32_t ancilla = 0;     // per-QPU peak of occupied ancilla qubits
  std::int64_t bell_pairs = 0;  // per-QPU Bell halves consumed
  std::int32_t depth = 0;  // compute layers (pure BellPrep layers excluded)
  std::int64_t memory_estimate = 0;
  std::vector<StepCost> steps;  // step depths sum to the total depth
  std::int64_t network_bell_total = 0;  // pairs consumed across all QPUs
  std::string depth_note;    // closed-form naive: reference vs achieved depth
  std::string formula_note;  // closed-form naive: expression discrepancies
};

// Walks the circuit once: counts BellPrep halves per QPU, tracks per-layer
// ancilla occupancy (measure and Reset both release a slot after their
// layer), and reports per-QPU maxima plus the same numbers sliced per
// annotated step. Depth follows Circuit::depth(): layers holding only
// BellPrep gates are asynchronous network distribution and are not charged
// as compute depth. Requires a fully lowered circuit (no CSwap / Toffoli /
// Fanout macro gates) whose steps tile the layer range exactly; throws
// std::invalid_argument otherwise.
ResourceReport account(const Circuit& c);

// Analytic per-QPU costs without compiling. The telegate and teledata rows
// are the steady-state interior-QPU costs (k >= 3) and match account() on
// compiled circuits field for field; the naive row uses the exact
// round-trip distribution sum with its coarser textbook variants quoted in
// the notes. Requires n >= 1 and k >= 2.
ResourceReport closed_form(const Scheme& scheme, std::int32_t n,
                           std::int32_t k);

// All three schemes at (n, k), sorted by memory_estimate ascending.
std::vector<ResourceReport> compare(std::int32_t n, std::int32_t k);

}  // namespace mpst
