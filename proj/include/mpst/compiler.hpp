#pragma once
// Lowers a k-party trace-estimation instance onto a line of k QPUs.
//
// Pipeline: build_swap_test_macro (GHZ fragment + two rounds of macro CSWAPs
// + readout) -> lower_cswap_telegate / lower_cswap_teledata ->
// rewrite_parallel_toffoli (shared-control Toffoli layers -> the fixed
// 32-layer T-depth block) -> optionally expand_fanout. The naive baseline
// (relay-teleport all slices, test locally, teleport back) is built directly.
//
// Layer placement in every pass is explicit: published depth constants come
// from hand-packed windows, so passes never re-schedule existing gates.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mpst/circuit.hpp"
#include "mpst/states.hpp"

namespace mpst {

enum class Variant : std::uint8_t { telegate, teledata, naive };

struct Scheme {
  Variant variant = Variant::telegate;
  bool fanout_expansion = true;
};

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

// Interleaved line order: positions host parties 0, k-1, 1, k-2, ... so that
// both CSWAP rounds act on nearest neighbours.
std::int32_t pos_of_party(std::int32_t party, std::int32_t k);
std::int32_t party_of_pos(std::int32_t pos, std::int32_t k);

// Cat member at a line position: hosts (even positions) keep theirs for the
// whole protocol; odd-position members are the telegate-side copies.
QubitId cat_member(std::int32_t pos);

// Standalone GHZ fragment over k QPUs, padded to depth 9. full_cat keeps one
// member on every QPU (telegate); otherwise only even-position hosts survive
// (teledata), with k == 2 degenerating to a single |+> host and zero pairs.
Circuit build_ghz_prep(std::int32_t k, bool full_cat);

// Macro-level test. run_basis X estimates the real part, Y the imaginary
// part. `observable` is an optional I/X/Y/Z string over party 0's n data
// qubits, measured alongside the X-basis readout (virtual expectation).
Circuit build_swap_test_macro(const PartySpec& spec, const Scheme& scheme,
                              Basis run_basis,
                              const std::string& observable = "");

// Full pipeline for the scheme (naive included).
Circuit build_swap_test(const PartySpec& spec, const Scheme& scheme,
                        Basis run_basis, const std::string& observable = "");

Circuit lower_cswap_telegate(const Circuit& macro);
Circuit lower_cswap_teledata(const Circuit& macro);

// Rewrites each all-Toffoli layer (grouped by shared first control) into the
// 32-layer block when fanout_windows is set, else into the short macro-Fanout
// form whose Fanouts a later expand_fanout turns into windows.
// full_fanout selects the full m-ancilla window over the shaved (m-1)-ancilla
// one; the teledata scheme is accounted with full windows, telegate with
// shaved ones.
Circuit rewrite_parallel_toffoli(const Circuit& lowered, bool fanout_windows,
                                 bool full_fanout);

// Expands remaining macro Fanout gates, each layer with Fanouts becoming one
// 7-layer window block (coexisting gates ride in the window's first layer).
Circuit expand_fanout(const Circuit& c, bool full_fanout = false);

// Naive baseline: party i's slice q is relay-teleported to QPU q, each QPU
// runs one local k-party SWAP test over its s = ceil(n/k)-qubit slices, and
// slices are teleported back. The estimate is the product of per-QPU tests,
// exact for slice-product inputs.
Circuit build_naive_distribution(const PartySpec& spec, Basis run_basis,
                                 bool fanout_expansion,
                                 const std::string& observable = "");

// Standalone fanout gadget on one QPU: control {0,ghz,0} into m data targets.
Circuit build_fanout_gadget(std::int32_t m, bool full = true);

using Pass = std::function<Circuit(const Circuit&)>;
const std::map<std::string, Pass>& pass_registry();

}  // namespace mpst
