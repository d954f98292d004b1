#include "mpst/resources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mpst {

namespace {

bool is_macro_op(GateOp op) {
  return op == GateOp::CSwap || op == GateOp::Toffoli || op == GateOp::Fanout;
}

std::int64_t max_value(const std::unordered_map<std::int32_t, std::int64_t>& m) {
  std::int64_t best = 0;
  for (const auto& [qpu, v] : m) best = std::max(best, v);
  return best;
}

}  // namespace

ResourceReport account(const Circuit& c) {
  if (c.steps.empty())
    throw std::invalid_argument(
        "resource accounting requires step-annotated circuits");
  // Steps must tile the layer range exactly (sorted, contiguous, complete).
  auto steps = c.steps;
  std::sort(steps.begin(), steps.end(), [](const auto& a, const auto& b) {
    return std::get<1>(a) < std::get<1>(b);
  });
  std::int32_t cursor = 0;
  for (const auto& [name, first, last] : steps) {
    if (first != cursor || last < first)
      throw std::invalid_argument(
          "resource accounting requires steps that tile the circuit (gap or "
          "overlap at layer " + std::to_string(cursor) + ")");
    cursor = last;
  }
  if (cursor != static_cast<std::int32_t>(c.layers.size()))
    throw std::invalid_argument(
        "resource accounting requires steps covering every layer");

  ResourceReport r;
  r.k = c.k;
  r.n = c.n;
  // Depth counts compute layers; pure BellPrep layers are asynchronous
  // network distribution and are excluded (the Circuit::depth convention).
  r.depth = c.depth();

  std::unordered_map<std::int32_t, std::int64_t> halves;    // per QPU
  std::unordered_map<std::int32_t, std::int64_t> occupied;  // per QPU, live
  std::unordered_set<QubitId, QubitIdHash> live;
  std::int64_t anc_peak = 0;

  std::size_t step_idx = 0;
  std::unordered_map<std::int32_t, std::int64_t> step_halves;
  std::int64_t step_anc_peak = 0;

  auto step_depth = [&](std::int32_t first, std::int32_t last) {
    std::int32_t d = 0;
    for (std::int32_t L = first; L < last; ++L)
      if (!is_pure_bellprep(c.layers[L])) ++d;
    return d;
  };

  auto flush_step = [&]() {
    const auto& [name, first, last] = steps[step_idx];
    StepCost sc;
    sc.name = name;
    sc.depth = step_depth(first, last);
    sc.bell = max_value(step_halves);
    sc.ancilla_peak = static_cast<std::int32_t>(step_anc_peak);
    r.steps.push_back(std::move(sc));
    step_halves.clear();
    step_anc_peak = 0;
    ++step_idx;
  };

  for (std::int32_t L = 0; L < static_cast<std::int32_t>(c.layers.size());
       ++L) {
    while (std::get<2>(steps[step_idx]) == L) flush_step();  // empty steps
    std::vector<QubitId> released;
    for (const Gate& g : c.layers[L].gates) {
      if (is_macro_op(g.op))
        throw std::invalid_argument(
            "resource accounting requires fully lowered circuits (found a "
            "macro gate)");
      if (g.op == GateOp::BellPrep) {
        r.network_bell_total += 1;
        for (const QubitId& q : g.operands) {
          halves[q.qpu] += 1;
          step_halves[q.qpu] += 1;
        }
      }
      for (const QubitId& q : g.operands) {
        if (q.kind != QubitKind::ancilla) continue;
        if (live.insert(q).second) occupied[q.qpu] += 1;
        // Measure and Reset both hand the slot back after this layer.
        if (g.op == GateOp::Measure || g.op == GateOp::Reset)
          released.push_back(q);
      }
    }
    for (const auto& [qpu, occ] : occupied) {
      anc_peak = std::max(anc_peak, occ);
      step_anc_peak = std::max(step_anc_peak, occ);
    }
    for (const QubitId& q : released)
      if (live.erase(q)) occupied[q.qpu] -= 1;
  }
  while (step_idx < steps.size()) flush_step();

  r.ancilla = static_cast<std::int32_t>(anc_peak);
  r.bell_pairs = max_value(halves);
  r.memory_estimate = 3 * r.bell_pairs + r.ancilla;
  return r;
}

ResourceReport closed_form(const Scheme& scheme, std::int32_t n,
                           std::int32_t k) {
  if (n < 1 || k < 2)
    throw std::invalid_argument("closed_form needs n >= 1 and k >= 2");
  ResourceReport r;
  r.scheme = to_string(scheme.variant);
  r.k = k;
  r.n = n;
  switch (scheme.variant) {
    case Variant::telegate: {
      // Interior QPU: 2 cat halves + per round 3 pairs per qubit (stage-1
      // CNOT, gate-teleport shell, stage-3 CNOT); windows reuse n-1
      // ancillas next to the held cat copy.
      r.ancilla = n;
      r.bell_pairs = 2 + 6 * static_cast<std::int64_t>(n);
      r.steps = {{"ghz_prep", 9, 2, 1},
                 {"round_1", 44, 3 * static_cast<std::int64_t>(n), n},
                 {"round_2", 44, 3 * static_cast<std::int64_t>(n), n},
                 {"readout", 2, 0, 1}};
      r.network_bell_total =
          static_cast<std::int64_t>(k - 1) * (3 * static_cast<std::int64_t>(n) + 1);
      break;
    }
    case Variant::teledata: {
      // Host QPU: 2 cat halves + per round 2 pairs per qubit (state in,
      // state out); n guest slots + n fanout ancillas occupied at the peak.
      r.ancilla = 2 * n;
      r.bell_pairs = 2 + 4 * static_cast<std::int64_t>(n);
      r.steps = {{"ghz_prep", 9, 2, 1},
                 {"round_1", 42, 2 * static_cast<std::int64_t>(n), 2 * n},
                 {"round_2", 42, 2 * static_cast<std::int64_t>(n), 2 * n},
                 {"readout", 2, 0, 0}};
      r.network_bell_total =
          ((k - 1) / 2) * 2 +
          2 * static_cast<std::int64_t>(n) * (k - 1);
      break;
    }
    case Variant::naive: {
      const std::int32_t s = (n + k - 1) / k;  // slice width per QPU
      const std::int32_t lo = n / k;
      std::int64_t one_way = 0;
      for (std::int32_t j = lo; j <= n - 1; ++j) one_way += j;
      r.ancilla = 0;
      r.bell_pairs = 2 * one_way;
      // Exact network-wide count for the compiled distribution: each moved
      // slice qubit costs one pair per line hop, out and back.
      std::int64_t net = 0;
      for (std::int32_t p = 0; p < k; ++p)
        for (std::int32_t j = 0; j < n; ++j) net += std::abs(j / s - p);
      r.network_bell_total = 2 * net;
      r.steps = {{"distribute", 7, 0, 0},
                 {"round_1", 34, 0, 0},
                 {"round_2", 34, 0, 0},
                 {"readout", 2, 0, 0},
                 {"return", 3, 0, 0}};
      const std::int64_t m = lo;
      const std::int64_t coarse =
          static_cast<std::int64_t>(n) * (n + 1) - m * (m + 1);
      r.depth_note =
          "reference depth constant 76; this pipeline's two-round profile "
          "totals 80 layers (explicit chain-correction and return layers)";
      r.formula_note =
          "round-trip Bell count uses the exact sum 2*sum_{j=" +
          std::to_string(lo) + "}^{" + std::to_string(n - 1) + "} j = " +
          std::to_string(r.bell_pairs) + "; the coarser expression n(n+1) - "
          "m(m+1) with m = floor(n/k) gives " + std::to_string(coarse) +
          " (summation limits shifted up by one), and memory is commonly "
          "approximated as 3n^2 = " + std::to_string(3 * n * n) +
          "; the reference row books no ancillas, while account() on the "
          "compiled pipeline reports its true small ancilla peak";
      break;
    }
  }
  std::int32_t depth = 0;
  for (const auto& sc : r.steps) depth += sc.depth;
  r.depth = depth;
  r.memory_estimate = 3 * r.bell_pairs + r.ancilla;
  return r;
}

std::vector<ResourceReport> compare(std::int32_t n, std::int32_t k) {
  std::vector<ResourceReport> out;
  for (Variant v : {Variant::teledata, Variant::telegate, Variant::naive})
    out.push_back(closed_form(Scheme{v, true}, n, k));
  std::stable_sort(out.begin(), out.end(),
                   [](const ResourceReport& a, const ResourceReport& b) {
                     return a.memory_estimate < b.memory_estimate;
                   });
  return out;
}

}  // namespace mpst
