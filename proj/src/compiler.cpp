#include "mpst/compiler.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace mpst {

namespace {

// --- gate constructors ------------------------------------------------------

Gate g1(GateOp op, const QubitId& q) {
  Gate g;
  g.op = op;
  g.operands = {q};
  return g;
}

Gate gcnot(const QubitId& c, const QubitId& t) {
  Gate g;
  g.op = GateOp::CNOT;
  g.operands = {c, t};
  return g;
}

Gate gmeasure(const QubitId& q, Basis b, std::int32_t bit) {
  Gate g;
  g.op = GateOp::Measure;
  g.operands = {q};
  g.basis = b;
  g.result_bit = bit;
  return g;
}

// Operands ordered [even-numbered QPU, odd-numbered QPU]; the second operand
// is the transmitted half, the one the p_bell channel acts on.
Gate gbell(const QubitId& a, const QubitId& b) {
  Gate g;
  g.op = GateOp::BellPrep;
  if (a.qpu % 2 == 0)
    g.operands = {a, b};
  else
    g.operands = {b, a};
  return g;
}

Gate gcorrect(const QubitId& q, std::vector<std::int32_t> cx,
              std::vector<std::int32_t> cz) {
  Gate g;
  g.op = GateOp::PauliCorrect;
  g.operands = {q};
  g.cond_x.bits = std::move(cx);
  g.cond_z.bits = std::move(cz);
  return g;
}

std::int32_t ceil_div(std::int32_t a, std::int32_t b) { return (a + b - 1) / b; }

std::int32_t next_bell_index(const Circuit& c) {
  std::int32_t n = 0;
  for (const auto& q : c.qubits)
    if (q.kind == QubitKind::bell_half) n = std::max(n, q.index + 1);
  return n;
}

// --- measurement-based fanout window ----------------------------------------

// Places CNOT(control -> each target) into the fixed 7-layer window
// [base, base+7). Full variant: one ancilla per target; ancillas pair up into
// short cluster segments so the whole fanout costs constant depth for any
// target count. Shaved variant: the last target is served by a direct local
// CNOT in the target-copy layer, saving one ancilla; a single-target shaved
// fanout degenerates to that lone CNOT.
//
// Layer roles: L1 |+> on odd ancillas, L2 even links, L3 ancilla->target
// copies, L4 control stitch-in and odd links, L5 measure ancillas (odd in Z,
// even in X), L6 X-corrections on targets (prefix parities of the Z
// outcomes), L7 Z-correction on the control (parity of the X outcomes).
void emit_fanout_window(Circuit& c, std::int32_t base, const QubitId& control,
                        const std::vector<QubitId>& targets,
                        const std::vector<QubitId>& ancillas, bool full) {
  const auto m_all = static_cast<std::int32_t>(targets.size());
  if (!full && m_all == 1) {
    if (!ancillas.empty())
      throw std::logic_error("shaved single-target fanout takes no ancillas");
    c.append_at(gcnot(control, targets[0]), base + 2);
    return;
  }
  const std::int32_t m = full ? m_all : m_all - 1;  // ancilla-served targets
  if (static_cast<std::int32_t>(ancillas.size()) != m)
    throw std::logic_error("fanout window: wrong ancilla count");

  for (std::int32_t j = 1; j <= m; j += 2)
    c.append_at(g1(GateOp::H, ancillas[j - 1]), base + 0);
  for (std::int32_t p = 1; 2 * p <= m; ++p)
    c.append_at(gcnot(ancillas[2 * p - 2], ancillas[2 * p - 1]), base + 1);
  for (std::int32_t j = 1; j <= m; ++j)
    c.append_at(gcnot(ancillas[j - 1], targets[j - 1]), base + 2);
  if (!full) c.append_at(gcnot(control, targets[m_all - 1]), base + 2);
  c.append_at(gcnot(control, ancillas[0]), base + 3);
  for (std::int32_t p = 1; 2 * p + 1 <= m; ++p)
    c.append_at(gcnot(ancillas[2 * p - 1], ancillas[2 * p]), base + 3);

  std::vector<std::int32_t> zbits, xbits;
  for (std::int32_t j = 1; j <= m; ++j) {
    std::int32_t b = c.new_bit();
    (j % 2 == 1 ? zbits : xbits).push_back(b);
    c.append_at(
        gmeasure(ancillas[j - 1], j % 2 == 1 ? Basis::Z : Basis::X, b),
        base + 4);
  }
  for (std::int32_t j = 1; j <= m; ++j) {
    std::vector<std::int32_t> cx(zbits.begin(), zbits.begin() + (j + 1) / 2);
    c.append_at(gcorrect(targets[j - 1], std::move(cx), {}), base + 5);
  }
  if (!xbits.empty()) c.append_at(gcorrect(control, {}, xbits), base + 6);
}

// --- GHZ cat preparation -----------------------------------------------------

// Fuses |+> members on a line into a GHZ cat with one Bell pair per link, all
// links in parallel. full_cat keeps a member on every QPU; otherwise members
// live on 0..last even position and the odd ones are measured back out,
// leaving the cat on the hosts only. Padded to the fixed 9-tick budget.
void emit_ghz(Circuit& c, std::int32_t k, bool full_cat) {
  c.begin_step("ghz_prep");
  const std::int32_t last = full_cat ? k - 1 : ((k - 1) / 2) * 2;
  std::vector<QubitId> members;
  for (std::int32_t j = 0; j <= last; ++j) {
    members.push_back(cat_member(j));
    c.declare_qubit(members.back());
  }
  const std::int32_t links = last;  // link j spans QPUs (j, j+1)
  const std::int32_t bell0 = next_bell_index(c);
  std::vector<QubitId> left(links), right(links);
  if (links > 0) {
    std::int32_t P = c.new_layer();
    for (std::int32_t j = 0; j < links; ++j) {
      left[j] = {j, QubitKind::bell_half, bell0 + j};
      right[j] = {j + 1, QubitKind::bell_half, bell0 + j};
      c.append_at(gbell(left[j], right[j]), P);
    }
  }
  std::int32_t L1 = c.new_layer();
  for (const auto& mqb : members) c.append_at(g1(GateOp::H, mqb), L1);
  if (links > 0) {
    std::int32_t L2 = c.new_layer();
    for (std::int32_t j = 0; j < links; ++j)
      c.append_at(gcnot(members[j], left[j]), L2);
    std::int32_t L3 = c.new_layer();
    for (std::int32_t j = 0; j < links; ++j)
      c.append_at(gcnot(members[j + 1], right[j]), L3);
    std::int32_t L4 = c.new_layer();
    std::vector<std::int32_t> fuse;  // a_0, b_0, a_1, b_1, ...
    for (std::int32_t j = 0; j < links; ++j) {
      std::int32_t a = c.new_bit(), b = c.new_bit();
      c.append_at(gmeasure(left[j], Basis::Z, a), L4);
      c.append_at(gmeasure(right[j], Basis::Z, b), L4);
      fuse.push_back(a);
      fuse.push_back(b);
    }
    // Member j is anti-correlated with member 0 iff an odd number of fusion
    // parities a_i^b_i fired along the way; fold the whole prefix in as one
    // conditional X.
    std::int32_t L5 = c.new_layer();
    for (std::int32_t j = 1; j <= links; ++j) {
      std::vector<std::int32_t> cx(fuse.begin(), fuse.begin() + 2 * j);
      c.append_at(gcorrect(members[j], std::move(cx), {}), L5);
    }
  }
  if (!full_cat && last >= 2) {
    // Measure the odd members out in X; the outcome parity is a Z on any one
    // survivor.
    std::int32_t L6 = c.new_layer();
    std::vector<std::int32_t> rbits;
    for (std::int32_t j = 1; j <= last; j += 2) {
      std::int32_t r = c.new_bit();
      c.append_at(gmeasure(members[j], Basis::X, r), L6);
      rbits.push_back(r);
    }
    std::int32_t L7 = c.new_layer();
    c.append_at(gcorrect(members[0], {}, std::move(rbits)), L7);
  }
  c.pad_to_depth(9);
  c.end_step();
}

// --- readout -----------------------------------------------------------------

void check_observable(std::int32_t n, Basis run_basis,
                      const std::string& observable) {
  if (observable.empty()) return;
  if (run_basis != Basis::X)
    throw std::invalid_argument("observables are measured on the X-basis run");
  if (static_cast<std::int32_t>(observable.size()) != n)
    throw std::invalid_argument(
        "observable needs one character (I/X/Y/Z) per state qubit");
  for (char ch : observable)
    if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z')
      throw std::invalid_argument("observable characters must be I, X, Y, Z");
}

// Two layers: basis rotations, then measurements. X run: every cat member is
// read in X (H + M_Z), and the optional observable is measured alongside on
// the first party's state qubits. Y run: the first member of each group is
// read in Y (Sdg + M_X), the rest in X. `grouped` records per-group parity
// sets (product-of-local-tests readout).
void emit_readout(Circuit& c, const std::vector<std::vector<QubitId>>& groups,
                  bool grouped, Basis run_basis, const std::string& observable,
                  const std::vector<QubitId>& obs_qubits) {
  c.begin_step("readout");
  std::int32_t rot = c.new_layer();
  std::int32_t mea = c.new_layer();
  for (const auto& grp : groups) {
    std::vector<std::int32_t> bits;
    for (std::size_t i = 0; i < grp.size(); ++i) {
      bool ybasis = run_basis == Basis::Y && i == 0;
      c.append_at(g1(ybasis ? GateOp::Sdg : GateOp::H, grp[i]), rot);
      std::int32_t b = c.new_bit();
      c.append_at(gmeasure(grp[i], ybasis ? Basis::X : Basis::Z, b), mea);
      bits.push_back(b);
      c.parity_bits.push_back(b);
    }
    if (grouped) c.parity_groups.push_back(std::move(bits));
  }
  if (run_basis == Basis::X && !observable.empty()) {
    for (std::size_t l = 0; l < observable.size(); ++l) {
      char ch = observable[l];
      if (ch == 'I') {
        c.obs_bits.push_back(-1);  // identity factor, nothing to measure
        continue;
      }
      const QubitId& q = obs_qubits[l];
      if (ch == 'X') c.append_at(g1(GateOp::H, q), rot);
      if (ch == 'Y') c.append_at(g1(GateOp::Sdg, q), rot);
      std::int32_t b = c.new_bit();
      c.append_at(gmeasure(q, ch == 'Y' ? Basis::X : Basis::Z, b), mea);
      c.obs_bits.push_back(b);
    }
  }
  c.end_step();
}

// --- pass plumbing -----------------------------------------------------------

// Metadata-preserving empty shell; declaration order is kept so reports stay
// stable across passes, and classical bit ids stay valid (new ones append).
Circuit shell_of(const Circuit& in) {
  Circuit out;
  out.k = in.k;
  out.n = in.n;
  out.num_qpus = in.num_qpus;
  out.level = in.level;
  out.fanout_expanded = in.fanout_expanded;
  out.num_bits = in.num_bits;
  out.initial_states = in.initial_states;
  out.parity_bits = in.parity_bits;
  out.parity_groups = in.parity_groups;
  out.obs_bits = in.obs_bits;
  for (const auto& q : in.qubits) out.declare_qubit(q);
  return out;
}

void copy_layer(Circuit& out, const Layer& l) {
  std::int32_t L = out.new_layer();
  for (const auto& g : l.gates) out.append_at(g, L);
}

// Remaps step tags and injection sites through the input->output layer map
// and recomputes the level flags from what actually remains in the circuit.
void finish_pass(Circuit& out, const Circuit& in,
                 const std::vector<std::int32_t>& layer_start) {
  for (const auto& [name, first, last] : in.steps)
    out.steps.emplace_back(name, layer_start[first], layer_start[last]);
  for (Injection inj : in.injections) {
    // An injection fires after its layer; keep it after everything that layer
    // became.
    inj.layer = layer_start[inj.layer + 1] - 1;
    out.injections.push_back(std::move(inj));
  }
  bool macro_ops = false;
  for (const auto& l : out.layers)
    for (const auto& g : l.gates)
      if (g.op == GateOp::CSwap || g.op == GateOp::Toffoli ||
          g.op == GateOp::Fanout)
        macro_ops = true;
  out.level = macro_ops ? Level::lowered : Level::expanded;
  out.fanout_expanded = !macro_ops;
}

// Hands out fresh per-QPU ancilla ids, starting past everything declared.
class AncillaAllocator {
 public:
  explicit AncillaAllocator(const Circuit& c) {
    for (const auto& q : c.qubits)
      if (q.kind == QubitKind::ancilla)
        next_[q.qpu] = std::max(next_[q.qpu], q.index + 1);
  }
  std::vector<QubitId> take(std::int32_t qpu, std::int32_t count) {
    std::vector<QubitId> ids;
    std::int32_t& nx = next_[qpu];
    for (std::int32_t i = 0; i < count; ++i)
      ids.push_back({qpu, QubitKind::ancilla, nx++});
    return ids;
  }

 private:
  std::unordered_map<std::int32_t, std::int32_t> next_;
};

// --- shared-control Toffoli block --------------------------------------------

// T^r (r = group size mod 8) as at most two diagonal gates.
std::vector<GateOp> t_power_gates(std::int32_t r) {
  switch (r & 7) {
    case 1: return {GateOp::T};
    case 2: return {GateOp::S};
    case 3: return {GateOp::S, GateOp::T};
    case 4: return {GateOp::Z};
    case 5: return {GateOp::Z, GateOp::T};
    case 6: return {GateOp::Sdg};
    case 7: return {GateOp::Tdg};
    default: return {};
  }
}

// One group of Toffolis sharing control `a` (pairs b_j -> t_j), emitted into
// the fixed 32-layer block at `base`. The four control fan-outs become fanout
// windows; the single-qubit phase gates ride inside the windows on wires the
// window leaves idle (the control is free until the window's stitch-in layer,
// targets outside their own copy layer). The shared control's T^{N mod 8}
// collapses what would be one T per Toffoli into at most two gates.
void emit_toffoli_block(Circuit& out, std::int32_t base, const QubitId& a,
                        const std::vector<QubitId>& bs,
                        const std::vector<QubitId>& ts,
                        const std::vector<QubitId>& wanc, bool full) {
  const std::size_t N = ts.size();
  auto all1 = [&](GateOp op, const std::vector<QubitId>& qs, std::int32_t off) {
    for (const auto& q : qs) out.append_at(g1(op, q), base + off);
  };
  auto cnots = [&](std::int32_t off) {
    for (std::size_t i = 0; i < N; ++i)
      out.append_at(gcnot(bs[i], ts[i]), base + off);
  };
  all1(GateOp::H, ts, 0);
  all1(GateOp::T, bs, 0);
  cnots(1);
  all1(GateOp::Tdg, ts, 2);
  emit_fanout_window(out, base + 3, a, ts, wanc, full);
  auto pw = t_power_gates(static_cast<std::int32_t>(N) % 8);
  for (std::size_t i = 0; i < pw.size(); ++i)
    out.append_at(g1(pw[i], a), base + 3 + static_cast<std::int32_t>(i));
  all1(GateOp::T, ts, 9);
  cnots(10);
  all1(GateOp::Tdg, ts, 11);
  emit_fanout_window(out, base + 11, a, ts, wanc, full);
  all1(GateOp::T, ts, 17);
  all1(GateOp::H, ts, 18);
  emit_fanout_window(out, base + 18, a, bs, wanc, full);
  all1(GateOp::Tdg, bs, 24);
  emit_fanout_window(out, base + 25, a, bs, wanc, full);
}

// Same sequence with macro Fanout placeholders: 12 + p layers, p the widest
// T-power synthesis among the groups sharing the block.
void emit_toffoli_macro_block(Circuit& out, std::int32_t base,
                              std::int32_t pmax, const QubitId& a,
                              const std::vector<QubitId>& bs,
                              const std::vector<QubitId>& ts) {
  const std::size_t N = ts.size();
  auto all1 = [&](GateOp op, const std::vector<QubitId>& qs, std::int32_t off) {
    for (const auto& q : qs) out.append_at(g1(op, q), base + off);
  };
  auto cnots = [&](std::int32_t off) {
    for (std::size_t i = 0; i < N; ++i)
      out.append_at(gcnot(bs[i], ts[i]), base + off);
  };
  auto fanout = [&](const std::vector<QubitId>& tg, std::int32_t off) {
    Gate g;
    g.op = GateOp::Fanout;
    g.operands.push_back(a);
    g.operands.insert(g.operands.end(), tg.begin(), tg.end());
    out.append_at(std::move(g), base + off);
  };
  all1(GateOp::H, ts, 0);
  all1(GateOp::T, bs, 0);
  cnots(1);
  all1(GateOp::Tdg, ts, 2);
  auto pw = t_power_gates(static_cast<std::int32_t>(N) % 8);
  for (std::size_t i = 0; i < pw.size(); ++i)
    out.append_at(g1(pw[i], a), base + 3 + static_cast<std::int32_t>(i));
  const std::int32_t o = 3 + pmax;
  fanout(ts, o);
  all1(GateOp::T, ts, o + 1);
  cnots(o + 2);
  all1(GateOp::Tdg, ts, o + 3);
  fanout(ts, o + 4);
  all1(GateOp::T, ts, o + 5);
  all1(GateOp::H, ts, o + 6);
  fanout(bs, o + 6);
  all1(GateOp::Tdg, bs, o + 7);
  fanout(bs, o + 8);
}

}  // namespace

// --- layout ------------------------------------------------------------------

const char* to_string(Variant v) {
  switch (v) {
    case Variant::telegate: return "telegate";
    case Variant::teledata: return "teledata";
    case Variant::naive: return "naive";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "telegate") return Variant::telegate;
  if (name == "teledata") return Variant::teledata;
  if (name == "naive") return Variant::naive;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::int32_t pos_of_party(std::int32_t party, std::int32_t k) {
  if (party < 0 || party >= k) throw std::out_of_range("party index");
  std::int32_t half = (k + 1) / 2;
  return party < half ? 2 * party : 2 * (k - 1 - party) + 1;
}

std::int32_t party_of_pos(std::int32_t pos, std::int32_t k) {
  if (pos < 0 || pos >= k) throw std::out_of_range("line position");
  return pos % 2 == 0 ? pos / 2 : k - 1 - (pos - 1) / 2;
}

QubitId cat_member(std::int32_t pos) {
  return {pos, pos % 2 == 0 ? QubitKind::ghz : QubitKind::ancilla, 0};
}

// --- builders ----------------------------------------------------------------

Circuit build_ghz_prep(std::int32_t k, bool full_cat) {
  Circuit c = new_circuit(k, 1);
  emit_ghz(c, k, full_cat);
  c.validate();
  return c;
}

Circuit build_swap_test_macro(const PartySpec& spec, const Scheme& scheme,
                              Basis run_basis, const std::string& observable) {
  spec.validate();
  if (scheme.variant == Variant::naive)
    throw std::invalid_argument(
        "the naive baseline is built by build_naive_distribution");
  if (run_basis == Basis::Z)
    throw std::invalid_argument(
        "run basis must be X (real part) or Y (imaginary part)");
  check_observable(spec.n, run_basis, observable);

  const std::int32_t k = spec.k, n = spec.n;
  Circuit c = new_circuit(k, n);

  // Party p sits at line position pos_of_party(p); state qubit l of the ket
  // string maps to data index l, so initial amplitudes list qubits
  // most-significant-first.
  for (std::int32_t p = 0; p < k; ++p) {
    std::int32_t pos = pos_of_party(p, k);
    InitialState st;
    for (std::int32_t l = n - 1; l >= 0; --l)
      st.qubits.push_back({pos, QubitKind::data, l});
    st.amps = spec.states[p].members[0].amps;
    for (std::int32_t l = 0; l < n; ++l)
      c.declare_qubit({pos, QubitKind::data, l});
    c.initial_states.push_back(std::move(st));
  }

  const bool full_cat = scheme.variant == Variant::telegate;
  emit_ghz(c, k, full_cat);

  // Interleaved placement makes both rounds nearest-neighbour: round 1 swaps
  // (even, even+1), round 2 swaps (even-1, even). The even side always
  // contributes the control member and the x register.
  auto emit_round = [&](const char* name, bool first_round) {
    c.begin_step(name);
    std::int32_t L = c.new_layer();
    for (std::int32_t e = first_round ? 0 : 2; e <= k - 1; e += 2) {
      std::int32_t b = first_round ? e + 1 : e - 1;
      if (b > k - 1) continue;
      Gate g;
      g.op = GateOp::CSwap;
      g.operands.push_back(cat_member(e));
      for (std::int32_t l = 0; l < n; ++l)
        g.operands.push_back({e, QubitKind::data, l});
      for (std::int32_t l = 0; l < n; ++l)
        g.operands.push_back({b, QubitKind::data, l});
      c.append_at(std::move(g), L);
    }
    c.end_step();
  };
  emit_round("round_1", true);
  if (k > 2) emit_round("round_2", false);

  std::vector<QubitId> members;
  for (std::int32_t j = 0; j <= k - 1; ++j)
    if (full_cat || j % 2 == 0) members.push_back(cat_member(j));
  std::vector<QubitId> obs_qubits(n);
  for (std::int32_t l = 0; l < n; ++l)
    obs_qubits[l] = {0, QubitKind::data, l};
  emit_readout(c, {members}, /*grouped=*/false, run_basis, observable,
               obs_qubits);
  c.validate();
  return c;
}

// --- CSWAP lowering: telegate -------------------------------------------------

Circuit lower_cswap_telegate(const Circuit& in) {
  if (in.level != Level::macro)
    throw std::invalid_argument("telegate lowering expects a macro circuit");
  Circuit out = shell_of(in);
  std::int32_t bell_ctr = next_bell_index(in);
  std::vector<std::int32_t> layer_start(in.layers.size() + 1, 0);

  for (std::size_t L = 0; L < in.layers.size(); ++L) {
    layer_start[L] = static_cast<std::int32_t>(out.layers.size());
    const Layer& layer = in.layers[L];
    bool any_cswap = std::any_of(
        layer.gates.begin(), layer.gates.end(),
        [](const Gate& g) { return g.op == GateOp::CSwap; });
    if (!any_cswap) {
      copy_layer(out, layer);
      continue;
    }

    struct Job {
      QubitId block_ctrl;                // cat copy on the odd side
      std::vector<QubitId> xs, ys;       // data registers (even / odd side)
      std::vector<QubitId> e1a, e1b;     // leading-CNOT pair halves
      std::vector<QubitId> ua, vb;       // shell pair halves
      std::vector<QubitId> e3a, e3b;     // trailing-CNOT pair halves
    };
    std::vector<Job> jobs;
    for (const Gate& g : layer.gates) {
      if (g.op != GateOp::CSwap)
        throw std::invalid_argument("round layers must be pure CSwap layers");
      Job j;
      const auto nn = static_cast<std::int32_t>((g.operands.size() - 1) / 2);
      j.xs.assign(g.operands.begin() + 1, g.operands.begin() + 1 + nn);
      j.ys.assign(g.operands.begin() + 1 + nn, g.operands.end());
      const std::int32_t A = j.xs[0].qpu, B = j.ys[0].qpu;
      j.block_ctrl = {B, QubitKind::ancilla, 0};
      if (!out.declared(j.block_ctrl))
        throw std::invalid_argument(
            "telegate lowering needs a cat copy on every odd position; "
            "build the GHZ fragment with the full cat");
      for (std::int32_t l = 0; l < nn; ++l) {
        j.e1a.push_back({A, QubitKind::bell_half, bell_ctr});
        j.e1b.push_back({B, QubitKind::bell_half, bell_ctr});
        ++bell_ctr;
      }
      for (std::int32_t l = 0; l < nn; ++l) {
        j.ua.push_back({A, QubitKind::bell_half, bell_ctr});
        j.vb.push_back({B, QubitKind::bell_half, bell_ctr});
        ++bell_ctr;
      }
      for (std::int32_t l = 0; l < nn; ++l) {
        j.e3a.push_back({A, QubitKind::bell_half, bell_ctr});
        j.e3b.push_back({B, QubitKind::bell_half, bell_ctr});
        ++bell_ctr;
      }
      jobs.push_back(std::move(j));
    }

    auto each = [&](auto&& fn) {
      for (auto& j : jobs)
        for (std::size_t l = 0; l < j.xs.size(); ++l) fn(j, l);
    };

    // Leading CNOT(y -> x), gate-teleported through one pair per qubit.
    std::int32_t P1 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(gbell(j.e1a[l], j.e1b[l]), P1); });
    std::int32_t r0 = out.new_layer(), r1 = out.new_layer(), r2 = out.new_layer();
    each([&](Job& j, std::size_t l) {
      out.append_at(gcnot(j.ys[l], j.e1b[l]), r0);
      out.append_at(gcnot(j.e1a[l], j.xs[l]), r0);
      std::int32_t a = out.new_bit(), b = out.new_bit();
      out.append_at(gmeasure(j.e1b[l], Basis::Z, a), r1);
      out.append_at(gmeasure(j.e1a[l], Basis::X, b), r1);
      out.append_at(gcorrect(j.xs[l], {a}, {}), r2);
      out.append_at(gcorrect(j.ys[l], {}, {b}), r2);
    });

    // Shell in: copy the second controls x onto the odd side (computational-
    // basis copy through half a pair), so the whole Toffoli block runs there.
    std::int32_t P2 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(gbell(j.ua[l], j.vb[l]), P2); });
    std::int32_t s0 = out.new_layer(), s1 = out.new_layer(), s2 = out.new_layer();
    each([&](Job& j, std::size_t l) {
      out.append_at(gcnot(j.xs[l], j.ua[l]), s0);
      std::int32_t cb = out.new_bit();
      out.append_at(gmeasure(j.ua[l], Basis::Z, cb), s1);
      out.append_at(gcorrect(j.vb[l], {cb}, {}), s2);
    });

    // Shared-control Toffolis, expanded into the T-depth block by the
    // parallel-Toffoli rewrite. The two block fan-outs onto the shell copies
    // cancel in the computational basis, so the copies stay faithful.
    std::int32_t tb = out.new_layer();
    each([&](Job& j, std::size_t l) {
      Gate t;
      t.op = GateOp::Toffoli;
      t.operands = {j.block_ctrl, j.vb[l], j.ys[l]};
      out.append_at(std::move(t), tb);
    });

    // Shell out: X-measure the copies; the outcome is a Z on the originals.
    std::int32_t o0 = out.new_layer(), o1 = out.new_layer(), o2 = out.new_layer();
    each([&](Job& j, std::size_t l) {
      std::int32_t mb = out.new_bit();
      out.append_at(gmeasure(j.vb[l], Basis::X, mb), o0);
      out.append_at(gcorrect(j.xs[l], {}, {mb}), o1);
      out.append_at(g1(GateOp::Reset, j.vb[l]), o2);
    });

    // Trailing CNOT(y -> x).
    std::int32_t P3 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(gbell(j.e3a[l], j.e3b[l]), P3); });
    std::int32_t q0 = out.new_layer(), q1 = out.new_layer(), q2 = out.new_layer();
    each([&](Job& j, std::size_t l) {
      out.append_at(gcnot(j.ys[l], j.e3b[l]), q0);
      out.append_at(gcnot(j.e3a[l], j.xs[l]), q0);
      std::int32_t a = out.new_bit(), b = out.new_bit();
      out.append_at(gmeasure(j.e3b[l], Basis::Z, a), q1);
      out.append_at(gmeasure(j.e3a[l], Basis::X, b), q1);
      out.append_at(gcorrect(j.xs[l], {a}, {}), q2);
      out.append_at(gcorrect(j.ys[l], {}, {b}), q2);
    });
  }
  layer_start[in.layers.size()] = static_cast<std::int32_t>(out.layers.size());
  finish_pass(out, in, layer_start);
  out.validate();
  return out;
}

// --- CSWAP lowering: teledata --------------------------------------------------

Circuit lower_cswap_teledata(const Circuit& in) {
  if (in.level != Level::macro)
    throw std::invalid_argument("teledata lowering expects a macro circuit");
  Circuit out = shell_of(in);
  std::int32_t bell_ctr = next_bell_index(in);
  std::vector<std::int32_t> layer_start(in.layers.size() + 1, 0);

  // Teleporting a state out mints a fresh data id on the destination; every
  // later reference to the old id follows the substitution.
  std::unordered_map<QubitId, QubitId, QubitIdHash> subst;
  auto fix = [&](const QubitId& q) {
    auto it = subst.find(q);
    return it == subst.end() ? q : it->second;
  };
  std::unordered_map<std::int32_t, std::int32_t> next_data;
  for (const auto& q : in.qubits)
    if (q.kind == QubitKind::data)
      next_data[q.qpu] = std::max(next_data[q.qpu], q.index + 1);

  for (std::size_t L = 0; L < in.layers.size(); ++L) {
    layer_start[L] = static_cast<std::int32_t>(out.layers.size());
    const Layer& layer = in.layers[L];
    bool any_cswap = std::any_of(
        layer.gates.begin(), layer.gates.end(),
        [](const Gate& g) { return g.op == GateOp::CSwap; });
    if (!any_cswap) {
      std::int32_t C = out.new_layer();
      for (const Gate& g : layer.gates) {
        Gate h = g;
        for (auto& q : h.operands) q = fix(q);
        out.append_at(std::move(h), C);
      }
      continue;
    }

    struct Job {
      QubitId ctrl;                     // host cat member, the block control
      std::vector<QubitId> xs, ys;      // current even/odd-side registers
      std::vector<QubitId> orig_ys;     // macro-level ids, substitution keys
      std::vector<QubitId> guests;      // teleported-in odd-side states
      std::vector<QubitId> hin;         // tele-in halves on the odd side
      std::vector<QubitId> oa;          // tele-out halves on the even side
      std::vector<QubitId> fresh;       // tele-out destinations
    };
    std::vector<Job> jobs;
    for (const Gate& g : layer.gates) {
      if (g.op != GateOp::CSwap)
        throw std::invalid_argument("round layers must be pure CSwap layers");
      Job j;
      const auto nn = static_cast<std::int32_t>((g.operands.size() - 1) / 2);
      j.ctrl = g.operands[0];
      for (std::int32_t l = 0; l < nn; ++l)
        j.xs.push_back(fix(g.operands[1 + l]));
      for (std::int32_t l = 0; l < nn; ++l) {
        j.orig_ys.push_back(g.operands[1 + nn + l]);
        j.ys.push_back(fix(j.orig_ys.back()));
      }
      const std::int32_t A = j.xs[0].qpu, B = j.ys[0].qpu;
      std::int32_t fresh0 = next_data[B];
      for (std::int32_t l = 0; l < nn; ++l) {
        j.guests.push_back({A, QubitKind::ancilla, l});
        j.hin.push_back({B, QubitKind::bell_half, bell_ctr++});
        j.oa.push_back({A, QubitKind::bell_half, bell_ctr++});
        j.fresh.push_back({B, QubitKind::data, fresh0 + l});
      }
      next_data[B] += nn;
      jobs.push_back(std::move(j));
    }

    auto each = [&](auto&& fn) {
      for (auto& j : jobs)
        for (std::size_t l = 0; l < j.xs.size(); ++l) fn(j, l);
    };

    // Teleport the odd-side states in; the pair half that will hold the guest
    // is an even-side ancilla from birth.
    std::int32_t P1 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(gbell(j.guests[l], j.hin[l]), P1); });
    std::int32_t r0 = out.new_layer(), r1 = out.new_layer(), r2 = out.new_layer();
    each([&](Job& j, std::size_t l) {
      out.append_at(gcnot(j.ys[l], j.hin[l]), r0);
      std::int32_t m1 = out.new_bit(), m2 = out.new_bit();
      out.append_at(gmeasure(j.hin[l], Basis::Z, m1), r1);
      out.append_at(gmeasure(j.ys[l], Basis::X, m2), r1);
      out.append_at(gcorrect(j.guests[l], {m1}, {m2}), r2);
    });
    std::int32_t r3 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(g1(GateOp::Reset, j.ys[l]), r3); });

    // The CSWAP sandwich, now entirely local to the even side.
    std::int32_t r4 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(gcnot(j.guests[l], j.xs[l]), r4); });
    std::int32_t tb = out.new_layer();
    each([&](Job& j, std::size_t l) {
      Gate t;
      t.op = GateOp::Toffoli;
      t.operands = {j.ctrl, j.xs[l], j.guests[l]};
      out.append_at(std::move(t), tb);
    });
    std::int32_t r6 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(gcnot(j.guests[l], j.xs[l]), r6); });

    // Teleport the guests out to fresh odd-side data ids.
    std::int32_t P2 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(gbell(j.oa[l], j.fresh[l]), P2); });
    std::int32_t r7 = out.new_layer(), r8 = out.new_layer(), r9 = out.new_layer();
    each([&](Job& j, std::size_t l) {
      out.append_at(gcnot(j.guests[l], j.oa[l]), r7);
      std::int32_t m1 = out.new_bit(), m2 = out.new_bit();
      out.append_at(gmeasure(j.oa[l], Basis::Z, m1), r8);
      out.append_at(gmeasure(j.guests[l], Basis::X, m2), r8);
      out.append_at(gcorrect(j.fresh[l], {m1}, {m2}), r9);
    });
    std::int32_t r10 = out.new_layer();
    each([&](Job& j, std::size_t l) { out.append_at(g1(GateOp::Reset, j.guests[l]), r10); });

    for (auto& j : jobs)
      for (std::size_t l = 0; l < j.orig_ys.size(); ++l)
        subst[j.orig_ys[l]] = j.fresh[l];
  }
  layer_start[in.layers.size()] = static_cast<std::int32_t>(out.layers.size());
  finish_pass(out, in, layer_start);
  out.validate();
  return out;
}

// --- parallel-Toffoli rewrite ---------------------------------------------------

Circuit rewrite_parallel_toffoli(const Circuit& in, bool fanout_windows,
                                 bool full_fanout) {
  if (in.level == Level::macro)
    throw std::invalid_argument(
        "lower CSwaps before the parallel-Toffoli rewrite");
  Circuit out = shell_of(in);
  AncillaAllocator alloc(in);
  std::vector<std::int32_t> layer_start(in.layers.size() + 1, 0);

  for (std::size_t L = 0; L < in.layers.size(); ++L) {
    layer_start[L] = static_cast<std::int32_t>(out.layers.size());
    const Layer& layer = in.layers[L];
    bool any_toffoli = std::any_of(
        layer.gates.begin(), layer.gates.end(),
        [](const Gate& g) { return g.op == GateOp::Toffoli; });
    if (!any_toffoli) {
      copy_layer(out, layer);
      continue;
    }

    struct Group {
      std::vector<QubitId> bs, ts;
    };
    std::vector<QubitId> order;
    std::unordered_map<QubitId, Group, QubitIdHash> groups;
    for (const Gate& g : layer.gates) {
      if (g.op != GateOp::Toffoli)
        throw std::invalid_argument(
            "Toffoli layers must contain only Toffolis");
      auto [it, fresh] = groups.try_emplace(g.operands[0]);
      if (fresh) order.push_back(g.operands[0]);
      it->second.bs.push_back(g.operands[1]);
      it->second.ts.push_back(g.operands[2]);
    }

    if (fanout_windows) {
      std::int32_t base = static_cast<std::int32_t>(out.layers.size());
      for (int i = 0; i < 32; ++i) out.new_layer();
      for (const auto& key : order) {
        Group& gr = groups[key];
        auto N = static_cast<std::int32_t>(gr.ts.size());
        auto wanc = alloc.take(key.qpu, full_fanout ? N : N - 1);
        emit_toffoli_block(out, base, key, gr.bs, gr.ts, wanc, full_fanout);
      }
    } else {
      std::int32_t pmax = 0;
      for (const auto& key : order) {
        auto N = static_cast<std::int32_t>(groups[key].ts.size());
        pmax = std::max(
            pmax, static_cast<std::int32_t>(t_power_gates(N % 8).size()));
      }
      std::int32_t base = static_cast<std::int32_t>(out.layers.size());
      for (int i = 0; i < 12 + pmax; ++i) out.new_layer();
      for (const auto& key : order) {
        Group& gr = groups[key];
        emit_toffoli_macro_block(out, base, pmax, key, gr.bs, gr.ts);
      }
    }
  }
  layer_start[in.layers.size()] = static_cast<std::int32_t>(out.layers.size());
  finish_pass(out, in, layer_start);
  out.validate();
  return out;
}

// --- fanout expansion ------------------------------------------------------------

Circuit expand_fanout(const Circuit& in, bool full_fanout) {
  if (in.level == Level::macro)
    throw std::invalid_argument("lower CSwaps before expanding fanouts");
  Circuit out = shell_of(in);
  AncillaAllocator alloc(in);
  std::vector<std::int32_t> layer_start(in.layers.size() + 1, 0);

  for (std::size_t L = 0; L < in.layers.size(); ++L) {
    layer_start[L] = static_cast<std::int32_t>(out.layers.size());
    const Layer& layer = in.layers[L];
    bool any_fanout = std::any_of(
        layer.gates.begin(), layer.gates.end(),
        [](const Gate& g) { return g.op == GateOp::Fanout; });
    if (!any_fanout) {
      copy_layer(out, layer);
      continue;
    }
    std::int32_t base = static_cast<std::int32_t>(out.layers.size());
    for (int i = 0; i < 7; ++i) out.new_layer();
    for (const Gate& g : layer.gates) {
      if (g.op != GateOp::Fanout) {
        // Anything sharing the layer rides in the window's first slot.
        out.append_at(g, base);
        continue;
      }
      std::vector<QubitId> targets(g.operands.begin() + 1, g.operands.end());
      auto m = static_cast<std::int32_t>(targets.size());
      auto anc = alloc.take(g.operands[0].qpu, full_fanout ? m : m - 1);
      emit_fanout_window(out, base, g.operands[0], targets, anc, full_fanout);
    }
  }
  layer_start[in.layers.size()] = static_cast<std::int32_t>(out.layers.size());
  finish_pass(out, in, layer_start);
  out.validate();
  return out;
}

// --- naive baseline ---------------------------------------------------------------

Circuit build_naive_distribution(const PartySpec& spec, Basis run_basis,
                                 bool fanout_expansion,
                                 const std::string& observable) {
  spec.validate();
  if (run_basis == Basis::Z)
    throw std::invalid_argument(
        "run basis must be X (real part) or Y (imaginary part)");
  check_observable(spec.n, run_basis, observable);

  const std::int32_t k = spec.k, n = spec.n;
  const std::int32_t s = ceil_div(n, k);   // slice width
  const std::int32_t Q = ceil_div(n, s);   // QPUs that host a slice

  Circuit c = new_circuit(k, n);
  c.level = Level::lowered;  // local macro Toffoli/Fanout until the rewrite

  for (std::int32_t p = 0; p < k; ++p) {
    InitialState st;
    for (std::int32_t l = n - 1; l >= 0; --l)
      st.qubits.push_back({p, QubitKind::data, l});
    st.amps = spec.states[p].members[0].amps;
    for (std::int32_t l = 0; l < n; ++l)
      c.declare_qubit({p, QubitKind::data, l});
    c.initial_states.push_back(std::move(st));
  }

  // During the local tests, state qubit j of party p lives on QPU j/s; a
  // party's own slice never travels.
  auto guest = [&](std::int32_t party, std::int32_t j) -> QubitId {
    std::int32_t q = j / s;
    if (q == party) return {party, QubitKind::data, j};
    return {q, QubitKind::data, n + party * n + j};
  };

  std::int32_t bell_ctr = 0;

  // Relay-teleport each (source, destination) move: one pair per hop, every
  // hop entangled up front, all chain CNOTs in one layer, all measurements in
  // the next, one folded correction on the receiver. Returns the index of the
  // CNOT layer, or -1 when there is nothing to move.
  auto emit_chains =
      [&](const std::vector<std::pair<QubitId, QubitId>>& moves) {
        if (moves.empty()) return static_cast<std::int32_t>(-1);
        struct Hop {
          QubitId near, far;
        };
        std::vector<std::vector<Hop>> chains;
        std::int32_t P = c.new_layer();
        for (const auto& [src, dst] : moves) {
          std::int32_t u = src.qpu, w = dst.qpu;
          std::int32_t dir = w > u ? 1 : -1;
          std::int32_t d = std::abs(w - u);
          std::vector<Hop> hops(d);
          for (std::int32_t h = 0; h < d; ++h) {
            hops[h].near = {u + dir * h, QubitKind::bell_half, bell_ctr};
            hops[h].far = h == d - 1
                              ? dst
                              : QubitId{u + dir * (h + 1),
                                        QubitKind::bell_half, bell_ctr};
            ++bell_ctr;
          }
          for (const auto& hp : hops) c.append_at(gbell(hp.near, hp.far), P);
          chains.push_back(std::move(hops));
        }
        std::int32_t L1 = c.new_layer(), L2 = c.new_layer(), L3 = c.new_layer();
        for (std::size_t i = 0; i < chains.size(); ++i) {
          const auto& [src, dst] = moves[i];
          const auto& hops = chains[i];
          c.append_at(gcnot(src, hops[0].near), L1);
          for (std::size_t h = 1; h < hops.size(); ++h)
            c.append_at(gcnot(hops[h - 1].far, hops[h].near), L1);
          std::vector<std::int32_t> cx, cz;
          std::int32_t m2 = c.new_bit();
          c.append_at(gmeasure(src, Basis::X, m2), L2);
          cz.push_back(m2);
          std::int32_t m1 = c.new_bit();
          c.append_at(gmeasure(hops[0].near, Basis::Z, m1), L2);
          cx.push_back(m1);
          for (std::size_t h = 1; h < hops.size(); ++h) {
            std::int32_t xh = c.new_bit();
            c.append_at(gmeasure(hops[h - 1].far, Basis::X, xh), L2);
            cz.push_back(xh);
            std::int32_t zh = c.new_bit();
            c.append_at(gmeasure(hops[h].near, Basis::Z, zh), L2);
            cx.push_back(zh);
          }
          c.append_at(gcorrect(dst, std::move(cx), std::move(cz)), L3);
        }
        return L1;
      };

  // Distribute all travelling slices; the local control fan-out rides the
  // same window, so the preamble costs max(teleport, fanout) ticks, not the
  // sum.
  c.begin_step("distribute");
  std::vector<std::pair<QubitId, QubitId>> moves;
  for (std::int32_t p = 0; p < k; ++p)
    for (std::int32_t j = 0; j < n; ++j)
      if (j / s != p)
        moves.push_back({{p, QubitKind::data, j}, guest(p, j)});
  std::int32_t base = emit_chains(moves);

  const std::int32_t mcount = (k + 1) / 2;  // members per local test
  std::vector<std::vector<QubitId>> mems(Q);
  for (std::int32_t q = 0; q < Q; ++q)
    for (std::int32_t e = 0; e <= k - 1; e += 2)
      mems[q].push_back({q, QubitKind::ghz, e});

  if (fanout_expansion) {
    while (static_cast<std::int32_t>(c.layers.size()) < base + 7)
      c.new_layer();
    for (std::int32_t q = 0; q < Q; ++q) {
      c.append_at(g1(GateOp::H, mems[q][0]), base);
      if (mcount >= 2) {
        std::vector<QubitId> tg(mems[q].begin() + 1, mems[q].end());
        std::vector<QubitId> anc;
        for (std::int32_t i = 0; i + 2 < mcount; ++i)
          anc.push_back({q, QubitKind::ancilla, i});
        emit_fanout_window(c, base, mems[q][0], tg, anc, /*full=*/false);
      }
    }
  } else {
    for (std::int32_t q = 0; q < Q; ++q) {
      c.append_at(g1(GateOp::H, mems[q][0]), base);
      if (mcount >= 2) {
        Gate g;
        g.op = GateOp::Fanout;
        g.operands.assign(mems[q].begin(), mems[q].end());
        c.append_at(std::move(g), base + 1);
      }
    }
  }
  c.end_step();

  // Local interleaved rounds, one CSWAP sandwich per neighbouring slice pair.
  auto emit_local_round = [&](const char* name, bool first_round) {
    c.begin_step(name);
    struct LJ {
      QubitId m;
      std::vector<QubitId> A, B;
    };
    std::vector<LJ> js;
    for (std::int32_t q = 0; q < Q; ++q) {
      std::int32_t w = std::min((q + 1) * s, n) - q * s;
      for (std::int32_t e = first_round ? 0 : 2; e <= k - 1; e += 2) {
        std::int32_t bpos = first_round ? e + 1 : e - 1;
        if (bpos > k - 1) continue;
        LJ j;
        j.m = {q, QubitKind::ghz, e};
        std::int32_t pa = party_of_pos(e, k), pb = party_of_pos(bpos, k);
        for (std::int32_t t = 0; t < w; ++t) {
          j.A.push_back(guest(pa, q * s + t));
          j.B.push_back(guest(pb, q * s + t));
        }
        js.push_back(std::move(j));
      }
    }
    std::int32_t r0 = c.new_layer();
    for (const auto& j : js)
      for (std::size_t t = 0; t < j.A.size(); ++t)
        c.append_at(gcnot(j.B[t], j.A[t]), r0);
    std::int32_t r1 = c.new_layer();
    for (const auto& j : js)
      for (std::size_t t = 0; t < j.A.size(); ++t) {
        Gate g;
        g.op = GateOp::Toffoli;
        g.operands = {j.m, j.A[t], j.B[t]};
        c.append_at(std::move(g), r1);
      }
    std::int32_t r2 = c.new_layer();
    for (const auto& j : js)
      for (std::size_t t = 0; t < j.A.size(); ++t)
        c.append_at(gcnot(j.B[t], j.A[t]), r2);
    c.end_step();
  };
  emit_local_round("round_1", true);
  if (k > 2) emit_local_round("round_2", false);

  std::vector<QubitId> obs_qubits(n);
  for (std::int32_t l = 0; l < n; ++l) obs_qubits[l] = guest(0, l);
  emit_readout(c, mems, /*grouped=*/true, run_basis, observable, obs_qubits);

  // Send every travelling slice back home onto fresh ids.
  c.begin_step("return");
  std::vector<std::pair<QubitId, QubitId>> back;
  for (std::int32_t p = 0; p < k; ++p)
    for (std::int32_t j = 0; j < n; ++j)
      if (j / s != p)
        back.push_back(
            {guest(p, j), {p, QubitKind::data, n + p * n + j}});
  emit_chains(back);
  c.end_step();

  c.validate();
  return rewrite_parallel_toffoli(c, fanout_expansion, /*full_fanout=*/false);
}

// --- standalone fanout gadget --------------------------------------------------

Circuit build_fanout_gadget(std::int32_t m, bool full) {
  if (m < 1) throw std::invalid_argument("fanout needs at least one target");
  Circuit c = new_circuit(2, m);
  c.num_qpus = 1;
  c.level = Level::expanded;
  c.fanout_expanded = true;
  QubitId ctrl{0, QubitKind::ghz, 0};
  c.declare_qubit(ctrl);
  std::vector<QubitId> targets, anc;
  for (std::int32_t l = 0; l < m; ++l) {
    targets.push_back({0, QubitKind::data, l});
    c.declare_qubit(targets.back());
  }
  for (std::int32_t i = 0; i < (full ? m : m - 1); ++i)
    anc.push_back({0, QubitKind::ancilla, i});
  c.begin_step("fanout");
  std::int32_t base = static_cast<std::int32_t>(c.layers.size());
  for (int i = 0; i < 7; ++i) c.new_layer();
  emit_fanout_window(c, base, ctrl, targets, anc, full);
  c.end_step();
  c.validate();
  return c;
}

// --- pipeline ------------------------------------------------------------------

Circuit build_swap_test(const PartySpec& spec, const Scheme& scheme,
                        Basis run_basis, const std::string& observable) {
  if (scheme.variant == Variant::naive)
    return build_naive_distribution(spec, run_basis, scheme.fanout_expansion,
                                    observable);
  Circuit m = build_swap_test_macro(spec, scheme, run_basis, observable);
  Circuit l = scheme.variant == Variant::telegate ? lower_cswap_telegate(m)
                                                  : lower_cswap_teledata(m);
  return rewrite_parallel_toffoli(l, scheme.fanout_expansion,
                                  scheme.variant == Variant::teledata);
}

const std::map<std::string, Pass>& pass_registry() {
  static const std::map<std::string, Pass> reg = {
      {"lower_telegate",
       [](const Circuit& c) { return lower_cswap_telegate(c); }},
      {"lower_teledata",
       [](const Circuit& c) { return lower_cswap_teledata(c); }},
      {"parallel_toffoli",
       [](const Circuit& c) { return rewrite_parallel_toffoli(c, true, false); }},
      {"parallel_toffoli_macro",
       [](const Circuit& c) { return rewrite_parallel_toffoli(c, false, false); }},
      {"expand_fanout", [](const Circuit& c) { return expand_fanout(c, false); }},
  };
  return reg;
}

}  // namespace mpst
