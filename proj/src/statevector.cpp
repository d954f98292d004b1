#include "mpst/statevector.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace mpst {

namespace kernels {

void apply_1q(Eigen::VectorXcd& amps, int bit, const Eigen::Matrix2cd& m) {
  const std::int64_t step = std::int64_t(1) << bit;
  const std::int64_t n = amps.size();
  for (std::int64_t base = 0; base < n; base += step << 1) {
    for (std::int64_t off = 0; off < step; ++off) {
      auto& a0 = amps[base + off];
      auto& a1 = amps[base + off + step];
      std::complex<double> b0 = m(0, 0) * a0 + m(0, 1) * a1;
      std::complex<double> b1 = m(1, 0) * a0 + m(1, 1) * a1;
      a0 = b0;
      a1 = b1;
    }
  }
}

void apply_cnot(Eigen::VectorXcd& amps, int control, int target) {
  const std::int64_t cm = std::int64_t(1) << control;
  const std::int64_t tm = std::int64_t(1) << target;
  const std::int64_t n = amps.size();
  for (std::int64_t i = 0; i < n; ++i)
    if ((i & cm) && !(i & tm)) std::swap(amps[i], amps[i | tm]);
}

void apply_cz(Eigen::VectorXcd& amps, int a, int b) {
  const std::int64_t am = std::int64_t(1) << a, bm = std::int64_t(1) << b;
  const std::int64_t n = amps.size();
  for (std::int64_t i = 0; i < n; ++i)
    if ((i & am) && (i & bm)) amps[i] = -amps[i];
}

void apply_swap_masked(Eigen::VectorXcd& amps, int control_bit,
                       const std::vector<int>& bits_a,
                       const std::vector<int>& bits_b) {
  // Swaps register bit bits_a[r] with bits_b[r] (paired by position in the
  // lists, not by significance) where the control bit is 1.
  const std::int64_t cm = std::int64_t(1) << control_bit;
  const std::int64_t n = amps.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(i & cm)) continue;
    std::int64_t j = i;
    for (std::size_t r = 0; r < bits_a.size(); ++r) {
      std::int64_t va = i >> bits_a[r] & 1, vb = i >> bits_b[r] & 1;
      if (va != vb) j ^= (std::int64_t(1) << bits_a[r]) | (std::int64_t(1) << bits_b[r]);
    }
    if (j > i) std::swap(amps[i], amps[j]);
  }
}

void apply_fanout(Eigen::VectorXcd& amps, int control_bit, std::uint64_t target_mask) {
  const std::int64_t cm = std::int64_t(1) << control_bit;
  const std::int64_t tm = static_cast<std::int64_t>(target_mask);
  const std::int64_t n = amps.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(i & cm)) continue;
    std::int64_t j = i ^ tm;
    if (j > i) std::swap(amps[i], amps[j]);
  }
}

void apply_toffoli(Eigen::VectorXcd& amps, int c1, int c2, int target) {
  const std::int64_t m1 = std::int64_t(1) << c1, m2 = std::int64_t(1) << c2;
  const std::int64_t tm = std::int64_t(1) << target;
  const std::int64_t n = amps.size();
  for (std::int64_t i = 0; i < n; ++i)
    if ((i & m1) && (i & m2) && !(i & tm)) std::swap(amps[i], amps[i | tm]);
}

double prob_zero(const Eigen::VectorXcd& amps, int bit) {
  const std::int64_t step = std::int64_t(1) << bit;
  const std::int64_t n = amps.size();
  double p = 0;
  for (std::int64_t base = 0; base < n; base += step << 1)
    for (std::int64_t off = 0; off < step; ++off)
      p += std::norm(amps[base + off]);
  return p;
}

void collapse(Eigen::VectorXcd& amps, int bit, int outcome, double prob) {
  const std::int64_t step = std::int64_t(1) << bit;
  const std::int64_t n = amps.size();
  const double s = 1.0 / std::sqrt(std::max(prob, 1e-300));
  for (std::int64_t base = 0; base < n; base += step << 1)
    for (std::int64_t off = 0; off < step; ++off) {
      auto& keep = outcome ? amps[base + off + step] : amps[base + off];
      auto& kill = outcome ? amps[base + off] : amps[base + off + step];
      keep *= s;
      kill = 0;
    }
}

const Eigen::Matrix2cd& gate_matrix(GateOp op) {
  using namespace std::complex_literals;
  static const double r = 1.0 / std::sqrt(2.0);
  static const Eigen::Matrix2cd H = (Eigen::Matrix2cd() << r, r, r, -r).finished();
  static const Eigen::Matrix2cd X = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2cd Y = (Eigen::Matrix2cd() << 0, -1i, 1i, 0).finished();
  static const Eigen::Matrix2cd Z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  static const Eigen::Matrix2cd S = (Eigen::Matrix2cd() << 1, 0, 0, 1i).finished();
  static const Eigen::Matrix2cd Sdg = (Eigen::Matrix2cd() << 1, 0, 0, -1i).finished();
  static const Eigen::Matrix2cd T =
      (Eigen::Matrix2cd() << 1, 0, 0, std::polar(1.0, M_PI / 4)).finished();
  static const Eigen::Matrix2cd Tdg =
      (Eigen::Matrix2cd() << 1, 0, 0, std::polar(1.0, -M_PI / 4)).finished();
  switch (op) {
    case GateOp::H: return H;
    case GateOp::X: return X;
    case GateOp::Y: return Y;
    case GateOp::Z: return Z;
    case GateOp::S: return S;
    case GateOp::Sdg: return Sdg;
    case GateOp::T: return T;
    case GateOp::Tdg: return Tdg;
    default: throw std::logic_error("not a 1q unitary");
  }
}

}  // namespace kernels

StatevectorSim::StatevectorSim(int max_live_qubits, bool defer_measurements)
    : max_live_(max_live_qubits), defer_(defer_measurements) {
  amps_.resize(1);
  amps_[0] = 1.0;
}

int StatevectorSim::slot(const QubitId& q) const {
  auto it = slot_of_.find(q);
  if (it == slot_of_.end()) throw std::logic_error("qubit not live");
  return it->second;
}

void StatevectorSim::add_qubit(const QubitId& q) {
  if (slot_of_.count(q)) throw std::logic_error("qubit already live");
  if (num_live() + 1 > max_live_)
    throw CapacityError("live qubit count would exceed capacity (" +
                        std::to_string(max_live_) + ")");
  int s = num_live();
  slot_of_.emplace(q, s);
  slot_qubit_.push_back(q);
  Eigen::VectorXcd next(amps_.size() * 2);
  next.head(amps_.size()) = amps_;
  next.tail(amps_.size()).setZero();
  amps_ = std::move(next);
}

void StatevectorSim::rebind_synthetic(const QubitId& q) {
  // Freeze the measured branch on a synthetic environment id so the original
  // id can be revived fresh (deferred-mode analogue of measure-frees-qubit).
  auto it = slot_of_.find(q);
  if (it == slot_of_.end()) return;
  QubitId synth{-1000 - synth_counter_++, QubitKind::ancilla, 0};
  int s = it->second;
  slot_of_.erase(it);
  slot_of_.emplace(synth, s);
  slot_qubit_[s] = synth;
  for (auto& [bit, qq] : deferred_bit_qubit_)
    if (qq == q) qq = synth;
  deferred_measured_.erase(q);
}

int StatevectorSim::ensure_live(const QubitId& q) {
  if (defer_ && deferred_measured_.count(q)) rebind_synthetic(q);
  auto it = slot_of_.find(q);
  if (it != slot_of_.end()) return it->second;
  add_qubit(q);  // revive-in-|0> convention
  return slot_of_.at(q);
}

void StatevectorSim::remove_qubit(const QubitId& q, int outcome) {
  // The qubit must already be collapsed to |outcome>; contract its axis.
  int s = slot(q);
  int top = num_live() - 1;
  const std::int64_t sm = std::int64_t(1) << s;
  const std::int64_t topm = std::int64_t(1) << top;
  if (s != top) {
    // Swap axis s with the top axis.
    const std::int64_t n = amps_.size();
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t bs = i >> s & 1, bt = i >> top & 1;
      if (bs != bt) {
        std::int64_t j = i ^ sm ^ topm;
        if (j > i) std::swap(amps_[i], amps_[j]);
      }
    }
    QubitId moved = slot_qubit_[top];
    slot_qubit_[s] = moved;
    slot_of_[moved] = s;
  }
  Eigen::VectorXcd next = outcome ? amps_.tail(amps_.size() / 2).eval()
                                  : amps_.head(amps_.size() / 2).eval();
  amps_ = std::move(next);
  slot_qubit_.pop_back();
  slot_of_.erase(q);
}

void StatevectorSim::prepare(const std::vector<QubitId>& qs, const Eigen::VectorXcd& psi) {
  if (psi.size() != (Eigen::Index(1) << qs.size()))
    throw std::invalid_argument("prepare: dimension mismatch");
  int base = num_live();
  for (const auto& q : qs) add_qubit(q);
  // Entangle freshly added axes: new amplitude = old ⊗ psi with qs mapped to
  // bits base..base+|qs|-1 (qs[i] -> bit base+i).
  Eigen::VectorXcd next(amps_.size());
  next.setZero();
  const std::int64_t oldn = std::int64_t(1) << base;
  for (std::int64_t hi = 0; hi < psi.size(); ++hi) {
    if (psi[hi] == 0.0) continue;
    for (std::int64_t lo = 0; lo < oldn; ++lo)
      next[(hi << base) | lo] = amps_[lo] * psi[hi];
  }
  amps_ = std::move(next);
}

bool StatevectorSim::parity(const ParityExpr& e) const {
  bool v = false;
  for (auto b : e.bits) v ^= (bits[b] != 0);
  return v;
}

void StatevectorSim::controlled_from_bits(const ParityExpr& e, const QubitId& target,
                                          GateOp pauli) {
  // Deferred mode: parity condition over measured bits becomes a product of
  // controlled-Paulis from the recording qubits.
  int t = ensure_live(target);
  for (auto b : e.bits) {
    auto it = deferred_bit_qubit_.find(b);
    if (it == deferred_bit_qubit_.end())
      throw std::logic_error("deferred mode: condition on unknown bit");
    int c = slot(it->second);
    if (pauli == GateOp::X) {
      kernels::apply_cnot(amps_, c, t);
    } else if (pauli == GateOp::Z) {
      kernels::apply_cz(amps_, c, t);
    } else {
      throw std::logic_error("deferred condition supports X/Z only");
    }
  }
}

void StatevectorSim::depolarize1(const QubitId& q, double p) {
  if (p <= 0) return;
  double r = rng_.uniform();
  if (r >= p) return;
  static const char paulis[3] = {'X', 'Y', 'Z'};
  apply_pauli_char(q, paulis[static_cast<int>(r / p * 3) % 3]);
}

void StatevectorSim::depolarize2(const QubitId& a, const QubitId& b, double p) {
  if (p <= 0) return;
  double r = rng_.uniform();
  if (r >= p) return;
  int idx = static_cast<int>(r / p * 15) % 15 + 1;  // 1..15, skipping II
  static const char chars[4] = {'I', 'X', 'Y', 'Z'};
  apply_pauli_char(a, chars[idx / 4]);
  apply_pauli_char(b, chars[idx % 4]);
}

void StatevectorSim::apply_pauli_char(const QubitId& q, char p) {
  if (p == 'I') return;
  int s = slot(q);
  switch (p) {
    case 'X': kernels::apply_1q(amps_, s, kernels::gate_matrix(GateOp::X)); break;
    case 'Y': kernels::apply_1q(amps_, s, kernels::gate_matrix(GateOp::Y)); break;
    case 'Z': kernels::apply_1q(amps_, s, kernels::gate_matrix(GateOp::Z)); break;
    default: throw std::invalid_argument("bad pauli char");
  }
}

int StatevectorSim::measure_z(const QubitId& q) {
  int s = slot(q);
  double p0 = kernels::prob_zero(amps_, s);
  int outcome = rng_.uniform() < p0 ? 0 : 1;
  kernels::collapse(amps_, s, outcome, outcome ? 1.0 - p0 : p0);
  remove_qubit(q, outcome);
  return outcome;
}

void StatevectorSim::apply_gate(const Gate& g, const NoiseModel& noise) {
  switch (g.op) {
    case GateOp::H: case GateOp::X: case GateOp::Y: case GateOp::Z:
    case GateOp::S: case GateOp::Sdg: case GateOp::T: case GateOp::Tdg: {
      if (!g.condition.empty()) {
        if (defer_) throw std::logic_error("deferred mode: generic condition unsupported");
        if (!parity(g.condition)) return;
      }
      int s = ensure_live(g.operands[0]);
      kernels::apply_1q(amps_, s, kernels::gate_matrix(g.op));
      depolarize1(g.operands[0], noise.p1);
      return;
    }
    case GateOp::CNOT: {
      int c = ensure_live(g.operands[0]);
      int t = ensure_live(g.operands[1]);
      kernels::apply_cnot(amps_, c, t);
      depolarize2(g.operands[0], g.operands[1], noise.p2);
      return;
    }
    case GateOp::Toffoli: {
      int c1 = ensure_live(g.operands[0]);
      int c2 = ensure_live(g.operands[1]);
      int t = ensure_live(g.operands[2]);
      kernels::apply_toffoli(amps_, c1, c2, t);
      return;  // macro: no noise attached
    }
    case GateOp::CSwap: {
      std::size_t r = (g.operands.size() - 1) / 2;
      int c = ensure_live(g.operands[0]);
      std::vector<int> ba(r), bb(r);
      for (std::size_t i = 0; i < r; ++i) {
        ba[i] = ensure_live(g.operands[1 + i]);
        bb[i] = ensure_live(g.operands[1 + r + i]);
      }
      kernels::apply_swap_masked(amps_, c, ba, bb);
      return;
    }
    case GateOp::Fanout: {
      int c = ensure_live(g.operands[0]);
      std::uint64_t tm = 0;
      for (std::size_t i = 1; i < g.operands.size(); ++i)
        tm |= std::uint64_t(1) << ensure_live(g.operands[i]);
      kernels::apply_fanout(amps_, c, tm);
      return;
    }
    case GateOp::Measure: {
      const QubitId& q = g.operands[0];
      int s = ensure_live(q);
      if (g.basis == Basis::X) {
        kernels::apply_1q(amps_, s, kernels::gate_matrix(GateOp::H));
        depolarize1(q, noise.p1);
      } else if (g.basis == Basis::Y) {
        kernels::apply_1q(amps_, s, kernels::gate_matrix(GateOp::Sdg));
        kernels::apply_1q(amps_, s, kernels::gate_matrix(GateOp::H));
        depolarize1(q, noise.p1);  // one charge for the implicit rotation
      }
      if (defer_) {
        deferred_bit_qubit_[g.result_bit] = q;
        deferred_measured_[q] = 1;
        return;
      }
      int outcome = measure_z(q);
      bool flip = noise.p_meas > 0 && rng_.uniform() < noise.p_meas;
      bits[g.result_bit] = static_cast<std::uint8_t>(outcome ^ (flip ? 1 : 0));
      return;
    }
    case GateOp::Reset: {
      const QubitId& q = g.operands[0];
      if (defer_) {
        rebind_synthetic(q);
        ensure_live(q);
        return;
      }
      auto it = slot_of_.find(q);
      if (it == slot_of_.end()) return;  // dead qubits already revive in |0>
      int s = it->second;
      double p0 = kernels::prob_zero(amps_, s);
      int outcome = rng_.uniform() < p0 ? 0 : 1;
      kernels::collapse(amps_, s, outcome, outcome ? 1.0 - p0 : p0);
      if (outcome) kernels::apply_1q(amps_, s, kernels::gate_matrix(GateOp::X));
      return;
    }
    case GateOp::BellPrep: {
      const QubitId& a = g.operands[0];
      const QubitId& b = g.operands[1];
      int sa = ensure_live(a);
      int sb = ensure_live(b);
      kernels::apply_1q(amps_, sa, kernels::gate_matrix(GateOp::H));
      kernels::apply_cnot(amps_, sa, sb);
      if (noise.p_bell > 0) {
        double r = rng_.uniform();
        double q4 = noise.p_bell / 4.0;
        if (r < q4) apply_pauli_char(b, 'X');
        else if (r < 2 * q4) apply_pauli_char(b, 'Y');
        else if (r < 3 * q4) apply_pauli_char(b, 'Z');
      }
      return;
    }
    case GateOp::PauliCorrect: {
      const QubitId& q = g.operands[0];
      if (defer_) {
        if (!g.cond_x.empty()) controlled_from_bits(g.cond_x, q, GateOp::X);
        if (!g.cond_z.empty()) controlled_from_bits(g.cond_z, q, GateOp::Z);
        return;
      }
      bool x = parity(g.cond_x);
      bool z = parity(g.cond_z);
      if (x) apply_pauli_char(q, 'X');
      if (z) apply_pauli_char(q, 'Z');
      if (x || z) depolarize1(q, noise.p1);  // a pulse actually fired
      return;
    }
  }
  throw std::logic_error("unhandled op");
}

void StatevectorSim::apply_initial_states(const Circuit& c) {
  bits.assign(c.num_bits, 0);
  for (const auto& is : c.initial_states) prepare(is.qubits, is.amps);
}

void StatevectorSim::run_layers(const Circuit& c, const NoiseModel& noise,
                                std::int32_t first, std::int32_t last) {
  for (std::int32_t L = first; L < last; ++L) {
    for (const Gate& g : c.layers[L].gates) apply_gate(g, noise);
    for (const auto& inj : c.injections) {
      if (inj.layer != L) continue;
      double r = rng_.uniform();
      double acc = 0;
      for (const auto& [pauli, p] : inj.histogram) {
        acc += p;
        if (r < acc) {
          for (std::size_t i = 0; i < inj.targets.size(); ++i)
            if (is_live(inj.targets[i])) apply_pauli_char(inj.targets[i], pauli[i]);
          break;
        }
      }
    }
  }
}

void StatevectorSim::run(const Circuit& c, const NoiseModel& noise) {
  apply_initial_states(c);
  run_layers(c, noise, 0, static_cast<std::int32_t>(c.layers.size()));
}

std::vector<double> StatevectorSim::marginal_probs(const std::vector<QubitId>& qs) const {
  std::vector<int> sl(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) sl[i] = slot(qs[i]);
  std::vector<double> probs(std::size_t(1) << qs.size(), 0.0);
  const std::int64_t n = amps_.size();
  for (std::int64_t i = 0; i < n; ++i) {
    double w = std::norm(amps_[i]);
    if (w == 0) continue;
    std::size_t key = 0;
    for (std::size_t b = 0; b < sl.size(); ++b)
      key |= static_cast<std::size_t>(i >> sl[b] & 1) << b;
    probs[key] += w;
  }
  return probs;
}

double StatevectorSim::fidelity_on(const std::vector<QubitId>& qs,
                                   const Eigen::VectorXcd& ideal) const {
  if (ideal.size() != (Eigen::Index(1) << qs.size()))
    throw std::invalid_argument("fidelity_on: dimension mismatch");
  std::vector<int> sl(qs.size());
  std::uint64_t submask = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    sl[i] = slot(qs[i]);
    submask |= std::uint64_t(1) << sl[i];
  }
  // Group amplitudes by environment configuration; F = sum_env |<ideal|psi_env>|^2.
  std::unordered_map<std::uint64_t, std::complex<double>> overlaps;
  const std::int64_t n = amps_.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (amps_[i] == 0.0) continue;
    std::uint64_t env = static_cast<std::uint64_t>(i) & ~submask;
    std::size_t key = 0;
    for (std::size_t b = 0; b < sl.size(); ++b)
      key |= static_cast<std::size_t>(i >> sl[b] & 1) << b;
    overlaps[env] += std::conj(ideal[key]) * amps_[i];
  }
  double f = 0;
  for (const auto& [env, ov] : overlaps) f += std::norm(ov);
  return f;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MPST_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

RunResult run_statevector(const Circuit& c, const NoiseModel& noise,
                          const RunOptions& opts) {
  RunResult out;
  out.shots = opts.shots;
  out.num_bits = c.num_bits;
  out.records.assign(static_cast<std::size_t>(opts.shots) * c.num_bits, 0);

  int threads = resolve_threads(opts.threads);
  auto worker = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t shot = lo; shot < hi; ++shot) {
      StatevectorSim sim(opts.max_live_qubits);
      sim.set_rng(RngStream::for_shot(opts.seed, static_cast<std::uint64_t>(shot)));
      sim.run(c, noise);
      std::copy(sim.bits.begin(), sim.bits.end(),
                out.records.begin() + static_cast<std::size_t>(shot) * c.num_bits);
    }
  };
  if (threads <= 1 || opts.shots < 2) {
    worker(0, opts.shots);
  } else {
    std::vector<std::thread> pool;
    std::int64_t chunk = (opts.shots + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::int64_t lo = t * chunk, hi = std::min<std::int64_t>(opts.shots, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace mpst
