#include "mpst/pauli_frame.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mpst/statevector.hpp"  // resolve_threads

namespace mpst {

namespace {
char pauli_char(std::uint8_t x, std::uint8_t z) {
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}
}  // namespace

void FrameSim::depolarize1(const QubitId& q) {
  if (p1_ <= 0) return;
  double r = rng_.uniform();
  if (r >= p1_) return;
  int idx = static_cast<int>(r / p1_ * 3) % 3;  // 0:X 1:Y 2:Z
  XZ& f = at(q);
  if (idx == 0 || idx == 1) f.x ^= 1;
  if (idx == 1 || idx == 2) f.z ^= 1;
}

void FrameSim::depolarize2(const QubitId& a, const QubitId& b) {
  if (p2_ <= 0) return;
  double r = rng_.uniform();
  if (r >= p2_) return;
  int idx = static_cast<int>(r / p2_ * 15) % 15 + 1;  // 1..15, skipping II
  int pa = idx / 4, pb = idx % 4;                     // 0:I 1:X 2:Y 3:Z
  XZ& fa = at(a);
  XZ& fb = at(b);
  if (pa == 1 || pa == 2) fa.x ^= 1;
  if (pa == 2 || pa == 3) fa.z ^= 1;
  if (pb == 1 || pb == 2) fb.x ^= 1;
  if (pb == 2 || pb == 3) fb.z ^= 1;
}

bool FrameSim::rec_parity(const ParityExpr& e) const {
  bool p = false;
  for (int b : e.bits) p ^= (recorded[static_cast<std::size_t>(b)] != 0);
  return p;
}

bool FrameSim::flip_parity(const ParityExpr& e) const {
  bool p = false;
  for (int b : e.bits) p ^= (flips[static_cast<std::size_t>(b)] != 0);
  return p;
}

void FrameSim::run(const Circuit& c, const NoiseModel& noise, RngStream rng) {
  frames_.clear();
  rng_ = rng;
  p1_ = noise.p1;
  p2_ = noise.p2;
  recorded.assign(static_cast<std::size_t>(c.num_bits), 0);
  flips.assign(static_cast<std::size_t>(c.num_bits), 0);

  for (std::size_t li = 0; li < c.layers.size(); ++li) {
    for (const Gate& g : c.layers[li].gates) {
      switch (g.op) {
        case GateOp::T:
        case GateOp::Tdg:
        case GateOp::Toffoli:
        case GateOp::CSwap:
          throw std::invalid_argument(
              std::string("pauli-frame simulation is Clifford-only; "
                          "lower/expand ") +
              to_string(g.op) + " first");
        case GateOp::X:
        case GateOp::Y:
        case GateOp::Z: {
          // Paulis commute with the frame up to phase. A conditioned Pauli
          // differs from the ideal branch exactly when the condition's
          // recorded parity differs from its noiseless parity.
          if (!g.condition.empty()) {
            bool d = flip_parity(g.condition);
            if (d) {
              XZ& f = at(g.operands[0]);
              if (g.op != GateOp::Z) f.x ^= 1;
              if (g.op != GateOp::X) f.z ^= 1;
            }
            if (rec_parity(g.condition)) depolarize1(g.operands[0]);
          } else {
            depolarize1(g.operands[0]);
          }
          break;
        }
        case GateOp::H: {
          if (!g.condition.empty())
            throw std::invalid_argument(
                "pauli-frame simulation: conditioned non-Pauli gate");
          XZ& f = at(g.operands[0]);
          std::swap(f.x, f.z);
          depolarize1(g.operands[0]);
          break;
        }
        case GateOp::S:
        case GateOp::Sdg: {
          if (!g.condition.empty())
            throw std::invalid_argument(
                "pauli-frame simulation: conditioned non-Pauli gate");
          XZ& f = at(g.operands[0]);
          f.z ^= f.x;
          depolarize1(g.operands[0]);
          break;
        }
        case GateOp::CNOT: {
          XZ& fc = at(g.operands[0]);
          XZ& ft = at(g.operands[1]);
          ft.x ^= fc.x;
          fc.z ^= ft.z;
          depolarize2(g.operands[0], g.operands[1]);
          break;
        }
        case GateOp::Fanout: {
          // Macro multi-target CNOT; noiseless like the other macros.
          XZ& fc = at(g.operands[0]);
          std::uint8_t zacc = 0;
          for (std::size_t i = 1; i < g.operands.size(); ++i) {
            XZ& ft = at(g.operands[i]);
            ft.x ^= fc.x;
            zacc ^= ft.z;
          }
          fc.z ^= zacc;
          break;
        }
        case GateOp::Measure: {
          const QubitId& q = g.operands[0];
          XZ& f = at(q);
          if (g.basis == Basis::X) {
            std::swap(f.x, f.z);
            depolarize1(q);
          } else if (g.basis == Basis::Y) {
            f.z ^= f.x;  // Sdg
            std::swap(f.x, f.z);
            depolarize1(q);
          }
          std::uint8_t flip = frames_[q].x;  // re-read: depolarize1 may move it
          std::uint8_t mflip =
              (noise.p_meas > 0 && rng_.uniform() < noise.p_meas) ? 1 : 0;
          std::uint8_t ref = static_cast<std::uint8_t>(rng_.bit());
          recorded[static_cast<std::size_t>(g.result_bit)] =
              static_cast<std::uint8_t>(ref ^ flip ^ mflip);
          flips[static_cast<std::size_t>(g.result_bit)] =
              static_cast<std::uint8_t>(flip ^ mflip);
          frames_.erase(q);  // qubit retired: frame no longer propagates
          break;
        }
        case GateOp::Reset: {
          frames_.erase(g.operands[0]);
          break;
        }
        case GateOp::BellPrep: {
          frames_.erase(g.operands[0]);
          frames_.erase(g.operands[1]);
          if (noise.p_bell > 0) {
            double r = rng_.uniform();
            double q4 = noise.p_bell / 4.0;
            XZ& f = at(g.operands[1]);
            if (r < q4) f.x ^= 1;
            else if (r < 2 * q4) { f.x ^= 1; f.z ^= 1; }
            else if (r < 3 * q4) f.z ^= 1;
          }
          break;
        }
        case GateOp::PauliCorrect: {
          const QubitId& q = g.operands[0];
          bool dx = flip_parity(g.cond_x);
          bool dz = flip_parity(g.cond_z);
          XZ& f = at(q);
          if (dx) f.x ^= 1;
          if (dz) f.z ^= 1;
          if (rec_parity(g.cond_x) || rec_parity(g.cond_z)) depolarize1(q);
          break;
        }
      }
    }
    for (const Injection& inj : c.injections) {
      if (inj.layer != static_cast<std::int32_t>(li)) continue;
      double r = rng_.uniform();
      double acc = 0;
      for (const auto& [pauli, p] : inj.histogram) {
        acc += p;
        if (r < acc) {  // remainder of the mass is identity
          for (std::size_t i = 0; i < inj.targets.size() && i < pauli.size();
               ++i) {
            XZ& f = at(inj.targets[i]);
            if (pauli[i] == 'X' || pauli[i] == 'Y') f.x ^= 1;
            if (pauli[i] == 'Z' || pauli[i] == 'Y') f.z ^= 1;
          }
          break;
        }
      }
    }
  }
}

char FrameSim::frame_on(const QubitId& q) const {
  auto it = frames_.find(q);
  if (it == frames_.end()) return 'I';
  return pauli_char(it->second.x, it->second.z);
}

std::string FrameSim::frame_string(const std::vector<QubitId>& qs) const {
  std::string s;
  s.reserve(qs.size());
  for (const QubitId& q : qs) s.push_back(frame_on(q));
  return s;
}

ErrorHistogram run_pauli_frame(const Circuit& c, const NoiseModel& noise,
                               const std::vector<QubitId>& tracked,
                               std::int64_t shots, std::uint64_t seed,
                               int threads) {
  ErrorHistogram h;
  h.shots = shots;
  h.tracked = tracked;
  int nt = resolve_threads(threads);
  nt = static_cast<int>(std::min<std::int64_t>(nt, std::max<std::int64_t>(shots, 1)));
  std::vector<std::unordered_map<std::string, std::int64_t>> parts(
      static_cast<std::size_t>(nt));
  std::vector<std::thread> pool;
  std::int64_t chunk = (shots + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    std::int64_t lo = t * chunk, hi = std::min<std::int64_t>(shots, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, t, lo, hi] {
      FrameSim sim;
      auto& local = parts[static_cast<std::size_t>(t)];
      for (std::int64_t s = lo; s < hi; ++s) {
        sim.run(c, noise, RngStream::for_shot(seed, static_cast<std::uint64_t>(s)));
        ++local[sim.frame_string(tracked)];
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& part : parts)
    for (const auto& [s, n] : part) h.counts[s] += n;
  return h;
}

std::string histogram_csv(const ErrorHistogram& h,
                          const std::vector<std::string>& header_comments) {
  std::vector<std::pair<std::string, std::int64_t>> rows;
  std::string identity(h.tracked.size(), 'I');
  for (const auto& [s, n] : h.counts)
    if (s != identity) rows.emplace_back(s, n);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::ostringstream out;
  for (const std::string& line : header_comments) out << "# " << line << "\n";
  out << "pauli_string,count,probability\n";
  out.precision(9);
  for (const auto& [s, n] : rows)
    out << s << "," << n << ","
        << static_cast<double>(n) / static_cast<double>(h.shots) << "\n";
  return out.str();
}

std::pair<std::string, double> top_error(const ErrorHistogram& h) {
  std::string identity(h.tracked.size(), 'I');
  std::string best;
  std::int64_t bn = -1;
  for (const auto& [s, n] : h.counts) {
    if (s == identity) continue;
    if (n > bn || (n == bn && s < best)) { best = s; bn = n; }
  }
  if (bn < 0) return {"", 0.0};
  return {best, static_cast<double>(bn) / static_cast<double>(h.shots)};
}

}  // namespace mpst
