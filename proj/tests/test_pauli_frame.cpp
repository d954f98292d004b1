#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "mpst/circuit.hpp"
#include "mpst/compiler.hpp"
#include "mpst/pauli_frame.hpp"
#include "mpst/rng.hpp"
#include "mpst/statevector.hpp"

using namespace mpst;

namespace {

Gate g1(GateOp op, QubitId q) {
  Gate g;
  g.op = op;
  g.operands = {q};
  return g;
}

Gate g2(GateOp op, QubitId a, QubitId b) {
  Gate g;
  g.op = op;
  g.operands = {a, b};
  return g;
}

Gate meas(QubitId q, std::int32_t bit, Basis b = Basis::Z) {
  Gate g;
  g.op = GateOp::Measure;
  g.operands = {q};
  g.result_bit = bit;
  g.basis = b;
  return g;
}

void inject(Circuit& c, std::int32_t layer, QubitId q, const std::string& p) {
  Injection inj;
  inj.layer = layer;
  inj.targets = {q};
  inj.histogram = {{p, 1.0}};
  c.injections.push_back(inj);
}

}  // namespace

TEST_CASE("frames conjugate through Clifford gates") {
  QubitId a{0, QubitKind::data, 0};
  QubitId b{0, QubitKind::data, 1};

  SUBCASE("X on the control copies onto the CNOT target") {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit(a);
    c.declare_qubit(b);
    std::int32_t L0 = c.new_layer();
    c.append_at(g1(GateOp::H, a), L0);
    inject(c, L0, a, "X");
    std::int32_t L1 = c.new_layer();
    c.append_at(g2(GateOp::CNOT, a, b), L1);
    FrameSim sim;
    sim.run(c, NoiseModel{}, RngStream::for_shot(1, 0));
    CHECK(sim.frame_on(a) == 'X');
    CHECK(sim.frame_on(b) == 'X');
    CHECK(sim.frame_string({a, b}) == "XX");
  }
  SUBCASE("Z on the target copies onto the CNOT control") {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit(a);
    c.declare_qubit(b);
    std::int32_t L0 = c.new_layer();
    c.append_at(g1(GateOp::H, a), L0);
    inject(c, L0, b, "Z");
    std::int32_t L1 = c.new_layer();
    c.append_at(g2(GateOp::CNOT, a, b), L1);
    FrameSim sim;
    sim.run(c, NoiseModel{}, RngStream::for_shot(1, 0));
    CHECK(sim.frame_on(a) == 'Z');
    CHECK(sim.frame_on(b) == 'Z');
  }
  SUBCASE("H exchanges X and Z") {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit(a);
    std::int32_t L0 = c.new_layer();
    c.append_at(g1(GateOp::H, a), L0);
    inject(c, L0, a, "X");
    std::int32_t L1 = c.new_layer();
    c.append_at(g1(GateOp::H, a), L1);
    FrameSim sim;
    sim.run(c, NoiseModel{}, RngStream::for_shot(1, 0));
    CHECK(sim.frame_on(a) == 'Z');
  }
  SUBCASE("S turns X into Y") {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit(a);
    std::int32_t L0 = c.new_layer();
    c.append_at(g1(GateOp::H, a), L0);
    inject(c, L0, a, "X");
    std::int32_t L1 = c.new_layer();
    c.append_at(g1(GateOp::S, a), L1);
    FrameSim sim;
    sim.run(c, NoiseModel{}, RngStream::for_shot(1, 0));
    CHECK(sim.frame_on(a) == 'Y');
  }
}

TEST_CASE("frame flips show up on the right measurement bases") {
  QubitId q{0, QubitKind::data, 0};
  auto run_one = [&](const std::string& pauli, Basis basis) {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit(q);
    std::int32_t L0 = c.new_layer();
    c.append_at(g1(GateOp::H, q), L0);
    inject(c, L0, q, pauli);
    std::int32_t L1 = c.new_layer();
    c.append_at(meas(q, c.new_bit(), basis), L1);
    FrameSim sim;
    sim.run(c, NoiseModel{}, RngStream::for_shot(3, 7));
    return sim.flips[0];
  };
  CHECK(run_one("X", Basis::Z) == 1);
  CHECK(run_one("Z", Basis::Z) == 0);
  CHECK(run_one("Z", Basis::X) == 1);
  CHECK(run_one("X", Basis::X) == 0);
  CHECK(run_one("Y", Basis::Z) == 1);
  CHECK(run_one("Y", Basis::X) == 1);
}

TEST_CASE("noiseless teleportation leaves an identity frame") {
  QubitId src{0, QubitKind::data, 0};
  QubitId h{0, QubitKind::bell_half, 0};
  QubitId dst{1, QubitKind::bell_half, 0};
  Circuit c = new_circuit(2, 1);
  for (auto q : {src, h, dst}) c.declare_qubit(q);
  std::int32_t L0 = c.new_layer();
  c.append_at(g2(GateOp::BellPrep, h, dst), L0);
  std::int32_t L1 = c.new_layer();
  c.append_at(g2(GateOp::CNOT, src, h), L1);
  std::int32_t L2 = c.new_layer();
  c.append_at(meas(h, c.new_bit(), Basis::Z), L2);
  std::int32_t L3 = c.new_layer();
  c.append_at(meas(src, c.new_bit(), Basis::X), L3);
  std::int32_t L4 = c.new_layer();
  Gate pc;
  pc.op = GateOp::PauliCorrect;
  pc.operands = {dst};
  pc.cond_x.bits = {0};
  pc.cond_z.bits = {1};
  c.append_at(std::move(pc), L4);

  for (std::uint64_t s = 0; s < 32; ++s) {
    FrameSim sim;
    sim.run(c, NoiseModel{}, RngStream::for_shot(11, s));
    CHECK(sim.frame_on(dst) == 'I');
  }
}

TEST_CASE("non-Clifford gates are rejected") {
  QubitId q{0, QubitKind::data, 0};
  Circuit c = new_circuit(2, 1);
  c.declare_qubit(q);
  std::int32_t L0 = c.new_layer();
  c.append_at(g1(GateOp::T, q), L0);
  FrameSim sim;
  CHECK_THROWS_AS(sim.run(c, NoiseModel{}, RngStream::for_shot(0, 0)),
                  std::invalid_argument);
}

TEST_CASE("frame statistics match the statevector on the fanout gadget") {
  // GHZ-correlation breakdown: prepare |+> on the control, fan out to m
  // targets, measure everything. Ideal outcomes are the two constant strings;
  // both engines must report the same non-constant-outcome rate.
  const std::int32_t m = 4;
  const std::int64_t shots = 100000;

  for (double p : {0.001, 0.005}) {
    Circuit c = build_fanout_gadget(m, /*full=*/true);
    std::vector<QubitId> tracked = {{0, QubitKind::ghz, 0}};
    for (std::int32_t l = 0; l < m; ++l)
      tracked.push_back({0, QubitKind::data, l});

    std::int32_t L = c.new_layer();
    std::vector<std::int32_t> final_bits;
    for (const auto& q : tracked) {
      std::int32_t b = c.new_bit();
      final_bits.push_back(b);
      c.append_at(meas(q, b), L);
    }
    InitialState st;
    st.qubits = {tracked[0]};
    st.amps = Eigen::VectorXcd(2);
    st.amps << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    c.initial_states.push_back(st);
    c.validate();

    NoiseModel noise = NoiseModel::from_base_rate(p);

    RunOptions opts;
    opts.shots = shots;
    opts.seed = 2024;
    opts.threads = 0;
    RunResult rr = run_statevector(c, noise, opts);
    std::int64_t sv_bad = 0;
    for (std::int64_t s = 0; s < rr.shots; ++s) {
      bool all0 = true, all1 = true;
      for (std::int32_t b : final_bits) {
        if (rr.bit(s, b)) all0 = false;
        else all1 = false;
      }
      if (!all0 && !all1) ++sv_bad;
    }

    std::int64_t fr_bad = 0;
    for (std::int64_t s = 0; s < shots; ++s) {
      FrameSim sim;
      sim.run(c, noise, RngStream::for_shot(777, static_cast<std::uint64_t>(s)));
      bool all0 = true, all1 = true;
      for (std::int32_t b : final_bits) {
        if (sim.flips[b]) all0 = false;
        else all1 = false;
      }
      if (!all0 && !all1) ++fr_bad;
    }

    double rs = static_cast<double>(sv_bad) / shots;
    double rf = static_cast<double>(fr_bad) / shots;
    double var = rs * (1 - rs) / shots + rf * (1 - rf) / shots;
    double tol = 5.0 * std::sqrt(std::max(var, 1e-12));
    INFO("p=" << p << " statevector=" << rs << " frame=" << rf);
    CHECK(std::abs(rs - rf) <= tol);
  }
}

TEST_CASE("run_pauli_frame is deterministic and thread-count independent") {
  Circuit c = build_fanout_gadget(3, true);
  std::vector<QubitId> tracked = {{0, QubitKind::ghz, 0},
                                  {0, QubitKind::data, 0},
                                  {0, QubitKind::data, 1},
                                  {0, QubitKind::data, 2}};
  NoiseModel noise = NoiseModel::from_base_rate(0.003);
  ErrorHistogram h1 = run_pauli_frame(c, noise, tracked, 20000, 99, 1);
  ErrorHistogram h1b = run_pauli_frame(c, noise, tracked, 20000, 99, 1);
  ErrorHistogram h8 = run_pauli_frame(c, noise, tracked, 20000, 99, 8);
  CHECK(h1.counts == h1b.counts);
  CHECK(h1.counts == h8.counts);
  CHECK(histogram_csv(h1) == histogram_csv(h8));

  std::int64_t total = 0;
  for (const auto& [s, n] : h1.counts) total += n;
  CHECK(total == h1.shots);
}

TEST_CASE("histogram_csv formats and sorts rows") {
  ErrorHistogram h;
  h.shots = 10;
  h.tracked = {{0, QubitKind::data, 0}, {0, QubitKind::data, 1}};
  h.counts = {{"II", 6}, {"ZI", 2}, {"IZ", 2}};
  std::string csv = histogram_csv(h, {"setting=demo"});
  CHECK(csv.find("# setting=demo") != std::string::npos);
  CHECK(csv.find("pauli_string,count,probability") != std::string::npos);
  CHECK(csv.find("II") == std::string::npos);  // identity row excluded
  // Equal counts tie-break by string ascending.
  CHECK(csv.find("IZ,2") < csv.find("ZI,2"));

  auto [top, prob] = top_error(h);
  CHECK(top == "IZ");
  CHECK(prob == doctest::Approx(0.2));
}
