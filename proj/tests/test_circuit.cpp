#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "mpst/circuit.hpp"

using namespace mpst;

namespace {

Circuit sample_circuit() {
  Circuit c = new_circuit(2, 1);
  QubitId d0{0, QubitKind::data, 0};
  QubitId d1{1, QubitKind::data, 0};
  QubitId b0{0, QubitKind::bell_half, 0};
  QubitId b1{1, QubitKind::bell_half, 0};
  for (auto q : {d0, d1, b0, b1}) c.declare_qubit(q);

  InitialState st;
  st.qubits = {d0};
  st.amps = Eigen::VectorXcd(2);
  st.amps << 0.6, 0.8;
  c.initial_states.push_back(st);

  c.begin_step("work");
  std::int32_t L0 = c.new_layer();
  Gate bell;
  bell.op = GateOp::BellPrep;
  bell.operands = {b0, b1};
  c.append_at(std::move(bell), L0);

  std::int32_t L1 = c.new_layer();
  Gate cx;
  cx.op = GateOp::CNOT;
  cx.operands = {d0, b0};
  c.append_at(std::move(cx), L1);

  std::int32_t L2 = c.new_layer();
  Gate m;
  m.op = GateOp::Measure;
  m.operands = {b0};
  m.basis = Basis::X;
  m.result_bit = c.new_bit();
  c.append_at(std::move(m), L2);

  std::int32_t L3 = c.new_layer();
  Gate pc;
  pc.op = GateOp::PauliCorrect;
  pc.operands = {b1};
  pc.cond_z.bits = {0};
  c.append_at(std::move(pc), L3);
  c.end_step();

  c.begin_step("readout");
  std::int32_t L4 = c.new_layer();
  Gate mz;
  mz.op = GateOp::Measure;
  mz.operands = {b1};
  mz.result_bit = c.new_bit();
  c.append_at(std::move(mz), L4);
  c.end_step();

  c.parity_bits = {1};
  c.parity_groups = {{1}};
  c.obs_bits = {-1, 1};

  Injection inj;
  inj.layer = 1;
  inj.targets = {b1};
  inj.histogram = {{"X", 0.25}, {"Z", 0.25}};
  c.injections.push_back(inj);

  c.validate();
  return c;
}

}  // namespace

TEST_CASE("serialize/deserialize roundtrip is lossless") {
  Circuit c = sample_circuit();
  std::string once = serialize(c);
  Circuit back = deserialize(once);
  back.validate();
  CHECK(serialize(back) == once);
  CHECK(back.k == c.k);
  CHECK(back.num_bits == c.num_bits);
  CHECK(back.qubits.size() == c.qubits.size());
  CHECK(back.layers.size() == c.layers.size());
  CHECK(back.steps == c.steps);
  CHECK(back.parity_groups == c.parity_groups);
  CHECK(back.obs_bits == c.obs_bits);
  REQUIRE(back.injections.size() == 1);
  CHECK(back.injections[0].histogram == c.injections[0].histogram);
  REQUIRE(back.initial_states.size() == 1);
  CHECK(back.initial_states[0].amps.isApprox(c.initial_states[0].amps));
}

TEST_CASE("deserialize tolerates unknown top-level keys") {
  Circuit c = sample_circuit();
  std::string s = serialize(c);
  // Emulate the CLI dump which injects a "config" object.
  REQUIRE(s.back() == '}');
  std::string patched =
      s.substr(0, s.size() - 1) + ",\"config\":{\"command\":\"compile\"}}";
  Circuit back = deserialize(patched);
  back.validate();
  CHECK(serialize(back) == s);
}

TEST_CASE("validate rejects malformed circuits") {
  SUBCASE("undeclared operand") {
    // append_at auto-declares, so model a corrupt circuit by pushing the
    // gate into the layer directly.
    Circuit c = new_circuit(2, 1);
    c.declare_qubit({0, QubitKind::data, 0});
    std::int32_t L = c.new_layer();
    Gate g;
    g.op = GateOp::CNOT;
    g.operands = {{0, QubitKind::data, 0}, {0, QubitKind::data, 7}};
    c.layers[L].gates.push_back(std::move(g));
    CHECK_THROWS_AS(c.validate(), std::runtime_error);
  }
  SUBCASE("qubit touched twice in one layer") {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit({0, QubitKind::data, 0});
    std::int32_t L = c.new_layer();
    Gate a;
    a.op = GateOp::H;
    a.operands = {{0, QubitKind::data, 0}};
    Gate b = a;
    c.append_at(std::move(a), L);
    c.append_at(std::move(b), L);
    CHECK_THROWS_AS(c.validate(), std::runtime_error);
  }
  SUBCASE("non-adjacent bell endpoints") {
    Circuit c = new_circuit(3, 1);
    c.declare_qubit({0, QubitKind::bell_half, 0});
    c.declare_qubit({2, QubitKind::bell_half, 0});
    std::int32_t L = c.new_layer();
    Gate g;
    g.op = GateOp::BellPrep;
    g.operands = {{0, QubitKind::bell_half, 0}, {2, QubitKind::bell_half, 0}};
    c.append_at(std::move(g), L);
    CHECK_THROWS_AS(c.validate(), std::runtime_error);
  }
  SUBCASE("measure without result bit") {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit({0, QubitKind::data, 0});
    std::int32_t L = c.new_layer();
    Gate g;
    g.op = GateOp::Measure;
    g.operands = {{0, QubitKind::data, 0}};
    c.append_at(std::move(g), L);
    CHECK_THROWS_AS(c.validate(), std::runtime_error);
  }
  SUBCASE("cross-QPU two-qubit gate") {
    Circuit c = new_circuit(2, 1);
    c.declare_qubit({0, QubitKind::data, 0});
    c.declare_qubit({1, QubitKind::data, 0});
    std::int32_t L = c.new_layer();
    Gate g;
    g.op = GateOp::CNOT;
    g.operands = {{0, QubitKind::data, 0}, {1, QubitKind::data, 0}};
    c.append_at(std::move(g), L);
    CHECK_THROWS_AS(c.validate(), std::runtime_error);
  }
}

TEST_CASE("macro ops are layer-exempt only at macro level") {
  Circuit c = new_circuit(2, 1);
  c.declare_qubit({0, QubitKind::ghz, 0});
  c.declare_qubit({0, QubitKind::data, 0});
  c.declare_qubit({1, QubitKind::data, 0});
  std::int32_t L = c.new_layer();
  Gate g;
  g.op = GateOp::CSwap;
  g.operands = {{0, QubitKind::ghz, 0},
                {0, QubitKind::data, 0},
                {1, QubitKind::data, 0}};
  c.append_at(std::move(g), L);
  c.level = Level::macro;
  CHECK_NOTHROW(c.validate());
  c.level = Level::expanded;
  CHECK_THROWS_AS(c.validate(), std::runtime_error);
}

TEST_CASE("step bookkeeping tiles the layer range") {
  Circuit c = sample_circuit();
  std::int32_t cursor = 0;
  for (const auto& [name, first, last] : c.steps) {
    CHECK(first == cursor);
    cursor = last;
  }
  CHECK(cursor == static_cast<std::int32_t>(c.layers.size()));
}
