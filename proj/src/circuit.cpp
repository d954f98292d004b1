#include "mpst/circuit.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

using json = nlohmann::json;

namespace mpst {

namespace {

int operand_arity(GateOp op) {
  switch (op) {
    case GateOp::H: case GateOp::X: case GateOp::Y: case GateOp::Z:
    case GateOp::S: case GateOp::Sdg: case GateOp::T: case GateOp::Tdg:
    case GateOp::Measure: case GateOp::Reset: case GateOp::PauliCorrect:
      return 1;
    case GateOp::CNOT: case GateOp::BellPrep:
      return 2;
    case GateOp::Toffoli:
      return 3;
    case GateOp::CSwap:   // control + two equal registers, >= 3 and odd
    case GateOp::Fanout:  // control + >= 1 target
      return -1;
  }
  return -1;
}

const char* kOpNames[] = {"H", "X", "Y", "Z", "S", "Sdg", "T", "Tdg",
                          "CNOT", "Toffoli", "CSwap", "Fanout",
                          "Measure", "Reset", "BellPrep", "PauliCorrect"};
const char* kKindNames[] = {"data", "ghz", "ancilla", "bell_half"};
const char* kBasisNames[] = {"Z", "X", "Y"};
const char* kLevelNames[] = {"macro", "lowered", "expanded"};

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const char* (&names)[N], const char* what) {
  for (std::size_t i = 0; i < N; ++i)
    if (s == names[i]) return static_cast<E>(i);
  throw std::runtime_error(std::string("unknown ") + what + ": " + s);
}

}  // namespace

const char* to_string(GateOp op) { return kOpNames[static_cast<int>(op)]; }
const char* to_string(QubitKind k) { return kKindNames[static_cast<int>(k)]; }
const char* to_string(Basis b) { return kBasisNames[static_cast<int>(b)]; }
const char* to_string(Level l) { return kLevelNames[static_cast<int>(l)]; }

Circuit new_circuit(int k, int n) {
  if (k < 2) throw std::invalid_argument("need at least 2 parties");
  if (n < 1) throw std::invalid_argument("need at least 1 qubit per state");
  Circuit c;
  c.k = k;
  c.n = n;
  c.num_qpus = k;
  return c;
}

std::vector<QubitId> gate_qubits(const Gate& g) { return g.operands; }

bool is_pure_bellprep(const Layer& l) {
  if (l.gates.empty()) return false;
  return std::all_of(l.gates.begin(), l.gates.end(),
                     [](const Gate& g) { return g.op == GateOp::BellPrep; });
}

std::int32_t Circuit::declare_qubit(const QubitId& q) {
  auto it = declared_.find(q);
  if (it != declared_.end()) return it->second;
  auto idx = static_cast<std::int32_t>(qubits.size());
  qubits.push_back(q);
  declared_.emplace(q, idx);
  return idx;
}

void Circuit::note_placement(const Gate& g, std::int32_t layer_index) {
  for (const auto& q : g.operands) {
    declare_qubit(q);
    auto it = last_touch_.find(q);
    if (it == last_touch_.end() || it->second < layer_index)
      last_touch_[q] = layer_index;
  }
  if (g.result_bit >= 0) {
    if (static_cast<std::size_t>(g.result_bit) >= bit_written_.size())
      bit_written_.resize(g.result_bit + 1, -1);
    bit_written_[g.result_bit] = layer_index;
  }
}

void Circuit::append(Gate g, Schedule s) {
  std::int32_t dep = -1;
  for (const auto& q : g.operands) {
    auto it = last_touch_.find(q);
    if (it != last_touch_.end()) dep = std::max(dep, it->second);
  }
  auto bit_dep = [&](const ParityExpr& e) {
    for (auto b : e.bits)
      if (b >= 0 && static_cast<std::size_t>(b) < bit_written_.size())
        dep = std::max(dep, bit_written_[b]);
  };
  bit_dep(g.cond_x);
  bit_dep(g.cond_z);
  bit_dep(g.condition);

  std::int32_t place = -1;
  if (s == Schedule::earliest) {
    bool want_bell = g.op == GateOp::BellPrep;
    for (std::int32_t L = dep + 1; L < static_cast<std::int32_t>(layers.size()); ++L) {
      bool bell_layer = is_pure_bellprep(layers[L]);
      bool empty = layers[L].gates.empty();
      if (want_bell ? (bell_layer || empty) : !bell_layer) {
        place = L;
        break;
      }
    }
  }
  if (place < 0) place = new_layer();
  note_placement(g, place);
  layers[place].gates.push_back(std::move(g));
}

void Circuit::append_at(Gate g, std::int32_t layer_index) {
  if (layer_index < 0 || layer_index >= static_cast<std::int32_t>(layers.size()))
    throw std::runtime_error("append_at: no such layer");
  note_placement(g, layer_index);
  layers[layer_index].gates.push_back(std::move(g));
}

std::int32_t Circuit::depth() const {
  std::int32_t d = 0;
  for (const auto& l : layers)
    if (!is_pure_bellprep(l)) ++d;
  return d;
}

void Circuit::pad_to_depth(std::int32_t d) {
  while (depth() < d) new_layer();
}

void Circuit::begin_step(const std::string& name) {
  open_step_ = name;
  open_step_start_ = static_cast<std::int32_t>(layers.size());
}

void Circuit::end_step() {
  steps.emplace_back(open_step_, open_step_start_,
                     static_cast<std::int32_t>(layers.size()));
  open_step_.clear();
}

void Circuit::rebuild_index() {
  declared_.clear();
  last_touch_.clear();
  bit_written_.assign(num_bits, -1);
  std::vector<QubitId> decl = std::move(qubits);
  qubits.clear();
  for (const auto& q : decl) declare_qubit(q);
  for (std::int32_t L = 0; L < static_cast<std::int32_t>(layers.size()); ++L)
    for (const auto& g : layers[L].gates) note_placement(g, L);
}

void Circuit::validate() const {
  auto fail = [](const std::string& m) { throw std::runtime_error("validate: " + m); };
  auto check_bits = [&](const ParityExpr& e) {
    for (auto b : e.bits)
      if (b < 0 || b >= num_bits) fail("classical bit out of range");
  };
  std::vector<bool> written(num_bits, false);
  for (std::size_t L = 0; L < layers.size(); ++L) {
    const Layer& layer = layers[L];
    bool has_bell = false, has_other = false;
    std::unordered_map<QubitId, int, QubitIdHash> seen;
    for (const Gate& g : layer.gates) {
      (g.op == GateOp::BellPrep ? has_bell : has_other) = true;
      int arity = operand_arity(g.op);
      if (arity >= 0 && static_cast<int>(g.operands.size()) != arity)
        fail(std::string("bad operand count for ") + to_string(g.op));
      if (g.op == GateOp::CSwap &&
          (g.operands.size() < 3 || g.operands.size() % 2 == 0))
        fail("CSwap needs control plus two equal registers");
      if (g.op == GateOp::Fanout && g.operands.size() < 2)
        fail("Fanout needs control plus targets");
      for (std::size_t oi = 0; oi < g.operands.size(); ++oi) {
        const QubitId& q = g.operands[oi];
        if (!declared(q)) fail("gate uses undeclared qubit");
        // Toffolis sharing their control in one layer express the commuting
        // parallel form the fanout rewrite consumes; any other reuse is a
        // scheduling collision.
        bool shared_ctl = g.op == GateOp::Toffoli && oi == 0;
        auto it = seen.find(q);
        if (it != seen.end()) {
          if (!(shared_ctl && it->second == 2))
            fail("layer touches a qubit twice");
        } else {
          seen.emplace(q, shared_ctl ? 2 : 1);
        }
      }
      if (g.op == GateOp::Measure) {
        if (g.result_bit < 0 || g.result_bit >= num_bits)
          fail("Measure without a valid result bit");
        if (written[g.result_bit]) fail("classical bit written twice");
        written[g.result_bit] = true;
      }
      check_bits(g.cond_x);
      check_bits(g.cond_z);
      check_bits(g.condition);

      // Distribution rule: only BellPrep spans QPUs (adjacent ones); macro
      // CSwap/Fanout/Toffoli are virtual placeholders exempt at macro level.
      if (g.op == GateOp::BellPrep) {
        int d = g.operands[0].qpu - g.operands[1].qpu;
        if (d != 1 && d != -1) fail("BellPrep endpoints must be adjacent QPUs");
      } else {
        bool macro_op = g.op == GateOp::CSwap || g.op == GateOp::Fanout ||
                        g.op == GateOp::Toffoli;
        bool exempt = macro_op && level == Level::macro;
        if (!exempt) {
          for (const auto& q : g.operands)
            if (q.qpu != g.operands[0].qpu)
              fail(std::string(to_string(g.op)) + " spans QPUs");
        }
        if (level == Level::expanded && macro_op)
          fail("macro op present in expanded circuit");
      }
    }
    if (has_bell && has_other)
      fail("BellPrep must occupy pure BellPrep layers");
  }
  for (const auto& inj : injections)
    if (inj.layer < 0 || inj.layer >= static_cast<std::int32_t>(layers.size()))
      fail("injection site out of range");
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

json parity_to_json(const ParityExpr& e) { return json(e.bits); }

ParityExpr parity_from_json(const json& j) {
  ParityExpr e;
  e.bits = j.get<std::vector<std::int32_t>>();
  return e;
}

}  // namespace

std::string serialize(const Circuit& c) {
  json j;
  j["format_version"] = Circuit::kFormatVersion;
  j["k"] = c.k;
  j["n"] = c.n;
  j["num_qpus"] = c.num_qpus;
  j["level"] = to_string(c.level);
  j["fanout_expanded"] = c.fanout_expanded;
  j["num_bits"] = c.num_bits;

  json qs = json::array();
  std::unordered_map<QubitId, std::int32_t, QubitIdHash> index;
  for (std::size_t i = 0; i < c.qubits.size(); ++i) {
    const auto& q = c.qubits[i];
    qs.push_back({{"qpu", q.qpu}, {"kind", to_string(q.kind)}, {"index", q.index}});
    index.emplace(q, static_cast<std::int32_t>(i));
  }
  j["qubits"] = std::move(qs);

  json layers = json::array();
  for (const auto& layer : c.layers) {
    json lg = json::array();
    for (const auto& g : layer.gates) {
      json gj;
      gj["op"] = to_string(g.op);
      json ops = json::array();
      for (const auto& q : g.operands) ops.push_back(index.at(q));
      gj["q"] = std::move(ops);
      if (g.op == GateOp::Measure) {
        gj["basis"] = to_string(g.basis);
        gj["bit"] = g.result_bit;
      }
      if (!g.cond_x.empty()) gj["cx"] = parity_to_json(g.cond_x);
      if (!g.cond_z.empty()) gj["cz"] = parity_to_json(g.cond_z);
      if (!g.condition.empty()) gj["if"] = parity_to_json(g.condition);
      lg.push_back(std::move(gj));
    }
    layers.push_back(std::move(lg));
  }
  j["layers"] = std::move(layers);

  json inits = json::array();
  for (const auto& is : c.initial_states) {
    json qj = json::array();
    for (const auto& q : is.qubits) qj.push_back(index.at(q));
    json amps = json::array();
    for (Eigen::Index i = 0; i < is.amps.size(); ++i) {
      amps.push_back(is.amps[i].real());
      amps.push_back(is.amps[i].imag());
    }
    inits.push_back({{"qubits", std::move(qj)}, {"amps", std::move(amps)}});
  }
  j["initial_states"] = std::move(inits);

  j["parity_bits"] = c.parity_bits;
  j["parity_groups"] = c.parity_groups;
  j["obs_bits"] = c.obs_bits;

  json injs = json::array();
  for (const auto& inj : c.injections) {
    json tj = json::array();
    for (const auto& q : inj.targets) tj.push_back(index.at(q));
    json hist = json::array();
    for (const auto& [s, p] : inj.histogram) hist.push_back({{"pauli", s}, {"p", p}});
    injs.push_back({{"layer", inj.layer},
                    {"targets", std::move(tj)},
                    {"histogram", std::move(hist)}});
  }
  j["injections"] = std::move(injs);

  json steps = json::array();
  for (const auto& [name, a, b] : c.steps) steps.push_back({name, a, b});
  j["steps"] = std::move(steps);

  return j.dump(2);
}

Circuit deserialize(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("format_version") ||
      j["format_version"].get<int>() != Circuit::kFormatVersion)
    throw std::runtime_error("unsupported circuit format version");

  Circuit c;
  c.k = j["k"].get<std::int32_t>();
  c.n = j["n"].get<std::int32_t>();
  c.num_qpus = j["num_qpus"].get<std::int32_t>();
  c.level = parse_enum<Level>(j["level"].get<std::string>(), kLevelNames, "level");
  c.fanout_expanded = j["fanout_expanded"].get<bool>();
  c.num_bits = j["num_bits"].get<std::int32_t>();

  for (const auto& qj : j["qubits"]) {
    QubitId q;
    q.qpu = qj["qpu"].get<std::int32_t>();
    q.kind = parse_enum<QubitKind>(qj["kind"].get<std::string>(), kKindNames, "kind");
    q.index = qj["index"].get<std::int32_t>();
    c.qubits.push_back(q);
  }
  auto qref = [&](const json& v) -> QubitId {
    auto i = v.get<std::size_t>();
    if (i >= c.qubits.size()) throw std::runtime_error("qubit index out of range");
    return c.qubits[i];
  };

  for (const auto& lj : j["layers"]) {
    Layer layer;
    for (const auto& gj : lj) {
      Gate g;
      g.op = parse_enum<GateOp>(gj["op"].get<std::string>(), kOpNames, "op");
      for (const auto& v : gj["q"]) g.operands.push_back(qref(v));
      if (gj.contains("basis"))
        g.basis = parse_enum<Basis>(gj["basis"].get<std::string>(), kBasisNames, "basis");
      if (gj.contains("bit")) g.result_bit = gj["bit"].get<std::int32_t>();
      if (gj.contains("cx")) g.cond_x = parity_from_json(gj["cx"]);
      if (gj.contains("cz")) g.cond_z = parity_from_json(gj["cz"]);
      if (gj.contains("if")) g.condition = parity_from_json(gj["if"]);
      layer.gates.push_back(std::move(g));
    }
    c.layers.push_back(std::move(layer));
  }

  for (const auto& ij : j["initial_states"]) {
    InitialState is;
    for (const auto& v : ij["qubits"]) is.qubits.push_back(qref(v));
    const auto& amps = ij["amps"];
    is.amps.resize(static_cast<Eigen::Index>(amps.size() / 2));
    for (Eigen::Index i = 0; i < is.amps.size(); ++i)
      is.amps[i] = {amps[2 * i].get<double>(), amps[2 * i + 1].get<double>()};
    c.initial_states.push_back(std::move(is));
  }

  c.parity_bits = j["parity_bits"].get<std::vector<std::int32_t>>();
  if (j.contains("parity_groups"))
    c.parity_groups =
        j["parity_groups"].get<std::vector<std::vector<std::int32_t>>>();
  c.obs_bits = j["obs_bits"].get<std::vector<std::int32_t>>();

  for (const auto& ij : j["injections"]) {
    Injection inj;
    inj.layer = ij["layer"].get<std::int32_t>();
    for (const auto& v : ij["targets"]) inj.targets.push_back(qref(v));
    for (const auto& h : ij["histogram"])
      inj.histogram.emplace_back(h["pauli"].get<std::string>(), h["p"].get<double>());
    c.injections.push_back(std::move(inj));
  }

  for (const auto& sj : j["steps"])
    c.steps.emplace_back(sj[0].get<std::string>(), sj[1].get<std::int32_t>(),
                         sj[2].get<std::int32_t>());

  c.rebuild_index();
  return c;
}

}  // namespace mpst
