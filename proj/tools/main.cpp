// Command-line front end: compiles distributed multi-party swap-test
// circuits, runs the noisy simulators, estimates traces / entropies /
// virtual expectations, accounts per-QPU resources, and emits network-bound
// and fanout-error tables. Every artifact embeds the job configuration so a
// run is reproducible from the file alone.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpst/circuit.hpp"
#include "mpst/compiler.hpp"
#include "mpst/estimator.hpp"
#include "mpst/netbound.hpp"
#include "mpst/noise.hpp"
#include "mpst/pauli_frame.hpp"
#include "mpst/resources.hpp"
#include "mpst/statevector.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

// Ordered key=value pairs echoed into every artifact. Thread count is
// deliberately excluded: results are thread-count independent and the
// artifacts must be byte-identical across --threads settings.
class Config {
 public:
  void add(const std::string& key, const std::string& v) {
    entries_.emplace_back(key, v);
  }
  void add(const std::string& key, std::int64_t v) {
    add(key, std::to_string(v));
  }
  void add(const std::string& key, double v) { add(key, fmt(v)); }
  void add_noise(const mpst::NoiseModel& m) {
    add("p1", m.p1);
    add("p2", m.p2);
    add("p_meas", m.p_meas);
    add("p_bell", m.p_bell);
  }
  std::vector<std::string> comment_lines() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back("# " + k + "=" + v);
    return out;
  }
  // Unprefixed key=value lines, for sinks that add their own comment marker.
  std::vector<std::string> raw_lines() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k + "=" + v);
    return out;
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : entries_) j[k] = v;
    return j;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open input file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// --states / --rho accept inline text or @file indirection.
std::string load_arg(const std::string& text) {
  if (!text.empty() && text[0] == '@') return read_text(text.substr(1));
  return text;
}

struct NoiseFlags {
  double p = -1.0;  // base rate shorthand
  double p1 = -1.0, p2 = -1.0, p_meas = -1.0, p_bell = -1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--p", p,
                    "base error rate (sets p1=p/10, p2=p, p_meas=p)");
    cmd->add_option("--p1", p1, "single-qubit depolarizing rate");
    cmd->add_option("--p2", p2, "two-qubit depolarizing rate");
    cmd->add_option("--p-meas", p_meas, "measurement bit-flip rate");
    cmd->add_option("--p-bell", p_bell, "Bell-pair depolarizing rate");
  }
  mpst::NoiseModel resolve() const {
    mpst::NoiseModel m;
    if (p >= 0) m = mpst::NoiseModel::from_base_rate(p);
    if (p1 >= 0) m.p1 = p1;
    if (p2 >= 0) m.p2 = p2;
    if (p_meas >= 0) m.p_meas = p_meas;
    if (p_bell >= 0) m.p_bell = p_bell;
    return m;
  }
};

mpst::PartySpec make_spec(std::int32_t k, std::int32_t n,
                          const std::string& states_text) {
  mpst::PartySpec spec;
  spec.k = k;
  spec.n = n;
  spec.states = mpst::parse_states(load_arg(states_text), k, n);
  return spec;
}

mpst::StateSpec parse_rho(const std::string& text, std::int32_t n) {
  if (text.empty())
    throw std::invalid_argument("this mode needs --rho STATE");
  return mpst::parse_states("*:" + load_arg(text), 1, n)[0];
}

mpst::Basis parse_basis(const std::string& b) {
  if (b == "X" || b == "x") return mpst::Basis::X;
  if (b == "Y" || b == "y") return mpst::Basis::Y;
  throw std::invalid_argument("run basis must be X or Y");
}

std::string csv_text(const Config& cfg, const std::string& header,
                     const std::vector<std::string>& rows) {
  std::ostringstream o;
  for (const auto& line : cfg.comment_lines()) o << line << "\n";
  o << header << "\n";
  for (const auto& r : rows) o << r << "\n";
  return o.str();
}

// --- subcommand payloads -------------------------------------------------------

struct CompileArgs {
  std::int32_t k = 3, n = 1;
  std::string scheme = "telegate", basis = "X", observable, states;
  std::string dump;
  bool keep_macro_fanout = false;
};

Config compile_config(const CompileArgs& a) {
  Config cfg;
  cfg.add("command", "compile");
  cfg.add("k", static_cast<std::int64_t>(a.k));
  cfg.add("n", static_cast<std::int64_t>(a.n));
  cfg.add("scheme", a.scheme);
  cfg.add("basis", a.basis);
  if (!a.observable.empty()) cfg.add("observable", a.observable);
  if (!a.states.empty()) cfg.add("states", a.states);
  if (a.keep_macro_fanout) cfg.add("fanout_expansion", "false");
  return cfg;
}

mpst::Circuit compile_circuit(const CompileArgs& a) {
  mpst::Scheme scheme{mpst::parse_variant(a.scheme), !a.keep_macro_fanout};
  return mpst::build_swap_test(make_spec(a.k, a.n, a.states), scheme,
                               parse_basis(a.basis), a.observable);
}

void run_compile(const CompileArgs& a) {
  mpst::Circuit c = compile_circuit(a);
  json j = json::parse(mpst::serialize(c));
  j["config"] = compile_config(a).to_json();
  if (a.dump.empty())
    throw std::invalid_argument("compile needs --dump PATH");
  write_text(a.dump, j.dump(2) + "\n");
  std::cout << "compiled scheme=" << a.scheme << " k=" << a.k << " n=" << a.n
            << " layers=" << c.layers.size() << " qubits=" << c.qubits.size()
            << " -> " << a.dump << "\n";
}

struct SimulateArgs {
  CompileArgs compile;
  std::string circuit;
  std::int64_t shots = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  NoiseFlags noise;
  std::string csv;
};

void run_simulate(const SimulateArgs& a) {
  mpst::Circuit c = a.circuit.empty()
                        ? compile_circuit(a.compile)
                        : mpst::deserialize(read_text(a.circuit));
  mpst::NoiseModel noise = a.noise.resolve();
  mpst::RunOptions opts;
  opts.shots = a.shots;
  opts.seed = a.seed;
  opts.threads = a.threads;
  mpst::RunResult res = mpst::run_statevector(c, noise, opts);

  Config cfg;
  cfg.add("command", "simulate");
  if (!a.circuit.empty()) {
    cfg.add("circuit", a.circuit);
  } else {
    cfg.add("k", static_cast<std::int64_t>(a.compile.k));
    cfg.add("n", static_cast<std::int64_t>(a.compile.n));
    cfg.add("scheme", a.compile.scheme);
    cfg.add("basis", a.compile.basis);
    if (!a.compile.states.empty()) cfg.add("states", a.compile.states);
  }
  cfg.add("shots", a.shots);
  cfg.add("seed", static_cast<std::int64_t>(a.seed));
  cfg.add_noise(noise);

  std::vector<std::string> rows;
  rows.reserve(res.shots);
  for (std::int64_t s = 0; s < res.shots; ++s) {
    std::string bits(res.num_bits, '0');
    for (std::int32_t b = 0; b < res.num_bits; ++b)
      bits[b] = res.bit(s, b) ? '1' : '0';
    rows.push_back(std::to_string(s) + "," + bits);
  }
  write_text(a.csv, csv_text(cfg, "shot,record", rows));
  if (!a.csv.empty() && a.csv != "-")
    std::cout << "simulated shots=" << res.shots << " bits=" << res.num_bits
              << " -> " << a.csv << "\n";
}

struct EstimateArgs {
  std::int32_t k = 2, n = 1;
  std::string scheme = "telegate", states, rho, observable;
  std::int32_t renyi = 0, spectrum = 0, copies = 0;
  std::int64_t shots = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  NoiseFlags noise;
  std::string csv;
};

void run_estimate(const EstimateArgs& a) {
  mpst::Scheme scheme{mpst::parse_variant(a.scheme), true};
  mpst::NoiseModel noise = a.noise.resolve();
  mpst::EstimateOptions opts;
  opts.shots = a.shots;
  opts.seed = a.seed;
  opts.threads = a.threads;

  int modes = (a.renyi > 0) + (a.spectrum > 0) + (a.copies > 0);
  if (modes > 1)
    throw std::invalid_argument(
        "--renyi, --spectrum and --copies are mutually exclusive");

  Config cfg;
  cfg.add("command", "estimate");
  cfg.add("k", static_cast<std::int64_t>(a.k));
  cfg.add("n", static_cast<std::int64_t>(a.n));
  cfg.add("scheme", a.scheme);
  cfg.add("shots", a.shots);
  cfg.add("seed", static_cast<std::int64_t>(a.seed));
  cfg.add_noise(noise);

  json j;
  j["command"] = "estimate";
  j["scheme"] = a.scheme;
  j["shots_per_basis"] = a.shots;
  j["seed"] = a.seed;
  j["noise"] = {{"p1", noise.p1},
                {"p2", noise.p2},
                {"p_meas", noise.p_meas},
                {"p_bell", noise.p_bell}};
  std::string header, row;

  if (a.renyi > 0) {
    cfg.add("mode", "renyi");
    cfg.add("order", static_cast<std::int64_t>(a.renyi));
    cfg.add("rho", a.rho);
    auto e = mpst::renyi_entropy(parse_rho(a.rho, a.n), a.renyi, scheme,
                                 noise, opts);
    j["mode"] = "renyi";
    j["order"] = a.renyi;
    j["n"] = a.n;
    j["value"] = e.value;
    j["stderr_value"] = e.stderr_value;
    j["trace_re"] = e.trace.re;
    j["trace_stderr_re"] = e.trace.stderr_re;
    header = "order,value,stderr_value,trace_re,trace_stderr_re";
    row = std::to_string(a.renyi) + "," + fmt(e.value) + "," +
          fmt(e.stderr_value) + "," + fmt(e.trace.re) + "," +
          fmt(e.trace.stderr_re);
  } else if (a.spectrum > 0) {
    cfg.add("mode", "spectrum");
    cfg.add("max_order", static_cast<std::int64_t>(a.spectrum));
    cfg.add("rho", a.rho);
    auto s = mpst::entanglement_spectrum(parse_rho(a.rho, a.n), a.spectrum,
                                         scheme, noise, opts);
    j["mode"] = "spectrum";
    j["n"] = a.n;
    j["eigenvalues"] = s.eigenvalues;
    j["power_sums"] = s.power_sums;
    j["residual"] = s.residual;
    j["ill_conditioned"] = s.ill_conditioned;
    header = "index,eigenvalue";
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
      rows.push_back(std::to_string(i) + "," + fmt(s.eigenvalues[i]));
    std::cout << j.dump() << "\n";
    if (!a.csv.empty()) write_text(a.csv, csv_text(cfg, header, rows));
    return;
  } else if (a.copies > 0) {
    cfg.add("mode", "virtual");
    cfg.add("copies", static_cast<std::int64_t>(a.copies));
    cfg.add("observable", a.observable);
    cfg.add("rho", a.rho);
    auto v = mpst::virtual_expectation(parse_rho(a.rho, a.n), a.observable,
                                       a.copies, scheme, noise, opts);
    j["mode"] = "virtual";
    j["n"] = a.n;
    j["copies"] = a.copies;
    j["observable"] = a.observable;
    j["value"] = v.value;
    j["stderr_value"] = v.stderr_value;
    j["numerator"] = v.numerator;
    j["denominator"] = v.denominator;
    header = "copies,value,stderr_value,numerator,denominator";
    row = std::to_string(a.copies) + "," + fmt(v.value) + "," +
          fmt(v.stderr_value) + "," + fmt(v.numerator) + "," +
          fmt(v.denominator);
  } else {
    cfg.add("mode", "trace");
    if (!a.states.empty()) cfg.add("states", a.states);
    auto t = mpst::estimate_trace(make_spec(a.k, a.n, a.states), scheme,
                                  noise, opts);
    j["mode"] = "trace";
    j["k"] = a.k;
    j["n"] = a.n;
    j["re"] = t.re;
    j["im"] = t.im;
    j["stderr_re"] = t.stderr_re;
    j["stderr_im"] = t.stderr_im;
    header = "re,im,stderr_re,stderr_im,shots_per_basis";
    row = fmt(t.re) + "," + fmt(t.im) + "," + fmt(t.stderr_re) + "," +
          fmt(t.stderr_im) + "," + std::to_string(t.shots_per_basis);
  }
  std::cout << j.dump() << "\n";
  if (!a.csv.empty()) write_text(a.csv, csv_text(cfg, header, {row}));
}

struct ResourcesArgs {
  std::int32_t k = 3, n = 1;
  std::string account_scheme;  // empty = closed-form comparison
  std::string csv;
};

std::string report_row(const mpst::ResourceReport& r) {
  return r.scheme + "," + std::to_string(r.k) + "," + std::to_string(r.n) +
         "," + std::to_string(r.ancilla) + "," + std::to_string(r.bell_pairs) +
         "," + std::to_string(r.depth) + "," +
         std::to_string(r.memory_estimate) + "," +
         std::to_string(r.network_bell_total);
}

void run_resources(const ResourcesArgs& a) {
  Config cfg;
  cfg.add("command", "resources");
  cfg.add("k", static_cast<std::int64_t>(a.k));
  cfg.add("n", static_cast<std::int64_t>(a.n));

  const std::string header =
      "scheme,k,n,ancilla,bell_pairs,depth,memory_estimate,network_bell_total";
  std::vector<std::string> rows;

  if (!a.account_scheme.empty()) {
    cfg.add("account", a.account_scheme);
    CompileArgs ca;
    ca.k = a.k;
    ca.n = a.n;
    ca.scheme = a.account_scheme;
    mpst::ResourceReport r = mpst::account(compile_circuit(ca));
    r.scheme = a.account_scheme;
    rows.push_back(report_row(r));
    std::cout << "scheme=" << r.scheme << " k=" << r.k << " n=" << r.n
              << " ancilla=" << r.ancilla << " bell=" << r.bell_pairs
              << " depth=" << r.depth << " memory=" << r.memory_estimate
              << "\n";
    std::cout << std::left << std::setw(12) << "step" << std::right
              << std::setw(7) << "depth" << std::setw(7) << "bell"
              << std::setw(9) << "ancilla" << "\n";
    for (const auto& s : r.steps)
      std::cout << std::left << std::setw(12) << s.name << std::right
                << std::setw(7) << s.depth << std::setw(7) << s.bell
                << std::setw(9) << s.ancilla_peak << "\n";
  } else {
    auto ranked = mpst::compare(a.n, a.k);
    std::cout << std::left << std::setw(10) << "scheme" << std::right
              << std::setw(9) << "ancilla" << std::setw(7) << "bell"
              << std::setw(7) << "depth" << std::setw(8) << "memory"
              << std::setw(14) << "network_bell" << "\n";
    for (const auto& r : ranked) {
      rows.push_back(report_row(r));
      std::cout << std::left << std::setw(10) << r.scheme << std::right
                << std::setw(9) << r.ancilla << std::setw(7) << r.bell_pairs
                << std::setw(7) << r.depth << std::setw(8)
                << r.memory_estimate << std::setw(14) << r.network_bell_total
                << "\n";
      if (!r.depth_note.empty())
        std::cout << "  note: " << r.depth_note << "\n";
      if (!r.formula_note.empty())
        std::cout << "  note: " << r.formula_note << "\n";
    }
  }
  if (!a.csv.empty()) write_text(a.csv, csv_text(cfg, header, rows));
}

struct BoundArgs {
  std::vector<double> p{1e-6};
  std::vector<double> epsilon{1e-3};
  std::vector<std::int32_t> n{100};
  std::vector<std::string> schemes{"telegate", "teledata"};
  std::string csv;
};

void run_bound(const BoundArgs& a) {
  Config cfg;
  cfg.add("command", "bound");
  std::vector<std::string> rows;
  for (double p : a.p)
    for (double eps : a.epsilon)
      for (const std::string& sch : a.schemes)
        for (std::int32_t n : a.n) {
          mpst::Scheme scheme{mpst::parse_variant(sch), true};
          mpst::KBound kb = mpst::k_max(eps, n, p, scheme);
          rows.push_back(fmt(p) + "," + fmt(eps) + "," + sch + "," +
                         std::to_string(n) + "," + std::to_string(kb.k_max) +
                         "," + std::to_string(kb.teleops) + "," +
                         fmt(kb.exact_bound) + "," + fmt(kb.linear_bound));
        }
  write_text(a.csv,
             csv_text(cfg,
                      "p,epsilon,scheme,n,k_max,teleops,exact_bound,"
                      "linear_bound",
                      rows));
}

struct FanoutArgs {
  std::int32_t targets = 4;
  double p = 0.001;
  std::int64_t shots = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  bool shaved = false;
  std::string csv;
};

void run_fanout_errors(const FanoutArgs& a) {
  mpst::Circuit c = mpst::build_fanout_gadget(a.targets, !a.shaved);
  mpst::NoiseModel noise = mpst::NoiseModel::from_base_rate(a.p);
  std::vector<mpst::QubitId> tracked;
  tracked.push_back({0, mpst::QubitKind::ghz, 0});  // fanout control
  for (std::int32_t l = 0; l < a.targets; ++l)
    tracked.push_back({0, mpst::QubitKind::data, l});
  mpst::ErrorHistogram h =
      mpst::run_pauli_frame(c, noise, tracked, a.shots, a.seed, a.threads);

  Config cfg;
  cfg.add("command", "fanout-errors");
  cfg.add("targets", static_cast<std::int64_t>(a.targets));
  cfg.add("p", a.p);
  cfg.add("shots", a.shots);
  cfg.add("seed", static_cast<std::int64_t>(a.seed));
  if (a.shaved) cfg.add("window", "shaved");
  write_text(a.csv, mpst::histogram_csv(h, cfg.raw_lines()));
  if (!a.csv.empty() && a.csv != "-") {
    auto [top, prob] = mpst::top_error(h);
    std::cout << "top_error=" << top << " probability=" << fmt(prob) << " -> "
              << a.csv << "\n";
  }
}

void attach_compile_flags(CLI::App* cmd, CompileArgs& a, bool dump) {
  cmd->add_option("--k", a.k, "number of parties (one per QPU)");
  cmd->add_option("--n", a.n, "qubits per party state");
  cmd->add_option("--scheme", a.scheme, "telegate | teledata | naive");
  cmd->add_option("--basis", a.basis, "run basis: X (real) or Y (imaginary)");
  cmd->add_option("--observable", a.observable,
                  "Pauli string riding the first party's readout (X run)");
  cmd->add_option("--states", a.states,
                  "party states, e.g. \"0:|0>,1:|+>\" or @file");
  cmd->add_flag("--keep-macro-fanout", a.keep_macro_fanout,
                "leave Fanout gates unexpanded");
  if (dump)
    cmd->add_option("--dump", a.dump, "write the compiled circuit (JSON)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "distributed multi-party swap test: compiler, simulators, estimators, "
      "resource accounting and network bounds"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* compile_cmd =
      app.add_subcommand("compile", "compile a distributed swap-test circuit");
  attach_compile_flags(compile_cmd, compile_args, /*dump=*/true);
  compile_cmd->callback([&]() { run_compile(compile_args); });

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "sample noisy statevector runs and dump shot records");
  attach_compile_flags(sim_cmd, sim_args.compile, /*dump=*/false);
  sim_cmd->add_option("--circuit", sim_args.circuit,
                      "run a previously dumped circuit file");
  sim_cmd->add_option("--shots", sim_args.shots, "number of shots");
  sim_cmd->add_option("--seed", sim_args.seed, "stream seed");
  sim_cmd->add_option("--threads", sim_args.threads,
                      "worker threads (0 = MPST_THREADS or hardware)");
  sim_args.noise.attach(sim_cmd);
  sim_cmd->add_option("--csv", sim_args.csv, "record CSV path (- = stdout)");
  sim_cmd->callback([&]() { run_simulate(sim_args); });

  EstimateArgs est_args;
  auto* est_cmd = app.add_subcommand(
      "estimate",
      "estimate the multiplicative trace (default), a Renyi entropy "
      "(--renyi), an entanglement spectrum (--spectrum) or a virtual "
      "expectation (--copies)");
  est_cmd->add_option("--k", est_args.k, "number of parties");
  est_cmd->add_option("--n", est_args.n, "qubits per party state");
  est_cmd->add_option("--scheme", est_args.scheme,
                      "telegate | teledata | naive");
  est_cmd->add_option("--states", est_args.states,
                      "party states for the trace mode");
  est_cmd->add_option("--rho", est_args.rho,
                      "single state for --renyi/--spectrum/--copies");
  est_cmd->add_option("--renyi", est_args.renyi, "Renyi entropy order (>= 2)");
  est_cmd->add_option("--spectrum", est_args.spectrum,
                      "spectrum max power-sum order (>= 2)");
  est_cmd->add_option("--copies", est_args.copies,
                      "virtual-expectation copy count (>= 2)");
  est_cmd->add_option("--observable", est_args.observable,
                      "Pauli string for --copies mode");
  est_cmd->add_option("--shots", est_args.shots, "shots per basis");
  est_cmd->add_option("--seed", est_args.seed, "stream seed");
  est_cmd->add_option("--threads", est_args.threads,
                      "worker threads (0 = MPST_THREADS or hardware)");
  est_args.noise.attach(est_cmd);
  est_cmd->add_option("--csv", est_args.csv, "also write a CSV artifact");
  est_cmd->callback([&]() { run_estimate(est_args); });

  ResourcesArgs res_args;
  auto* res_cmd = app.add_subcommand(
      "resources",
      "closed-form scheme comparison, or per-step accounting of a compiled "
      "circuit with --account SCHEME");
  res_cmd->add_option("--k", res_args.k, "number of parties");
  res_cmd->add_option("--n", res_args.n, "qubits per party state");
  res_cmd->add_option("--account", res_args.account_scheme,
                      "compile this scheme and account the real circuit");
  res_cmd->add_option("--csv", res_args.csv, "CSV path (- = stdout)");
  res_cmd->callback([&]() { run_resources(res_args); });

  BoundArgs bound_args;
  auto* bound_cmd = app.add_subcommand(
      "bound", "network-noise k_max curves over parameter grids (CSV)");
  bound_cmd->add_option("--p", bound_args.p, "Bell depolarizing rates");
  bound_cmd->add_option("--epsilon", bound_args.epsilon, "target infidelities");
  bound_cmd->add_option("--n", bound_args.n, "qubits per party");
  bound_cmd->add_option("--scheme", bound_args.schemes,
                        "schemes (telegate and/or teledata)");
  bound_cmd->add_option("--csv", bound_args.csv, "CSV path (- = stdout)");
  bound_cmd->callback([&]() { run_bound(bound_args); });

  FanoutArgs fan_args;
  auto* fan_cmd = app.add_subcommand(
      "fanout-errors",
      "Pauli-frame error histogram of the constant-depth fanout gadget");
  fan_cmd->add_option("--targets", fan_args.targets, "fanout target count");
  fan_cmd->add_option("--p", fan_args.p, "base error rate");
  fan_cmd->add_option("--shots", fan_args.shots, "frame samples");
  fan_cmd->add_option("--seed", fan_args.seed, "stream seed");
  fan_cmd->add_option("--threads", fan_args.threads,
                      "worker threads (0 = MPST_THREADS or hardware)");
  fan_cmd->add_flag("--shaved", fan_args.shaved,
                    "use the ancilla-saving window variant");
  fan_cmd->add_option("--csv", fan_args.csv, "CSV path (- = stdout)");
  fan_cmd->callback([&]() { run_fanout_errors(fan_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const mpst::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
