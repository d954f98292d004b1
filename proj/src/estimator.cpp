#include "mpst/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mpst/statevector.hpp"

namespace mpst {

namespace {

// Stream salts: the Y-basis run and the branch/support runs must not share
// shot streams with the X-basis run under the same user seed.
constexpr std::uint64_t kBasisSaltY = 0xd1b54a32d192ed03ULL;
constexpr std::uint64_t kBranchSalt = 0xa0761d6478bd642fULL;

constexpr double kSupportTol = 1e-9;  // probability floor for "in support"

// --- readout plan -------------------------------------------------------------

// Geometry of the final measurement layer: which qubits are read, where their
// bits land, and how parity groups / observable factors map onto the joint
// outcome index (index bit i = i-th Measure gate of the layer).
struct ReadoutPlan {
  std::int32_t mea_layer = -1;
  std::vector<QubitId> qubits;
  std::vector<Basis> bases;
  std::vector<std::int32_t> result_bits;
  struct Group {
    std::vector<std::int32_t> parity_bits;
    std::vector<std::int32_t> obs_bits;
    std::uint64_t parity_mask = 0;
    std::uint64_t obs_mask = 0;
  };
  std::vector<Group> groups;
  bool has_obs = false;
};

ReadoutPlan plan_readout(const Circuit& c) {
  ReadoutPlan plan;
  for (const auto& [name, first, last] : c.steps)
    if (name == "readout") plan.mea_layer = last - 1;
  if (plan.mea_layer < 0)
    throw std::invalid_argument(
        "circuit has no readout step; estimators need compiled test circuits");

  std::unordered_map<std::int32_t, int> pos_of_bit;
  std::unordered_map<std::int32_t, std::int32_t> qpu_of_bit;
  for (const Gate& g : c.layers[plan.mea_layer].gates) {
    if (g.op != GateOp::Measure) continue;
    pos_of_bit[g.result_bit] = static_cast<int>(plan.qubits.size());
    qpu_of_bit[g.result_bit] = g.operands[0].qpu;
    plan.qubits.push_back(g.operands[0]);
    plan.bases.push_back(g.basis);
    plan.result_bits.push_back(g.result_bit);
  }
  if (plan.qubits.size() > 20)
    throw CapacityError("readout layer too wide for the joint-outcome table");

  auto mask_of = [&](const std::vector<std::int32_t>& bits) {
    std::uint64_t m = 0;
    for (std::int32_t b : bits) {
      auto it = pos_of_bit.find(b);
      if (it == pos_of_bit.end())
        throw std::invalid_argument(
            "parity/observable bit is not measured in the readout layer");
      m |= std::uint64_t{1} << it->second;
    }
    return m;
  };

  std::vector<std::vector<std::int32_t>> group_bits;
  if (c.parity_groups.empty())
    group_bits.push_back(c.parity_bits);
  else
    group_bits = c.parity_groups;
  std::unordered_map<std::int32_t, std::size_t> group_of_qpu;
  for (std::size_t gi = 0; gi < group_bits.size(); ++gi) {
    ReadoutPlan::Group g;
    g.parity_bits = group_bits[gi];
    g.parity_mask = mask_of(g.parity_bits);
    if (!g.parity_bits.empty())
      group_of_qpu[qpu_of_bit.at(g.parity_bits[0])] = gi;
    plan.groups.push_back(std::move(g));
  }
  for (std::int32_t b : c.obs_bits) {
    if (b < 0) continue;  // identity factor of the observable
    plan.has_obs = true;
    std::size_t gi = 0;
    if (!c.parity_groups.empty()) gi = group_of_qpu.at(qpu_of_bit.at(b));
    plan.groups[gi].obs_bits.push_back(b);
    plan.groups[gi].obs_mask |= mask_of({b});
  }
  return plan;
}

// --- shot accumulation ---------------------------------------------------------

struct GroupSums {
  std::int64_t parity = 0;   // sum of +-1 group parities
  std::int64_t par_obs = 0;  // sum of parity * observable products
  std::int64_t obs = 0;      // sum of observable products
};

struct RunStats {
  std::vector<GroupSums> groups;
  std::int64_t shots = 0;
};

void merge_into(RunStats& acc, const RunStats& part) {
  for (std::size_t g = 0; g < acc.groups.size(); ++g) {
    acc.groups[g].parity += part.groups[g].parity;
    acc.groups[g].par_obs += part.groups[g].par_obs;
    acc.groups[g].obs += part.groups[g].obs;
  }
  acc.shots += part.shots;
}

// Per-shot ensemble draw: one cumulative-weight pick per party, combined into
// a mixed-radix combo index. Both simulation paths share this so a given
// (seed, shot) sees the same member choice.
struct MemberDraw {
  std::vector<std::vector<double>> cum;  // per-party cumulative weights
  std::vector<int> strides;
  int combos = 1;

  explicit MemberDraw(const std::vector<StateSpec>& states) {
    for (const auto& s : states) {
      std::vector<double> c;
      double acc = 0;
      for (const auto& m : s.members) c.push_back(acc += m.weight);
      cum.push_back(std::move(c));
    }
    strides.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      strides[i] = combos;
      combos *= static_cast<int>(states[i].members.size());
    }
    if (combos > 4096)
      throw std::invalid_argument(
          "ensemble member combinations exceed the caching budget (4096)");
  }

  int draw(RngStream& st) const {
    int combo = 0;
    for (std::size_t i = 0; i < cum.size(); ++i)
      combo += strides[i] * st.pick_cumulative(cum[i]);
    return combo;
  }

  void decode(int combo, std::vector<int>& members) const {
    members.resize(cum.size());
    for (std::size_t i = 0; i < cum.size(); ++i) {
      members[i] = (combo / strides[i]) % static_cast<int>(cum[i].size());
    }
  }
};

void prepare_members(StatevectorSim& sim, const Circuit& c,
                     const std::vector<StateSpec>& states,
                     const std::vector<int>& members) {
  sim.bits.assign(c.num_bits, 0);
  for (std::size_t i = 0; i < c.initial_states.size(); ++i)
    sim.prepare(c.initial_states[i].qubits,
                states[i].members[members[i]].amps);
}

// Run one branch to just before the measurement layer and return the joint
// outcome distribution incl. the measure-basis rotations. All mid-circuit
// randomness is correction-compensated, so any branch yields the same
// distribution.
std::vector<double> branch_distribution(const Circuit& c,
                                        const ReadoutPlan& plan,
                                        StatevectorSim& sim) {
  NoiseModel quiet;
  sim.run_layers(c, quiet, 0, plan.mea_layer);
  Gate rot;
  rot.operands.resize(1);
  for (std::size_t i = 0; i < plan.qubits.size(); ++i) {
    rot.operands[0] = plan.qubits[i];
    if (plan.bases[i] == Basis::Y) {
      rot.op = GateOp::Sdg;
      sim.apply_gate(rot, quiet);
    }
    if (plan.bases[i] != Basis::Z) {
      rot.op = GateOp::H;
      sim.apply_gate(rot, quiet);
    }
  }
  return sim.marginal_probs(plan.qubits);
}

void accumulate_outcome(const ReadoutPlan& plan, std::uint64_t idx,
                        RunStats& st) {
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    const auto& gr = plan.groups[g];
    std::int64_t par =
        1 - 2 * static_cast<std::int64_t>(std::popcount(idx & gr.parity_mask) & 1);
    std::int64_t ob =
        1 - 2 * static_cast<std::int64_t>(std::popcount(idx & gr.obs_mask) & 1);
    st.groups[g].parity += par;
    st.groups[g].par_obs += par * ob;
    st.groups[g].obs += ob;
  }
  st.shots += 1;
}

std::uint64_t outcome_from_bits(const ReadoutPlan& plan,
                                const std::vector<std::uint8_t>& bits) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < plan.result_bits.size(); ++i)
    if (bits[plan.result_bits[i]]) idx |= std::uint64_t{1} << i;
  return idx;
}

template <typename Body>
RunStats parallel_shots(std::size_t num_groups, std::int64_t shots,
                        int threads, Body body) {
  int T = resolve_threads(threads);
  T = static_cast<int>(std::min<std::int64_t>(T, std::max<std::int64_t>(shots, 1)));
  std::vector<RunStats> parts(T);
  for (auto& p : parts) p.groups.resize(num_groups);
  std::int64_t chunk = (shots + T - 1) / T;
  std::vector<std::thread> pool;
  for (int t = 0; t < T; ++t) {
    std::int64_t lo = t * chunk, hi = std::min<std::int64_t>(shots, lo + chunk);
    pool.emplace_back([&, t, lo, hi]() {
      for (std::int64_t s = lo; s < hi; ++s) body(s, parts[t]);
    });
  }
  for (auto& th : pool) th.join();
  RunStats total;
  total.groups.resize(num_groups);
  for (const auto& p : parts) merge_into(total, p);
  return total;
}

RunStats run_readout_stats(const Circuit& c,
                           const std::vector<StateSpec>& states,
                           const NoiseModel& noise, const EstimateOptions& opts,
                           std::uint64_t seed) {
  ReadoutPlan plan = plan_readout(c);
  MemberDraw draw(states);
  const bool fast = !noise.any() && c.injections.empty();

  if (fast) {
    // One exact branch per member combination, then categorical sampling.
    std::vector<std::vector<double>> cum(draw.combos);
    std::vector<int> members;
    for (int combo = 0; combo < draw.combos; ++combo) {
      StatevectorSim sim(opts.max_live_qubits);
      sim.set_rng(RngStream::for_shot(seed ^ kBranchSalt, combo));
      draw.decode(combo, members);
      prepare_members(sim, c, states, members);
      auto probs = branch_distribution(c, plan, sim);
      double acc = 0;
      cum[combo].reserve(probs.size());
      for (double p : probs) cum[combo].push_back(acc += p);
    }
    return parallel_shots(
        plan.groups.size(), opts.shots, opts.threads,
        [&](std::int64_t s, RunStats& st) {
          RngStream stream = RngStream::for_shot(seed, s);
          int combo = draw.draw(stream);
          auto idx = static_cast<std::uint64_t>(stream.pick_cumulative(cum[combo]));
          accumulate_outcome(plan, idx, st);
        });
  }

  return parallel_shots(
      plan.groups.size(), opts.shots, opts.threads,
      [&](std::int64_t s, RunStats& st) {
        RngStream stream = RngStream::for_shot(seed, s);
        int combo = draw.draw(stream);
        std::vector<int> members;
        draw.decode(combo, members);
        StatevectorSim sim(opts.max_live_qubits);
        sim.set_rng(stream);
        prepare_members(sim, c, states, members);
        sim.run_layers(c, noise, 0,
                       static_cast<std::int32_t>(c.layers.size()));
        accumulate_outcome(plan, outcome_from_bits(plan, sim.bits), st);
      });
}

// Complex per-group estimates t_q = a_q + i b_q with a from the X run and
// b = -(Y-run mean); the grouped product's errors follow the delta method
// through g_q = prod_{q' != q} t_{q'}.
TraceEstimate assemble_trace(const RunStats& sx, const RunStats& sy,
                             std::int64_t shots) {
  const std::size_t G = sx.groups.size();
  const auto N = static_cast<double>(shots);
  std::vector<std::complex<double>> t(G);
  std::vector<double> va(G), vb(G);
  for (std::size_t q = 0; q < G; ++q) {
    double a = static_cast<double>(sx.groups[q].parity) / N;
    double b = -static_cast<double>(sy.groups[q].parity) / N;
    t[q] = {a, b};
    va[q] = (1.0 - a * a) / (N - 1.0);
    vb[q] = (1.0 - b * b) / (N - 1.0);
  }
  std::complex<double> prod{1.0, 0.0};
  for (const auto& tq : t) prod *= tq;
  double var_re = 0, var_im = 0;
  for (std::size_t q = 0; q < G; ++q) {
    std::complex<double> g{1.0, 0.0};
    for (std::size_t r = 0; r < G; ++r)
      if (r != q) g *= t[r];
    var_re += g.real() * g.real() * va[q] + g.imag() * g.imag() * vb[q];
    var_im += g.imag() * g.imag() * va[q] + g.real() * g.real() * vb[q];
  }
  TraceEstimate est;
  est.re = prod.real();
  est.im = prod.imag();
  est.stderr_re = std::sqrt(var_re);
  est.stderr_im = std::sqrt(var_im);
  est.shots_per_basis = shots;
  return est;
}

std::int32_t qubits_of_dim(Eigen::Index dim) {
  std::int32_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || n < 1)
    throw std::invalid_argument("state dimension is not a power of two");
  return n;
}

PartySpec copies_spec(const StateSpec& rho, std::int32_t k) {
  PartySpec spec;
  spec.k = k;
  spec.n = qubits_of_dim(rho.dim());
  spec.states.assign(k, rho);
  return spec;
}

}  // namespace

// --- public API -----------------------------------------------------------------

TraceEstimate estimate_trace(const PartySpec& spec, const Scheme& scheme,
                             const NoiseModel& noise,
                             const EstimateOptions& opts) {
  spec.validate();
  if (opts.shots < 2)
    throw std::invalid_argument("estimators need at least 2 shots per basis");
  Circuit cx = build_swap_test(spec, scheme, Basis::X, "");
  Circuit cy = build_swap_test(spec, scheme, Basis::Y, "");
  RunStats sx = run_readout_stats(cx, spec.states, noise, opts, opts.seed);
  RunStats sy =
      run_readout_stats(cy, spec.states, noise, opts, opts.seed ^ kBasisSaltY);
  return assemble_trace(sx, sy, opts.shots);
}

std::complex<double> oracle_trace(const PartySpec& spec) {
  spec.validate();
  if (spec.n > 10)
    throw CapacityError("oracle_trace: dense algebra limited to n <= 10");
  Eigen::MatrixXcd prod = spec.states[0].density();
  for (std::int32_t i = 1; i < spec.k; ++i) prod *= spec.states[i].density();
  std::complex<double> tr = prod.trace();

  bool all_pure = std::all_of(spec.states.begin(), spec.states.end(),
                              [](const StateSpec& s) { return s.pure(); });
  if (all_pure) {
    std::complex<double> chain{1.0, 0.0};
    for (std::int32_t i = 0; i < spec.k; ++i) {
      const auto& a = spec.states[i].members[0].amps;
      const auto& b = spec.states[(i + 1) % spec.k].members[0].amps;
      chain *= a.dot(b);  // <psi_i | psi_{i+1}>
    }
    if (std::abs(chain - tr) > 1e-12 * std::max(1.0, std::abs(tr)))
      throw std::logic_error(
          "oracle_trace: matrix-product and inner-product paths disagree");
  }
  return tr;
}

EntropyEstimate renyi_entropy(const StateSpec& rho, std::int32_t order,
                              const Scheme& scheme, const NoiseModel& noise,
                              const EstimateOptions& opts) {
  if (order < 2) throw std::invalid_argument("Renyi order must be >= 2");
  EntropyEstimate e;
  e.trace = estimate_trace(copies_spec(rho, order), scheme, noise, opts);
  if (e.trace.re <= 0)
    throw std::runtime_error(
        "Renyi entropy undefined: estimated Tr(rho^order) = " +
        std::to_string(e.trace.re) + " <= 0");
  const double ln2 = std::log(2.0);
  e.value = std::log2(e.trace.re) / (1.0 - order);
  e.stderr_value =
      e.trace.stderr_re / (std::abs(1.0 - order) * e.trace.re * ln2);
  return e;
}

Spectrum spectrum_from_power_sums(const std::vector<double>& power_sums) {
  const auto M = static_cast<std::int32_t>(power_sums.size());
  if (M < 1) throw std::invalid_argument("need at least one power sum");
  // Newton's identities: m*e_m = sum_{i=1..m} (-1)^{i-1} e_{m-i} p_i.
  std::vector<double> e(M + 1, 0.0);
  e[0] = 1.0;
  for (std::int32_t m = 1; m <= M; ++m) {
    double acc = 0;
    for (std::int32_t i = 1; i <= m; ++i)
      acc += (i % 2 == 1 ? 1.0 : -1.0) * e[m - i] * power_sums[i - 1];
    e[m] = acc / m;
  }
  // Characteristic polynomial x^M - e1 x^{M-1} + ... + (-1)^M e_M via its
  // companion matrix.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(M, M);
  for (std::int32_t i = 1; i < M; ++i) comp(i, i - 1) = 1.0;
  for (std::int32_t i = 0; i < M; ++i) {
    double c = (((M - i) % 2 == 1) ? -1.0 : 1.0) * e[M - i];  // coeff of x^i
    comp(i, M - 1) = -c;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp);
  Spectrum s;
  s.power_sums = power_sums;
  for (std::int32_t i = 0; i < M; ++i) {
    std::complex<double> root = solver.eigenvalues()(i);
    s.residual = std::max(s.residual, std::abs(root.imag()));
    if (std::abs(root.imag()) > 1e-6 * std::max(1.0, std::abs(root)))
      s.ill_conditioned = true;
    s.eigenvalues.push_back(std::clamp(root.real(), 0.0, 1.0));
  }
  std::sort(s.eigenvalues.rbegin(), s.eigenvalues.rend());
  return s;
}

Spectrum entanglement_spectrum(const StateSpec& rho, std::int32_t max_order,
                               const Scheme& scheme, const NoiseModel& noise,
                               const EstimateOptions& opts) {
  if (max_order < 2)
    throw std::invalid_argument("spectroscopy needs max_order >= 2");
  std::vector<double> p(max_order);
  p[0] = 1.0;  // Tr(rho) by normalization
  for (std::int32_t m = 2; m <= max_order; ++m) {
    EstimateOptions o = opts;
    o.seed = opts.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(m);
    p[m - 1] = estimate_trace(copies_spec(rho, m), scheme, noise, o).re;
  }
  return spectrum_from_power_sums(p);
}

VirtualExpectation virtual_expectation(const StateSpec& rho,
                                       const std::string& observable,
                                       std::int32_t copies,
                                       const Scheme& scheme,
                                       const NoiseModel& noise,
                                       const EstimateOptions& opts) {
  if (copies < 2) throw std::invalid_argument("virtual distillation needs copies >= 2");
  if (opts.shots < 2)
    throw std::invalid_argument("estimators need at least 2 shots per basis");
  PartySpec spec = copies_spec(rho, copies);
  Circuit cx = build_swap_test(spec, scheme, Basis::X, observable);
  RunStats st = run_readout_stats(cx, spec.states, noise, opts, opts.seed);
  const auto N = static_cast<double>(opts.shots);

  VirtualExpectation v;
  v.value = 1.0;
  v.numerator = 1.0;
  v.denominator = 1.0;
  double rel_var = 0, rel_var_num = 0, rel_var_den = 0;
  for (const auto& g : st.groups) {
    double num = static_cast<double>(g.par_obs) / N;
    double den = static_cast<double>(g.parity) / N;
    double obar = static_cast<double>(g.obs) / N;
    double var_num = (1.0 - num * num) / (N - 1.0);
    double var_den = (1.0 - den * den) / (N - 1.0);
    double cov = (obar - num * den) / (N - 1.0);
    if (std::abs(den) <= 3.0 * std::sqrt(var_den))
      throw std::runtime_error(
          "virtual expectation ill-conditioned: a denominator factor (" +
          std::to_string(den) + ") is within 3 standard errors of zero");
    double r = num / den;
    double var_r = (var_num - 2.0 * r * cov + r * r * var_den) / (den * den);
    v.value *= r;
    v.numerator *= num;
    v.denominator *= den;
    rel_var += r == 0 ? std::numeric_limits<double>::infinity()
                      : var_r / (r * r);
    rel_var_num += num == 0 ? std::numeric_limits<double>::infinity()
                            : var_num / (num * num);
    rel_var_den += var_den / (den * den);
  }
  v.stderr_value = std::abs(v.value) * std::sqrt(rel_var);
  v.stderr_num = std::abs(v.numerator) * std::sqrt(rel_var_num);
  v.stderr_den = std::abs(v.denominator) * std::sqrt(rel_var_den);
  return v;
}

double classical_fidelity(const Circuit& c, const NoiseModel& noise,
                          const EstimateOptions& opts) {
  if (opts.shots < 1) throw std::invalid_argument("need at least one shot");
  ReadoutPlan plan = plan_readout(c);

  // Exact noiseless outcome support over the parity bits.
  Circuit quiet = c;
  quiet.injections.clear();
  StatevectorSim sim(opts.max_live_qubits);
  sim.set_rng(RngStream::for_shot(opts.seed ^ kBranchSalt, 0));
  sim.apply_initial_states(quiet);
  auto probs = branch_distribution(quiet, plan, sim);
  std::uint64_t parity_mask = 0;
  for (const auto& g : plan.groups) parity_mask |= g.parity_mask;
  std::set<std::uint64_t> support;
  for (std::size_t idx = 0; idx < probs.size(); ++idx)
    if (probs[idx] > kSupportTol) support.insert(idx & parity_mask);

  RunStats hits = parallel_shots(
      1, opts.shots, opts.threads, [&](std::int64_t s, RunStats& st) {
        StatevectorSim shot_sim(opts.max_live_qubits);
        shot_sim.set_rng(RngStream::for_shot(opts.seed, s));
        shot_sim.apply_initial_states(c);
        shot_sim.run_layers(c, noise, 0,
                            static_cast<std::int32_t>(c.layers.size()));
        std::uint64_t idx = outcome_from_bits(plan, shot_sim.bits);
        st.shots += 1;
        if (support.count(idx & parity_mask)) st.groups[0].parity += 1;
      });
  return static_cast<double>(hits.groups[0].parity) /
         static_cast<double>(hits.shots);
}

}  // namespace mpst
