#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "mpst/circuit.hpp"
#include "mpst/compiler.hpp"
#include "mpst/estimator.hpp"
#include "mpst/rng.hpp"
#include "mpst/states.hpp"

using namespace mpst;
using cd = std::complex<double>;

namespace {

PartySpec pure_spec(std::int32_t k, std::int32_t n,
                    const std::vector<Eigen::VectorXcd>& kets) {
  PartySpec spec;
  spec.k = k;
  spec.n = n;
  for (const auto& v : kets) spec.states.push_back(StateSpec::from_pure(v));
  spec.validate();
  return spec;
}

StateSpec diag_mix(double w0) {
  StateSpec s;
  s.members.push_back({w0, ket("0")});
  s.members.push_back({1.0 - w0, ket("1")});
  return s;
}

// Joint vector with `a` on the low index bits and `b` above them.
Eigen::VectorXcd kron_low_high(const Eigen::VectorXcd& a,
                               const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j)
    for (Eigen::Index i = 0; i < a.size(); ++i) out(j * a.size() + i) = b(j) * a(i);
  return out;
}

// Slice-product party state: independent single-qubit states per data qubit,
// assembled in the most-significant-first amplitude convention.
Eigen::VectorXcd product_state(std::int32_t n, RngStream& rng) {
  Eigen::VectorXcd w = random_pure_state(1, rng);
  for (std::int32_t j = 1; j < n; ++j)
    w = kron_low_high(w, random_pure_state(1, rng));
  return w;
}

void check_within(double got, double want, double se, double nsigma,
                  const char* what) {
  INFO(what << ": got " << got << " want " << want << " se " << se);
  CHECK(std::abs(got - want) <= nsigma * std::max(se, 1e-12));
}

}  // namespace

TEST_CASE("oracle_trace reproduces closed-form overlaps") {
  SUBCASE("two pure states") {
    PartySpec spec = pure_spec(2, 1, {ket("0"), ket("+")});
    cd t = oracle_trace(spec);
    CHECK(t.real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.imag() == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("three identical mixed states") {
    PartySpec spec;
    spec.k = 3;
    spec.n = 1;
    spec.states = {diag_mix(0.75), diag_mix(0.75), diag_mix(0.75)};
    spec.validate();
    cd t = oracle_trace(spec);
    CHECK(t.real() == doctest::Approx(0.4375).epsilon(1e-12));
    CHECK(t.imag() == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("three-party chirality gives a complex trace") {
    Eigen::VectorXcd psi3(2);
    psi3 << 1.0 / std::sqrt(2.0), cd(0.0, 1.0) / std::sqrt(2.0);
    PartySpec spec = pure_spec(3, 1, {ket("0"), ket("+"), psi3});
    cd t = oracle_trace(spec);
    CHECK(t.real() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t.imag() == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("dense algebra is capacity-limited") {
    PartySpec spec;
    spec.k = 2;
    spec.n = 11;
    RngStream rng = RngStream::for_shot(1, 1);
    spec.states = {StateSpec::from_pure(random_pure_state(11, rng)),
                   StateSpec::from_pure(random_pure_state(11, rng))};
    CHECK_THROWS_AS(oracle_trace(spec), CapacityError);
  }
}

TEST_CASE("noiseless trace estimates match the oracle") {
  EstimateOptions opts;
  opts.shots = 20000;
  opts.seed = 31;

  SUBCASE("k=2 overlap on all three schemes") {
    PartySpec spec = pure_spec(2, 1, {ket("0"), ket("+")});
    for (Variant v : {Variant::telegate, Variant::teledata, Variant::naive}) {
      TraceEstimate e = estimate_trace(spec, Scheme{v, true}, NoiseModel{}, opts);
      CAPTURE(to_string(v));
      check_within(e.re, 0.5, e.stderr_re, 5, "re");
      check_within(e.im, 0.0, e.stderr_im, 5, "im");
      CHECK(e.shots_per_basis == opts.shots);
      CHECK(e.sign_calibration_x == 1.0);
      CHECK(e.sign_calibration_y == -1.0);
    }
  }
  SUBCASE("k=3 chirality pins the sign calibration") {
    Eigen::VectorXcd psi3(2);
    psi3 << 1.0 / std::sqrt(2.0), cd(0.0, 1.0) / std::sqrt(2.0);
    PartySpec spec = pure_spec(3, 1, {ket("0"), ket("+"), psi3});
    for (Variant v : {Variant::telegate, Variant::teledata}) {
      TraceEstimate e = estimate_trace(spec, Scheme{v, true}, NoiseModel{}, opts);
      CAPTURE(to_string(v));
      check_within(e.re, 0.25, e.stderr_re, 5, "re");
      check_within(e.im, 0.25, e.stderr_im, 5, "im");
    }
  }
  SUBCASE("mixed inputs draw ensemble members per shot") {
    PartySpec spec;
    spec.k = 2;
    spec.n = 1;
    spec.states = {diag_mix(0.75), diag_mix(0.75)};
    spec.validate();
    TraceEstimate e = estimate_trace(spec, Scheme{Variant::telegate, true},
                                     NoiseModel{}, opts);
    check_within(e.re, 0.625, e.stderr_re, 5, "purity");
  }
  SUBCASE("grouped naive readout multiplies local tests") {
    RngStream rng = RngStream::for_shot(77, 0);
    PartySpec spec;
    spec.k = 3;
    spec.n = 2;
    for (std::int32_t p = 0; p < 3; ++p)
      spec.states.push_back(StateSpec::from_pure(product_state(2, rng)));
    spec.validate();
    cd want = oracle_trace(spec);
    TraceEstimate e = estimate_trace(spec, Scheme{Variant::naive, true},
                                     NoiseModel{}, opts);
    check_within(e.re, want.real(), e.stderr_re, 5, "re");
    check_within(e.im, want.imag(), e.stderr_im, 5, "im");
  }
}

TEST_CASE("estimates are deterministic and thread-count independent") {
  PartySpec spec = pure_spec(2, 1, {ket("0"), ket("+")});
  Scheme scheme{Variant::telegate, true};

  EstimateOptions a;
  a.shots = 4000;
  a.seed = 9;
  a.threads = 1;
  EstimateOptions b = a;
  b.threads = 8;

  SUBCASE("fast path") {
    TraceEstimate e1 = estimate_trace(spec, scheme, NoiseModel{}, a);
    TraceEstimate e1b = estimate_trace(spec, scheme, NoiseModel{}, a);
    TraceEstimate e8 = estimate_trace(spec, scheme, NoiseModel{}, b);
    CHECK(e1.re == e1b.re);
    CHECK(e1.im == e1b.im);
    CHECK(e1.re == e8.re);
    CHECK(e1.im == e8.im);
    CHECK(e1.stderr_re == e8.stderr_re);
  }
  SUBCASE("slow path") {
    NoiseModel tiny;
    tiny.p1 = 1e-15;  // forces the per-shot simulation path
    TraceEstimate e1 = estimate_trace(spec, scheme, tiny, a);
    TraceEstimate e8 = estimate_trace(spec, scheme, tiny, b);
    CHECK(e1.re == e8.re);
    CHECK(e1.im == e8.im);
    check_within(e1.re, 0.5, e1.stderr_re, 5, "slow-path re");
    check_within(e1.im, 0.0, e1.stderr_im, 5, "slow-path im");
  }
}

TEST_CASE("noisy estimates stay in a sane range") {
  PartySpec spec = pure_spec(2, 1, {ket("0"), ket("0")});
  EstimateOptions opts;
  opts.shots = 4000;
  opts.seed = 13;
  NoiseModel noise = NoiseModel::from_base_rate(0.01);
  TraceEstimate e = estimate_trace(spec, Scheme{Variant::telegate, true},
                                   noise, opts);
  CHECK(e.re > 0.5);
  CHECK(e.re < 1.0 + 5 * e.stderr_re);
  CHECK(std::abs(e.im) < 0.1);
}

TEST_CASE("capacity and shot-count guards fire") {
  RngStream rng = RngStream::for_shot(3, 3);
  PartySpec big;
  big.k = 4;
  big.n = 2;
  for (std::int32_t p = 0; p < 4; ++p)
    big.states.push_back(StateSpec::from_pure(product_state(2, rng)));
  big.validate();
  EstimateOptions opts;
  opts.shots = 100;
  // 4 parties x 2 qubits on 4 QPUs: the naive relay layout needs more than
  // 24 simultaneously live qubits.
  CHECK_THROWS_AS(estimate_trace(big, Scheme{Variant::naive, true},
                                 NoiseModel{}, opts),
                  CapacityError);

  PartySpec spec = pure_spec(2, 1, {ket("0"), ket("+")});
  EstimateOptions one;
  one.shots = 1;
  CHECK_THROWS_AS(estimate_trace(spec, Scheme{Variant::telegate, true},
                                 NoiseModel{}, one),
                  std::invalid_argument);
}

TEST_CASE("Renyi entropy from identical copies") {
  EstimateOptions opts;
  opts.shots = 20000;
  opts.seed = 21;
  Scheme scheme{Variant::telegate, true};

  SUBCASE("maximally mixed qubit has one bit of S2") {
    EntropyEstimate e = renyi_entropy(diag_mix(0.5), 2, scheme, NoiseModel{}, opts);
    check_within(e.value, 1.0, e.stderr_value, 5, "S2(I/2)");
  }
  SUBCASE("S3 of the 3:1 mixture") {
    EstimateOptions more = opts;
    more.shots = 30000;
    EntropyEstimate e = renyi_entropy(diag_mix(0.75), 3, scheme, NoiseModel{}, more);
    // S3 = log2(0.4375) / (1 - 3)
    check_within(e.value, 0.5963225389711979, e.stderr_value, 5, "S3");
  }
  SUBCASE("order below 2 is rejected") {
    CHECK_THROWS_AS(renyi_entropy(diag_mix(0.5), 1, scheme, NoiseModel{}, opts),
                    std::invalid_argument);
  }
}

TEST_CASE("Newton-Girard inversion recovers spectra") {
  SUBCASE("two eigenvalues, exact power sums") {
    Spectrum s = spectrum_from_power_sums({1.0, 0.625, 0.4375});
    REQUIRE(s.eigenvalues.size() == 3);
    CHECK(s.eigenvalues[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(s.eigenvalues[2] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(s.ill_conditioned);
  }
  SUBCASE("three eigenvalues, exact power sums") {
    // eigenvalues {0.5, 0.3, 0.2}
    Spectrum s = spectrum_from_power_sums({1.0, 0.38, 0.16});
    REQUIRE(s.eigenvalues.size() == 3);
    CHECK(s.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(s.eigenvalues[2] == doctest::Approx(0.2).epsilon(1e-8));
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(spectrum_from_power_sums({}), std::invalid_argument);
  }
}

TEST_CASE("entanglement spectroscopy end to end") {
  EstimateOptions opts;
  opts.shots = 40000;
  opts.seed = 8;
  Spectrum s = entanglement_spectrum(diag_mix(0.75), 3,
                                     Scheme{Variant::telegate, true},
                                     NoiseModel{}, opts);
  REQUIRE(s.power_sums.size() == 3);
  CHECK(s.power_sums[0] == 1.0);
  CHECK(std::abs(s.power_sums[1] - 0.625) < 0.02);
  CHECK(std::abs(s.power_sums[2] - 0.4375) < 0.02);
  REQUIRE(s.eigenvalues.size() == 3);
  CHECK(std::abs(s.eigenvalues[0] - 0.75) < 0.05);
  CHECK(std::abs(s.eigenvalues[1] - 0.25) < 0.05);
  CHECK_THROWS_AS(entanglement_spectrum(diag_mix(0.75), 1,
                                        Scheme{Variant::telegate, true},
                                        NoiseModel{}, opts),
                  std::invalid_argument);
}

TEST_CASE("virtual distillation ratios") {
  EstimateOptions opts;
  opts.shots = 50000;
  opts.seed = 5;
  Scheme scheme{Variant::telegate, true};

  SUBCASE("Z on the 9:1 mixture, two copies") {
    VirtualExpectation v = virtual_expectation(diag_mix(0.9), "Z", 2, scheme,
                                               NoiseModel{}, opts);
    // Tr(Z rho^2)/Tr(rho^2) = 0.80 / 0.82
    check_within(v.value, 0.8 / 0.82, v.stderr_value, 5, "virtual Z");
    check_within(v.denominator, 0.82, v.stderr_den, 5, "denominator");
  }
  SUBCASE("identity observable is exactly 1") {
    VirtualExpectation v = virtual_expectation(diag_mix(0.75), "I", 2, scheme,
                                               NoiseModel{}, opts);
    CHECK(v.value == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("fewer than two copies is rejected") {
    CHECK_THROWS_AS(virtual_expectation(diag_mix(0.9), "Z", 1, scheme,
                                        NoiseModel{}, opts),
                    std::invalid_argument);
  }
}

TEST_CASE("classical fidelity counts support membership") {
  PartySpec spec = pure_spec(2, 1, {ket("0"), ket("0")});
  Circuit c = build_swap_test(spec, Scheme{Variant::telegate, true}, Basis::X);
  EstimateOptions opts;
  opts.shots = 2000;
  opts.seed = 2;
  CHECK(classical_fidelity(c, NoiseModel{}, opts) == 1.0);

  double noisy = classical_fidelity(c, NoiseModel::from_base_rate(0.01), opts);
  CHECK(noisy < 1.0);
  CHECK(noisy > 0.5);
}
