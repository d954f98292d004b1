#pragma once
// Party input states: pure vectors or finite pure-state ensembles, plus the
// CLI mini-language for describing them.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mpst/rng.hpp"

namespace mpst {

// One party's state rho_i: a weighted ensemble of pure states. A single
// member of weight 1 is a pure input; per shot the simulators draw one
// member, so the expectation over shots reproduces rho_i exactly.
struct StateSpec {
  struct Member {
    double weight = 1.0;
    Eigen::VectorXcd amps;
  };
  std::vector<Member> members;

  bool pure() const { return members.size() == 1; }
  Eigen::Index dim() const {
    return members.empty() ? 0 : members.front().amps.size();
  }
  Eigen::MatrixXcd density() const;

  static StateSpec from_pure(Eigen::VectorXcd amps);
};

// The full test instance: k parties of n qubits each.
struct PartySpec {
  std::int32_t k = 2;
  std::int32_t n = 1;
  std::vector<StateSpec> states;  // k entries

  // Throws std::invalid_argument on bad shape, non-unit norms (1e-12),
  // negative weights, or weights not summing to 1 (1e-12).
  void validate() const;
};

// Computational-basis / |+> / |-> ket over chars "01+-", e.g. "0+1".
Eigen::VectorXcd ket(const std::string& chars);

// Haar-ish random pure state: i.i.d. complex Gaussian entries, normalized.
Eigen::VectorXcd random_pure_state(std::int32_t n, RngStream& rng);

// Exact eigendecomposition of a density matrix into an ensemble (eigenvalues
// below tol are dropped).
StateSpec density_to_ensemble(const Eigen::MatrixXcd& rho, double tol = 1e-12);

// State mini-language. Entries assign a state to one party (`<idx>:STATE`,
// 0-based) or to all parties (`*:STATE`); entries are separated by `,` or
// `;`. STATE is one of
//   - a ket over 0/1/+/- of length n, optionally written |…>   e.g. |0+>
//   - amps:re,im,re,im,…    (exactly 2^n complex pairs)
//   - mix(w:STATE, w:STATE, …)   weighted ensemble (members may also be
//     separated by `|`)
// Unassigned parties default to |0…0>. A leading `@` means "read the spec
// string from this file" and is handled by the CLI, not here.
std::vector<StateSpec> parse_states(const std::string& text, std::int32_t k,
                                    std::int32_t n);

}  // namespace mpst
