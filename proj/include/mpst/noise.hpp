#pragma once
// Circuit-level Pauli noise model:
//   p1     depolarizing (uniform X/Y/Z) after every explicit 1-qubit unitary,
//          after the implicit basis rotation of a Measure in X or Y, and after
//          a PauliCorrect that fired with a non-identity Pauli;
//   p2     depolarizing (uniform over the 15 non-identity 2-qubit Paulis)
//          after every CNOT;
//   p_meas flips the recorded measurement bit (state collapse unaffected);
//   p_bell applies I/X/Y/Z with weights {1-3p/4, p/4, p/4, p/4} to the
//          transmitted half of each Bell pair, i.e. the state
//          (1-p)|Phi+><Phi+| + p I/4.
// Reset is noiseless; macro gates attract no noise (expanded circuits carry
// the noise; macro runs are for oracles and error injection).

namespace mpst {

struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;
  double p_meas = 0.0;
  double p_bell = 0.0;

  bool any() const { return p1 > 0 || p2 > 0 || p_meas > 0 || p_bell > 0; }

  // Standard scaling from a base physical rate p.
  static NoiseModel from_base_rate(double p) { return {p / 10.0, p, p, 0.0}; }
  static NoiseModel bell_only(double p) { return {0.0, 0.0, 0.0, p}; }
};

}  // namespace mpst
