#include "mpst/states.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace mpst {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

Eigen::MatrixXcd StateSpec::density() const {
  if (members.empty()) return {};
  Eigen::Index d = members.front().amps.size();
  MatrixXcd rho = MatrixXcd::Zero(d, d);
  for (const Member& m : members) rho += m.weight * m.amps * m.amps.adjoint();
  return rho;
}

StateSpec StateSpec::from_pure(VectorXcd amps) {
  StateSpec s;
  s.members.push_back({1.0, std::move(amps)});
  return s;
}

void PartySpec::validate() const {
  if (k < 2) throw std::invalid_argument("party count k must be >= 2");
  if (n < 1) throw std::invalid_argument("state width n must be >= 1");
  if (static_cast<std::int32_t>(states.size()) != k)
    throw std::invalid_argument("expected exactly k party states");
  const Eigen::Index d = Eigen::Index(1) << n;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const StateSpec& s = states[i];
    if (s.members.empty())
      throw std::invalid_argument("party " + std::to_string(i) +
                                  ": empty ensemble");
    double wsum = 0;
    for (const auto& m : s.members) {
      if (m.amps.size() != d)
        throw std::invalid_argument("party " + std::to_string(i) +
                                    ": state dimension != 2^n");
      if (m.weight < -1e-12)
        throw std::invalid_argument("party " + std::to_string(i) +
                                    ": negative ensemble weight");
      if (std::abs(m.amps.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("party " + std::to_string(i) +
                                    ": state vector is not unit norm");
      wsum += m.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
      throw std::invalid_argument("party " + std::to_string(i) +
                                  ": ensemble weights must sum to 1");
  }
}

VectorXcd ket(const std::string& chars) {
  VectorXcd v = VectorXcd::Ones(1);
  const double r = 1.0 / std::sqrt(2.0);
  for (char c : chars) {
    Eigen::Vector2cd q;
    switch (c) {
      case '0': q << 1, 0; break;
      case '1': q << 0, 1; break;
      case '+': q << r, r; break;
      case '-': q << r, -r; break;
      default:
        throw std::invalid_argument(std::string("ket: unsupported symbol '") +
                                    c + "'");
    }
    VectorXcd next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next(2 * i) = v(i) * q(0);
      next(2 * i + 1) = v(i) * q(1);
    }
    v = std::move(next);
  }
  return v;
}

VectorXcd random_pure_state(std::int32_t n, RngStream& rng) {
  const Eigen::Index d = Eigen::Index(1) << n;
  VectorXcd v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    // Box-Muller: two uniforms -> two independent standard normals.
    double u1 = rng.uniform(), u2 = rng.uniform();
    while (u1 <= 1e-300) u1 = rng.uniform();
    double m = std::sqrt(-2.0 * std::log(u1));
    v(i) = std::complex<double>(m * std::cos(2 * M_PI * u2),
                                m * std::sin(2 * M_PI * u2));
  }
  v.normalize();
  return v;
}

StateSpec density_to_ensemble(const MatrixXcd& rho, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  if (es.info() != Eigen::Success)
    throw std::invalid_argument("density_to_ensemble: eigensolver failed");
  StateSpec s;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double w = es.eigenvalues()(i);
    if (w < tol) continue;
    s.members.push_back({w, es.eigenvectors().col(i)});
  }
  if (s.members.empty())
    throw std::invalid_argument("density_to_ensemble: no positive weight");
  return s;
}

namespace {

// Sequential recursive-descent parser for the state mini-language. A plain
// split on commas would misread amps lists, so forms with known arity
// (amps = 2^{n+1} floats) consume exactly what they own.
class StateParser {
 public:
  StateParser(const std::string& text, std::int32_t n)
      : s_(text), n_(n), dim_(Eigen::Index(1) << n) {}

  std::vector<std::pair<std::int32_t, StateSpec>> parse(std::int32_t k) {
    std::vector<std::pair<std::int32_t, StateSpec>> out;
    skip_ws();
    while (!eof()) {
      std::int32_t idx = parse_index(k);
      expect(':');
      StateSpec st = parse_state();
      out.emplace_back(idx, std::move(st));
      skip_ws();
      if (eof()) break;
      if (peek() == ',' || peek() == ';') {
        ++pos_;
        skip_ws();
      } else {
        fail("expected ',' or ';' between party entries");
      }
    }
    return out;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("state spec at offset " +
                                std::to_string(pos_) + ": " + why);
  }
  void expect(char c) {
    skip_ws();
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool try_consume(const std::string& word) {
    skip_ws();
    if (s_.compare(pos_, word.size(), word) == 0) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  std::int32_t parse_index(std::int32_t k) {
    skip_ws();
    if (eof()) fail("expected party index");
    if (peek() == '*') {
      ++pos_;
      return -1;
    }
    std::size_t start = pos_;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start) fail("expected party index (0-based) or '*'");
    long idx = std::stol(s_.substr(start, pos_ - start));
    if (idx < 0 || idx >= k)
      fail("party index " + std::to_string(idx) + " out of range for k=" +
           std::to_string(k));
    return static_cast<std::int32_t>(idx);
  }

  double parse_float() {
    skip_ws();
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(s_.substr(pos_), &used);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    pos_ += used;
    return v;
  }

  VectorXcd parse_ket_chars() {
    skip_ws();
    bool braced = false;
    if (!eof() && peek() == '|') {
      braced = true;
      ++pos_;
    }
    std::string chars;
    while (!eof() && (peek() == '0' || peek() == '1' || peek() == '+' ||
                      peek() == '-'))
      chars.push_back(s_[pos_++]);
    if (braced) expect('>');
    if (static_cast<std::int32_t>(chars.size()) != n_)
      fail("ket '" + chars + "' must have exactly n=" + std::to_string(n_) +
           " symbols");
    return ket(chars);
  }

  VectorXcd parse_amps() {
    VectorXcd v(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      double re = parse_float();
      expect(',');
      double im = parse_float();
      v(i) = std::complex<double>(re, im);
      if (i + 1 < dim_) expect(',');
    }
    double nrm = v.norm();
    if (nrm < 1e-12) fail("amps: zero vector");
    return v / nrm;
  }

  StateSpec parse_state() {
    skip_ws();
    if (try_consume("mix(")) {
      StateSpec s;
      while (true) {
        double w = parse_float();
        expect(':');
        StateSpec inner = parse_state();
        if (!inner.pure()) fail("mix members must be pure states");
        s.members.push_back({w, inner.members.front().amps});
        skip_ws();
        if (eof()) fail("unterminated mix(");
        char c = peek();
        if (c == ')') {
          ++pos_;
          break;
        }
        if (c == ',' || c == '|') {
          ++pos_;
          continue;
        }
        fail("expected ',', '|' or ')' in mix(...)");
      }
      double wsum = 0;
      for (auto& m : s.members) wsum += m.weight;
      if (wsum <= 0) fail("mix weights must be positive");
      for (auto& m : s.members) m.weight /= wsum;
      return s;
    }
    if (try_consume("amps:")) return StateSpec::from_pure(parse_amps());
    return StateSpec::from_pure(parse_ket_chars());
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::int32_t n_;
  Eigen::Index dim_;
};

}  // namespace

std::vector<StateSpec> parse_states(const std::string& text, std::int32_t k,
                                    std::int32_t n) {
  // k=1 is allowed here: single-state modes (--rho) reuse the same grammar.
  if (k < 1 || n < 1) throw std::invalid_argument("parse_states: need k>=1, n>=1");
  std::vector<StateSpec> out(static_cast<std::size_t>(k),
                            StateSpec::from_pure(ket(std::string(n, '0'))));
  StateParser parser(text, n);
  for (auto& [idx, st] : parser.parse(k)) {
    if (idx < 0) {
      for (auto& slot : out) slot = st;
    } else {
      out[static_cast<std::size_t>(idx)] = std::move(st);
    }
  }
  return out;
}

}  // namespace mpst
