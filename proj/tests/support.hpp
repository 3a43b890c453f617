#pragma once

// Shared test helpers: fixture loading, seeded random circuits and a naive
// matrix oracle that shares no code with the library simulator.

#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcforge/qcforge.hpp"

#ifndef QCFORGE_FIXTURE_DIR
#error "QCFORGE_FIXTURE_DIR must be defined by the build"
#endif

namespace qcforge::testing {

inline std::string fixture_path(const std::string& name) { return std::string(QCFORGE_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Circuit load_fixture(const std::string& name) { return parse(read_fixture(name)); }

/// The worked example transpiled with the default strategy and order.
inline Circuit expanded_example() { return decompose_toffoli(load_fixture("worked_example.qc"), "TDEPTH1_4ANC").circuit; }

inline Circuit optimized_example() {
  return fixed_point({make_pass("cancel-cnot"), make_pass("cancel-h")})(expanded_example()).circuit;
}

// ---------------------------------------------------------------------------
// Naive matrix oracle: every gate becomes a full 2^n x 2^n matrix (Kronecker
// products for single-qubit gates, explicit permutations/diagonals for the
// rest) and the circuit is their product. Slow and obvious on purpose.

using Cx = std::complex<double>;
using Matrix = std::vector<std::vector<Cx>>;

inline Matrix identity(std::size_t dim) {
  Matrix m(dim, std::vector<Cx>(dim));
  for (std::size_t i = 0; i < dim; ++i) m[i][i] = 1;
  return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<Cx>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == Cx{}) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t na = a.size(), nb = b.size();
  Matrix c(na * nb, std::vector<Cx>(na * nb));
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) c[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
  return c;
}

inline Matrix single_qubit_matrix(GateKind kind) {
  const double r = 1.0 / std::sqrt(2.0);
  const Cx w = std::polar(1.0, M_PI / 4);
  switch (kind) {
    case GateKind::X: return {{0, 1}, {1, 0}};
    case GateKind::H: return {{r, r}, {r, -r}};
    case GateKind::S: return {{1, 0}, {0, Cx{0, 1}}};
    case GateKind::SDag: return {{1, 0}, {0, Cx{0, -1}}};
    case GateKind::T: return {{1, 0}, {0, w}};
    case GateKind::TDag: return {{1, 0}, {0, std::conj(w)}};
    default: break;
  }
  throw std::logic_error("not a single-qubit gate");
}

/// Qubit 0 is the most significant bit of a basis index.
inline bool bit(std::size_t index, std::size_t n, std::size_t q) { return (index >> (n - 1 - q)) & 1U; }

inline Matrix gate_matrix(const Operation& op, std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  if (op.arity() == 1) {
    Matrix m = {{1}};
    for (std::size_t q = 0; q < n; ++q) m = kron(m, q == op.target() ? single_qubit_matrix(op.kind()) : identity(2));
    return m;
  }
  Matrix m(dim, std::vector<Cx>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    if (op.kind() == GateKind::CZ) {
      m[col][col] = bit(col, n, op.qubits()[0]) && bit(col, n, op.qubits()[1]) ? -1.0 : 1.0;
      continue;
    }
    bool fire = true;
    const auto controls = op.controls();
    for (std::size_t i = 0; i < controls.size(); ++i) {
      const bool want = op.kind() == GateKind::MPMCT ? static_cast<bool>(op.polarities()[i]) : true;
      fire = fire && bit(col, n, controls[i]) == want;
    }
    const std::size_t row = fire ? col ^ (std::size_t{1} << (n - 1 - op.target())) : col;
    m[row][col] = 1;
  }
  return m;
}

inline Matrix oracle_unitary(const Circuit& c) {
  Matrix u = identity(std::size_t{1} << c.qubit_count());
  c.for_each_operation([&](const Operation& op, std::size_t) { u = multiply(gate_matrix(op, c.qubit_count()), u); });
  return u;
}

/// max |a - e^{i phi} b| with phi fixed by the largest entry of a.
inline double phase_distance(const Matrix& a, const Matrix& b) {
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (std::abs(a[i][j]) > std::abs(a[bi][bj]) + 1e-12) bi = i, bj = j;
  if (std::abs(b[bi][bj]) < 1e-12) return 1.0;
  const Cx phase = a[bi][bj] / b[bi][bj];
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[i][j] - phase * b[i][j]));
  return worst;
}

// ---------------------------------------------------------------------------
// Random circuits. Half of the draws repeat or locally mirror a recent gate so
// that cancellation and commutation passes actually find work.

inline Operation random_gate(std::mt19937& rng, std::size_t qubits, bool classical_only = false) {
  static const GateKind quantum[] = {GateKind::X, GateKind::H, GateKind::S, GateKind::SDag, GateKind::T,
                                     GateKind::TDag, GateKind::CNOT, GateKind::CZ, GateKind::Toffoli, GateKind::MPMCT};
  static const GateKind classical[] = {GateKind::X, GateKind::CNOT, GateKind::Toffoli, GateKind::MPMCT};
  GateKind kind;
  do {
    kind = classical_only ? classical[rng() % std::size(classical)] : quantum[rng() % std::size(quantum)];
  } while ((kind == GateKind::CNOT || kind == GateKind::CZ) && qubits < 2 ||
           (kind == GateKind::Toffoli || kind == GateKind::MPMCT) && qubits < 3);

  std::vector<QubitId> pool(qubits);
  for (std::size_t i = 0; i < qubits; ++i) pool[i] = static_cast<QubitId>(i);
  std::shuffle(pool.begin(), pool.end(), rng);
  switch (kind) {
    case GateKind::CNOT: return Operation::cnot(pool[0], pool[1]);
    case GateKind::CZ: return Operation::cz(pool[0], pool[1]);
    case GateKind::Toffoli: return Operation::toffoli(pool[0], pool[1], pool[2]);
    case GateKind::MPMCT: {
      const std::size_t m = 1 + rng() % std::min<std::size_t>(4, qubits - 1);
      std::vector<QubitId> controls(pool.begin(), pool.begin() + static_cast<long>(m));
      std::vector<bool> pols;
      for (std::size_t i = 0; i < m; ++i) pols.push_back(rng() % 2);
      return Operation::mpmct(controls, pols, pool[m]);
    }
    default: return Operation(kind, {pool[0]});
  }
}

inline Circuit random_circuit(std::mt19937& rng, std::size_t qubits, std::size_t gates, bool classical_only = false) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < qubits; ++i) names.push_back("q" + std::to_string(i));
  Circuit c = build_circuit(names);
  std::vector<Operation> recent;
  while (c.gate_count() < gates) {
    if (!recent.empty() && rng() % 2 == 0) {
      c.append(recent[rng() % recent.size()]);
    } else {
      Operation op = random_gate(rng, qubits, classical_only);
      recent.push_back(op);
      if (recent.size() > 4) recent.erase(recent.begin());
      c.append(std::move(op));
    }
  }
  return c;
}

/// Random Clifford+T circuit drawn from the cancellation-relevant gates only.
inline Circuit random_clifford_t(std::mt19937& rng, std::size_t qubits, std::size_t gates) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < qubits; ++i) names.push_back("q" + std::to_string(i));
  Circuit c = build_circuit(names);
  for (std::size_t g = 0; g < gates; ++g) {
    const QubitId a = static_cast<QubitId>(rng() % qubits);
    QubitId b = static_cast<QubitId>(rng() % (qubits - 1));
    if (b >= a) ++b;
    switch (rng() % 6) {
      case 0: c.append(Operation::h(a)); break;
      case 1: c.append(Operation::t(a)); break;
      case 2: c.append(Operation::tdag(a)); break;
      case 3: c.append(Operation::s(a)); break;
      default: c.append(Operation::cnot(a, b)); break;
    }
  }
  return c;
}

}  // namespace qcforge::testing
