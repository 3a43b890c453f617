#pragma once

// Exhaustive functional verification: dense unitary simulation, truth tables
// for reversible circuits, and equivalence up to global phase.
//
// Basis index convention: qubit 0 is the most significant bit.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "qcforge/circuit.hpp"

namespace qcforge {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kDefaultSimLimit = 14;
inline constexpr std::size_t kTruthTableLimit = 24;

/// Only the dense backend exists; the identifier keeps room for others.
enum class Backend { Dense };

/// 2^k x 2^k matrix stored column-major: column j is U|j>.
class Unitary {
 public:
  Unitary() = default;
  explicit Unitary(std::size_t qubits)
      : qubits_(qubits), dim_(std::size_t{1} << qubits), data_(dim_ * dim_) {}

  std::size_t qubits() const noexcept { return qubits_; }
  std::size_t dim() const noexcept { return dim_; }
  Amplitude& operator()(std::size_t row, std::size_t col) { return data_[col * dim_ + row]; }
  const Amplitude& operator()(std::size_t row, std::size_t col) const { return data_[col * dim_ + row]; }
  std::span<Amplitude> column(std::size_t col) { return {data_.data() + col * dim_, dim_}; }
  std::span<const Amplitude> column(std::size_t col) const { return {data_.data() + col * dim_, dim_}; }

 private:
  std::size_t qubits_ = 0;
  std::size_t dim_ = 1;
  std::vector<Amplitude> data_;
};

struct TruthTable {
  std::vector<std::uint64_t> permutation;

  bool is_bijection() const {
    std::vector<bool> seen(permutation.size(), false);
    for (auto v : permutation) {
      if (v >= seen.size() || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }
};

struct EquivalenceResult {
  bool equivalent = false;
  double max_deviation = 0.0;
  std::uint64_t witness_input = 0;   ///< basis column with the largest deviation
  std::uint64_t witness_output = 0;  ///< row of that deviation

  explicit operator bool() const noexcept { return equivalent; }
};

namespace detail {

inline std::uint64_t bit_of(std::size_t n, QubitId q) { return std::uint64_t{1} << (n - 1 - q); }

/// Control mask/value pair: the op fires on basis states s with (s & mask) == value.
inline std::pair<std::uint64_t, std::uint64_t> control_condition(const Operation& op, std::size_t n) {
  std::uint64_t mask = 0, value = 0;
  const auto controls = op.controls();
  for (std::size_t i = 0; i < controls.size(); ++i) {
    std::uint64_t b = bit_of(n, controls[i]);
    mask |= b;
    if (op.polarities()[i]) value |= b;
  }
  return {mask, value};
}

inline void apply_gate(const Operation& op, std::span<Amplitude> state, std::size_t n) {
  const std::uint64_t dim = state.size();
  const std::uint64_t tm = bit_of(n, op.target());
  static const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  static const Amplitude w{inv_sqrt2, inv_sqrt2};  // e^{i pi/4}
  switch (op.kind()) {
    case GateKind::H:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & tm) continue;
        Amplitude a = state[i], b = state[i | tm];
        state[i] = (a + b) * inv_sqrt2;
        state[i | tm] = (a - b) * inv_sqrt2;
      }
      return;
    case GateKind::S:
    case GateKind::SDag:
    case GateKind::T:
    case GateKind::TDag: {
      Amplitude phase = op.kind() == GateKind::S      ? Amplitude{0, 1}
                        : op.kind() == GateKind::SDag ? Amplitude{0, -1}
                        : op.kind() == GateKind::T    ? w
                                                      : std::conj(w);
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & tm) state[i] *= phase;
      }
      return;
    }
    case GateKind::CZ: {
      const std::uint64_t both = tm | bit_of(n, op.qubits()[0]);
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & both) == both) state[i] = -state[i];
      }
      return;
    }
    case GateKind::X:
    case GateKind::CNOT:
    case GateKind::Toffoli:
    case GateKind::MPMCT: {
      auto [mask, value] = control_condition(op, n);
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & tm) == 0 && (i & mask) == value) std::swap(state[i], state[i | tm]);
      }
      return;
    }
  }
}

inline void check_limit(const Circuit& c, std::size_t limit) {
  if (c.qubit_count() > limit || limit > 62) {
    throw Error(Errc::too_many_qubits, std::to_string(c.qubit_count()) + " qubits exceed the simulator limit of " +
                                           std::to_string(limit));
  }
}

inline std::vector<Amplitude> simulate_basis(const Circuit& c, const std::vector<Operation>& ops,
                                             std::uint64_t input) {
  std::vector<Amplitude> state(std::size_t{1} << c.qubit_count());
  state[input] = 1.0;
  for (const auto& op : ops) apply_gate(op, state, c.qubit_count());
  return state;
}

}  // namespace detail

/// Statevector evolution of basis state `input`.
inline std::vector<Amplitude> simulate(const Circuit& circuit, std::uint64_t input,
                                       std::size_t limit = kDefaultSimLimit) {
  detail::check_limit(circuit, limit);
  return detail::simulate_basis(circuit, circuit.operations(), input);
}

inline Unitary unitary_of(const Circuit& circuit, std::size_t limit = kDefaultSimLimit,
                          Backend = Backend::Dense) {
  detail::check_limit(circuit, limit);
  const std::size_t n = circuit.qubit_count();
  const auto ops = circuit.operations();
  Unitary u(n);
  for (std::size_t col = 0; col < u.dim(); ++col) {
    auto column = u.column(col);
    column[col] = 1.0;
    for (const auto& op : ops) detail::apply_gate(op, column, n);
  }
  return u;
}

/// U^dagger U == I elementwise within `tol`.
inline bool is_unitary(const Unitary& u, double tol = 1e-9) {
  for (std::size_t i = 0; i < u.dim(); ++i) {
    for (std::size_t j = 0; j < u.dim(); ++j) {
      Amplitude acc = 0;
      auto ci = u.column(i), cj = u.column(j);
      for (std::size_t k = 0; k < u.dim(); ++k) acc += std::conj(ci[k]) * cj[k];
      if (std::abs(acc - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

inline bool is_classical(GateKind kind) {
  return kind == GateKind::X || kind == GateKind::CNOT || kind == GateKind::Toffoli ||
         kind == GateKind::MPMCT;
}

/// Bit-vector propagation of one basis input through a reversible circuit.
/// `bits[q]` is the value of qubit q; no size limit.
inline std::vector<bool> classical_eval(const Circuit& circuit, std::vector<bool> bits) {
  if (bits.size() != circuit.qubit_count()) {
    throw Error(Errc::invalid_argument, "input width does not match the register");
  }
  circuit.for_each_operation([&](const Operation& op, std::size_t) {
    if (!is_classical(op.kind())) {
      throw Error(Errc::non_classical_gate, std::string(gate_name(op.kind())) + " is not reversible-classical");
    }
    const auto controls = op.controls();
    for (std::size_t i = 0; i < controls.size(); ++i) {
      if (bits[controls[i]] != op.polarities()[i]) return;
    }
    bits[op.target()] = !bits[op.target()];
  });
  return bits;
}

inline TruthTable truth_table(const Circuit& circuit, std::size_t limit = kTruthTableLimit) {
  detail::check_limit(circuit, std::min<std::size_t>(limit, kTruthTableLimit));
  const std::size_t n = circuit.qubit_count();
  struct Step {
    std::uint64_t mask, value, flip;
  };
  std::vector<Step> steps;
  circuit.for_each_operation([&](const Operation& op, std::size_t) {
    if (!is_classical(op.kind())) {
      throw Error(Errc::non_classical_gate, std::string(gate_name(op.kind())) + " is not reversible-classical");
    }
    auto [mask, value] = detail::control_condition(op, n);
    steps.push_back({mask, value, detail::bit_of(n, op.target())});
  });
  TruthTable table;
  table.permutation.resize(std::size_t{1} << n);
  for (std::uint64_t in = 0; in < table.permutation.size(); ++in) {
    std::uint64_t s = in;
    for (const auto& st : steps) {
      if ((s & st.mask) == st.value) s ^= st.flip;
    }
    table.permutation[in] = s;
  }
  return table;
}

namespace detail {

/// Compares `reference` with `candidate` on the subspace where every qubit
/// named in `clean` (and every candidate qubit absent from the reference) starts
/// in |0>. Candidate-only qubits must also end in |0>. A single global phase is
/// fixed by the first reference entry of maximal magnitude.
inline EquivalenceResult compare(const Circuit& reference, const Circuit& candidate,
                                 const std::vector<QubitId>& cand_of_ref,
                                 const std::unordered_set<QubitId>& clean_ref, double tol,
                                 std::size_t limit) {
  check_limit(reference, limit);
  check_limit(candidate, limit);
  const std::size_t nr = reference.qubit_count();
  const std::size_t nc = candidate.qubit_count();

  std::vector<QubitId> data;
  for (QubitId q = 0; q < nr; ++q) {
    if (!clean_ref.count(q)) data.push_back(q);
  }
  std::vector<bool> in_ref(nc, false);
  for (QubitId q = 0; q < nr; ++q) in_ref[cand_of_ref[q]] = true;

  auto map_to_ref = [&](std::uint64_t cidx, bool& leaked) {
    std::uint64_t r = 0;
    leaked = false;
    for (QubitId q = 0; q < nc; ++q) {
      if (!in_ref[q] && (cidx & bit_of(nc, q))) leaked = true;
    }
    for (QubitId q = 0; q < nr; ++q) {
      if (cidx & bit_of(nc, cand_of_ref[q])) r |= bit_of(nr, q);
    }
    return r;
  };

  const auto ref_ops = reference.operations();
  const auto cand_ops = candidate.operations();
  const std::size_t columns = std::size_t{1} << data.size();
  std::vector<std::vector<Amplitude>> ref_out(columns), cand_out(columns);
  std::vector<std::uint64_t> inputs(columns);
  std::vector<double> leak(columns, 0.0);
  std::vector<std::uint64_t> leak_row(columns, 0);

  for (std::size_t col = 0; col < columns; ++col) {
    std::uint64_t rin = 0, cin = 0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      if (col & (std::uint64_t{1} << (data.size() - 1 - k))) {
        rin |= bit_of(nr, data[k]);
        cin |= bit_of(nc, cand_of_ref[data[k]]);
      }
    }
    inputs[col] = rin;
    ref_out[col] = simulate_basis(reference, ref_ops, rin);
    auto raw = simulate_basis(candidate, cand_ops, cin);
    cand_out[col].assign(std::size_t{1} << nr, Amplitude{});
    for (std::uint64_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == Amplitude{}) continue;
      bool leaked = false;
      std::uint64_t r = map_to_ref(i, leaked);
      if (leaked) {
        if (std::abs(raw[i]) > leak[col]) {
          leak[col] = std::abs(raw[i]);
          leak_row[col] = r;
        }
      } else {
        cand_out[col][r] = raw[i];
      }
    }
  }

  // Phase from the first reference entry of maximal magnitude.
  double best = -1.0;
  std::size_t bc = 0, br = 0;
  for (std::size_t col = 0; col < columns; ++col) {
    for (std::size_t r = 0; r < ref_out[col].size(); ++r) {
      if (std::abs(ref_out[col][r]) > best + 1e-12) {
        best = std::abs(ref_out[col][r]);
        bc = col;
        br = r;
      }
    }
  }
  Amplitude phase = 1.0;
  Amplitude pivot = cand_out[bc][br];
  if (std::abs(pivot) > 1e-12) phase = (pivot / ref_out[bc][br]) / std::abs(pivot / ref_out[bc][br]);

  EquivalenceResult result;
  for (std::size_t col = 0; col < columns; ++col) {
    for (std::size_t r = 0; r < ref_out[col].size(); ++r) {
      double dev = std::abs(cand_out[col][r] - phase * ref_out[col][r]);
      if (dev > result.max_deviation) {
        result.max_deviation = dev;
        result.witness_input = inputs[col];
        result.witness_output = r;
      }
    }
    if (leak[col] > result.max_deviation) {
      result.max_deviation = leak[col];
      result.witness_input = inputs[col];
      result.witness_output = leak_row[col];
    }
  }
  result.equivalent = result.max_deviation <= tol;
  return result;
}

}  // namespace detail

/// True iff unitary_of(a) == e^{i phi} unitary_of(b). Qubits are matched by
/// name when both registers hold the same names, otherwise by index.
inline EquivalenceResult equivalent(const Circuit& a, const Circuit& b, double tol = 1e-9,
                                    std::size_t limit = kDefaultSimLimit) {
  if (a.qubit_count() != b.qubit_count()) {
    throw Error(Errc::qubit_mismatch, "circuits have different qubit counts");
  }
  std::vector<QubitId> map(a.qubit_count());
  bool by_name = true;
  for (QubitId q = 0; q < a.qubit_count(); ++q) {
    auto id = b.find(a.name_of(q));
    if (!id) {
      by_name = false;
      break;
    }
    map[q] = *id;
  }
  if (!by_name) {
    for (QubitId q = 0; q < a.qubit_count(); ++q) map[q] = q;
  }
  return detail::compare(a, b, map, {}, tol, limit);
}

/// Equivalence on the clean-ancilla subspace. Every reference qubit must exist
/// in `candidate` (matched by name). Candidate-only qubits and the qubits named
/// in `clean` start in |0>; candidate-only qubits must be returned to |0>.
inline EquivalenceResult equivalent_with_ancillae(const Circuit& reference, const Circuit& candidate,
                                                  const std::vector<std::string>& clean = {},
                                                  double tol = 1e-9,
                                                  std::size_t limit = kDefaultSimLimit) {
  std::vector<QubitId> map(reference.qubit_count());
  for (QubitId q = 0; q < reference.qubit_count(); ++q) {
    auto id = candidate.find(reference.name_of(q));
    if (!id) throw Error(Errc::qubit_mismatch, "candidate lacks qubit " + reference.name_of(q));
    map[q] = *id;
  }
  std::unordered_set<QubitId> clean_ref;
  for (const auto& name : clean) {
    if (auto id = reference.find(name)) clean_ref.insert(*id);
  }
  return detail::compare(reference, candidate, map, clean_ref, tol, limit);
}

}  // namespace qcforge
