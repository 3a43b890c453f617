#pragma once

// Toffoli and MPMCT lowering to Clifford+T.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qcforge/circuit.hpp"

namespace qcforge {

/// Which of (control 1, control 2, target) plays each role of the symmetric
/// doubly-controlled-Z core. The Hadamard conjugation always sits on the
/// actual target.
struct ControlOrder {
  std::array<std::size_t, 3> perm{0, 1, 2};

  bool valid() const {
    std::array<bool, 3> seen{};
    for (auto p : perm) {
      if (p > 2 || seen[p]) return false;
      seen[p] = true;
    }
    return true;
  }

  /// Parses "0,1,2" style permutations.
  static ControlOrder parse(std::string_view text) {
    ControlOrder order;
    std::size_t k = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      char ch = text[i];
      if (ch == ',' || ch == ' ') continue;
      if (ch < '0' || ch > '2' || k == 3) {
        throw Error(Errc::invalid_argument, "bad control order '" + std::string(text) + "'");
      }
      order.perm[k++] = static_cast<std::size_t>(ch - '0');
    }
    if (k != 3 || !order.valid()) {
      throw Error(Errc::invalid_argument, "control order must be a permutation of 0,1,2");
    }
    return order;
  }
};

/// Emits a Toffoli expansion given the three core roles, the target and
/// `ancilla_count` clean ancillae.
using Expansion =
    std::function<std::vector<Operation>(std::array<QubitId, 3> roles, QubitId target,
                                         std::span<const QubitId> ancillae)>;

struct StrategyInfo {
  std::string name;
  std::size_t ancilla_count = 0;
  std::size_t t_count = 0;
  std::size_t t_depth = 0;
};

struct DecompositionStrategy {
  StrategyInfo info;
  Expansion expand;  ///< empty for the pass-through strategy
};

namespace detail {

// T-depth 1 with four ancillae. Ancillae collect the parities
//   a0 = x^y^z, a1 = x^y, a2 = y^z, a3 = x^z
// so that one layer of T / T^-1 on all seven wires realizes CCZ.
inline std::vector<Operation> expand_tdepth1(std::array<QubitId, 3> r, QubitId target,
                                             std::span<const QubitId> a) {
  const QubitId x = r[0], y = r[1], z = r[2];
  std::vector<Operation> ops;
  ops.reserve(25);
  ops.push_back(Operation::h(target));
  const std::vector<std::vector<Operation>> layers{
      {Operation::cnot(y, a[2]), Operation::cnot(x, a[0])},
      {Operation::cnot(y, a[1]), Operation::cnot(z, a[2]), Operation::cnot(a[0], a[3])},
      {Operation::cnot(x, a[1]), Operation::cnot(z, a[3]), Operation::cnot(a[2], a[0])}};
  for (const auto& layer : layers) ops.insert(ops.end(), layer.begin(), layer.end());
  ops.push_back(Operation::t(x));
  ops.push_back(Operation::t(y));
  ops.push_back(Operation::t(z));
  ops.push_back(Operation::t(a[0]));
  ops.push_back(Operation::tdag(a[1]));
  ops.push_back(Operation::tdag(a[2]));
  ops.push_back(Operation::tdag(a[3]));
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) ops.insert(ops.end(), it->begin(), it->end());
  ops.push_back(Operation::h(target));
  return ops;
}

// Ancilla-free, T-depth 3: T on {x, y, z}, then {x^y^z, y^z, x^y}, then {x^z}.
inline std::vector<Operation> expand_tdepth3(std::array<QubitId, 3> r, QubitId target,
                                             std::span<const QubitId>) {
  const QubitId a = r[0], b = r[1], c = r[2];
  return {
      Operation::h(target),
      Operation::t(a),
      Operation::t(b),
      Operation::t(c),
      Operation::cnot(c, b),     // b = y^z
      Operation::cnot(b, a),     // a = x^y^z
      Operation::cnot(a, c),     // c = x^y
      Operation::t(a),
      Operation::tdag(b),
      Operation::tdag(c),
      Operation::cnot(c, b),     // b = x^z
      Operation::tdag(b),
      Operation::cnot(c, b),     // b = y^z
      Operation::cnot(a, c),     // c = z
      Operation::cnot(b, a),     // a = x
      Operation::cnot(c, b),     // b = y
      Operation::h(target),
  };
}

}  // namespace detail

inline const std::vector<DecompositionStrategy>& strategies() {
  static const std::vector<DecompositionStrategy> registry{
      {{"TDEPTH1_4ANC", 4, 7, 1}, detail::expand_tdepth1},
      {{"TDEPTH3_0ANC", 0, 7, 3}, detail::expand_tdepth3},
      {{"NONE", 0, 0, 0}, Expansion{}},
  };
  return registry;
}

inline std::vector<StrategyInfo> list_strategies() {
  std::vector<StrategyInfo> out;
  for (const auto& s : strategies()) out.push_back(s.info);
  return out;
}

inline const DecompositionStrategy& find_strategy(std::string_view name) {
  for (const auto& s : strategies()) {
    if (s.info.name == name) return s;
  }
  throw Error(Errc::unknown_strategy, std::string(name));
}

struct TranspileResult {
  Circuit circuit;
  std::vector<std::string> ancillae;  ///< qubits used as clean ancillae, in allocation order
};

namespace detail {

/// Hands out clean ancillae named `<prefix><i>`. An existing register qubit of
/// that name is reused only if nothing has acted on it yet in the output.
class AncillaAllocator {
 public:
  explicit AncillaAllocator(std::string prefix) : prefix_(std::move(prefix)) {}

  QubitId next(Circuit& out, std::vector<std::string>& log) {
    for (;;) {
      std::string name = prefix_ + std::to_string(counter_++);
      auto existing = out.find(name);
      if (!existing) {
        log.push_back(name);
        return out.add_qubit(name);
      }
      if (out.is_idle(*existing) && taken_.insert(*existing).second) {
        log.push_back(name);
        return *existing;
      }
    }
  }

 private:
  std::string prefix_;
  std::size_t counter_ = 0;
  std::unordered_set<QubitId> taken_;
};

inline void emit(Circuit& out, std::vector<Operation> ops, const FlagSet& flags) {
  for (auto& op : ops) {
    op.add_flags(flags);
    out.append(std::move(op));
  }
}

/// Rewrites an MPMCT with m <= 2 into X-conjugated CNOT / Toffoli.
inline std::vector<Operation> lower_small_mpmct(const Operation& op) {
  std::vector<Operation> ops;
  const auto controls = op.controls();
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (!op.polarities()[i]) ops.push_back(Operation::x(controls[i]));
  }
  if (controls.size() == 1) {
    ops.push_back(Operation::cnot(controls[0], op.target()));
  } else {
    ops.push_back(Operation::toffoli(controls[0], controls[1], op.target()));
  }
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (!op.polarities()[i]) ops.push_back(Operation::x(controls[i]));
  }
  return ops;
}

}  // namespace detail

/// Replaces every Toffoli by the named strategy's expansion. Each Toffoli gets
/// its own ancilla block `toff_a<i>`; MPMCT gates with one or two controls are
/// lowered first. Output is packed EARLIEST.
inline TranspileResult decompose_toffoli(const Circuit& circuit, std::string_view strategy_name,
                                         ControlOrder order = {}) {
  const auto& strategy = find_strategy(strategy_name);
  if (!order.valid()) throw Error(Errc::invalid_argument, "invalid control order");

  TranspileResult result{Circuit::with_register_of(circuit), {}};
  Circuit& out = result.circuit;
  detail::AncillaAllocator alloc("toff_a");

  auto expand_one = [&](const Operation& tof) {
    if (!strategy.expand) {
      out.append(tof);
      return;
    }
    std::vector<QubitId> anc;
    for (std::size_t k = 0; k < strategy.info.ancilla_count; ++k) {
      anc.push_back(alloc.next(out, result.ancillae));
    }
    const std::array<QubitId, 3> core{tof.qubits()[0], tof.qubits()[1], tof.qubits()[2]};
    const std::array<QubitId, 3> roles{core[order.perm[0]], core[order.perm[1]], core[order.perm[2]]};
    detail::emit(out, strategy.expand(roles, tof.target(), anc), tof.flags());
  };

  circuit.for_each_operation([&](const Operation& op, std::size_t) {
    if (op.kind() == GateKind::MPMCT) {
      if (op.control_count() > 2) {
        throw Error(Errc::unsupported_gate, "MPMCT with more than two controls; run decompose_mpmct first");
      }
      for (auto& lowered : detail::lower_small_mpmct(op)) {
        lowered.add_flags(op.flags());
        if (lowered.kind() == GateKind::Toffoli) {
          expand_one(lowered);
        } else {
          out.append(std::move(lowered));
        }
      }
    } else if (op.kind() == GateKind::Toffoli) {
      expand_one(op);
    } else {
      out.append(op);
    }
  });
  return result;
}

/// Barenco-style MPMCT lowering: negative controls are X-conjugated, m >= 3
/// becomes 4(m-2) Toffolis over m-2 clean ancillae `mct_a<i>` (shared by all
/// MPMCT gates and restored after each), m = 2 a Toffoli and m = 1 a CNOT.
/// A strategy other than NONE then expands the Toffolis.
inline TranspileResult decompose_mpmct(const Circuit& circuit, std::string_view toffoli_strategy = "NONE") {
  find_strategy(toffoli_strategy);

  TranspileResult result{Circuit::with_register_of(circuit), {}};
  Circuit& out = result.circuit;
  detail::AncillaAllocator alloc("mct_a");
  std::vector<QubitId> pool;

  circuit.for_each_operation([&](const Operation& op, std::size_t) {
    if (op.kind() != GateKind::MPMCT) {
      out.append(op);
      return;
    }
    const std::size_t m = op.control_count();
    if (m <= 2) {
      detail::emit(out, detail::lower_small_mpmct(op), op.flags());
      return;
    }
    while (pool.size() < m - 2) pool.push_back(alloc.next(out, result.ancillae));

    const auto c = op.controls();
    const QubitId t = op.target();
    std::vector<Operation> ops;
    for (std::size_t i = 0; i < m; ++i) {
      if (!op.polarities()[i]) ops.push_back(Operation::x(c[i]));
    }
    auto link = [&](std::size_t i) {
      ops.push_back(Operation::toffoli(c[i], pool[i - 2], i == m - 1 ? t : pool[i - 1]));
    };
    auto sweep = [&](std::size_t top) {
      for (std::size_t i = top; i >= 2; --i) link(i);
      ops.push_back(Operation::toffoli(c[0], c[1], pool[0]));
      for (std::size_t i = 2; i <= top; ++i) link(i);
    };
    sweep(m - 1);  // toggles the target, leaves garbage on the ancillae
    sweep(m - 2);  // removes the garbage
    for (std::size_t i = 0; i < m; ++i) {
      if (!op.polarities()[i]) ops.push_back(Operation::x(c[i]));
    }
    detail::emit(out, std::move(ops), op.flags());
  });

  if (toffoli_strategy != "NONE") {
    auto expanded = decompose_toffoli(out, toffoli_strategy);
    expanded.ancillae.insert(expanded.ancillae.begin(), result.ancillae.begin(), result.ancillae.end());
    return expanded;
  }
  return result;
}

}  // namespace qcforge
