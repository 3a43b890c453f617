#pragma once

// Resource metrics over a canonical schedule.
//
// The canonical schedule places every operation ASAP (greedy EARLIEST over the
// wire-wise gate order), then slides each T/TDag later inside the idle window
// on its own wire so that T gates share as few moments as possible (optimal
// interval stabbing). Depth is the ASAP depth; T-depth is the number of
// moments that contain at least one T/TDag in this schedule. Both depend only
// on the gate dependency structure, not on how the circuit was built.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qcforge/circuit.hpp"

namespace qcforge {

struct Metrics {
  std::size_t depth = 0;
  std::size_t t_depth = 0;
  std::size_t t_count = 0;
  std::size_t h_count = 0;
  std::size_t cnot_count = 0;
  std::size_t toffoli_count = 0;
  std::size_t gate_count = 0;
  std::size_t qubit_count = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct MetricsDelta {
  std::int64_t depth = 0;
  std::int64_t t_depth = 0;
  std::int64_t t_count = 0;
  std::int64_t h_count = 0;
  std::int64_t cnot_count = 0;
  std::int64_t toffoli_count = 0;
  std::int64_t gate_count = 0;
  std::int64_t qubit_count = 0;

  friend bool operator==(const MetricsDelta&, const MetricsDelta&) = default;
};

struct TDistribution {
  std::vector<std::size_t> per_moment;
};

/// Moment index of every operation (in `Circuit::operations()` order) under the
/// canonical schedule, plus the resulting depth.
struct Schedule {
  std::vector<std::size_t> slot;
  std::size_t depth = 0;
};

inline Schedule canonical_schedule(const Circuit& circuit) {
  const auto ops = circuit.operations();
  Schedule sched;
  sched.slot.resize(ops.size());
  std::vector<std::int64_t> last(circuit.qubit_count(), -1);
  // next_on_wire[i] = index of the following op on a single-qubit op's wire.
  std::vector<std::int64_t> last_op(circuit.qubit_count(), -1);
  std::vector<std::int64_t> next_on_wire(ops.size(), -1);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    std::int64_t latest = -1;
    for (QubitId q : ops[i].qubits()) {
      latest = std::max(latest, last[q]);
      if (last_op[q] >= 0 && ops[static_cast<std::size_t>(last_op[q])].arity() == 1) {
        next_on_wire[static_cast<std::size_t>(last_op[q])] = static_cast<std::int64_t>(i);
      }
      last_op[q] = static_cast<std::int64_t>(i);
    }
    sched.slot[i] = static_cast<std::size_t>(latest + 1);
    for (QubitId q : ops[i].qubits()) last[q] = latest + 1;
    sched.depth = std::max(sched.depth, sched.slot[i] + 1);
  }

  // Windows are bounded by the ASAP slot of the next op on the wire, so windows
  // of T gates on one wire never overlap and any choice inside them is valid.
  struct Window {
    std::size_t lo, hi, op;
  };
  std::vector<Window> windows;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!is_t_like(ops[i].kind())) continue;
    std::size_t hi = next_on_wire[i] >= 0
                         ? sched.slot[static_cast<std::size_t>(next_on_wire[i])] - 1
                         : sched.depth - 1;
    windows.push_back({sched.slot[i], hi, i});
  }
  std::stable_sort(windows.begin(), windows.end(),
                   [](const Window& a, const Window& b) { return a.hi < b.hi; });
  std::int64_t stab = -1;
  for (const auto& w : windows) {
    if (stab < static_cast<std::int64_t>(w.lo)) stab = static_cast<std::int64_t>(w.hi);
    sched.slot[w.op] = static_cast<std::size_t>(stab);
  }
  return sched;
}

/// The circuit laid out on its canonical schedule.
inline Circuit canonical_repack(const Circuit& circuit) {
  const auto ops = circuit.operations();
  const auto sched = canonical_schedule(circuit);
  std::vector<std::size_t> order(ops.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sched.slot[a] < sched.slot[b]; });
  Circuit out = Circuit::with_register_of(circuit);
  std::size_t current = 0;
  bool first = true;
  for (std::size_t idx : order) {
    if (first || sched.slot[idx] != current) {
      out.barrier();
      current = sched.slot[idx];
      first = false;
    }
    out.append(ops[idx]);
  }
  return out;
}

inline TDistribution t_distribution(const Circuit& circuit) {
  const auto sched = canonical_schedule(circuit);
  TDistribution dist;
  dist.per_moment.assign(sched.depth, 0);
  std::size_t i = 0;
  circuit.for_each_operation([&](const Operation& op, std::size_t) {
    if (is_t_like(op.kind())) ++dist.per_moment[sched.slot[i]];
    ++i;
  });
  return dist;
}

inline Metrics metrics(const Circuit& circuit) {
  Metrics m;
  m.qubit_count = circuit.qubit_count();
  m.gate_count = circuit.gate_count();
  circuit.for_each_operation([&](const Operation& op, std::size_t) {
    switch (op.kind()) {
      case GateKind::T:
      case GateKind::TDag: ++m.t_count; break;
      case GateKind::H: ++m.h_count; break;
      case GateKind::CNOT: ++m.cnot_count; break;
      case GateKind::Toffoli: ++m.toffoli_count; break;
      default: break;
    }
  });
  const auto dist = t_distribution(circuit);
  m.depth = dist.per_moment.size();
  m.t_depth = static_cast<std::size_t>(
      std::count_if(dist.per_moment.begin(), dist.per_moment.end(), [](std::size_t n) { return n > 0; }));
  return m;
}

inline MetricsDelta diff_metrics(const Metrics& before, const Metrics& after) {
  auto d = [](std::size_t a, std::size_t b) {
    return static_cast<std::int64_t>(b) - static_cast<std::int64_t>(a);
  };
  return MetricsDelta{d(before.depth, after.depth),
                      d(before.t_depth, after.t_depth),
                      d(before.t_count, after.t_count),
                      d(before.h_count, after.h_count),
                      d(before.cnot_count, after.cnot_count),
                      d(before.toffoli_count, after.toffoli_count),
                      d(before.gate_count, after.gate_count),
                      d(before.qubit_count, after.qubit_count)};
}

/// key=value lines, one per field.
inline std::string format_metrics(const Metrics& m) {
  std::ostringstream os;
  os << "qubits=" << m.qubit_count << '\n'
     << "gates=" << m.gate_count << '\n'
     << "depth=" << m.depth << '\n'
     << "t_depth=" << m.t_depth << '\n'
     << "t=" << m.t_count << '\n'
     << "h=" << m.h_count << '\n'
     << "cnot=" << m.cnot_count << '\n'
     << "toffoli=" << m.toffoli_count << '\n';
  return os.str();
}

inline std::string format_delta(const MetricsDelta& d) {
  auto sgn = [](std::int64_t v) { return (v > 0 ? "+" : "") + std::to_string(v); };
  std::ostringstream os;
  os << "qubits=" << sgn(d.qubit_count) << " gates=" << sgn(d.gate_count)
     << " depth=" << sgn(d.depth) << " t_depth=" << sgn(d.t_depth) << " t=" << sgn(d.t_count)
     << " h=" << sgn(d.h_count) << " cnot=" << sgn(d.cnot_count)
     << " toffoli=" << sgn(d.toffoli_count);
  return os.str();
}

}  // namespace qcforge
