#pragma once

// Flag-driven cancellation passes, T-gate commutation, and the
// invariant-checking wrapper.
//
// All passes work on the wire-wise gate order: two gates are adjacent when no
// other gate touches any of their qubits in between, regardless of moments.
// Every pass returns a new circuit packed EARLIEST; a pass that applies no
// rewrite returns its input unchanged.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcforge/analysis.hpp"
#include "qcforge/circuit.hpp"

namespace qcforge {

struct RewriteReport {
  std::string pass_name;
  std::size_t rewrites_applied = 0;
  std::map<GateKind, std::size_t> gates_removed;
  std::size_t flags_transferred = 0;
  std::size_t iterations = 0;

  std::size_t removed(GateKind kind) const {
    auto it = gates_removed.find(kind);
    return it == gates_removed.end() ? 0 : it->second;
  }
};

struct PassResult {
  Circuit circuit;
  RewriteReport report;
};

/// Called after every individual rewrite with its 1-based index and the
/// circuit as it stands after that rewrite.
using StepObserver = std::function<void(std::size_t step, const Circuit& state)>;

struct FlagOptions {
  bool flagged_only = false;
  std::optional<Flag> flag;
};

namespace detail {

/// Operations linked in global order and along every wire.
class WireGraph {
 public:
  explicit WireGraph(const Circuit& circuit)
      : like_(Circuit::with_register_of(circuit)),
        head_(circuit.qubit_count(), -1),
        tail_(circuit.qubit_count(), -1) {
    circuit.for_each_operation([&](const Operation& op, std::size_t) {
      const int id = static_cast<int>(nodes_.size());
      Node node{op, true, {}, {}, id - 1, -1};
      node.prev.assign(op.arity(), -1);
      node.next.assign(op.arity(), -1);
      for (std::size_t k = 0; k < op.arity(); ++k) {
        const QubitId q = op.qubits()[k];
        if (tail_[q] >= 0) {
          node.prev[k] = tail_[q];
          auto& p = nodes_[static_cast<std::size_t>(tail_[q])];
          p.next[slot(p, q)] = id;
        } else {
          head_[q] = id;
        }
        tail_[q] = id;
      }
      if (id > 0) nodes_.back().order_next = id;
      nodes_.push_back(std::move(node));
    });
    first_ = nodes_.empty() ? -1 : 0;
  }

  std::size_t size() const { return nodes_.size(); }
  int first() const { return first_; }
  int order_next(int id) const { return node(id).order_next; }
  bool alive(int id) const { return node(id).alive; }
  const Operation& op(int id) const { return node(id).op; }
  Operation& op(int id) { return nodes_[static_cast<std::size_t>(id)].op; }

  int wire_prev(int id, QubitId q) const { return node(id).prev[slot(node(id), q)]; }
  int wire_next(int id, QubitId q) const { return node(id).next[slot(node(id), q)]; }

  void remove(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    for (std::size_t k = 0; k < n.op.arity(); ++k) unlink_wire(id, n.op.qubits()[k]);
    if (n.order_prev >= 0) nodes_[static_cast<std::size_t>(n.order_prev)].order_next = n.order_next;
    else first_ = n.order_next;
    if (n.order_next >= 0) nodes_[static_cast<std::size_t>(n.order_next)].order_prev = n.order_prev;
    n.alive = false;
  }

  /// Moves single-qubit node `id` directly in front of its wire predecessor.
  void swap_with_wire_prev(int id) {
    const QubitId q = op(id).qubits()[0];
    const int anchor = wire_prev(id, q);
    const int after = wire_next(id, q);
    const int before = wire_prev(anchor, q);
    Node& n = nodes_[static_cast<std::size_t>(id)];
    Node& a = nodes_[static_cast<std::size_t>(anchor)];
    // wire: before -> id -> anchor -> after
    n.prev[0] = before;
    n.next[0] = anchor;
    a.prev[slot(a, q)] = id;
    a.next[slot(a, q)] = after;
    if (before >= 0) nodes_[static_cast<std::size_t>(before)].next[slot(node(before), q)] = id;
    else head_[q] = id;
    if (after >= 0) nodes_[static_cast<std::size_t>(after)].prev[slot(node(after), q)] = anchor;
    else tail_[q] = anchor;
    // global order: unlink id, insert before anchor
    if (n.order_prev >= 0) nodes_[static_cast<std::size_t>(n.order_prev)].order_next = n.order_next;
    else first_ = n.order_next;
    if (n.order_next >= 0) nodes_[static_cast<std::size_t>(n.order_next)].order_prev = n.order_prev;
    n.order_prev = a.order_prev;
    n.order_next = anchor;
    if (a.order_prev >= 0) nodes_[static_cast<std::size_t>(a.order_prev)].order_next = id;
    else first_ = id;
    a.order_prev = id;
  }

  Circuit materialize() const {
    Circuit out = like_;
    for (int id = first_; id >= 0; id = node(id).order_next) out.append(node(id).op);
    return out;
  }

 private:
  struct Node {
    Operation op;
    bool alive;
    std::vector<int> prev, next;
    int order_prev, order_next;
  };

  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

  static std::size_t slot(const Node& n, QubitId q) {
    const auto qs = n.op.qubits();
    for (std::size_t k = 0; k < qs.size(); ++k) {
      if (qs[k] == q) return k;
    }
    return qs.size();  // unreachable for linked nodes
  }

  void unlink_wire(int id, QubitId q) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    const std::size_t k = slot(n, q);
    const int p = n.prev[k], x = n.next[k];
    if (p >= 0) nodes_[static_cast<std::size_t>(p)].next[slot(node(p), q)] = x;
    else head_[q] = x;
    if (x >= 0) nodes_[static_cast<std::size_t>(x)].prev[slot(node(x), q)] = p;
    else tail_[q] = p;
  }

  Circuit like_;
  std::vector<Node> nodes_;
  std::vector<int> head_, tail_;
  int first_ = -1;
};

/// The gate immediately before `id` on every one of its wires, if it is the
/// same gate on all of them.
inline int adjacent_predecessor(const WireGraph& g, int id) {
  const auto qs = g.op(id).qubits();
  const int cand = g.wire_prev(id, qs[0]);
  if (cand < 0) return -1;
  for (QubitId q : qs) {
    if (g.wire_prev(id, q) != cand) return -1;
  }
  return g.op(cand).same_gate(g.op(id)) ? cand : -1;
}

inline void require_flag(const FlagOptions& opts) {
  if (opts.flagged_only && !opts.flag) {
    throw Error(Errc::flag_required, "flagged-only mode needs a flag label");
  }
}

inline bool eligible(const Operation& op, const FlagOptions& opts) {
  return !opts.flagged_only || op.has_flag(*opts.flag);
}

/// Removes wire-adjacent pairs of identical self-inverse gates of `kind`,
/// scanning left to right and iterating to a fixed point. The union of the
/// pair's flags goes to the nearest surviving gate before and after the pair
/// on any of its wires.
inline PassResult cancel_pairs(const Circuit& circuit, GateKind kind, std::string name,
                               const FlagOptions& opts, const StepObserver& observer) {
  require_flag(opts);
  WireGraph g(circuit);
  RewriteReport report{std::move(name), 0, {}, 0, 0};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int id = g.first(); id >= 0;) {
      const int next = g.order_next(id);
      if (g.op(id).kind() == kind && eligible(g.op(id), opts)) {
        const int prev = adjacent_predecessor(g, id);
        if (prev >= 0 && eligible(g.op(prev), opts)) {
          FlagSet moved = g.op(prev).flags();
          moved.insert(g.op(id).flags().begin(), g.op(id).flags().end());
          int earlier = -1, later = -1;
          for (QubitId q : g.op(id).qubits()) {
            earlier = std::max(earlier, g.wire_prev(prev, q));
            const int n = g.wire_next(id, q);
            if (n >= 0 && (later < 0 || n < later)) later = n;
          }
          g.remove(prev);
          g.remove(id);
          if (!moved.empty()) {
            for (int r : {earlier, later}) {
              if (r >= 0 && g.op(r).add_flags(moved) > 0) ++report.flags_transferred;
            }
          }
          report.gates_removed[kind] += 2;
          ++report.rewrites_applied;
          changed = true;
          if (observer) observer(report.rewrites_applied, g.materialize());
        }
      }
      id = next;
    }
    if (changed) ++report.iterations;
  }
  if (report.rewrites_applied == 0) return {circuit, report};
  return {g.materialize(), report};
}

}  // namespace detail

inline PassResult cancel_cnot(const Circuit& circuit, const FlagOptions& opts = {},
                              const StepObserver& observer = {}) {
  return detail::cancel_pairs(circuit, GateKind::CNOT, "cancel-cnot", opts, observer);
}

inline PassResult cancel_hadamard(const Circuit& circuit, const FlagOptions& opts = {},
                                  const StepObserver& observer = {}) {
  return detail::cancel_pairs(circuit, GateKind::H, "cancel-h", opts, observer);
}

/// Merges wire-adjacent T;T into S and TDag;TDag into SDag. The merged gate
/// keeps the union of both flag sets.
inline PassResult recompose_tt_to_s(const Circuit& circuit, const FlagOptions& opts = {},
                                    const StepObserver& observer = {}) {
  detail::require_flag(opts);
  detail::WireGraph g(circuit);
  RewriteReport report{"recompose-s", 0, {}, 0, 0};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int id = g.first(); id >= 0;) {
      const int next = g.order_next(id);
      const GateKind kind = g.op(id).kind();
      if (is_t_like(kind) && detail::eligible(g.op(id), opts)) {
        const int prev = detail::adjacent_predecessor(g, id);
        if (prev >= 0 && detail::eligible(g.op(prev), opts)) {
          FlagSet flags = g.op(prev).flags();
          flags.insert(g.op(id).flags().begin(), g.op(id).flags().end());
          const GateKind merged = kind == GateKind::T ? GateKind::S : GateKind::SDag;
          g.op(id) = Operation(merged, {g.op(id).target()}, {}, std::move(flags));
          g.remove(prev);
          report.gates_removed[kind] += 2;
          ++report.rewrites_applied;
          changed = true;
          if (observer) observer(report.rewrites_applied, g.materialize());
        }
      }
      id = next;
    }
    if (changed) ++report.iterations;
  }
  if (report.rewrites_applied == 0) return {circuit, report};
  return {g.materialize(), report};
}

/// True if a T/TDag on `q` may be moved from just after `op` to just before it.
/// Closed rule set; T gates never pass each other so their order is kept.
inline bool t_commutes_with(const Operation& op, QubitId q) {
  switch (op.kind()) {
    case GateKind::CNOT: return op.qubits()[0] == q;
    case GateKind::CZ:
    case GateKind::S:
    case GateKind::SDag: return true;
    default: return false;
  }
}

/// Moves every T/TDag as far left as the commutation rules allow.
inline PassResult commute_t_to_start(const Circuit& circuit, const StepObserver& observer = {}) {
  detail::WireGraph g(circuit);
  RewriteReport report{"commute-t-start", 0, {}, 0, 0};
  const int n = static_cast<int>(g.size());
  for (int id = 0; id < n; ++id) {
    if (!is_t_like(g.op(id).kind())) continue;
    const QubitId q = g.op(id).target();
    for (int p = g.wire_prev(id, q); p >= 0 && t_commutes_with(g.op(p), q); p = g.wire_prev(id, q)) {
      g.swap_with_wire_prev(id);
      ++report.rewrites_applied;
      if (observer) observer(report.rewrites_applied, g.materialize());
    }
  }
  report.iterations = report.rewrites_applied > 0 ? 1 : 0;
  if (report.rewrites_applied == 0) return {circuit, report};
  return {g.materialize(), report};
}

/// A named, composable optimizer pass.
struct Pass {
  std::string name;
  std::function<PassResult(const Circuit&, const StepObserver&)> run;

  PassResult operator()(const Circuit& c, const StepObserver& observer = {}) const {
    return run(c, observer);
  }
};

inline Pass identity_pass() {
  return {"identity", [](const Circuit& c, const StepObserver&) {
            return PassResult{c, RewriteReport{"identity", 0, {}, 0, 0}};
          }};
}

inline const std::vector<std::string>& pass_names() {
  static const std::vector<std::string> names{"cancel-cnot", "cancel-h", "commute-t-start",
                                              "recompose-s"};
  return names;
}

inline Pass make_pass(std::string_view name, FlagOptions opts = {}) {
  if (name == "cancel-cnot") {
    return {"cancel-cnot", [opts](const Circuit& c, const StepObserver& o) { return cancel_cnot(c, opts, o); }};
  }
  if (name == "cancel-h") {
    return {"cancel-h", [opts](const Circuit& c, const StepObserver& o) { return cancel_hadamard(c, opts, o); }};
  }
  if (name == "commute-t-start") {
    return {"commute-t-start", [](const Circuit& c, const StepObserver& o) { return commute_t_to_start(c, o); }};
  }
  if (name == "recompose-s") {
    return {"recompose-s", [opts](const Circuit& c, const StepObserver& o) { return recompose_tt_to_s(c, opts, o); }};
  }
  throw Error(Errc::invalid_argument, "unknown pass '" + std::string(name) + "'");
}

/// Runs `passes` in order, repeating the whole sequence until a round applies
/// no rewrite. Steps are numbered across the whole run.
inline Pass fixed_point(std::vector<Pass> passes, std::string name = {}) {
  if (name.empty()) {
    for (const auto& p : passes) name += (name.empty() ? "" : "+") + p.name;
  }
  return {name, [passes = std::move(passes), name](const Circuit& c, const StepObserver& observer) {
            PassResult acc{c, RewriteReport{name, 0, {}, 0, 0}};
            for (;;) {
              std::size_t round = 0;
              for (const auto& p : passes) {
                const std::size_t offset = acc.report.rewrites_applied + round;
                StepObserver shifted;
                if (observer) {
                  shifted = [&observer, offset](std::size_t s, const Circuit& st) { observer(offset + s, st); };
                }
                auto r = p(acc.circuit, shifted);
                round += r.report.rewrites_applied;
                for (auto [k, v] : r.report.gates_removed) acc.report.gates_removed[k] += v;
                acc.report.flags_transferred += r.report.flags_transferred;
                acc.circuit = std::move(r.circuit);
              }
              acc.report.rewrites_applied += round;
              if (round == 0) break;
              ++acc.report.iterations;
            }
            return acc;
          }};
}

struct InvariantSpec {
  std::string name;
  std::function<std::int64_t(const Circuit&)> measure;
};

inline InvariantSpec invariant_by_name(std::string_view name) {
  auto spec = [](std::string n, auto field) {
    return InvariantSpec{std::move(n), [field](const Circuit& c) {
                           return static_cast<std::int64_t>(field(c));
                         }};
  };
  auto count_kind = [](GateKind kind) {
    return [kind](const Circuit& c) {
      std::size_t n = 0;
      c.for_each_operation([&](const Operation& op, std::size_t) {
        n += op.kind() == kind || (kind == GateKind::T && op.kind() == GateKind::TDag);
      });
      return n;
    };
  };
  if (name == "t-count") return spec("t-count", count_kind(GateKind::T));
  if (name == "h-count") return spec("h-count", count_kind(GateKind::H));
  if (name == "cnot-count") return spec("cnot-count", count_kind(GateKind::CNOT));
  if (name == "toffoli-count") return spec("toffoli-count", count_kind(GateKind::Toffoli));
  if (name == "qubit-count") return spec("qubit-count", [](const Circuit& c) { return c.qubit_count(); });
  if (name == "gate-count") return spec("gate-count", [](const Circuit& c) { return c.gate_count(); });
  if (name == "t-depth") return spec("t-depth", [](const Circuit& c) { return metrics(c).t_depth; });
  throw Error(Errc::invalid_argument, "unknown invariant '" + std::string(name) + "'");
}

/// Wraps `inner` so every invariant is measured before the pass and after each
/// rewrite step; the first deviation throws InvariantViolated.
inline Pass with_invariants(Pass inner, std::vector<InvariantSpec> invariants) {
  if (invariants.empty()) throw Error(Errc::invalid_argument, "with_invariants needs at least one invariant");
  std::string name = inner.name;
  return {name, [inner = std::move(inner), invariants = std::move(invariants)](
                    const Circuit& c, const StepObserver& observer) {
            std::vector<std::int64_t> baseline;
            for (const auto& inv : invariants) baseline.push_back(inv.measure(c));
            auto check = [&](std::size_t step, const Circuit& state) {
              for (std::size_t i = 0; i < invariants.size(); ++i) {
                const auto now = invariants[i].measure(state);
                if (now != baseline[i]) {
                  throw InvariantViolated(invariants[i].name, inner.name, step, baseline[i], now);
                }
              }
            };
            auto result = inner(c, [&](std::size_t step, const Circuit& state) {
              check(step, state);
              if (observer) observer(step, state);
            });
            check(0, result.circuit);
            return result;
          }};
}

namespace detail {

inline Circuit drop_first_t(const Circuit& c) {
  auto ops = c.operations();
  for (auto it = ops.begin(); it != ops.end(); ++it) {
    if (is_t_like(it->kind())) {
      ops.erase(it);
      break;
    }
  }
  return from_operations(c, ops);
}

}  // namespace detail

/// Test hook: behaves like `inner` but silently deletes one T gate at rewrite
/// step `fault_step` (and keeps it deleted afterwards).
inline Pass fault_injecting_pass(Pass inner, std::size_t fault_step) {
  std::string name = inner.name + "+fault@" + std::to_string(fault_step);
  return {name, [inner = std::move(inner), fault_step](const Circuit& c, const StepObserver& observer) {
            std::size_t last = 0;
            auto result = inner(c, [&](std::size_t step, const Circuit& state) {
              last = step;
              if (!observer) return;
              if (step >= fault_step) observer(step, detail::drop_first_t(state));
              else observer(step, state);
            });
            if (last >= fault_step) result.circuit = detail::drop_first_t(result.circuit);
            return result;
          }};
}

/// Test hook: a single rewrite step that deletes the first T gate.
inline Pass drop_t_pass() {
  return {"test-drop-t", [](const Circuit& c, const StepObserver& observer) {
            RewriteReport report{"test-drop-t", 0, {}, 0, 0};
            Circuit out = detail::drop_first_t(c);
            if (out.gate_count() == c.gate_count()) return PassResult{c, report};
            report.rewrites_applied = 1;
            report.iterations = 1;
            report.gates_removed[GateKind::T] = 1;
            if (observer) observer(1, out);
            return PassResult{out, report};
          }};
}

inline std::string format_report(const RewriteReport& r) {
  std::ostringstream os;
  os << "pass=" << r.pass_name << " rewrites=" << r.rewrites_applied << " iterations=" << r.iterations
     << " flags_transferred=" << r.flags_transferred << " removed=";
  bool first = true;
  for (auto [kind, n] : r.gates_removed) {
    os << (first ? "" : ",") << gate_name(kind) << ':' << n;
    first = false;
  }
  if (first) os << "none";
  return os.str();
}

}  // namespace qcforge
