#pragma once

// Moment-based circuit representation shared by every stage of the pipeline.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qcforge/error.hpp"

namespace qcforge {

using QubitId = std::uint32_t;
using Flag = std::uint32_t;
using FlagSet = std::set<Flag>;

enum class GateKind : std::uint8_t { X, H, S, SDag, T, TDag, CNOT, CZ, Toffoli, MPMCT };

inline constexpr GateKind kAllGateKinds[] = {GateKind::X,    GateKind::H,     GateKind::S,
                                             GateKind::SDag, GateKind::T,     GateKind::TDag,
                                             GateKind::CNOT, GateKind::CZ,    GateKind::Toffoli,
                                             GateKind::MPMCT};

/// Upper-case mnemonic, identical to the text-format keyword.
inline const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::SDag: return "SDAG";
    case GateKind::T: return "T";
    case GateKind::TDag: return "TDAG";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::Toffoli: return "TOFFOLI";
    case GateKind::MPMCT: return "MPMCT";
  }
  return "?";
}

inline std::optional<GateKind> gate_from_name(std::string_view name) {
  for (GateKind kind : kAllGateKinds) {
    if (name == gate_name(kind)) return kind;
  }
  return std::nullopt;
}

inline bool is_t_like(GateKind kind) { return kind == GateKind::T || kind == GateKind::TDag; }

/// Number of control qubits implied by a fixed-arity kind. CZ is symmetric but
/// stored as (control, target) like CNOT.
inline std::size_t fixed_control_count(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::CZ: return 1;
    case GateKind::Toffoli: return 2;
    default: return 0;
  }
}

struct Qubit {
  std::string name;
  QubitId index = 0;

  friend bool operator==(const Qubit&, const Qubit&) = default;
};

/// One gate application. Qubits are ordered controls first, target last.
class Operation {
 public:
  Operation(GateKind kind, std::vector<QubitId> qubits, std::vector<bool> polarities = {},
            FlagSet flags = {})
      : kind_(kind), qubits_(std::move(qubits)), polarities_(std::move(polarities)),
        flags_(std::move(flags)) {
    const std::size_t arity = qubits_.size();
    std::size_t controls = 0;
    if (kind_ == GateKind::MPMCT) {
      if (arity < 2) throw Error(Errc::arity_mismatch, "MPMCT needs at least one control");
      controls = arity - 1;
    } else {
      controls = fixed_control_count(kind_);
      if (arity != controls + 1) {
        throw Error(Errc::arity_mismatch, std::string(gate_name(kind_)) + " expects " +
                                              std::to_string(controls + 1) + " qubit(s), got " +
                                              std::to_string(arity));
      }
    }
    if (polarities_.empty()) polarities_.assign(controls, true);
    if (polarities_.size() != controls) {
      throw Error(Errc::arity_mismatch, "polarity count does not match control count");
    }
    if (kind_ != GateKind::MPMCT &&
        std::find(polarities_.begin(), polarities_.end(), false) != polarities_.end()) {
      throw Error(Errc::arity_mismatch, "only MPMCT supports negative controls");
    }
    for (std::size_t i = 0; i < arity; ++i) {
      for (std::size_t j = i + 1; j < arity; ++j) {
        if (qubits_[i] == qubits_[j]) {
          throw Error(Errc::duplicate_qubit_in_gate, "qubit used twice in one gate");
        }
      }
    }
  }

  static Operation single(GateKind kind, QubitId q) { return Operation(kind, {q}); }
  static Operation x(QubitId q) { return single(GateKind::X, q); }
  static Operation h(QubitId q) { return single(GateKind::H, q); }
  static Operation s(QubitId q) { return single(GateKind::S, q); }
  static Operation sdag(QubitId q) { return single(GateKind::SDag, q); }
  static Operation t(QubitId q) { return single(GateKind::T, q); }
  static Operation tdag(QubitId q) { return single(GateKind::TDag, q); }
  static Operation cnot(QubitId control, QubitId target) {
    return Operation(GateKind::CNOT, {control, target});
  }
  static Operation cz(QubitId a, QubitId b) { return Operation(GateKind::CZ, {a, b}); }
  static Operation toffoli(QubitId c1, QubitId c2, QubitId target) {
    return Operation(GateKind::Toffoli, {c1, c2, target});
  }
  static Operation mpmct(std::vector<QubitId> controls, std::vector<bool> polarities,
                         QubitId target) {
    controls.push_back(target);
    return Operation(GateKind::MPMCT, std::move(controls), std::move(polarities));
  }

  GateKind kind() const noexcept { return kind_; }
  std::span<const QubitId> qubits() const noexcept { return qubits_; }
  std::span<const QubitId> controls() const noexcept {
    return std::span<const QubitId>(qubits_).first(qubits_.size() - 1);
  }
  QubitId target() const noexcept { return qubits_.back(); }
  const std::vector<bool>& polarities() const noexcept { return polarities_; }
  std::size_t control_count() const noexcept { return polarities_.size(); }
  std::size_t arity() const noexcept { return qubits_.size(); }

  const FlagSet& flags() const noexcept { return flags_; }
  bool has_flag(Flag f) const { return flags_.count(f) != 0; }
  void add_flag(Flag f) { flags_.insert(f); }
  /// Returns the number of labels that were not present before.
  std::size_t add_flags(const FlagSet& fs) {
    std::size_t before = flags_.size();
    flags_.insert(fs.begin(), fs.end());
    return flags_.size() - before;
  }
  void clear_flags() { flags_.clear(); }

  bool acts_on(QubitId q) const {
    return std::find(qubits_.begin(), qubits_.end(), q) != qubits_.end();
  }
  QubitId lowest_qubit() const { return *std::min_element(qubits_.begin(), qubits_.end()); }

  /// Same gate on the same qubits with the same polarities; flags ignored.
  bool same_gate(const Operation& other) const {
    return kind_ == other.kind_ && qubits_ == other.qubits_ && polarities_ == other.polarities_;
  }

  friend bool operator==(const Operation&, const Operation&) = default;

 private:
  GateKind kind_;
  std::vector<QubitId> qubits_;
  std::vector<bool> polarities_;
  FlagSet flags_;
};

/// Operations on pairwise-disjoint qubits, kept sorted by lowest qubit index.
struct Moment {
  std::vector<Operation> operations;

  bool acts_on(QubitId q) const {
    return std::any_of(operations.begin(), operations.end(),
                       [q](const Operation& op) { return op.acts_on(q); });
  }

  friend bool operator==(const Moment&, const Moment&) = default;
};

enum class SchedulePolicy {
  Earliest,   ///< first moment after the last one touching the op's qubits
  NewMoment,  ///< always open a fresh moment at the end
};

inline bool valid_qubit_name(std::string_view name) {
  if (name.empty()) return false;
  if (name.front() == '+' || name.front() == '-' || name.front() == '!') return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#' || c == ',';
  });
}

class Circuit {
 public:
  Circuit() = default;

  explicit Circuit(const std::vector<std::string>& names) {
    for (const auto& name : names) add_qubit(name);
  }

  /// Empty circuit over the same register as `other`.
  static Circuit with_register_of(const Circuit& other) {
    Circuit c;
    for (const auto& q : other.qubits_) c.add_qubit(q.name);
    return c;
  }

  QubitId add_qubit(const std::string& name) {
    if (!valid_qubit_name(name)) throw Error(Errc::invalid_qubit_name, "'" + name + "'");
    if (index_.count(name) != 0) throw Error(Errc::duplicate_qubit_name, name);
    auto id = static_cast<QubitId>(qubits_.size());
    qubits_.push_back(Qubit{name, id});
    index_.emplace(name, id);
    last_.push_back(-1);
    return id;
  }

  std::size_t qubit_count() const noexcept { return qubits_.size(); }
  const std::vector<Qubit>& qubits() const noexcept { return qubits_; }
  const std::string& name_of(QubitId q) const { return qubits_.at(q).name; }

  std::optional<QubitId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  QubitId at(std::string_view name) const {
    auto id = find(name);
    if (!id) throw Error(Errc::unknown_qubit, std::string(name));
    return *id;
  }

  const std::vector<Moment>& moments() const noexcept { return moments_; }
  std::size_t moment_count() const noexcept { return moments_.size(); }
  std::size_t gate_count() const noexcept { return gate_count_; }
  bool empty() const noexcept { return gate_count_ == 0; }

  /// True if no operation has been placed on `q` yet.
  bool is_idle(QubitId q) const { return last_.at(q) < 0; }

  void append(Operation op, SchedulePolicy policy = SchedulePolicy::Earliest) {
    for (QubitId q : op.qubits()) {
      if (q >= qubits_.size()) {
        throw Error(Errc::unknown_qubit, "qubit index " + std::to_string(q) + " not in register");
      }
    }
    std::size_t slot = moments_.size();
    if (policy == SchedulePolicy::Earliest) {
      std::int64_t latest = static_cast<std::int64_t>(floor_) - 1;
      for (QubitId q : op.qubits()) latest = std::max(latest, last_[q]);
      slot = static_cast<std::size_t>(latest + 1);
    }
    if (slot == moments_.size()) moments_.emplace_back();
    for (QubitId q : op.qubits()) last_[q] = static_cast<std::int64_t>(slot);
    auto& ops = moments_[slot].operations;
    const QubitId key = op.lowest_qubit();
    if (ops.empty() || ops.back().lowest_qubit() < key) {
      ops.push_back(std::move(op));
    } else {
      auto pos = std::lower_bound(ops.begin(), ops.end(), key,
                                  [](const Operation& o, QubitId k) { return o.lowest_qubit() < k; });
      ops.insert(pos, std::move(op));
    }
    ++gate_count_;
  }

  /// Subsequent EARLIEST appends land at or after a new moment.
  void barrier() { floor_ = moments_.size(); }

  /// Operations in moment order (within a moment by lowest qubit index).
  std::vector<Operation> operations() const {
    std::vector<Operation> out;
    out.reserve(gate_count_);
    for (const auto& m : moments_) {
      out.insert(out.end(), m.operations.begin(), m.operations.end());
    }
    return out;
  }

  template <typename Fn>
  void for_each_operation(Fn&& fn) const {
    for (std::size_t i = 0; i < moments_.size(); ++i) {
      for (const auto& op : moments_[i].operations) fn(op, i);
    }
  }

  /// Greedy EARLIEST rebuild from the operation stream.
  Circuit repacked() const {
    Circuit out = with_register_of(*this);
    for_each_operation([&](const Operation& op, std::size_t) { out.append(op); });
    return out;
  }

  /// Throws if any structural invariant is broken.
  void validate() const {
    for (std::size_t i = 0; i < moments_.size(); ++i) {
      std::vector<bool> used(qubits_.size(), false);
      for (const auto& op : moments_[i].operations) {
        for (QubitId q : op.qubits()) {
          if (q >= qubits_.size()) throw Error(Errc::unknown_qubit, "operation outside register");
          if (used[q]) {
            throw Error(Errc::invalid_argument,
                        "moment " + std::to_string(i) + " uses qubit " + qubits_[q].name + " twice");
          }
          used[q] = true;
        }
      }
    }
  }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.qubits_ == b.qubits_ && a.moments_ == b.moments_;
  }

 private:
  std::vector<Qubit> qubits_;
  std::unordered_map<std::string, QubitId> index_;
  std::vector<Moment> moments_;
  std::vector<std::int64_t> last_;
  std::size_t floor_ = 0;
  std::size_t gate_count_ = 0;
};

inline Circuit build_circuit(const std::vector<std::string>& names) {
  if (names.empty()) throw Error(Errc::empty_register, "a circuit needs at least one qubit");
  return Circuit(names);
}

inline Circuit append(Circuit circuit, Operation op,
                      SchedulePolicy policy = SchedulePolicy::Earliest) {
  circuit.append(std::move(op), policy);
  return circuit;
}

/// Rebuilds a circuit from an operation stream over `like`'s register.
inline Circuit from_operations(const Circuit& like, std::span<const Operation> ops,
                               SchedulePolicy policy = SchedulePolicy::Earliest) {
  Circuit out = Circuit::with_register_of(like);
  for (const auto& op : ops) out.append(op, policy);
  return out;
}

/// Selects operations by kind, qubit set and moment range. Unset fields match
/// everything; `qubits` matches operations acting only on the listed qubits.
struct GatePredicate {
  std::optional<GateKind> kind;
  std::optional<std::vector<QubitId>> qubits;
  std::optional<std::pair<std::size_t, std::size_t>> moments;  // inclusive

  bool matches(const Operation& op, std::size_t moment) const {
    if (kind && op.kind() != *kind) return false;
    if (moments && (moment < moments->first || moment > moments->second)) return false;
    if (qubits) {
      for (QubitId q : op.qubits()) {
        if (std::find(qubits->begin(), qubits->end(), q) == qubits->end()) return false;
      }
    }
    return true;
  }
};

/// Applies `fn(Operation&, moment)` to every operation, keeping the moment
/// structure intact.
template <typename Fn>
Circuit map_operations(const Circuit& circuit, Fn&& fn) {
  Circuit out = Circuit::with_register_of(circuit);
  for (std::size_t i = 0; i < circuit.moments().size(); ++i) {
    out.barrier();
    for (auto op : circuit.moments()[i].operations) {
      fn(op, i);
      out.append(std::move(op));
    }
  }
  return out;
}

inline Circuit flag_gates(const Circuit& circuit, const GatePredicate& predicate, Flag flag) {
  return map_operations(circuit, [&](Operation& op, std::size_t moment) {
    if (predicate.matches(op, moment)) op.add_flag(flag);
  });
}

inline std::size_t count_flagged(const Circuit& circuit, Flag flag) {
  std::size_t n = 0;
  circuit.for_each_operation([&](const Operation& op, std::size_t) { n += op.has_flag(flag); });
  return n;
}

/// Side table giving flag labels human-readable names.
class FlagTable {
 public:
  Flag intern(const std::string& name) {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) return it->second;
    Flag f = next_++;
    by_name_.emplace(name, f);
    names_.emplace(f, name);
    return f;
  }

  std::optional<std::string> name(Flag f) const {
    auto it = names_.find(f);
    if (it == names_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::string, Flag> by_name_;
  std::map<Flag, std::string> names_;
  Flag next_ = 1;
};

}  // namespace qcforge
