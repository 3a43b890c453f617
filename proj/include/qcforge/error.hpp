#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcforge {

enum class Errc {
  duplicate_qubit_name,
  empty_register,
  invalid_qubit_name,
  unknown_qubit,
  arity_mismatch,
  duplicate_qubit_in_gate,
  syntax_error,
  unknown_gate,
  unknown_strategy,
  unsupported_gate,
  flag_required,
  invariant_violated,
  too_many_qubits,
  non_classical_gate,
  qubit_mismatch,
  invalid_address_size,
  memory_length_mismatch,
  resource_guard_exceeded,
  invalid_argument,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::duplicate_qubit_name: return "DuplicateQubitName";
    case Errc::empty_register: return "EmptyRegister";
    case Errc::invalid_qubit_name: return "InvalidQubitName";
    case Errc::unknown_qubit: return "UnknownQubit";
    case Errc::arity_mismatch: return "ArityMismatch";
    case Errc::duplicate_qubit_in_gate: return "DuplicateQubitInGate";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unknown_gate: return "UnknownGate";
    case Errc::unknown_strategy: return "UnknownStrategy";
    case Errc::unsupported_gate: return "UnsupportedGate";
    case Errc::flag_required: return "FlagRequired";
    case Errc::invariant_violated: return "InvariantViolated";
    case Errc::too_many_qubits: return "TooManyQubits";
    case Errc::non_classical_gate: return "NonClassicalGate";
    case Errc::qubit_mismatch: return "QubitMismatch";
    case Errc::invalid_address_size: return "InvalidAddressSize";
    case Errc::memory_length_mismatch: return "MemoryLengthMismatch";
    case Errc::resource_guard_exceeded: return "ResourceGuardExceeded";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. `code()` names the
/// failure class so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Text-format failure carrying the 1-based line it occurred on.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t line, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised by the invariant-checking wrapper. `step` is the 1-based index of
/// the rewrite after which the measure changed (0 means the final result).
class InvariantViolated : public Error {
 public:
  InvariantViolated(std::string invariant, std::string pass, std::size_t step,
                    std::int64_t before, std::int64_t after)
      : Error(Errc::invariant_violated,
              "invariant '" + invariant + "' of pass '" + pass + "' changed at step " +
                  std::to_string(step) + " (" + std::to_string(before) + " -> " +
                  std::to_string(after) + ")"),
        invariant_(std::move(invariant)),
        pass_(std::move(pass)),
        step_(step),
        before_(before),
        after_(after) {}

  const std::string& invariant() const noexcept { return invariant_; }
  const std::string& pass() const noexcept { return pass_; }
  std::size_t step() const noexcept { return step_; }
  std::int64_t before() const noexcept { return before_; }
  std::int64_t after() const noexcept { return after_; }

 private:
  std::string invariant_;
  std::string pass_;
  std::size_t step_;
  std::int64_t before_;
  std::int64_t after_;
};

}  // namespace qcforge
