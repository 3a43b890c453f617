#pragma once

// Line-based `.qc` circuit format.
//
//   qubits a0 a1 t          register declaration(s), before any gate line
//   TOFFOLI a0 a1 t         one gate per line, controls first
//   MPMCT +a0 -a1 t         sign prefix on controls sets polarity (default +)
//   CNOT a0 t !1,2          optional trailing flag annotation
//   ---                     start a new moment
//   # comment
//
// Gates between separators are packed EARLIEST within their segment.

#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcforge/circuit.hpp"

namespace qcforge {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline FlagSet parse_flags(std::string_view text, std::size_t line_no) {
  FlagSet flags;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    Flag value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ParseError(Errc::syntax_error, line_no, "bad flag list '!" + std::string(text) + "'");
    }
    flags.insert(value);
    pos = comma + 1;
  }
  return flags;
}

}  // namespace detail

inline Circuit parse(std::string_view text) {
  Circuit circuit;
  bool have_header = false;
  bool seen_gate = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (tokens[0] == "qubits") {
      if (seen_gate) {
        throw ParseError(Errc::syntax_error, line_no, "qubit declarations must precede gates");
      }
      if (tokens.size() < 2) throw ParseError(Errc::syntax_error, line_no, "empty qubit list");
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::string name(tokens[i]);
        if (!valid_qubit_name(name)) {
          throw ParseError(Errc::syntax_error, line_no, "invalid qubit name '" + name + "'");
        }
        if (circuit.find(name)) {
          throw ParseError(Errc::duplicate_qubit_name, line_no, "qubit '" + name + "' declared twice");
        }
        circuit.add_qubit(name);
      }
      have_header = true;
      continue;
    }

    if (!have_header) throw ParseError(Errc::syntax_error, line_no, "missing 'qubits' header");

    if (tokens[0] == "---") {
      if (tokens.size() != 1) throw ParseError(Errc::syntax_error, line_no, "trailing tokens after ---");
      circuit.barrier();
      continue;
    }

    auto kind = gate_from_name(tokens[0]);
    if (!kind) throw ParseError(Errc::unknown_gate, line_no, "unknown gate '" + std::string(tokens[0]) + "'");

    FlagSet flags;
    if (tokens.back().front() == '!') {
      flags = detail::parse_flags(tokens.back().substr(1), line_no);
      tokens.pop_back();
    }

    std::vector<QubitId> qubits;
    std::vector<bool> polarities;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      std::string_view tok = tokens[i];
      bool positive = true;
      bool is_control = i + 1 < tokens.size();
      if (*kind == GateKind::MPMCT && is_control && (tok.front() == '+' || tok.front() == '-')) {
        positive = tok.front() == '+';
        tok.remove_prefix(1);
      } else if (tok.front() == '+' || tok.front() == '-') {
        throw ParseError(Errc::syntax_error, line_no, "polarity prefix only allowed on MPMCT controls");
      }
      auto id = circuit.find(tok);
      if (!id) throw ParseError(Errc::unknown_qubit, line_no, "unknown qubit '" + std::string(tok) + "'");
      qubits.push_back(*id);
      if (is_control) polarities.push_back(positive);
    }

    std::size_t expected = *kind == GateKind::MPMCT ? 0 : fixed_control_count(*kind) + 1;
    if ((expected != 0 && qubits.size() != expected) || (expected == 0 && qubits.size() < 2)) {
      throw ParseError(Errc::syntax_error, line_no,
                       "wrong number of operands for " + std::string(tokens[0]));
    }
    try {
      circuit.append(Operation(*kind, std::move(qubits), std::move(polarities), std::move(flags)));
    } catch (const Error& e) {
      throw ParseError(e.code(), line_no, e.what());
    }
    seen_gate = true;
  }
  if (!have_header) throw ParseError(Errc::syntax_error, line_no, "missing 'qubits' header");
  return circuit;
}

inline std::string format_operation(const Circuit& circuit, const Operation& op) {
  std::string line = gate_name(op.kind());
  const auto qubits = op.qubits();
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    line += ' ';
    if (op.kind() == GateKind::MPMCT && i + 1 < qubits.size() && !op.polarities()[i]) line += '-';
    line += circuit.name_of(qubits[i]);
  }
  if (!op.flags().empty()) {
    line += " !";
    bool first = true;
    for (Flag f : op.flags()) {
      if (!first) line += ',';
      line += std::to_string(f);
      first = false;
    }
  }
  return line;
}

inline std::string serialize(const Circuit& circuit) {
  std::string out = "qubits";
  for (const auto& q : circuit.qubits()) {
    out += ' ';
    out += q.name;
  }
  out += '\n';
  const auto& moments = circuit.moments();
  for (std::size_t i = 0; i < moments.size(); ++i) {
    if (i > 0) out += "---\n";
    for (const auto& op : moments[i].operations) {
      out += format_operation(circuit, op);
      out += '\n';
    }
  }
  return out;
}

}  // namespace qcforge
