#pragma once

// Benchmark circuit synthesis (bucket-brigade QRAM, ripple-carry adder) and the
// sequential timing harness.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qcforge/analysis.hpp"
#include "qcforge/circuit.hpp"
#include "qcforge/optimizers.hpp"
#include "qcforge/transpiler.hpp"

namespace qcforge {

struct QramSpec {
  std::size_t n = 2;            ///< address bits
  std::vector<bool> memory;     ///< 2^n classical cells
  std::string decomposition = "NONE";
};

/// Qubits of a bucket-brigade QRAM before decomposition: n + 2^(n+1) + 5.
inline std::size_t bucket_brigade_qubits(std::size_t n) {
  return n + (std::size_t{1} << (n + 1)) + 5;
}

/// Layout of a synthesized bucket-brigade circuit: register offsets by role.
struct QramLayout {
  std::size_t n = 0;
  QubitId address = 0;  ///< a0..a{n-1}; a_k has weight 2^k
  QubitId routing = 0;  ///< r0..r{2^n-1}
  QubitId memory = 0;   ///< m0..m{2^n-1}
  QubitId bus = 0;
  QubitId readout = 0;
  QubitId aux = 0;      ///< qram_aux0..2, reserved
};

inline QramLayout qram_layout(std::size_t n) {
  const std::size_t cells = std::size_t{1} << n;
  QramLayout l;
  l.n = n;
  l.address = 0;
  l.routing = static_cast<QubitId>(n);
  l.memory = static_cast<QubitId>(n + cells);
  l.bus = static_cast<QubitId>(n + 2 * cells);
  l.readout = l.bus + 1;
  l.aux = l.bus + 2;
  return l;
}

/// Bucket-brigade style lookup: the bus drops a one-hot token on r0, each
/// address bit routes it down the tree (r_j -> r_{j+2^k} when a_k is set), the
/// memory register is loaded with X gates, the selected cell is copied onto
/// the readout, then everything except the readout is uncomputed.
inline Circuit synth_bucket_brigade(const QramSpec& spec) {
  if (spec.n < 2) throw Error(Errc::invalid_address_size, "need n >= 2, got " + std::to_string(spec.n));
  if (spec.n > 24) throw Error(Errc::invalid_address_size, "n too large: " + std::to_string(spec.n));
  const std::size_t n = spec.n;
  const std::size_t cells = std::size_t{1} << n;
  if (spec.memory.size() != cells) {
    throw Error(Errc::memory_length_mismatch, "memory has " + std::to_string(spec.memory.size()) +
                                                  " cells, expected " + std::to_string(cells));
  }
  std::vector<std::string> names;
  names.reserve(bucket_brigade_qubits(n));
  for (std::size_t k = 0; k < n; ++k) names.push_back("a" + std::to_string(k));
  for (std::size_t j = 0; j < cells; ++j) names.push_back("r" + std::to_string(j));
  for (std::size_t j = 0; j < cells; ++j) names.push_back("m" + std::to_string(j));
  names.push_back("qram_bus");
  names.push_back("qram_out");
  for (int k = 0; k < 3; ++k) names.push_back("qram_aux" + std::to_string(k));

  Circuit c = build_circuit(names);
  const auto l = qram_layout(n);
  auto r = [&](std::size_t j) { return static_cast<QubitId>(l.routing + j); };
  auto m = [&](std::size_t j) { return static_cast<QubitId>(l.memory + j); };
  auto a = [&](std::size_t k) { return static_cast<QubitId>(l.address + k); };

  std::vector<Operation> route;
  route.push_back(Operation::cnot(l.bus, r(0)));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t half = std::size_t{1} << k;
    for (std::size_t j = 0; j < half; ++j) {
      route.push_back(Operation::toffoli(a(k), r(j), r(j + half)));
      route.push_back(Operation::cnot(r(j + half), r(j)));
    }
  }

  c.append(Operation::x(l.bus));
  for (const auto& op : route) c.append(op);
  for (std::size_t j = 0; j < cells; ++j) {
    if (spec.memory[j]) c.append(Operation::x(m(j)));
  }
  for (std::size_t j = 0; j < cells; ++j) c.append(Operation::toffoli(r(j), m(j), l.readout));
  for (std::size_t j = 0; j < cells; ++j) {
    if (spec.memory[j]) c.append(Operation::x(m(j)));
  }
  for (auto it = route.rbegin(); it != route.rend(); ++it) c.append(*it);
  c.append(Operation::x(l.bus));

  if (spec.decomposition != "NONE") return decompose_toffoli(c, spec.decomposition).circuit;
  return c;
}

/// Cuccaro-style ripple-carry adder: B <- A + B mod 2^bits, A preserved, one
/// carry ancilla restored. Registers a0.., b0.. (index 0 = least significant),
/// then `carry`.
inline Circuit synth_adder(std::size_t bits) {
  if (bits < 1) throw Error(Errc::invalid_argument, "adder needs at least one bit");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < bits; ++i) names.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < bits; ++i) names.push_back("b" + std::to_string(i));
  names.push_back("carry");
  Circuit c = build_circuit(names);
  auto a = [](std::size_t i) { return static_cast<QubitId>(i); };
  auto b = [bits](std::size_t i) { return static_cast<QubitId>(bits + i); };
  const QubitId carry = static_cast<QubitId>(2 * bits);

  auto maj = [&](QubitId x, QubitId y, QubitId z) {
    c.append(Operation::cnot(z, y));
    c.append(Operation::cnot(z, x));
    c.append(Operation::toffoli(x, y, z));
  };
  auto uma = [&](QubitId x, QubitId y, QubitId z) {
    c.append(Operation::toffoli(x, y, z));
    c.append(Operation::cnot(z, x));
    c.append(Operation::cnot(x, y));
  };
  maj(carry, b(0), a(0));
  for (std::size_t i = 1; i < bits; ++i) maj(a(i - 1), b(i), a(i));
  for (std::size_t i = bits - 1; i >= 1; --i) uma(a(i - 1), b(i), a(i));
  uma(carry, b(0), a(0));
  return c;
}

enum class Scenario { Synth, SynthOpt, SynthTranspile };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Synth: return "synth";
    case Scenario::SynthOpt: return "synth-opt";
    case Scenario::SynthTranspile: return "synth-transpile";
  }
  return "?";
}

inline Scenario parse_scenario(std::string_view text) {
  if (text == "synth") return Scenario::Synth;
  if (text == "synth-opt") return Scenario::SynthOpt;
  if (text == "synth-transpile") return Scenario::SynthTranspile;
  throw Error(Errc::invalid_argument, "unknown scenario '" + std::string(text) + "'");
}

struct BenchRecord {
  Scenario scenario = Scenario::Synth;
  std::size_t n = 0;
  std::size_t qubits = 0;          ///< bucket-brigade wires, n + 2^(n+1) + 5
  std::size_t ancillae = 0;        ///< added by decomposition, not part of `qubits`
  double elapsed_seconds = 0.0;
  Metrics metrics;                 ///< of the final circuit
  std::size_t t_count_before_opt = 0;
};

struct BenchOptions {
  std::size_t synth_limit = 19;     ///< resource guard for synth / synth-transpile
  std::size_t opt_limit = 12;       ///< resource guard for synth-opt
  bool force = false;
  std::string strategy = "TDEPTH1_4ANC";
  std::uint64_t seed = 2021;
};

/// Deterministic pseudo-random memory contents.
inline std::vector<bool> bench_memory(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed + n);
  std::vector<bool> mem(std::size_t{1} << n);
  for (std::size_t i = 0; i < mem.size(); ++i) mem[i] = (rng() >> 63) != 0;
  return mem;
}

inline void check_guard(Scenario s, std::size_t n_hi, const BenchOptions& opts) {
  const std::size_t limit = s == Scenario::SynthOpt ? opts.opt_limit : opts.synth_limit;
  if (!opts.force && n_hi > limit) {
    throw Error(Errc::resource_guard_exceeded, std::string(scenario_name(s)) + " is capped at n <= " +
                                                   std::to_string(limit) + " (use --force)");
  }
}

/// One benchmark point. Only synthesis, transpilation and optimization are
/// timed; metrics are computed afterwards.
inline BenchRecord bench_one(Scenario scenario, std::size_t n, const BenchOptions& opts = {}) {
  QramSpec spec{n, bench_memory(n, opts.seed), "NONE"};
  BenchRecord rec;
  rec.scenario = scenario;
  rec.n = n;
  rec.qubits = bucket_brigade_qubits(n);

  const auto start = std::chrono::steady_clock::now();
  Circuit c = synth_bucket_brigade(spec);
  std::size_t ancillae = 0;
  Circuit before_opt;
  if (scenario != Scenario::Synth) {
    auto t = decompose_toffoli(c, opts.strategy);
    ancillae = t.ancillae.size();
    c = std::move(t.circuit);
  }
  if (scenario == Scenario::SynthOpt) {
    before_opt = c;
    c = fixed_point({make_pass("cancel-cnot"), make_pass("cancel-h")})(c).circuit;
  }
  const auto stop = std::chrono::steady_clock::now();

  rec.elapsed_seconds = std::chrono::duration<double>(stop - start).count();
  rec.ancillae = ancillae;
  rec.metrics = metrics(c);
  rec.t_count_before_opt = scenario == Scenario::SynthOpt ? metrics(before_opt).t_count : rec.metrics.t_count;
  return rec;
}

inline const char* kBenchCsvHeader = "scenario,n,qubits,gates,cnot,h,t,t_depth,depth,elapsed_s";

inline std::string format_seconds(double s) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s, std::chars_format::fixed, 6);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

inline std::string csv_row(const BenchRecord& r) {
  const auto& m = r.metrics;
  return std::string(scenario_name(r.scenario)) + ',' + std::to_string(r.n) + ',' + std::to_string(r.qubits) +
         ',' + std::to_string(m.gate_count) + ',' + std::to_string(m.cnot_count) + ',' +
         std::to_string(m.h_count) + ',' + std::to_string(m.t_count) + ',' + std::to_string(m.t_depth) + ',' +
         std::to_string(m.depth) + ',' + format_seconds(r.elapsed_seconds);
}

/// Runs n_lo..n_hi sequentially and streams CSV (header first) to `csv`.
inline std::vector<BenchRecord> run_bench(Scenario scenario, std::size_t n_lo, std::size_t n_hi,
                                          std::ostream& csv, const BenchOptions& opts = {},
                                          const std::function<void(const BenchRecord&)>& on_record = {}) {
  if (n_lo < 2 || n_hi < n_lo) throw Error(Errc::invalid_argument, "bad n range");
  check_guard(scenario, n_hi, opts);
  std::vector<BenchRecord> out;
  csv << kBenchCsvHeader << '\n';
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    out.push_back(bench_one(scenario, n, opts));
    csv << csv_row(out.back()) << '\n';
    csv.flush();
    if (on_record) on_record(out.back());
  }
  return out;
}

}  // namespace qcforge
