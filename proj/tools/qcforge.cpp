// qcforge command-line front end.
//
//   qcforge analyze FILE [--t-dist]
//   qcforge pipeline [--input FILE] [--output FILE] --step "..." [--step "..."]...
//   qcforge bench synth|synth-opt|synth-transpile LO..HI OUT.csv [--force]
//   qcforge strategies
//
// Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 resource guard,
// 1 anything else.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcforge/qcforge.hpp"

namespace {

using namespace qcforge;

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kInvariant = 3, kGuard = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::invalid_argument, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Circuit load(const std::string& path) { return parse(read_file(path)); }

std::size_t sim_limit() {
  if (const char* env = std::getenv("QCFORGE_SIM_LIMIT")) {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, std::string("bad QCFORGE_SIM_LIMIT '") + env + "'");
    }
  }
  return kDefaultSimLimit;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_t_dist(const Circuit& c) {
  const auto dist = t_distribution(c);
  std::cout << "t_dist=";
  for (std::size_t i = 0; i < dist.per_moment.size(); ++i) std::cout << (i ? "," : "") << dist.per_moment[i];
  std::cout << '\n';
}

// Pipeline state threaded through the steps.
struct State {
  std::optional<Circuit> circuit;
  std::vector<std::string> ancillae;  // clean by construction (added by transpile steps)

  Circuit& get(const std::string& step) {
    if (!circuit) throw Error(Errc::invalid_argument, "step '" + step + "' needs a circuit; load or synth first");
    return *circuit;
  }
};

// Parses the step's own flags with a throwaway CLI11 app.
void parse_step(CLI::App& app, const std::vector<std::string>& tokens) {
  std::vector<std::string> args(tokens.rbegin(), tokens.rend() - 1);
  app.parse(args);
}

void run_step(State& st, const std::string& text) {
  const auto tokens = split(text, ' ');
  if (tokens.empty()) throw Error(Errc::invalid_argument, "empty step");
  const std::string& verb = tokens[0];
  CLI::App app{verb};
  app.allow_windows_style_options(false);

  if (verb == "load") {
    std::string path;
    app.add_option("file", path)->required();
    parse_step(app, tokens);
    st.circuit = load(path);
    st.ancillae.clear();
  } else if (verb == "synth") {
    std::string kind;
    std::size_t n = 2, bits = 3;
    std::uint64_t seed = 2021;
    std::string memory;
    app.add_option("kind", kind)->required()->check(CLI::IsMember({"bb", "adder"}));
    app.add_option("--n", n);
    app.add_option("--seed", seed);
    app.add_option("--memory", memory, "bit string, cell 0 first");
    app.add_option("--bits", bits);
    parse_step(app, tokens);
    if (kind == "bb") {
      std::vector<bool> mem;
      if (memory.empty()) {
        mem = bench_memory(n, seed);
      } else {
        for (char ch : memory) mem.push_back(ch == '1');
      }
      st.circuit = synth_bucket_brigade({n, mem});
      std::cout << "synth: bucket-brigade n=" << n << " base_qubits=" << bucket_brigade_qubits(n) << '\n';
    } else {
      st.circuit = synth_adder(bits);
      std::cout << "synth: adder bits=" << bits << '\n';
    }
    st.ancillae.clear();
  } else if (verb == "transpile") {
    std::string strategy = "TDEPTH1_4ANC", order = "0,1,2";
    app.add_option("--strategy", strategy);
    app.add_option("--order", order);
    parse_step(app, tokens);
    const Circuit& in = st.get(verb);
    const bool has_mpmct = [&] {
      bool any = false;
      in.for_each_operation([&](const Operation& op, std::size_t) {
        any = any || (op.kind() == GateKind::MPMCT && op.control_count() > 2);
      });
      return any;
    }();
    auto result = has_mpmct ? decompose_mpmct(in, strategy) : decompose_toffoli(in, strategy, ControlOrder::parse(order));
    std::cout << "transpile: strategy=" << strategy << " ancillae=" << result.ancillae.size()
              << " base_qubits=" << in.qubit_count() << '\n';
    std::cout << "delta: " << format_delta(diff_metrics(metrics(in), metrics(result.circuit))) << '\n';
    st.ancillae.insert(st.ancillae.end(), result.ancillae.begin(), result.ancillae.end());
    st.circuit = std::move(result.circuit);
  } else if (verb == "flag") {
    Flag id = 1;
    std::string kind, qubits, moments;
    app.add_option("--id", id)->required();
    app.add_option("--kind", kind);
    app.add_option("--qubits", qubits, "comma-separated names");
    app.add_option("--moments", moments, "LO..HI inclusive");
    parse_step(app, tokens);
    Circuit& c = st.get(verb);
    GatePredicate pred;
    if (!kind.empty()) {
      auto k = gate_from_name(kind);
      if (!k) throw Error(Errc::unknown_gate, kind);
      pred.kind = *k;
    }
    if (!qubits.empty()) {
      std::vector<QubitId> ids;
      for (const auto& name : split(qubits, ',')) ids.push_back(c.at(name));
      pred.qubits = ids;
    }
    if (!moments.empty()) {
      const auto dots = moments.find("..");
      if (dots == std::string::npos) throw Error(Errc::invalid_argument, "--moments wants LO..HI");
      pred.moments = {std::stoul(moments.substr(0, dots)), std::stoul(moments.substr(dots + 2))};
    }
    c = flag_gates(c, pred, id);
    std::cout << "flag: id=" << id << " gates=" << count_flagged(c, id) << '\n';
  } else if (verb == "opt") {
    std::string passes, invariants;
    std::optional<Flag> flagged;
    app.add_option("passes", passes)->required();
    app.add_option("--flagged", flagged);
    app.add_option("--invariant", invariants, "comma-separated: t-count,h-count,...");
    parse_step(app, tokens);
    const Circuit& in = st.get(verb);
    FlagOptions opts;
    if (flagged) {
      opts.flagged_only = true;
      opts.flag = *flagged;
    }
    std::vector<Pass> list;
    for (const auto& name : split(passes, ',')) list.push_back(name == "test-drop-t" ? drop_t_pass() : make_pass(name, opts));
    Pass pass = list.size() == 1 ? list.front() : fixed_point(list);
    if (!invariants.empty()) {
      std::vector<InvariantSpec> specs;
      for (const auto& name : split(invariants, ',')) specs.push_back(invariant_by_name(name));
      pass = with_invariants(pass, specs);
    }
    auto result = pass(in);
    std::cout << format_report(result.report) << '\n';
    std::cout << "delta: " << format_delta(diff_metrics(metrics(in), metrics(result.circuit))) << '\n';
    st.circuit = std::move(result.circuit);
  } else if (verb == "verify") {
    std::string against, clean;
    bool table = false;
    app.add_option("--against", against);
    app.add_option("--clean", clean, "extra reference qubits assumed |0>");
    app.add_flag("--truth-table", table);
    parse_step(app, tokens);
    const Circuit& c = st.get(verb);
    if (table) {
      const auto tt = truth_table(c, std::max(sim_limit(), kTruthTableLimit));
      std::cout << "verify: truth_table inputs=" << tt.permutation.size()
                << " bijection=" << (tt.is_bijection() ? "yes" : "no") << '\n';
    }
    if (!against.empty()) {
      const Circuit ref = load(against);
      auto names = st.ancillae;
      for (const auto& n : split(clean, ',')) names.push_back(n);
      const auto res = ref.qubit_count() == c.qubit_count() && names.empty()
                           ? equivalent(ref, c, 1e-9, sim_limit())
                           : equivalent_with_ancillae(ref, c, names, 1e-9, sim_limit());
      std::cout << "verify: equivalent=" << (res.equivalent ? "yes" : "no")
                << " max_deviation=" << res.max_deviation << '\n';
      if (!res.equivalent) throw Error(Errc::invalid_argument, "circuit is not equivalent to " + against);
    }
    if (!table && against.empty()) throw Error(Errc::invalid_argument, "verify needs --against or --truth-table");
  } else if (verb == "analyze") {
    bool tdist = false;
    app.add_flag("--t-dist", tdist);
    parse_step(app, tokens);
    const Circuit& c = st.get(verb);
    std::cout << format_metrics(metrics(c));
    if (!st.ancillae.empty()) std::cout << "ancillae=" << st.ancillae.size() << '\n';
    if (tdist) print_t_dist(c);
  } else {
    throw Error(Errc::invalid_argument, "unknown step '" + verb + "'");
  }
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::invariant_violated: return kInvariant;
    case Errc::resource_guard_exceeded: return kGuard;
    default: break;
  }
  return dynamic_cast<const ParseError*>(&e) ? kParse : kFailure;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const auto n = std::stoul(text);
      return {n, n};
    }
    return {std::stoul(text.substr(0, dots)), std::stoul(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw Error(Errc::invalid_argument, "bad range '" + text + "', want LO..HI");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcforge: synthesize, transpile, optimize and analyze Clifford+T circuits"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "print resource metrics of a .qc file");
  std::string analyze_file;
  bool t_dist = false;
  analyze->add_option("file", analyze_file)->required();
  analyze->add_flag("--t-dist", t_dist, "also print the per-moment T distribution");

  auto* pipeline = app.add_subcommand("pipeline", "run steps in order");
  std::string input, output;
  std::vector<std::string> steps;
  pipeline->add_option("--input", input, "circuit to start from");
  pipeline->add_option("--output", output, "where to write the final circuit");
  pipeline->add_option("--step", steps, "load|synth|transpile|flag|opt|verify|analyze ...")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  auto* bench = app.add_subcommand("bench", "time a benchmark scenario over a range of n");
  std::string scenario, range, csv_path, strategy = "TDEPTH1_4ANC";
  bool force = false;
  bench->add_option("scenario", scenario)->required()->check(CLI::IsMember({"synth", "synth-opt", "synth-transpile"}));
  bench->add_option("range", range, "LO..HI")->required();
  bench->add_option("csv", csv_path)->required();
  bench->add_option("--strategy", strategy);
  bench->add_flag("--force", force, "ignore the resource guard");

  app.add_subcommand("strategies", "list Toffoli decomposition strategies");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const Circuit c = load(analyze_file);
      std::cout << format_metrics(metrics(c));
      if (t_dist) print_t_dist(c);
    } else if (*pipeline) {
      State st;
      if (!input.empty()) st.circuit = load(input);
      for (std::size_t i = 0; i < steps.size(); ++i) {
        try {
          run_step(st, steps[i]);
        } catch (const CLI::ParseError& e) {
          std::cerr << "step " << i + 1 << " (" << steps[i] << "): " << e.what() << '\n';
          return kFailure;
        } catch (const Error& e) {
          std::cerr << "step " << i + 1 << " (" << steps[i] << "): " << to_string(e.code()) << ": " << e.what()
                    << '\n';
          return exit_code_for(e);
        }
      }
      if (!output.empty()) {
        Circuit& c = st.get("output");
        c.validate();
        std::ofstream out(output);
        out << serialize(c);
        if (!out) throw Error(Errc::invalid_argument, "cannot write '" + output + "'");
      }
    } else if (*bench) {
      const auto [lo, hi] = parse_range(range);
      BenchOptions opts;
      opts.force = force;
      opts.strategy = strategy;
      const auto sc = parse_scenario(scenario);
      check_guard(sc, hi, opts);
      std::ofstream csv(csv_path);
      if (!csv) throw Error(Errc::invalid_argument, "cannot write '" + csv_path + "'");
      run_bench(sc, lo, hi, csv, opts, [](const BenchRecord& r) {
        std::cout << scenario_name(r.scenario) << " n=" << r.n << " qubits=" << r.qubits
                  << " ancillae=" << r.ancillae << " gates=" << r.metrics.gate_count << " t=" << r.metrics.t_count
                  << " t_before_opt=" << r.t_count_before_opt << " elapsed_s=" << format_seconds(r.elapsed_seconds)
                  << '\n';
      });
    } else {
      for (const auto& s : list_strategies()) {
        std::cout << s.name << " ancillae=" << s.ancilla_count << " t_count=" << s.t_count
                  << " t_depth=" << s.t_depth << '\n';
      }
    }
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
