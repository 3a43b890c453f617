#include <gtest/gtest.h>

#include "support.hpp"

using namespace qcforge;
using namespace qcforge::testing;

namespace {

FlagOptions only(Flag f) { return FlagOptions{true, f}; }

Circuit two_wire() { return build_circuit({"q0", "q1"}); }

// CNOT, H H on the target, three more CNOTs, then T on the control.
Circuit commutation_example() {
  Circuit c = two_wire();
  c.append(Operation::cnot(0, 1));
  c.append(Operation::h(1));
  c.append(Operation::h(1));
  c.append(Operation::cnot(0, 1));
  c.append(Operation::cnot(0, 1));
  c.append(Operation::cnot(0, 1));
  c.append(Operation::t(0));
  return c;
}

}  // namespace

TEST(CancelCnot, BackToBackPair) {
  Circuit c = two_wire();
  c.append(Operation::cnot(0, 1));
  c.append(Operation::cnot(0, 1));
  const auto r = cancel_cnot(c);
  EXPECT_TRUE(r.circuit.empty());
  EXPECT_EQ(r.report.removed(GateKind::CNOT), 2u);
  EXPECT_EQ(r.report.rewrites_applied, 1u);
}

TEST(CancelCnot, InterveningGateBlocks) {
  Circuit c = two_wire();
  c.append(Operation::cnot(0, 1));
  c.append(Operation::x(1));
  c.append(Operation::cnot(0, 1));
  const auto r = cancel_cnot(c);
  EXPECT_EQ(r.circuit, c);
  EXPECT_EQ(r.report.rewrites_applied, 0u);
}

TEST(CancelCnot, ReversedDirectionDoesNotCancel) {
  Circuit c = two_wire();
  c.append(Operation::cnot(0, 1));
  c.append(Operation::cnot(1, 0));
  EXPECT_EQ(cancel_cnot(c).report.rewrites_applied, 0u);
}

TEST(CancelCnot, NestedPairsCollapseToFixedPoint) {
  Circuit c = build_circuit({"a", "b", "c"});
  c.append(Operation::cnot(0, 1));
  c.append(Operation::cnot(1, 2));
  c.append(Operation::cnot(1, 2));
  c.append(Operation::cnot(0, 1));
  const auto r = cancel_cnot(c);
  EXPECT_TRUE(r.circuit.empty());
  EXPECT_EQ(r.report.rewrites_applied, 2u);
}

TEST(CancelCnot, ExpandedExampleFromEighteenToFourteen) {
  const Circuit expanded = load_fixture("worked_example_expanded.qc");
  GatePredicate all;
  const Circuit flagged = flag_gates(expanded, all, 1);
  const auto r = cancel_cnot(flagged, only(1));
  EXPECT_EQ(metrics(r.circuit).cnot_count, 14u);
  EXPECT_EQ(r.report.removed(GateKind::CNOT), 4u);
  EXPECT_EQ(metrics(cancel_cnot(expanded).circuit).cnot_count, 14u);
}

TEST(CancelHadamard, PairAndExpandedExample) {
  Circuit c = build_circuit({"q0"});
  c.append(Operation::h(0));
  c.append(Operation::h(0));
  EXPECT_TRUE(cancel_hadamard(c).circuit.empty());

  // The expansion's closing H on the target sits right next to the original H.
  const Circuit expanded = load_fixture("worked_example_expanded.qc");
  EXPECT_EQ(metrics(cancel_hadamard(expanded).circuit).h_count, 1u);
  EXPECT_EQ(metrics(cancel_hadamard(cancel_cnot(expanded).circuit).circuit).h_count, 1u);
}

TEST(CancelHadamard, FlaggedOnlyNeedsFlag) {
  try {
    cancel_hadamard(two_wire(), FlagOptions{true, std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::flag_required);
  }
}

TEST(CancelHadamard, FlaggedOnlyIgnoresUnflaggedPairs) {
  Circuit c = two_wire();
  c.append(Operation::h(0));
  c.append(Operation::h(0));
  c.append(Operation(GateKind::H, {1}, {}, {2}));
  c.append(Operation::h(1));
  EXPECT_EQ(cancel_hadamard(c, only(2)).report.rewrites_applied, 0u);
  EXPECT_EQ(metrics(cancel_hadamard(c).circuit).h_count, 0u);
}

TEST(FlagTransfer, CommutationThenFlaggedCancellation) {
  const Flag f = 1;
  // (a) -> (b): T moves to the front.
  const auto moved = commute_t_to_start(commutation_example());
  EXPECT_EQ(moved.report.rewrites_applied, 4u);
  const auto ops_b = moved.circuit.operations();
  ASSERT_EQ(ops_b.front(), Operation::t(0));
  EXPECT_EQ(moved.circuit.moments()[0].operations.front(), Operation::t(0));

  GatePredicate hs;
  hs.kind = GateKind::H;
  const Circuit b = flag_gates(moved.circuit, hs, f);
  EXPECT_EQ(count_flagged(b, f), 2u);

  // (b) -> (c): flagged H pair cancels, the flag lands on the two CNOTs around it.
  const auto c = cancel_hadamard(b, only(f));
  EXPECT_EQ(c.report.removed(GateKind::H), 2u);
  EXPECT_EQ(c.report.flags_transferred, 2u);
  const auto ops_c = c.circuit.operations();
  ASSERT_EQ(ops_c.size(), 5u);
  EXPECT_FALSE(ops_c[0].has_flag(f));  // T
  EXPECT_TRUE(ops_c[1].has_flag(f));
  EXPECT_TRUE(ops_c[2].has_flag(f));
  EXPECT_FALSE(ops_c[3].has_flag(f));
  EXPECT_FALSE(ops_c[4].has_flag(f));

  // (c) -> (d): flagged CNOT pair cancels, the flag moves to T and the next CNOT.
  const auto d = cancel_cnot(c.circuit, only(f));
  EXPECT_EQ(d.report.removed(GateKind::CNOT), 2u);
  const auto ops_d = d.circuit.operations();
  ASSERT_EQ(ops_d.size(), 3u);
  EXPECT_EQ(ops_d[0].kind(), GateKind::T);
  EXPECT_TRUE(ops_d[0].has_flag(f));
  EXPECT_TRUE(ops_d[1].has_flag(f));
  EXPECT_FALSE(ops_d[2].has_flag(f));

  // The remaining flagged gates cannot be cancelled.
  EXPECT_EQ(cancel_cnot(d.circuit, only(f)).report.rewrites_applied, 0u);
  EXPECT_TRUE(equivalent(d.circuit, commutation_example()));
}

TEST(FlagTransfer, NoNeighboursMeansNoTransfer) {
  Circuit c = two_wire();
  c.append(Operation(GateKind::CNOT, {0, 1}, {}, {3}));
  c.append(Operation(GateKind::CNOT, {0, 1}, {}, {3}));
  const auto r = cancel_cnot(c, only(3));
  EXPECT_TRUE(r.circuit.empty());
  EXPECT_EQ(r.report.flags_transferred, 0u);
}

TEST(FlagTransfer, DistinctLabelsNeverGrow) {
  std::mt19937 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    Circuit c = random_clifford_t(rng, 4, 30);
    GatePredicate p;
    p.moments = {{0, 4}};
    c = flag_gates(c, p, 1);
    p.moments = {{3, 9}};
    c = flag_gates(c, p, 2);
    const auto labels = [](const Circuit& x) {
      FlagSet s;
      x.for_each_operation([&](const Operation& op, std::size_t) { s.insert(op.flags().begin(), op.flags().end()); });
      return s;
    };
    const auto after = labels(fixed_point({make_pass("cancel-cnot"), make_pass("cancel-h")})(c).circuit);
    for (Flag f : after) EXPECT_TRUE(labels(c).count(f));
  }
}

TEST(CommuteT, AlreadyLeftmost) {
  Circuit c = build_circuit({"q0"});
  c.append(Operation::t(0));
  c.append(Operation::h(0));
  const auto r = commute_t_to_start(c);
  EXPECT_EQ(r.report.rewrites_applied, 0u);
  EXPECT_EQ(r.circuit, c);
}

TEST(CommuteT, DoesNotPassCnotTarget) {
  Circuit c = two_wire();
  c.append(Operation::cnot(0, 1));
  c.append(Operation::t(1));
  EXPECT_EQ(commute_t_to_start(c).report.rewrites_applied, 0u);

  // Oracle check that the rule is right: the swapped order is a different unitary.
  Circuit swapped = two_wire();
  swapped.append(Operation::t(1));
  swapped.append(Operation::cnot(0, 1));
  EXPECT_GT(phase_distance(oracle_unitary(c), oracle_unitary(swapped)), 1e-3);
}

TEST(CommuteT, PassesCzAndPhases) {
  Circuit c = two_wire();
  c.append(Operation::h(0));
  c.append(Operation::cz(0, 1));
  c.append(Operation::s(1));
  c.append(Operation::tdag(1));
  const auto r = commute_t_to_start(c);
  EXPECT_EQ(r.report.rewrites_applied, 2u);
  const auto& first = r.circuit.moments()[0].operations;
  EXPECT_NE(std::find(first.begin(), first.end(), Operation::tdag(1)), first.end());
  EXPECT_TRUE(equivalent(r.circuit, c));
}

TEST(CommuteT, BlockedByHadamardAndX) {
  for (GateKind k : {GateKind::H, GateKind::X}) {
    Circuit c = build_circuit({"q0"});
    c.append(Operation(k, {0}));
    c.append(Operation::t(0));
    EXPECT_EQ(commute_t_to_start(c).report.rewrites_applied, 0u);
  }
}

TEST(CommuteT, PreservesGateMultiset) {
  std::mt19937 rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const Circuit c = random_circuit(rng, 5, 30);
    const auto r = commute_t_to_start(c);
    auto key = [](const Circuit& x) {
      std::multiset<std::pair<int, std::vector<QubitId>>> s;
      x.for_each_operation([&](const Operation& op, std::size_t) {
        s.insert({static_cast<int>(op.kind()), {op.qubits().begin(), op.qubits().end()}});
      });
      return s;
    };
    EXPECT_EQ(key(r.circuit), key(c));
  }
}

TEST(RecomposeS, TPairsBecomeS) {
  Circuit c = two_wire();
  c.append(Operation::t(0));
  c.append(Operation::t(0));
  c.append(Operation::tdag(1));
  c.append(Operation::tdag(1));
  const auto r = recompose_tt_to_s(c);
  EXPECT_EQ(r.report.rewrites_applied, 2u);
  EXPECT_EQ(metrics(r.circuit).t_count, 0u);
  EXPECT_TRUE(equivalent(r.circuit, c));
  const auto ops = r.circuit.operations();
  EXPECT_EQ(ops[0].kind(), GateKind::S);
  EXPECT_EQ(ops[1].kind(), GateKind::SDag);
}

TEST(RecomposeS, MixedPairIsLeftAlone) {
  Circuit c = build_circuit({"q0"});
  c.append(Operation::t(0));
  c.append(Operation::tdag(0));
  EXPECT_EQ(recompose_tt_to_s(c).report.rewrites_applied, 0u);
}

TEST(Invariants, ExpandedExampleKeepsTCountAtEveryStep) {
  const Circuit expanded = load_fixture("worked_example_expanded.qc");
  const auto pass = with_invariants(fixed_point({make_pass("cancel-cnot"), make_pass("cancel-h")}),
                                    {invariant_by_name("t-count")});
  std::vector<std::size_t> t_counts;
  const auto r = pass(expanded, [&](std::size_t, const Circuit& s) { t_counts.push_back(metrics(s).t_count); });
  EXPECT_EQ(metrics(r.circuit).cnot_count, 14u);
  EXPECT_EQ(metrics(r.circuit).h_count, 1u);
  EXPECT_EQ(t_counts.size(), r.report.rewrites_applied);
  EXPECT_EQ(t_counts.size(), 3u);  // two CNOT pairs then one H pair
  for (auto t : t_counts) EXPECT_EQ(t, 7u);
}

TEST(Invariants, IdentityPassTriviallyHolds) {
  const auto pass = with_invariants(identity_pass(), {invariant_by_name("t-count"), invariant_by_name("qubit-count")});
  EXPECT_EQ(pass(load_fixture("worked_example_expanded.qc")).circuit, load_fixture("worked_example_expanded.qc"));
  EXPECT_THROW(with_invariants(identity_pass(), {}), Error);
  EXPECT_THROW(invariant_by_name("bogus"), Error);
}

TEST(Invariants, BuggyPassIsCaughtAtItsStep) {
  try {
    with_invariants(drop_t_pass(), {invariant_by_name("t-count")})(load_fixture("worked_example_expanded.qc"));
    FAIL();
  } catch (const InvariantViolated& e) {
    EXPECT_EQ(e.code(), Errc::invariant_violated);
    EXPECT_EQ(e.invariant(), "t-count");
    EXPECT_EQ(e.step(), 1u);
    EXPECT_EQ(e.before(), 7);
    EXPECT_EQ(e.after(), 6);
  }
}

TEST(Invariants, FaultInjectionReportsTheFaultyStep) {
  const Circuit expanded = load_fixture("worked_example_expanded.qc");
  const auto inner = fixed_point({make_pass("cancel-cnot"), make_pass("cancel-h")});
  for (std::size_t step = 1; step <= 3; ++step) {
    try {
      with_invariants(fault_injecting_pass(inner, step), {invariant_by_name("t-count")})(expanded);
      FAIL() << step;
    } catch (const InvariantViolated& e) {
      EXPECT_EQ(e.step(), step);
      EXPECT_EQ(e.after(), 6);
    }
  }
  // A fault scheduled after the last rewrite never fires.
  EXPECT_NO_THROW(with_invariants(fault_injecting_pass(inner, 4), {invariant_by_name("t-count")})(expanded));
}

TEST(Soundness, PassesPreserveUnitaryAndAreIdempotent) {
  std::mt19937 rng(79);
  const std::vector<std::string> names{"cancel-cnot", "cancel-h", "commute-t-start", "recompose-s"};
  for (int trial = 0; trial < 100; ++trial) {
    const Circuit c = random_circuit(rng, 1 + rng() % 8, rng() % 41);
    for (const auto& name : names) {
      const auto once = make_pass(name)(c);
      ASSERT_NO_THROW(once.circuit.validate());
      const auto eq = equivalent(c, once.circuit);
      ASSERT_TRUE(eq.equivalent) << name << " dev=" << eq.max_deviation << "\n" << serialize(c);
      const auto twice = make_pass(name)(once.circuit);
      EXPECT_EQ(twice.circuit, once.circuit) << name;
      EXPECT_EQ(twice.report.rewrites_applied, 0u) << name;
      if (once.report.rewrites_applied == 0) EXPECT_EQ(once.circuit, c) << name;
      if (name != "commute-t-start") EXPECT_LE(metrics(once.circuit).depth, metrics(c).depth) << name;
    }
  }
}

TEST(Report, Format) {
  Circuit c = two_wire();
  c.append(Operation::cnot(0, 1));
  c.append(Operation::cnot(0, 1));
  const std::string text = format_report(cancel_cnot(c).report);
  EXPECT_NE(text.find("pass=cancel-cnot"), std::string::npos);
  EXPECT_NE(text.find("removed=CNOT:2"), std::string::npos);
}
