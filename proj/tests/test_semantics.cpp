#include "nfer/semantics.hpp"

#include "support/support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace nfer {
namespace {

using testing::Rng;

std::optional<Span> inc(InclusiveOp op, Span a, Span b) { return match_inclusive(op, a, b); }

TEST(ClockPredicates, Before) {
    EXPECT_EQ(inc(InclusiveOp::Before, {1, 2}, {3, 5}), (Span{1, 5}));
    EXPECT_FALSE(inc(InclusiveOp::Before, {1, 3}, {3, 5}));
}

TEST(ClockPredicates, Meet) {
    EXPECT_EQ(inc(InclusiveOp::Meet, {1, 3}, {3, 5}), (Span{1, 5}));
    EXPECT_EQ(inc(InclusiveOp::Meet, {3, 3}, {3, 3}), (Span{3, 3}));
    EXPECT_FALSE(inc(InclusiveOp::Meet, {1, 2}, {3, 5}));
}

TEST(ClockPredicates, DuringProducesTheOuterInterval) {
    EXPECT_EQ(inc(InclusiveOp::During, {2, 3}, {1, 5}), (Span{1, 5}));
    EXPECT_EQ(inc(InclusiveOp::During, {1, 5}, {1, 5}), (Span{1, 5}));
    EXPECT_FALSE(inc(InclusiveOp::During, {0, 3}, {1, 5}));
}

TEST(ClockPredicates, Coincide) {
    EXPECT_EQ(inc(InclusiveOp::Coincide, {2, 4}, {2, 4}), (Span{2, 4}));
    EXPECT_FALSE(inc(InclusiveOp::Coincide, {2, 4}, {2, 5}));
}

TEST(ClockPredicates, StartAndFinish) {
    EXPECT_EQ(inc(InclusiveOp::Start, {2, 4}, {2, 7}), (Span{2, 7}));
    EXPECT_FALSE(inc(InclusiveOp::Start, {1, 4}, {2, 7}));
    EXPECT_EQ(inc(InclusiveOp::Finish, {2, 7}, {4, 7}), (Span{2, 7}));
    EXPECT_FALSE(inc(InclusiveOp::Finish, {2, 6}, {4, 7}));
}

TEST(ClockPredicates, OverlapAndSlice) {
    EXPECT_EQ(inc(InclusiveOp::Overlap, {1, 4}, {3, 6}), (Span{1, 6}));
    EXPECT_EQ(inc(InclusiveOp::Slice, {1, 4}, {3, 6}), (Span{3, 4}));
    // An atomic interval strictly inside a longer one.
    EXPECT_EQ(inc(InclusiveOp::Overlap, {2, 2}, {1, 3}), (Span{1, 3}));
    EXPECT_EQ(inc(InclusiveOp::Slice, {2, 2}, {1, 3}), (Span{2, 2}));
    // Two atomic intervals never overlap, and touching endpoints do not either.
    EXPECT_FALSE(inc(InclusiveOp::Overlap, {2, 2}, {2, 2}));
    EXPECT_FALSE(inc(InclusiveOp::Overlap, {1, 3}, {3, 5}));
}

TEST(ClockPredicates, Exclusive) {
    EXPECT_TRUE(match_exclusive(ExclusiveOp::After, Span{5, 6}, Span{1, 4}));
    EXPECT_FALSE(match_exclusive(ExclusiveOp::After, Span{4, 6}, Span{1, 4}));
    EXPECT_TRUE(match_exclusive(ExclusiveOp::Follow, Span{4, 6}, Span{1, 4}));
    EXPECT_TRUE(match_exclusive(ExclusiveOp::Contain, Span{1, 6}, Span{2, 4}));
    EXPECT_TRUE(match_exclusive(ExclusiveOp::Contain, Span{1, 6}, Span{1, 6}));
    EXPECT_FALSE(match_exclusive(ExclusiveOp::Contain, Span{1, 6}, Span{0, 4}));
}

TEST(ApplyRule, ExclusiveIgnoresTheIntervalItself) {
    const Pool p{Interval("a", 1, 3), Interval("a", 2, 2)};
    const Pool out = apply_rule(exclusive_rule("x", "a", ExclusiveOp::Contain, "a"), p);
    // (a,1,3) contains (a,2,2); (a,2,2) only contains itself.
    EXPECT_EQ(out, (Pool{Interval("x", 2, 2)}));
}

TEST(ApplyRule, InclusiveMayPairAnIntervalWithItself) {
    const Pool p{Interval("a", 1, 3)};
    EXPECT_EQ(apply_rule(inclusive_rule("x", "a", InclusiveOp::Coincide, "a"), p), (Pool{Interval("x", 1, 3)}));
}

TEST(ApplySpecOnce, LaterRulesSeeEarlierResults) {
    const Specification d{inclusive_rule("c", "a", InclusiveOp::Meet, "b"),
                          inclusive_rule("a", "c", InclusiveOp::Meet, "b")};
    const Pool pi{Interval("a", 0, 1), Interval("b", 1, 2), Interval("b", 2, 3), Interval("b", 3, 4),
                  Interval("d", 4, 5)};
    const Pool once = apply_spec_once(d.rules(), pi);
    EXPECT_TRUE(once.contains(Interval("c", 0, 2)));
    EXPECT_TRUE(once.contains(Interval("a", 0, 3)));
    EXPECT_FALSE(once.contains(Interval("c", 0, 4)));
}

TEST(Evaluate, CycleReachesFixedPoint) {
    const Specification d{inclusive_rule("c", "a", InclusiveOp::Meet, "b"),
                          inclusive_rule("a", "c", InclusiveOp::Meet, "b")};
    const Pool pi{Interval("a", 0, 1), Interval("b", 1, 2), Interval("b", 2, 3), Interval("b", 3, 4),
                  Interval("d", 4, 5)};
    const Pool out = evaluate_pool(d, pi);
    EXPECT_TRUE(out.contains(Interval("c", 0, 2)));
    EXPECT_TRUE(out.contains(Interval("a", 0, 3)));
    EXPECT_TRUE(out.contains(Interval("c", 0, 4)));
    EXPECT_EQ(out, apply_spec_once(d.rules(), out));
}

TEST(Evaluate, ExclusiveRuleRunsAfterTheCycleIsComplete) {
    // Listed first, but it depends on the cycle and must see (c,0,4).
    const Specification d{exclusive_rule("b", "d", ExclusiveOp::Follow, "c"),
                          inclusive_rule("c", "a", InclusiveOp::Meet, "b"),
                          inclusive_rule("a", "c", InclusiveOp::Meet, "b")};
    // Rule 1 produces b, which the cycle consumes, so rule 1 is on the cycle.
    EXPECT_THROW(Evaluator{d}, Error);

    const Specification ok{exclusive_rule("e", "d", ExclusiveOp::Follow, "c"),
                           inclusive_rule("c", "a", InclusiveOp::Meet, "b"),
                           inclusive_rule("a", "c", InclusiveOp::Meet, "b")};
    const Pool pi{Interval("a", 0, 1), Interval("b", 1, 2), Interval("b", 2, 3), Interval("b", 3, 4),
                  Interval("d", 4, 5)};
    EXPECT_FALSE(evaluate_pool(ok, pi).contains_id("e"));
}

TEST(Evaluate, EventsBecomeAtomicIntervals) {
    const Pool out = evaluate_trace(Specification{}, Trace({{"a", 1}, {"b", 2}}));
    EXPECT_EQ(out, (Pool{Interval("a", 1, 1), Interval("b", 2, 2)}));
}

TEST(Evaluate, DsatExample) {
    const Specification d{inclusive_rule("A", "a", InclusiveOp::Before, "b"),
                          inclusive_rule("B", "A", InclusiveOp::Meet, "b"),
                          inclusive_rule("T", "A", InclusiveOp::Overlap, "B")};
    const Pool out = evaluate_trace(d, Trace({{"a", 1}, {"b", 2}}));
    EXPECT_EQ(out, (Pool{Interval("a", 1, 1), Interval("b", 2, 2), Interval("A", 1, 2), Interval("B", 1, 2),
                         Interval("T", 1, 2)}));
    EXPECT_TRUE(Evaluator(d).produces(Trace({{"a", 1}, {"b", 2}}), "T"));
    EXPECT_FALSE(Evaluator(d).produces(Trace({{"a", 1}}), "T"));
}

TEST(DependencyGraph, CycleExampleIsOneComponent) {
    const Specification d{inclusive_rule("c", "a", InclusiveOp::Meet, "b"),
                          inclusive_rule("a", "c", InclusiveOp::Meet, "b")};
    const DependencyGraph g(d);
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_TRUE(g.has_edge(1, 0));
    EXPECT_EQ(g.components(), (std::vector<std::vector<std::size_t>>{{0, 1}}));
    const ComponentPlan plan = build_plan(d);
    ASSERT_EQ(plan.components.size(), 1u);
    EXPECT_TRUE(plan.components[0].cyclic);
}

TEST(DependencyGraph, TopologicalOrderFollowsDependencies) {
    // Listed consumer first.
    const Specification d{inclusive_rule("T", "A", InclusiveOp::Overlap, "B"),
                          inclusive_rule("B", "A", InclusiveOp::Meet, "b"),
                          inclusive_rule("A", "a", InclusiveOp::Before, "b")};
    EXPECT_EQ(DependencyGraph(d).components(), (std::vector<std::vector<std::size_t>>{{2}, {1}, {0}}));
}

TEST(DependencyGraph, SelfLoopIsCyclic) {
    const Specification d{inclusive_rule("a", "a", InclusiveOp::Meet, "b")};
    EXPECT_TRUE(DependencyGraph(d).has_self_loop(0));
    EXPECT_TRUE(build_plan(d).components[0].cyclic);
    const Specification x{exclusive_rule("a", "a", ExclusiveOp::After, "b")};
    EXPECT_EQ(exclusive_rules_in_cycles(x), (std::vector<std::size_t>{0}));
}

TEST(BuildPlan, ExclusiveInCycleIsRejected) {
    const Specification d{inclusive_rule("c", "a", InclusiveOp::Meet, "b"),
                          exclusive_rule("a", "c", ExclusiveOp::After, "b")};
    try {
        build_plan(d);
        FAIL() << "expected an exception";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ExclusiveInCycle);
        EXPECT_NE(std::string(e.what()).find("exclusive rule in cycle"), std::string::npos);
    }
}

// Semi-naive evaluation against fold-until-unchanged on random inputs,
// including exclusive rules outside cycles.
TEST(Evaluate, MatchesReferenceOnRandomSpecs) {
    Rng rng(testing::kSeed);
    for (int n = 0; n < 400; ++n) {
        const testing::SpecShape shape{5, 6, 3, n % 2 ? 0.3 : 0.0};
        const auto problem = testing::random_problem(rng, shape);
        const std::vector<Identifier> alphabet(problem.inputs.begin(), problem.inputs.end());
        const Trace t = testing::random_trace(rng, alphabet, 6, 5);
        ASSERT_EQ(evaluate_trace(problem.spec, t), testing::reference_evaluate(problem.spec, t))
            << "spec #" << n << " on " << t;
    }
}

TEST(Evaluate, PassesThroughUnknownIdentifiers) {
    const Specification d{inclusive_rule("A", "a", InclusiveOp::Before, "b")};
    const Pool out = evaluate_trace(d, Trace({{"z", 0}, {"a", 1}, {"b", 2}}));
    EXPECT_TRUE(out.contains(Interval("z", 0, 0)));
    EXPECT_TRUE(out.contains(Interval("A", 1, 2)));
}

TEST(Evaluate, SelfMeetOnAtomicInterval) {
    const Specification d{inclusive_rule("x", "a", InclusiveOp::Meet, "a")};
    EXPECT_EQ(evaluate_trace(d, Trace({{"a", 3}})), (Pool{Interval("a", 3, 3), Interval("x", 3, 3)}));
}

}  // namespace
}  // namespace nfer
