#include "nfer/core.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace nfer {
namespace {

TEST(Identifier, AcceptsLettersDigitsUnderscore) {
    EXPECT_EQ(Identifier("S_x").str(), "S_x");
    EXPECT_EQ(Identifier("_a1").str(), "_a1");
    EXPECT_TRUE(Identifier::is_valid("a"));
    EXPECT_FALSE(Identifier::is_valid(""));
    EXPECT_FALSE(Identifier::is_valid("a-b"));
    EXPECT_FALSE(Identifier::is_valid("a b"));
}

TEST(Identifier, RejectsInvalidWithKind) {
    try {
        Identifier bad("a.b");
        FAIL() << "expected an exception";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidIdentifier);
    }
}

TEST(Identifier, CaseSensitiveOrdering) {
    EXPECT_NE(Identifier("a"), Identifier("A"));
    EXPECT_LT(Identifier("A"), Identifier("a"));
}

TEST(Trace, RequiresNonDecreasingTimestamps) {
    EXPECT_NO_THROW(Trace({{"a", 1}, {"b", 1}, {"a", 2}}));
    try {
        Trace({{"a", 2}, {"b", 1}});
        FAIL() << "expected an exception";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidTrace);
    }
}

TEST(Trace, FromUnsortedIsStable) {
    const Trace t = Trace::from_unsorted({{"b", 2}, {"a", 1}, {"c", 2}, {"d", 1}});
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t.events()[0].id, Identifier("a"));
    EXPECT_EQ(t.events()[1].id, Identifier("d"));
    EXPECT_EQ(t.events()[2].id, Identifier("b"));
    EXPECT_EQ(t.events()[3].id, Identifier("c"));
    EXPECT_EQ(t.timestamps(), (std::vector<Timestamp>{1, 2}));
    EXPECT_EQ(t.identifiers(), make_identifier_set({"a", "b", "c", "d"}));
}

TEST(Interval, StartAfterEndIsInvalid) {
    EXPECT_THROW(Interval("a", 3, 2), Error);
    EXPECT_TRUE(Interval("a", 2, 2).atomic());
    EXPECT_FALSE(Interval("a", 1, 2).atomic());
}

TEST(Interval, CanonicalOrderIsStartEndId) {
    EXPECT_LT(Interval("z", 0, 5), Interval("a", 1, 1));
    EXPECT_LT(Interval("z", 1, 1), Interval("a", 1, 2));
    EXPECT_LT(Interval("A", 1, 2), Interval("B", 1, 2));
}

TEST(Pool, SetSemanticsAndQueries) {
    Pool p = Pool::from_trace(Trace({{"a", 1}, {"a", 1}, {"b", 2}}));
    EXPECT_EQ(p.size(), 2u);
    EXPECT_TRUE(p.contains(Interval("a", 1, 1)));
    EXPECT_TRUE(p.contains_id("b"));
    EXPECT_FALSE(p.contains_id("c"));
    EXPECT_FALSE(p.insert(Interval("a", 1, 1)));
    EXPECT_TRUE(p.insert(Interval("a", 0, 1)));
    EXPECT_EQ(p.with_id("a").size(), 2u);
    EXPECT_TRUE(p.includes(Pool{Interval("b", 2, 2)}));

    std::ostringstream os;
    os << p;
    EXPECT_EQ(os.str(), "{(a,0,1),(a,1,1),(b,2,2)}");
}

TEST(Rule, RendersBothForms) {
    EXPECT_EQ(to_string(inclusive_rule("c", "a", InclusiveOp::Meet, "b")), "c <- a meet b");
    EXPECT_EQ(to_string(exclusive_rule("b", "d", ExclusiveOp::Follow, "c")), "b <- d unless follow c");
}

TEST(Operators, NamesRoundTrip) {
    for (InclusiveOp op : kInclusiveOps) EXPECT_EQ(inclusive_op_from_string(to_string(op)), op);
    for (ExclusiveOp op : kExclusiveOps) EXPECT_EQ(exclusive_op_from_string(to_string(op)), op);
    EXPECT_FALSE(inclusive_op_from_string("after"));
    EXPECT_FALSE(exclusive_op_from_string("meet"));
}

TEST(Specification, IdentifierSets) {
    const Specification d{inclusive_rule("A", "a", InclusiveOp::Before, "b"),
                          exclusive_rule("B", "A", ExclusiveOp::After, "c")};
    EXPECT_FALSE(d.inclusive_only());
    EXPECT_EQ(d.identifiers(), make_identifier_set({"A", "B", "a", "b", "c"}));
    EXPECT_EQ(d.produced_identifiers(), make_identifier_set({"A", "B"}));
    EXPECT_EQ(to_string(d.produced_identifiers()), "{A,B}");
}

}  // namespace
}  // namespace nfer
