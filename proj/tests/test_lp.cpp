#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "memsched/lp.hpp"

using namespace memsched;

TEST_CASE("simple maximization") {
    // max x + y  s.t. x + 2y <= 4, 3x + y <= 6
    const auto sol = lp::solve({1.0, 1.0}, {{{1.0, 2.0}, lp::Relation::Le, 4.0},
                                            {{3.0, 1.0}, lp::Relation::Le, 6.0}});
    REQUIRE(sol.feasible);
    REQUIRE(sol.bounded);
    CHECK(sol.objective == doctest::Approx(2.8)); // x = 1.6, y = 1.2
    CHECK(sol.x[0] == doctest::Approx(1.6));
    CHECK(sol.x[1] == doctest::Approx(1.2));
}

TEST_CASE("equality and ge constraints") {
    // max y  s.t. x + y = 1, x >= 0.25
    const auto sol = lp::solve({0.0, 1.0}, {{{1.0, 1.0}, lp::Relation::Eq, 1.0},
                                            {{1.0, 0.0}, lp::Relation::Ge, 0.25}});
    REQUIRE(sol.feasible);
    CHECK(sol.objective == doctest::Approx(0.75));
}

TEST_CASE("infeasible system detected") {
    CHECK_FALSE(lp::feasible({{{1.0}, lp::Relation::Ge, 2.0}, {{1.0}, lp::Relation::Le, 1.0}}));
    CHECK(lp::feasible({{{1.0}, lp::Relation::Ge, 0.5}, {{1.0}, lp::Relation::Le, 1.0}}));
}

TEST_CASE("unbounded objective flagged") {
    const auto sol = lp::solve({1.0, 0.0}, {{{0.0, 1.0}, lp::Relation::Le, 1.0}});
    REQUIRE(sol.feasible);
    CHECK_FALSE(sol.bounded);
}

TEST_CASE("negative rhs rows are normalized") {
    // x - y <= -1 with x, y >= 0 means y >= x + 1
    const auto sol = lp::solve({1.0, -1.0}, {{{1.0, -1.0}, lp::Relation::Le, -1.0}});
    REQUIRE(sol.feasible);
    REQUIRE(sol.bounded);
    CHECK(sol.objective == doctest::Approx(-1.0));
}

TEST_CASE("feasibility of a convex-combination system") {
    // weights over three points dominating a target, sum to one
    // points (0.5, 0), (0, 0.5), (0.3, 0.3)
    const auto dominated = [&](double l1, double l2) {
        return lp::feasible({{{0.5, 0.0, 0.3}, lp::Relation::Ge, l1},
                             {{0.0, 0.5, 0.3}, lp::Relation::Ge, l2},
                             {{1.0, 1.0, 1.0}, lp::Relation::Eq, 1.0}});
    };
    CHECK(dominated(0.3, 0.3));
    CHECK(dominated(0.25, 0.25));
    CHECK(dominated(0.5, 0.0));
    CHECK_FALSE(dominated(0.31, 0.31));
    CHECK_FALSE(dominated(0.45, 0.2));
}

TEST_CASE("degenerate equalities") {
    // x = 0.5 duplicated; redundant rows must not break phase 1
    const auto sol = lp::solve({1.0}, {{{1.0}, lp::Relation::Eq, 0.5},
                                       {{1.0}, lp::Relation::Eq, 0.5},
                                       {{2.0}, lp::Relation::Eq, 1.0}});
    REQUIRE(sol.feasible);
    CHECK(sol.objective == doctest::Approx(0.5));
}
