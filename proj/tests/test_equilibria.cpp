#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "reinforce_dyn/equilibria.hpp"
#include "reinforce_dyn/flow.hpp"
#include "reinforce_dyn/model.hpp"
#include "reinforce_dyn/presets.hpp"
#include "reinforce_dyn/rng.hpp"
#include "test_support.hpp"

using namespace reinforce_dyn;
using test_support::inf_dist;
using test_support::random_c3_model;
using test_support::random_interior;

TEST_CASE("solve_from: zero interaction lands on the uniform point") {
    SplitMix64 rng(3);
    for (auto [m, d] : {std::pair{2, 2}, std::pair{3, 3}}) {
        const InteractionModel zero(m, d,
                                    std::vector<double>(static_cast<std::size_t>(d) * m * m, 0.0));
        const Equilibrium eq = solve_from(zero, random_interior(rng, m, d));
        CHECK(eq.residual < 1e-12);
        for (double e : eq.point.flat()) CHECK(std::abs(e - 1.0 / d) < 1e-12);
    }
}

TEST_CASE("solve_from: supercritical start keeps its orientation") {
    const InteractionModel k2 = two_walk_k2(4.0);
    const double a = a_of_beta(4.0);
    // Walk 1 starts loaded on vertex 1 and the repulsion keeps it there, so
    // the solver lands on (1-a, a, a, 1-a).
    const Equilibrium eq = solve_from(k2, OccupationPoint(2, 2, {0.9, 0.1, 0.1, 0.9}));
    CHECK(inf_dist(eq.point.flat(), {1.0 - a, a, a, 1.0 - a}) < 1e-10);
    CHECK(eq.stability.classification == Stability::LinearlyStable);
}

TEST_CASE("solve_from: subcritical model has only the uniform equilibrium") {
    const InteractionModel k2 = two_walk_k2(1.0);
    SplitMix64 rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        const Equilibrium eq = solve_from(k2, random_interior(rng, 2, 2));
        CHECK(inf_dist(eq.point.flat(), {0.5, 0.5, 0.5, 0.5}) < 1e-10);
    }
}

TEST_CASE("solve_from validates its tolerances") {
    const InteractionModel k2 = two_walk_k2(1.0);
    const OccupationPoint u(2, 2, {0.5, 0.5, 0.5, 0.5});
    CHECK_THROWS_AS(solve_from(k2, u, 0), BadDimension);
    CHECK_THROWS_AS(solve_from(k2, u, 1000, 1e-15), BadDimension);
    CHECK_NOTHROW(solve_from(k2, u, 1000, 1e-14));
}

TEST_CASE("solve_from reports NoConvergence when starved of iterations") {
    const InteractionModel k2 = two_walk_k2(4.0);
    CHECK_THROWS_AS(solve_from(k2, OccupationPoint(2, 2, {0.9, 0.1, 0.1, 0.9}), 2),
                    NoConvergence);
}

TEST_CASE("find_all: the supercritical pair plus the uniform point") {
    const auto eqs = find_all(two_walk_k2(4.0), 200, 7);
    REQUIRE(eqs.size() == 3);
    const double a = a_of_beta(4.0);
    int stable = 0;
    bool saw_p = false, saw_lo = false, saw_hi = false;
    for (const auto& eq : eqs) {
        CHECK(eq.residual < 1e-10);
        if (eq.stability.classification == Stability::LinearlyStable) ++stable;
        if (inf_dist(eq.point.flat(), {0.5, 0.5, 0.5, 0.5}) < 1e-8) saw_p = true;
        if (inf_dist(eq.point.flat(), {a, 1 - a, 1 - a, a}) < 1e-8) saw_lo = true;
        if (inf_dist(eq.point.flat(), {1 - a, a, a, 1 - a}) < 1e-8) saw_hi = true;
    }
    CHECK(stable == 2);
    CHECK(saw_p);
    CHECK(saw_lo);
    CHECK(saw_hi);
}

TEST_CASE("find_all: the two broken-symmetry equilibria mirror each other") {
    const auto eqs = find_all(two_walk_k2(4.0), 100, 11);
    REQUIRE(eqs.size() == 3);
    std::vector<std::vector<double>> nontrivial;
    for (const auto& eq : eqs)
        if (inf_dist(eq.point.flat(), {0.5, 0.5, 0.5, 0.5}) > 0.1)
            nontrivial.push_back(eq.point.flat());
    REQUIRE(nontrivial.size() == 2);
    // swap x^1 <-> reversed, x^2 <-> reversed maps one onto the other
    const std::vector<double> swapped = {nontrivial[0][1], nontrivial[0][0],
                                         nontrivial[0][3], nontrivial[0][2]};
    CHECK(inf_dist(swapped, nontrivial[1]) < 1e-10);
}

TEST_CASE("find_all: three-walk strong repulsion yields p plus the six mixed points") {
    const double beta = 10.0;
    const auto eqs = find_all(three_walk_z(beta), 500, 7);
    REQUIRE(eqs.size() == 7);
    const auto S = build_S(beta);
    int total_hits = 0;
    for (const auto& target : S) {
        bool found = false;
        for (const auto& eq : eqs)
            if (inf_dist(eq.point.flat(), target.flat()) < 1e-8) {
                found = true;
                CHECK(eq.stability.classification == Stability::LinearlyStable);
            }
        CHECK(found);
    }
    bool found_p = false;
    for (const auto& eq : eqs) {
        total_hits += eq.basin_hits;
        CHECK(eq.residual < 1e-10);
        if (inf_dist(eq.point.flat(), std::vector<double>(6, 0.5)) < 1e-8) {
            found_p = true;
            CHECK(eq.stability.classification == Stability::LinearlyUnstable);
        }
    }
    CHECK(found_p);
    // At this repulsion strength a sizable fraction of starts legitimately
    // exhausts the iteration budget (the damped fixed-point map cycles in the
    // stiff region); the failures are skipped, not misassigned.
    CHECK(total_hits == 279);
}

TEST_CASE("find_all: pitchfork counts across the critical strength") {
    for (double beta : {0.5, 1.0, 1.9, 2.0}) {
        const auto eqs = find_all(two_walk_k2(beta), 100, 3);
        CHECK(eqs.size() == 1);
    }
    for (double beta : {2.5, 4.0, 8.0}) {
        const auto eqs = find_all(two_walk_k2(beta), 100, 3);
        CHECK(eqs.size() == 3);
    }
}

TEST_CASE("find_all validates n_starts") {
    CHECK_THROWS_AS(find_all(two_walk_k2(1.0), 0, 1), BadDimension);
}

TEST_CASE("check_conditions on the worked examples") {
    CHECK(check_conditions(equal_beta_repelling(5, 2, 2.0)).c1);
    CHECK_FALSE(check_conditions(equal_beta_repelling(5, 2, 2.1)).c1);
    CHECK_FALSE(check_conditions(equal_beta_repelling(3, 3, 0.6)).c1);  // d != 2

    CHECK(check_conditions(equal_beta_repelling(3, 3, 0.6)).c2);   // 0.6 < 4/6
    CHECK_FALSE(check_conditions(equal_beta_repelling(3, 3, 0.7)).c2);

    const ConditionReport zero =
        check_conditions(InteractionModel(2, 2, std::vector<double>(8, 0.0)));
    CHECK(zero.c3);
    CHECK(zero.c3_margin == 4.0);
    CHECK(zero.dominance_ok);
}

TEST_CASE("c2 implies c3 for the equal-strength family") {
    SplitMix64 rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 2 + static_cast<int>(rng.next_u64() % 3);
        const int d = 2 + static_cast<int>(rng.next_u64() % 3);
        const double beta = 8.0 * rng.next_uniform();
        const ConditionReport rep_c = check_conditions(equal_beta_repelling(m, d, beta));
        if (rep_c.c2) CHECK(rep_c.c3);
    }
}

TEST_CASE("uniqueness and dominance under weak interaction") {
    SplitMix64 rng(17);
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 2 + static_cast<int>(rng.next_u64() % 2);
        const int d = 2 + static_cast<int>(rng.next_u64() % 2);
        const InteractionModel model = random_c3_model(rng, m, d);
        const ConditionReport cond = check_conditions(model);
        REQUIRE(cond.c3);
        CHECK(cond.c3_margin > 0.0);
        CHECK(cond.dominance_ok);
        const auto eqs = find_all(model, 100, 500 + rep);
        CHECK(eqs.size() == 1);
    }
}

TEST_CASE("scalar root: frozen values and the fixed-point cross-check") {
    const double a4 = a_of_beta(4.0);
    CHECK(std::abs(a4 - 0.0212479879613599) < 1e-12);

    // independent oracle: direct fixed-point iteration of t -> 1/(1+e^{4(1-2t)})
    double t = 0.1;
    for (int k = 0; k < 200; ++k) t = 1.0 / (1.0 + std::exp(4.0 * (1.0 - 2.0 * t)));
    CHECK(std::abs(a4 - t) < 1e-12);

    // residual of the full field at the constructed pair point
    const InteractionModel k2 = two_walk_k2(4.0);
    const OccupationPoint pair(2, 2, {a4, 1 - a4, 1 - a4, a4});
    CHECK(field_F(k2, pair).max_abs() < 1e-12);

    CHECK(a_of_beta(2.01) > 0.4);
    CHECK_THROWS_AS(a_of_beta(2.0), OutOfRange);
    CHECK_THROWS_AS(a_of_beta(1.0), OutOfRange);
}

TEST_CASE("scalar root: w_beta equals a_beta and obeys the cubic containment") {
    CHECK(std::abs(w_of_beta(10.0) - 4.54391423829839e-5) < 1e-15);
    CHECK(w_of_beta(10.0) == a_of_beta(10.0));
    for (double beta : {6.0, 8.0, 10.0, 15.0}) {
        CHECK(std::abs(w_of_beta(beta) - a_of_beta(beta)) <= 1e-12);
        CHECK(w_within_cubed_bound(beta));
    }
    CHECK_THROWS_AS(w_of_beta(1.0), NoSmallRoot);

    // grid scan oracle: below the critical strength the gap function has no
    // sign change under 1/2
    for (double beta : {0.5, 1.0, 1.99}) {
        bool sign_change = false;
        double prev = 1e-6 - 1.0 / (1.0 + std::exp(beta * (1.0 - 2e-6)));
        for (int k = 1; k <= 1000; ++k) {
            const double t = 1e-6 + (0.4999 - 1e-6) * k / 1000.0;
            const double g = t - 1.0 / (1.0 + std::exp(beta * (1.0 - 2.0 * t)));
            if ((g < 0) != (prev < 0)) sign_change = true;
            prev = g;
        }
        CHECK_FALSE(sign_change);
    }
}

TEST_CASE("build_S: six distinct stable equilibria") {
    const auto S = build_S(10.0);
    REQUIRE(S.size() == 6);
    const InteractionModel model = three_walk_z(10.0);
    for (std::size_t i = 0; i < S.size(); ++i) {
        CHECK(field_F(model, S[i]).max_abs() < 1e-9);
        CHECK(classify(model, S[i]).classification == Stability::LinearlyStable);
        for (int walk = 0; walk < 3; ++walk)
            CHECK(S[i](walk, 0) + S[i](walk, 1) == doctest::Approx(1.0).epsilon(1e-14));
        for (std::size_t j = i + 1; j < S.size(); ++j)
            CHECK(inf_dist(S[i].flat(), S[j].flat()) > 0.4);
    }
    CHECK_THROWS_AS(build_S(1.0), NoSmallRoot);
}

TEST_CASE("probe_beta0 finds the empirical stability threshold") {
    CHECK(probe_beta0({2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0}) == 5.0);
    CHECK_THROWS_AS(probe_beta0({1.5, 3.0}), OutOfRange);
    CHECK_THROWS_AS(probe_beta0({3.0, 2.5}), OutOfRange);
    CHECK_THROWS_AS(probe_beta0(std::vector<double>{}), OutOfRange);
    // 2.1 sits above the pitchfork but below the stability threshold: the
    // outcome is recorded, not assumed
    CHECK_THROWS_AS(probe_beta0({2.1}), NotFoundOnGrid);
}

TEST_CASE("every returned equilibrium satisfies the residual contract") {
    SplitMix64 rng(19);
    std::vector<InteractionModel> models;
    models.push_back(two_walk_k2(1.0));
    models.push_back(two_walk_k2(4.0));
    models.push_back(three_walk_z(5.0));
    models.push_back(random_c3_model(rng, 3, 2));
    for (const auto& model : models)
        for (const auto& eq : find_all(model, 50, 23)) {
            CHECK(eq.residual < 1e-10);
            // re-evaluate independently of the solver
            CHECK(field_F(model, eq.point).max_abs() < 1e-10);
            CHECK(eq.residual == field_F(model, eq.point).max_abs());
        }
}
