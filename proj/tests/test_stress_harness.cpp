#include <doctest.h>

#include <algorithm>

#include "clarkesat/errors.hpp"
#include "clarkesat/stress_harness.hpp"

using namespace clarkesat;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return Rational(p, d); }

std::shared_ptr<const SplittingPartition> part30() {
    static const auto p = std::make_shared<const SplittingPartition>(SplittingPartition::build(30));
    return p;
}

} // namespace

TEST_CASE("step schedule") {
    const StepSchedule s{q(1, 4)};
    CHECK(s.at(1) == q(1, 4));
    CHECK(s.at(4) == q(1, 8));
    CHECK(s.at(16) == q(1, 16));
    const Rational two = s.at(2);
    // floor(2^30 / sqrt 2) / 2^30 is within 2^-30 of 1/sqrt 2.
    const Rational r = two * q(4);
    CHECK(r * r <= q(1, 2));
    CHECK((r + Rational::pow2(-30)) * (r + Rational::pow2(-30)) > q(1, 2));
    CHECK_THROWS_AS(s.at(0), DomainError);
}

TEST_CASE("mu = 0 and zero steps give constant trajectories") {
    const SaturatedFunction zero(part30(), CoefficientSource::parse("zero"), 2);
    const Point start{q(1, 3), q(2, 3)};
    for (const auto& x : run_subgradient(zero, start, 10, StepSchedule{}))
        CHECK(x.x == start);
    const SaturatedFunction f(part30(), CoefficientSource::unit(0), 1);
    const auto still = run_subgradient(f, {q(1, 2)}, 10, StepSchedule{q(0)});
    CHECK(still.size() == 11);
    for (const auto& x : still)
        CHECK(x.x == Point{q(1, 2)});
}

TEST_CASE("mu = e0: every certified iterate is stationary") {
    const SaturatedFunction f(part30(), CoefficientSource::unit(0), 1);
    const auto traj = run_subgradient(f, {q(1, 3)}, 100, StepSchedule{});
    REQUIRE(traj.size() == 101);
    unsigned certified = 0;
    for (const auto& t : traj) {
        if (t.gap) {
            CHECK(*t.gap == q(0));
            ++certified;
        }
        // Values stay within ||mu|| * diam(U).
        CHECK(t.value.lo >= -lipschitz_norm(f) * f.domain().diameter_l1());
        CHECK(t.value.hi <= lipschitz_norm(f) * f.domain().diameter_l1());
        CHECK(f.domain().contains(t.x));
    }
    CHECK(100 * certified >= 95 * traj.size());
    // Deterministic.
    const auto again = run_subgradient(f, {q(1, 3)}, 100, StepSchedule{});
    CHECK(trajectory_csv(again) == trajectory_csv(traj));
}

TEST_CASE("oracle resolves undecided coordinates to 0") {
    const SaturatedFunction f(part30(), CoefficientSource::parse("0:3,1:-5"), 2);
    const Rational gap_mid = part30()->stage(1).sets[0].set.host().midpoint();
    const auto o = oracle(f, {gap_mid, q(1, 2)}, q(1, 1000), 64);
    CHECK(o.undecided[0]);
    CHECK(o.gradient[0] == q(0));
    for (const auto& v : o.gradient)
        CHECK(v.abs() <= f.mu().sup_norm());
}

TEST_CASE("iterates stay inside the shrunk domain") {
    const SaturatedFunction f(part30(), CoefficientSource::unit(0), 1, Box::parse("0:1/10"));
    const auto traj = run_subgradient(f, {q(1, 20)}, 30, StepSchedule{q(1)});
    for (const auto& t : traj) {
        CHECK(t.x[0] >= q(1, 10240));
        CHECK(t.x[0] <= q(1, 10) - q(1, 10240));
    }
    CHECK_THROWS_AS(run_subgradient(f, {q(1, 2)}, 3, StepSchedule{}), DomainError);
}

TEST_CASE("trajectory csv") {
    const SaturatedFunction f(part30(), CoefficientSource::unit(0), 2);
    const auto traj = run_subgradient(f, f.x0(), 2, StepSchedule{});
    const std::string csv = trajectory_csv(traj);
    CHECK(csv.rfind("t,x1,x2,f_lo,f_hi,gap\n", 0) == 0);
    CHECK(csv.find("0,1/2,1/2,0/1,0/1,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
