#include <doctest.h>

#include <algorithm>
#include <set>

#include "clarkesat/errors.hpp"
#include "clarkesat/interval.hpp"
#include "support.hpp"

using namespace clarkesat;
using testsupport::Gen;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return Rational(p, d); }

IntervalSet random_set(Gen& g, int max_parts = 5) {
    std::vector<Interval> parts;
    const int n = static_cast<int>(g.integer(0, max_parts));
    for (int i = 0; i < n; ++i)
        parts.push_back(g.interval_in(q(0), q(1), 16));
    return IntervalSet(parts);
}

// Every endpoint and every midpoint between consecutive endpoints: enough to
// decide equality of two finite interval unions pointwise.
std::vector<Rational> probe_points(std::initializer_list<const IntervalSet*> sets) {
    std::set<Rational> ends;
    for (const auto* s : sets)
        for (const auto& p : s->parts()) {
            ends.insert(p.lo);
            ends.insert(p.hi);
        }
    std::vector<Rational> pts(ends.begin(), ends.end());
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        pts.push_back((pts[i] + pts[i + 1]) / q(2));
    pts.push_back(q(-1));
    pts.push_back(q(2));
    return pts;
}

// Sweep oracle: length of the elementary segments whose midpoints are in s.
Rational sweep_measure(const IntervalSet& s) {
    std::set<Rational> ends;
    for (const auto& p : s.parts()) {
        ends.insert(p.lo);
        ends.insert(p.hi);
    }
    std::vector<Rational> e(ends.begin(), ends.end());
    Rational total;
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
        if (s.contains((e[i] + e[i + 1]) / q(2)))
            total += e[i + 1] - e[i];
    return total;
}

void check_well_formed(const IntervalSet& s) {
    const auto parts = s.parts();
    for (std::size_t i = 0; i < parts.size(); ++i) {
        CHECK_FALSE(parts[i].empty());
        if (i + 1 < parts.size()) {
            CHECK(parts[i].hi <= parts[i + 1].lo);
            if (parts[i].hi == parts[i + 1].lo)
                CHECK((!parts[i].hi_closed && !parts[i + 1].lo_closed));
        }
    }
}

} // namespace

TEST_CASE("rational canonical form and text") {
    CHECK(Rational::parse("3/6").str() == "1/2");
    CHECK(Rational::parse("-4").str() == "-4/1");
    CHECK_THROWS_AS(Rational::parse("6/-4"), ParseError);
    CHECK(Rational::parse("-6/4") == q(-3, 2));
    CHECK(Rational().str() == "0/1");
    CHECK_THROWS_AS(Rational::parse("1.5"), ParseError);
    CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
    CHECK_THROWS_AS(Rational::parse(""), ParseError);
    CHECK_THROWS_AS(q(1) / q(0), std::domain_error);
    CHECK(q(1, 3) + q(1, 6) == q(1, 2));
    CHECK(q(-7, 2).floor() == -4);
    CHECK(Rational::pow2(-3) == q(1, 8));
    CHECK(q(1, 3) < q(1, 2));
}

TEST_CASE("measure examples") {
    CHECK(measure(IntervalSet{}) == q(0));
    CHECK(measure(IntervalSet{Interval::closed(q(0), q(3, 8)), Interval::closed(q(5, 8), q(1))}) == q(3, 4));
    CHECK(measure(IntervalSet{Interval::closed(q(0), q(1))}) == q(1));
}

TEST_CASE("intersect examples") {
    const IntervalSet unit{Interval::closed(q(0), q(1))};
    CHECK(intersect(unit, IntervalSet{Interval::closed(q(1, 2), q(2))}) ==
          IntervalSet{Interval::closed(q(1, 2), q(1))});
    CHECK(intersect(unit, IntervalSet{}).empty());
    const IntervalSet f1{Interval::closed(q(0), q(3, 8)), Interval::closed(q(5, 8), q(1))};
    CHECK(intersect(f1, IntervalSet{Interval::closed(q(1, 4), q(3, 4))}) ==
          IntervalSet{Interval::closed(q(1, 4), q(3, 8)), Interval::closed(q(5, 8), q(3, 4))});
}

TEST_CASE("complement_within examples") {
    const Interval unit = Interval::closed(q(0), q(1));
    CHECK(complement_within(IntervalSet{}, unit) == IntervalSet{unit});
    const IntervalSet f1{Interval::closed(q(0), q(3, 8)), Interval::closed(q(5, 8), q(1))};
    CHECK(complement_within(f1, unit) == IntervalSet{Interval::open(q(3, 8), q(5, 8))});
    CHECK(complement_within(IntervalSet{unit}, unit).empty());
    CHECK_THROWS_AS(complement_within(IntervalSet{Interval::closed(q(0), q(2))}, unit), DomainError);
}

TEST_CASE("normalization merges touching compatible parts") {
    const IntervalSet s{Interval(q(1, 2), q(1), false, false), Interval::closed(q(0), q(1, 2))};
    REQUIRE(s.size() == 1);
    CHECK(s.parts()[0] == Interval(q(0), q(1), true, false));
    // (0,1/2) and (1/2,1) do not touch: 1/2 is missing.
    const IntervalSet t{Interval::open(q(0), q(1, 2)), Interval::open(q(1, 2), q(1))};
    CHECK(t.size() == 2);
    CHECK_FALSE(t.contains(q(1, 2)));
    CHECK(IntervalSet{Interval::open(q(1), q(1))}.empty());
}

TEST_CASE("text round trip") {
    const IntervalSet s{Interval(q(-1, 3), q(0), true, false), Interval::closed(q(5, 8), q(1))};
    CHECK(s.str() == "[-1/3,0/1) [5/8,1/1]");
    CHECK(IntervalSet::parse(s.str()) == s);
    CHECK(Interval::parse("(1/2,3/4]") == Interval(q(1, 2), q(3, 4), false, true));
    CHECK_THROWS_AS(Interval::parse("[1,0]"), std::exception);
    CHECK_THROWS_AS(IntervalSet::parse("[0/1,1/2"), ParseError);
}

TEST_CASE("property: inclusion-exclusion and sweep oracle") {
    Gen g(101);
    for (int trial = 0; trial < 300; ++trial) {
        const IntervalSet s = random_set(g), t = random_set(g);
        const IntervalSet u = unite(s, t), i = intersect(s, t);
        check_well_formed(u);
        check_well_formed(i);
        CHECK(measure(u) + measure(i) == measure(s) + measure(t));
        CHECK(measure(s) == sweep_measure(s));
        CHECK(measure(u) == sweep_measure(u));
        for (const auto& x : probe_points({&s, &t})) {
            CHECK(u.contains(x) == (s.contains(x) || t.contains(x)));
            CHECK(i.contains(x) == (s.contains(x) && t.contains(x)));
        }
    }
}

TEST_CASE("property: union is order independent") {
    Gen g(102);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<IntervalSet> sets;
        for (int i = 0; i < 5; ++i)
            sets.push_back(random_set(g, 3));
        IntervalSet base;
        for (const auto& s : sets)
            base = unite(base, s);
        for (int perm = 0; perm < 5; ++perm) {
            for (std::size_t i = sets.size() - 1; i > 0; --i)
                std::swap(sets[i], sets[static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(i)))]);
            IntervalSet acc;
            for (const auto& s : sets)
                acc = unite(s, acc);
            CHECK(acc == base);
        }
    }
}

TEST_CASE("property: complement within a host") {
    Gen g(103);
    const Interval host = Interval::closed(q(0), q(1));
    for (int trial = 0; trial < 200; ++trial) {
        const IntervalSet s = random_set(g);
        const IntervalSet c = complement_within(s, host);
        check_well_formed(c);
        CHECK(measure(c) == measure(IntervalSet{host}) - measure(s));
        CHECK(intersect(s, c).empty());
        CHECK(unite(s, c) == IntervalSet{host});
        const IntervalSet back = complement_within(c, host);
        CHECK(back == s);
    }
}
