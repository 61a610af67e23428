#include <doctest.h>

#include <set>
#include <sstream>
#include <thread>

#include "clarkesat/errors.hpp"
#include "clarkesat/splitting_partition.hpp"
#include "support.hpp"

using namespace clarkesat;
using testsupport::Gen;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return Rational(p, d); }

const SplittingPartition& p20() {
    static const SplittingPartition p = SplittingPartition::build(20);
    return p;
}

Rational cantor_point(const FatCantorSet& s) { return s.host().lo + s.piece_length(1); }

} // namespace

TEST_CASE("enumeration order and inverse") {
    CHECK(RationalIntervalEnumeration::at(1) == Interval::open(q(0), q(1)));
    CHECK(RationalIntervalEnumeration::at(2) == Interval::open(q(0), q(1, 2)));
    CHECK(RationalIntervalEnumeration::at(3) == Interval::open(q(1, 2), q(1)));
    CHECK(RationalIntervalEnumeration::at(4) == Interval::open(q(0), q(1, 3)));
    CHECK(RationalIntervalEnumeration::at(11) == Interval::open(q(1, 3), q(1, 2)));
    CHECK_THROWS_AS(RationalIntervalEnumeration::at(0), DomainError);
    std::set<std::pair<Rational, Rational>> seen;
    for (std::size_t i = 1; i <= 3000; ++i) {
        const Interval I = RationalIntervalEnumeration::at(i);
        CHECK(I == Interval::open(I.lo, I.hi));
        CHECK(q(0) <= I.lo);
        CHECK(I.lo < I.hi);
        CHECK(I.hi <= q(1));
        CHECK(seen.insert({I.lo, I.hi}).second);
        CHECK(RationalIntervalEnumeration::index_of(I) == i);
    }
    // Every interval with small denominators shows up early.
    for (std::int64_t b = 1; b <= 12; ++b)
        for (std::int64_t a = 0; a < b; ++a)
            for (std::int64_t c = a + 1; c <= b; ++c) {
                const Interval I = Interval::open(q(a, b), q(c, b));
                CHECK(RationalIntervalEnumeration::at(RationalIntervalEnumeration::index_of(I)) == I);
            }
    CHECK_THROWS_AS(RationalIntervalEnumeration::index_of(Interval::closed(q(0), q(1))), DomainError);
}

TEST_CASE("find_gap examples") {
    const auto none = find_gap({}, Interval::open(q(0), q(1)));
    CHECK(none.gap == Interval::open(q(0), q(1)));
    CHECK(none.depth == 0);
    const std::vector<FatCantorSet> prior{FatCantorSet(Interval::open(q(0), q(1)))};
    const auto first = find_gap(prior, Interval::open(q(0), q(1)));
    CHECK(first.gap == Interval::open(q(3, 8), q(5, 8)));
    CHECK(first.depth == 1);
    const auto left = find_gap(prior, Interval::open(q(0), q(3, 8)));
    CHECK(left.depth >= 2);
    CHECK(left.gap == Interval::open(q(5, 32), q(7, 32)));
    CHECK_THROWS_AS(find_gap(prior, Interval::open(q(1), q(1))), DomainError);
}

TEST_CASE("one stage") {
    const auto p = SplittingPartition::build(1, q(1, 2));
    REQUIRE(p.stage_count() == 1);
    const StageRecord& s = p.stage(1);
    REQUIRE(s.sets.size() == 2);
    CHECK(s.sets[0].kind == SetKind::T);
    CHECK(s.sets[0].k == 1);
    CHECK(s.sets[1].kind == SetKind::B);
    CHECK(Interval::open(q(0), q(1)).contains(s.gap));
    CHECK(s.gap.length() <= q(1, 4));
    CHECK(s.sets[0].set.host() == Interval::open(s.gap.lo, s.gap.midpoint()));
    CHECK(s.sets[1].set.host() == Interval::open(s.gap.midpoint(), s.gap.hi));
    CHECK_THROWS_AS(SplittingPartition::build(0), DomainError);
    CHECK_THROWS_AS(SplittingPartition::build(3, q(0)), DomainError);
    CHECK_THROWS_AS(SplittingPartition::build(3, q(3, 2)), DomainError);
}

TEST_CASE("stage invariants at 20 stages") {
    const auto& p = p20();
    std::vector<Interval> hosts;
    std::vector<const FatCantorSet*> sets;
    for (const auto& st : p.stages()) {
        CHECK(RationalIntervalEnumeration::at(st.n).contains(st.gap));
        CHECK(st.gap.length() <= p.gap_cap() * Rational::pow2(-static_cast<long>(st.n)));
        REQUIRE(st.sets.size() == st.n + 1);
        const Rational piece = st.gap.length() / Rational(st.n + 1);
        for (unsigned i = 0; i < st.sets.size(); ++i) {
            const auto& s = st.sets[i];
            CHECK(s.set.host() == Interval::open(st.gap.lo + piece * Rational(i), st.gap.lo + piece * Rational(i + 1)));
            CHECK(s.set.limit_measure() > q(0));
            CHECK(s.label() == (i < st.n ? i + 1 : 0));
        }
        // The gap avoids every earlier set's cover at the recorded depth.
        for (const auto* prior : sets)
            CHECK(intersect(prior->cover(st.depth_used), IntervalSet{st.gap}).empty());
        for (const auto& s : st.sets) {
            hosts.push_back(s.set.host());
            sets.push_back(&s.set);
        }
    }
    for (std::size_t i = 0; i < hosts.size(); ++i)
        for (std::size_t j = i + 1; j < hosts.size(); ++j)
            CHECK_FALSE(intersect(hosts[i], hosts[j]).nontrivial());
    CHECK(p.set_count() == hosts.size());
}

TEST_CASE("determinism and prefix-preserving extension") {
    CHECK(SplittingPartition::build(12).to_text() == SplittingPartition::build(12).to_text());
    CHECK(SplittingPartition::build(7).extended(15) == SplittingPartition::build(15));
    const auto longer = p20().extended(40);
    for (unsigned n = 1; n <= 20; ++n)
        CHECK(longer.stage(n) == p20().stage(n));
}

TEST_CASE("unbuilt tails bound the later stages") {
    const auto longer = p20().extended(60);
    Rational all;
    for (unsigned k = 0; k <= 25; ++k) {
        Rational later;
        for (unsigned n = 21; n <= 60; ++n)
            for (const auto& s : longer.stage(n).sets)
                if (s.kind == SetKind::T && s.k == k)
                    later += s.set.limit_measure();
        CHECK(later <= p20().unbuilt_tail(k));
    }
    for (unsigned n = 21; n <= 60; ++n)
        for (const auto& s : longer.stage(n).sets)
            if (s.kind == SetKind::T)
                all += s.set.limit_measure();
    CHECK(all <= p20().unbuilt_tail_all());
}

TEST_CASE("membership examples") {
    const auto& p = p20();
    const auto& t11 = p.stage(1).sets[0].set;
    const auto m = p.membership(cantor_point(t11), 8);
    CHECK(m.kind == PartitionMembership::Kind::InA);
    CHECK(m.k == 1);
    CHECK(m.stage == 1);
    const auto b = p.membership(cantor_point(p.stage(3).sets.back().set), 8);
    CHECK(b.kind == PartitionMembership::Kind::InB);
    CHECK(b.member() == 0u);
    // The open host endpoint is no Cantor point; it is certified in A_0.
    const auto edge = p.membership(t11.host().lo, 8);
    CHECK(edge.member() == 0u);
    // Inside the first removed gap of T_1^(1): nothing decides it at this stage count.
    const Rational inside_gap = t11.host().midpoint();
    CHECK_FALSE(p.membership(inside_gap, 64).decided());
    // Modulo 1.
    CHECK(p.membership(cantor_point(t11) + q(3), 8) == m);
    CHECK(p.membership(cantor_point(t11) - q(2), 8) == m);
}

TEST_CASE("property: membership is sound and never retracted") {
    const auto& p = p20();
    Gen g(301);
    std::vector<Rational> pts;
    for (const auto& st : p.stages())
        for (const auto& s : st.sets) {
            pts.push_back(cantor_point(s.set));
            pts.push_back(s.set.host().lo + s.set.piece_length(3));
        }
    for (int i = 0; i < 300; ++i)
        pts.push_back(g.unit(1 << 14));
    for (const auto& x : pts) {
        std::optional<unsigned> first;
        for (unsigned depth : {1u, 4u, 16u, 64u}) {
            const auto m = p.membership(x, depth);
            if (first) {
                CHECK(m.member() == first);
            } else if (m.decided()) {
                first = m.member();
            }
            // Brute force over all sets: at most one can claim x, and it is the answer.
            unsigned claims = 0;
            for (const auto& st : p.stages())
                for (const auto& s : st.sets)
                    if (s.set.membership(x, depth) == Membership::In) {
                        ++claims;
                        CHECK(m.member() == s.label());
                    }
            CHECK(claims <= 1);
        }
    }
}

TEST_CASE("measure_in examples") {
    const auto& p = p20();
    const MeasureBound b = p.measure_in(1, Interval(q(0), q(1), true, false), q(1, 4));
    CHECK(b.lo >= p.stage(1).sets[0].set.limit_measure());
    CHECK(b.width() <= q(1, 4));
    // A member without built sets in the window.
    const MeasureBound none = p.measure_in(20, Interval::closed(q(0), q(1, 1000)), q(1, 1000));
    CHECK(none.lo == q(0));
    CHECK(none.hi <= p.unbuilt_tail(20));
    CHECK_THROWS_AS(p.measure_in(1, Interval::closed(q(0), q(1)), Rational(1) / Rational(1000000000000LL)), ToleranceExhausted);
    CHECK_THROWS_AS(p.measure_in(1, Interval::closed(q(0), q(2)), q(1, 4)), DomainError);
    CHECK_THROWS_AS(p.measure_in(1, Interval::closed(q(0), q(1)), q(0)), DomainError);
}

TEST_CASE("property: measure bounds against cover oracle and additivity") {
    const auto& p = p20();
    Gen g(302);
    const unsigned D = 10;
    for (int trial = 0; trial < 40; ++trial) {
        const Interval w = g.interval_in(q(0), q(1), 200);
        const IntervalSet ws{w};
        for (unsigned k = 0; k <= 6; ++k) {
            const MeasureBound b = p.measure_at_depth(k, w, 12);
            CHECK(q(0) <= b.lo);
            CHECK(b.lo <= b.hi);
            if (k == 0)
                continue;
            // Oracle enclosure of lambda(A_k ∩ w) from explicit covers.
            Rational over, exact_inside;
            Rational under;
            for (const SetRef& r : p.sets_with_label(k)) {
                const FatCantorSet& s = p.set(r).set;
                const Rational m = measure(intersect(s.cover(D), ws));
                over += m;
                under += max(Rational(0), m - s.tail(D));
                if (w.closure().contains(s.host()))
                    exact_inside += s.limit_measure();
            }
            over += p.unbuilt_tail(k);
            CHECK(b.lo <= over);
            CHECK(under <= b.hi);
            CHECK(exact_inside <= b.lo);
            const MeasureBound t = p.measure_in(k, w, q(1, 100000));
            CHECK(t.width() <= q(1, 100000));
            CHECK(t.lo <= over);
            CHECK(under <= t.hi);
        }
        for (unsigned depth : {4u, 12u}) {
            Rational lo, hi;
            for (const auto& m : p.measure_profile(w, depth)) {
                lo += m.lo;
                hi += m.hi;
            }
            CHECK(lo <= w.length());
            CHECK(w.length() <= hi);
        }
    }
}

TEST_CASE("splitting certificates") {
    const auto& p = p20();
    const Interval unit = Interval::open(q(0), q(1));
    const auto c1 = p.splitting_certificate(1, unit);
    CHECK(c1.member_witness.stage == 1);
    CHECK(c1.member_lower_bound == p.stage(1).sets[0].set.limit_measure());
    CHECK(c1.complement_lower_bound > q(0));
    CHECK(p.set(c1.complement_witness).label() != 1);
    const auto c0 = p.splitting_certificate(0, unit);
    CHECK(p.set(c0.member_witness).kind == SetKind::B);
    CHECK(c0.member_lower_bound > q(0));
    CHECK_THROWS_AS(p.splitting_certificate(1, Interval::open(q(1, 3), q(1, 3) + q(1, 1000000000))), NotYetCovered);
    CHECK_THROWS_AS(p.splitting_certificate(25, unit), NotYetCovered);
}

TEST_CASE("auto extension") {
    SplittingPartition p = SplittingPartition::build(3);
    const auto cert = with_auto_extension(p, 200, [](const SplittingPartition& q) {
        return q.splitting_certificate(9, Interval::open(Rational(0), Rational(1)));
    });
    CHECK(p.stage_count() >= 9);
    CHECK(p.set(cert.member_witness).label() == 9);
    SplittingPartition small = SplittingPartition::build(2);
    CHECK_THROWS_AS(with_auto_extension(small, 5,
                                        [](const SplittingPartition& q) {
                                            return q.splitting_certificate(9, Interval::open(Rational(0), Rational(1)));
                                        }),
                    NotYetCovered);
    CHECK(small.stage_count() == 5);
}

TEST_CASE("SPLITPART round trip and validation") {
    const auto& p = p20();
    const std::string text = p.to_text();
    CHECK(text.rfind("SPLITPART v1\n", 0) == 0);
    const auto back = SplittingPartition::from_text(text);
    CHECK(back == p);
    CHECK(back.to_text() == text);
    std::ostringstream out;
    p.save(out);
    CHECK(out.str() == text);

    CHECK_THROWS_AS(SplittingPartition::from_text("SPLITPART v2\n"), ParseError);
    CHECK_THROWS_AS(SplittingPartition::from_text(text.substr(0, text.size() / 2)), ParseError);
    // Move the first stage's gap outside I_1 = (0,1).
    std::string bad = SplittingPartition::build(1).to_text();
    const auto pos = bad.find("\n1 ");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos + 3, 0, "-");
    CHECK_THROWS_AS(SplittingPartition::from_text(bad), ParseError);
}

TEST_CASE("concurrent queries agree") {
    const auto& p = p20();
    Gen g(303);
    std::vector<Rational> xs;
    for (int i = 0; i < 200; ++i)
        xs.push_back(g.unit());
    std::vector<std::vector<PartitionMembership>> results(3);
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < 3; ++t)
        threads.emplace_back([&, t] {
            for (const auto& x : xs)
                results[t].push_back(p.membership(x, 32));
        });
    for (auto& t : threads)
        t.join();
    CHECK(results[0] == results[1]);
    CHECK(results[1] == results[2]);
}
