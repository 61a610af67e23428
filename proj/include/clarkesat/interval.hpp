#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clarkesat/rational.hpp"

namespace clarkesat {

/// Real interval with exact endpoints and explicit closure at each end.
///
/// lo == hi is allowed: a closed singleton {lo}, or empty if either end is
/// open. "Nontrivial" means lo < hi.
struct Interval {
    Rational lo;
    Rational hi;
    bool lo_closed = true;
    bool hi_closed = true;

    Interval() = default;
    Interval(Rational lo, Rational hi, bool lo_closed = true, bool hi_closed = true);

    static Interval closed(Rational lo, Rational hi) { return {std::move(lo), std::move(hi), true, true}; }
    static Interval open(Rational lo, Rational hi) { return {std::move(lo), std::move(hi), false, false}; }

    bool empty() const { return lo == hi && !(lo_closed && hi_closed); }
    bool nontrivial() const { return lo < hi; }
    Rational length() const { return hi - lo; }
    Rational midpoint() const { return (lo + hi) / Rational(2); }

    bool contains(const Rational& x) const;
    /// True if every point of `other` lies in this interval.
    bool contains(const Interval& other) const;

    Interval closure() const { return {lo, hi, true, true}; }
    Interval translated(const Rational& by) const { return {lo + by, hi + by, lo_closed, hi_closed}; }

    /// "[p/q,r/s]" with brackets reflecting closure.
    std::string str() const;
    static Interval parse(std::string_view text);

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Intersection of two intervals; may be empty.
Interval intersect(const Interval& a, const Interval& b);

/// Finite union of pairwise disjoint, non-adjacent intervals, sorted by lo.
///
/// Construction normalizes: empty parts are dropped, overlapping parts and
/// parts that touch with compatible closure ([a,b] and (b,c)) are merged.
/// The representation is canonical, so operator== is set equality.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> parts);
    IntervalSet(std::initializer_list<Interval> parts) : IntervalSet(std::vector<Interval>(parts)) {}
    explicit IntervalSet(Interval single) : IntervalSet(std::vector<Interval>{std::move(single)}) {}

    /// Adopts parts that are already sorted, disjoint and non-adjacent.
    static IntervalSet from_sorted(std::vector<Interval> parts);

    std::span<const Interval> parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    std::size_t size() const { return parts_.size(); }

    bool contains(const Rational& x) const;
    bool is_subset_of(const Interval& host) const;

    std::string str() const;
    static IntervalSet parse(std::string_view text);

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<Interval> parts_;
};

/// Exact Lebesgue measure. Closure flags do not matter.
Rational measure(const IntervalSet& s);
IntervalSet intersect(const IntervalSet& s, const IntervalSet& t);
IntervalSet unite(const IntervalSet& s, const IntervalSet& t);
/// host \ s. Throws DomainError unless s is a subset of host.
IntervalSet complement_within(const IntervalSet& s, const Interval& host);

} // namespace clarkesat
