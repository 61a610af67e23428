#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "clarkesat/interval.hpp"
#include "clarkesat/rational.hpp"

namespace clarkesat {

/// Certified enclosure [lo, hi] of a Lebesgue measure (0 <= lo <= hi).
struct MeasureBound {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    bool within(const MeasureBound& outer) const { return outer.lo <= lo && hi <= outer.hi; }
    MeasureBound& operator+=(const MeasureBound& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    friend bool operator==(const MeasureBound&, const MeasureBound&) = default;
};

/// Answer of a finite-depth membership query. In and Out are final; deeper
/// inspection can only turn Undecided into one of them.
enum class Membership { In, Out, Undecided };

/// Smith-Volterra-Cantor type set over a host interval.
///
/// Step n removes an open middle interval of length (1-rho) * L * 2^-(2n+1)
/// from each of the 2^n closed pieces of F_n (L = host length, rho the
/// retained fraction). For rho = 1/2 on [0,1] that is 4^-(n+1) per piece and
/// the limit set has measure 1/2. The set over any host is the affine image
/// of the one over [0,1]. If the host is open at an end, that endpoint is
/// excluded from the set; all other endpoints of cover parts belong to it.
class FatCantorSet {
public:
    static constexpr std::string_view kScheduleId = "canonical-svc";

    explicit FatCantorSet(Interval host, Rational retained_fraction = Rational(1, 2));

    const Interval& host() const { return host_; }
    const Rational& retained_fraction() const { return retained_; }

    /// rho * L, the measure of the limit set.
    Rational limit_measure() const;
    /// Length removed from each piece at step n.
    Rational removal(unsigned step) const;
    /// Length of each of the 2^level pieces of F_level.
    Rational piece_length(unsigned level) const;
    /// measure(F_depth) - limit_measure() = (1-rho) * L * 2^-depth.
    Rational tail(unsigned depth) const;

    /// F_depth as a union of 2^depth closed intervals. Small depths are cached.
    IntervalSet cover(unsigned depth) const;

    /// Closed parts of F_depth that overlap `window` in positive length,
    /// appended to `out` in increasing order.
    void cover_parts_overlapping(const Interval& window, unsigned depth, std::vector<Interval>& out) const;

    Membership membership(const Rational& x, unsigned depth) const;

    /// Enclosure of lambda(F ∩ window) from the depth-`depth` structure.
    /// Pieces lying wholly inside the window contribute their exact share
    /// rho * L * 2^-level; only pieces straddling a window endpoint are
    /// refined down to `depth`, so hi - lo <= tail(depth).
    MeasureBound measure_in(const Interval& window, unsigned depth) const;

    /// "<host> <retained_fraction> canonical-svc"
    std::string str() const;
    static FatCantorSet parse(std::string_view text);

    friend bool operator==(const FatCantorSet& a, const FatCantorSet& b) {
        return a.host_ == b.host_ && a.retained_ == b.retained_;
    }

private:
    struct CoverCache;

    Interval host_;
    Rational retained_;
    std::shared_ptr<CoverCache> cache_;
};

// Free-function spellings of the set queries.
inline IntervalSet svc_cover(const FatCantorSet& c, unsigned depth) { return c.cover(depth); }
inline Membership svc_membership(const FatCantorSet& c, const Rational& x, unsigned depth) {
    return c.membership(x, depth);
}
inline MeasureBound svc_measure_in(const FatCantorSet& c, const Interval& window, unsigned depth) {
    return c.measure_in(window, depth);
}

} // namespace clarkesat
