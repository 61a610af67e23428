#include "clarkesat/fat_cantor.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "clarkesat/errors.hpp"

namespace clarkesat {

namespace {

constexpr unsigned kMaxCachedDepth = 16;

// Length of the overlap of closed [a,b] with the closure of w (0 if disjoint).
Rational overlap_length(const Rational& a, const Rational& b, const Interval& w) {
    const Rational& lo = max(a, w.lo);
    const Rational& hi = min(b, w.hi);
    return lo < hi ? hi - lo : Rational();
}

} // namespace

struct FatCantorSet::CoverCache {
    std::mutex mutex;
    std::map<unsigned, IntervalSet> covers;
};

FatCantorSet::FatCantorSet(Interval host, Rational retained_fraction)
    : host_(std::move(host)), retained_(std::move(retained_fraction)),
      cache_(std::make_shared<CoverCache>()) {
    if (!host_.nontrivial())
        throw DomainError("fat Cantor set needs a nontrivial host, got " + host_.str());
    if (retained_ <= Rational(0) || retained_ >= Rational(1))
        throw DomainError("retained fraction must lie in (0,1), got " + retained_.str());
}

Rational FatCantorSet::limit_measure() const { return retained_ * host_.length(); }

Rational FatCantorSet::removal(unsigned step) const {
    return (Rational(1) - retained_) * host_.length() * Rational::pow2(-(2 * static_cast<long>(step) + 1));
}

Rational FatCantorSet::piece_length(unsigned level) const {
    const Rational scale = Rational::pow2(-static_cast<long>(level));
    return host_.length() * (retained_ + (Rational(1) - retained_) * scale) * scale;
}

Rational FatCantorSet::tail(unsigned depth) const {
    return (Rational(1) - retained_) * host_.length() * Rational::pow2(-static_cast<long>(depth));
}

IntervalSet FatCantorSet::cover(unsigned depth) const {
    if (depth <= kMaxCachedDepth) {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->covers.find(depth); it != cache_->covers.end())
            return it->second;
    }
    std::vector<Rational> lefts{host_.lo};
    for (unsigned n = 0; n < depth; ++n) {
        const Rational shift = piece_length(n + 1) + removal(n);
        std::vector<Rational> next;
        next.reserve(lefts.size() * 2);
        for (auto& l : lefts) {
            Rational r = l + shift;
            next.push_back(std::move(l));
            next.push_back(std::move(r));
        }
        lefts = std::move(next);
    }
    const Rational len = piece_length(depth);
    std::vector<Interval> parts;
    parts.reserve(lefts.size());
    for (auto& l : lefts) {
        Rational r = l + len;
        parts.emplace_back(std::move(l), std::move(r));
    }
    IntervalSet result = IntervalSet::from_sorted(std::move(parts));
    if (depth <= kMaxCachedDepth) {
        std::lock_guard lock(cache_->mutex);
        cache_->covers.emplace(depth, result);
    }
    return result;
}

void FatCantorSet::cover_parts_overlapping(const Interval& window, unsigned depth,
                                           std::vector<Interval>& out) const {
    struct Frame {
        Rational left;
        unsigned level;
    };
    std::vector<Frame> stack{{host_.lo, 0}};
    std::vector<Rational> lengths;
    for (unsigned n = 0; n <= depth; ++n)
        lengths.push_back(piece_length(n));
    // Depth-first, right child pushed first so parts come out in order.
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const Rational right = f.left + lengths[f.level];
        if (overlap_length(f.left, right, window).is_zero())
            continue;
        if (f.level == depth) {
            out.emplace_back(std::move(f.left), right);
            continue;
        }
        Rational right_child = f.left + lengths[f.level + 1] + removal(f.level);
        stack.push_back({std::move(right_child), f.level + 1});
        stack.push_back({std::move(f.left), f.level + 1});
    }
}

Membership FatCantorSet::membership(const Rational& x, unsigned depth) const {
    if (x == host_.lo)
        return host_.lo_closed ? Membership::In : Membership::Out;
    if (x == host_.hi)
        return host_.hi_closed ? Membership::In : Membership::Out;
    if (x < host_.lo || x > host_.hi)
        return Membership::Out;
    Rational left = host_.lo;
    for (unsigned n = 0; n < depth; ++n) {
        const Rational gap_lo = left + piece_length(n + 1);
        const Rational gap_hi = gap_lo + removal(n);
        if (x == gap_lo || x == gap_hi)
            return Membership::In;
        if (gap_lo < x && x < gap_hi)
            return Membership::Out;
        if (x > gap_hi)
            left = gap_hi;
        // Endpoints of the current piece are checked one level up, or are host ends.
    }
    return Membership::Undecided;
}

MeasureBound FatCantorSet::measure_in(const Interval& window, unsigned depth) const {
    MeasureBound bound;
    const Rational full = limit_measure();
    std::vector<Rational> partial{host_.lo};
    for (unsigned n = 0; !partial.empty(); ++n) {
        const Rational len = piece_length(n);
        const Rational share = full * Rational::pow2(-static_cast<long>(n));
        std::vector<Rational> next;
        for (auto& l : partial) {
            const Rational r = l + len;
            const Rational overlap = overlap_length(l, r, window);
            if (overlap.is_zero())
                continue;
            if (overlap == len) {
                bound.lo += share;
                bound.hi += share;
                continue;
            }
            if (n == depth) {
                const Rational outside_f = len - share;
                if (overlap > outside_f)
                    bound.lo += overlap - outside_f;
                bound.hi += overlap;
                continue;
            }
            Rational right_child = l + piece_length(n + 1) + removal(n);
            next.push_back(std::move(l));
            next.push_back(std::move(right_child));
        }
        partial = std::move(next);
    }
    return bound;
}

std::string FatCantorSet::str() const {
    return host_.str() + " " + retained_.str() + " " + std::string(kScheduleId);
}

FatCantorSet FatCantorSet::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string host, fraction, schedule, extra;
    if (!(in >> host >> fraction >> schedule) || (in >> extra))
        throw ParseError("fat Cantor record needs '<host> <fraction> <schedule>': '" + std::string(text) + "'");
    if (schedule != kScheduleId)
        throw ParseError("unknown removal schedule '" + schedule + "'");
    return FatCantorSet(Interval::parse(host), Rational::parse(fraction));
}

} // namespace clarkesat
