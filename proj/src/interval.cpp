#include "clarkesat/interval.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "clarkesat/errors.hpp"

namespace clarkesat {

Interval::Interval(Rational lo_, Rational hi_, bool lo_closed_, bool hi_closed_)
    : lo(std::move(lo_)), hi(std::move(hi_)), lo_closed(lo_closed_), hi_closed(hi_closed_) {
    if (hi < lo)
        throw DomainError("interval with lo > hi: " + lo.str() + " > " + hi.str());
}

bool Interval::contains(const Rational& x) const {
    const bool above = lo_closed ? lo <= x : lo < x;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

bool Interval::contains(const Interval& other) const {
    if (other.empty())
        return true;
    const bool lo_ok = lo < other.lo || (lo == other.lo && (lo_closed || !other.lo_closed));
    const bool hi_ok = other.hi < hi || (other.hi == hi && (hi_closed || !other.hi_closed));
    return lo_ok && hi_ok;
}

std::string Interval::str() const {
    return std::string(lo_closed ? "[" : "(") + lo.str() + "," + hi.str() + (hi_closed ? "]" : ")");
}

Interval Interval::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.size() < 5)
        throw ParseError("malformed interval '" + std::string(text) + "'");
    const char open_c = text.front();
    const char close_c = text.back();
    if ((open_c != '[' && open_c != '(') || (close_c != ']' && close_c != ')'))
        throw ParseError("interval must be bracketed: '" + std::string(text) + "'");
    const std::string_view body = text.substr(1, text.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos)
        throw ParseError("interval needs exactly one comma: '" + std::string(text) + "'");
    Rational lo = Rational::parse(body.substr(0, comma));
    Rational hi = Rational::parse(body.substr(comma + 1));
    if (hi < lo)
        throw ParseError("interval with lo > hi: '" + std::string(text) + "'");
    return {std::move(lo), std::move(hi), open_c == '[', close_c == ']'};
}

Interval intersect(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo > b.lo) {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed;
    } else if (b.lo > a.lo) {
        r.lo = b.lo;
        r.lo_closed = b.lo_closed;
    } else {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed && b.lo_closed;
    }
    if (a.hi < b.hi) {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed;
    } else if (b.hi < a.hi) {
        r.hi = b.hi;
        r.hi_closed = b.hi_closed;
    } else {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed && b.hi_closed;
    }
    if (r.hi < r.lo)
        return Interval(r.lo, r.lo, false, false);
    return r;
}

namespace {

// Parts sorted by lo, closed-at-lo first on ties.
bool starts_before(const Interval& a, const Interval& b) {
    if (a.lo != b.lo)
        return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
}

// Whether b (starting no earlier than a) overlaps or touches a without a hole.
bool joins(const Interval& a, const Interval& b) {
    if (b.lo < a.hi)
        return true;
    return b.lo == a.hi && (a.hi_closed || b.lo_closed);
}

} // namespace

IntervalSet::IntervalSet(std::vector<Interval> parts) {
    std::erase_if(parts, [](const Interval& i) { return i.empty(); });
    std::sort(parts.begin(), parts.end(), starts_before);
    for (auto& p : parts) {
        if (!parts_.empty() && joins(parts_.back(), p)) {
            Interval& cur = parts_.back();
            if (cur.hi < p.hi) {
                cur.hi = std::move(p.hi);
                cur.hi_closed = p.hi_closed;
            } else if (cur.hi == p.hi) {
                cur.hi_closed = cur.hi_closed || p.hi_closed;
            }
        } else {
            parts_.push_back(std::move(p));
        }
    }
}

IntervalSet IntervalSet::from_sorted(std::vector<Interval> parts) {
    IntervalSet s;
    s.parts_ = std::move(parts);
    return s;
}

bool IntervalSet::contains(const Rational& x) const {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                               [](const Rational& v, const Interval& i) { return v < i.lo; });
    if (it == parts_.begin())
        return false;
    --it;
    return it->contains(x);
}

bool IntervalSet::is_subset_of(const Interval& host) const {
    return std::all_of(parts_.begin(), parts_.end(), [&](const Interval& p) { return host.contains(p); });
}

std::string IntervalSet::str() const {
    std::string out;
    for (const auto& p : parts_) {
        if (!out.empty())
            out += ' ';
        out += p.str();
    }
    return out;
}

IntervalSet IntervalSet::parse(std::string_view text) {
    std::vector<Interval> parts;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token)
        parts.push_back(Interval::parse(token));
    return IntervalSet(std::move(parts));
}

Rational measure(const IntervalSet& s) {
    Rational total;
    for (const auto& p : s.parts())
        total += p.length();
    return total;
}

IntervalSet intersect(const IntervalSet& s, const IntervalSet& t) {
    std::vector<Interval> out;
    const auto a = s.parts();
    const auto b = t.parts();
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        Interval x = intersect(a[i], b[j]);
        if (!x.empty())
            out.push_back(std::move(x));
        // Advance whichever part ends first; on a tie, the one not closed there.
        if (a[i].hi < b[j].hi || (a[i].hi == b[j].hi && !a[i].hi_closed))
            ++i;
        else
            ++j;
    }
    return IntervalSet(std::move(out));
}

IntervalSet unite(const IntervalSet& s, const IntervalSet& t) {
    std::vector<Interval> all(s.parts().begin(), s.parts().end());
    all.insert(all.end(), t.parts().begin(), t.parts().end());
    return IntervalSet(std::move(all));
}

IntervalSet complement_within(const IntervalSet& s, const Interval& host) {
    if (!s.is_subset_of(host))
        throw DomainError("complement_within: set " + s.str() + " not inside host " + host.str());
    std::vector<Interval> gaps;
    Rational cursor = host.lo;
    bool cursor_closed = host.lo_closed;
    for (const auto& p : s.parts()) {
        Interval g(cursor, p.lo, cursor_closed, !p.lo_closed);
        if (!g.empty())
            gaps.push_back(std::move(g));
        cursor = p.hi;
        cursor_closed = !p.hi_closed;
    }
    Interval last(cursor, host.hi, cursor_closed, host.hi_closed);
    if (!last.empty())
        gaps.push_back(std::move(last));
    return IntervalSet::from_sorted(std::move(gaps));
}

} // namespace clarkesat
