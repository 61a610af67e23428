#include "clarkesat/splitting_partition.hpp"

#include <algorithm>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

namespace clarkesat {

// ---------------------------------------------------------------------------
// Enumeration of rational open subintervals of (0,1)

namespace {

struct EnumerationCache {
    std::mutex mutex;
    std::vector<Interval> items;
    long next_sum = 2;

    void emit_sum(long s) {
        for (long qa = 1; qa < s; ++qa) {
            const long qb = s - qa;
            for (long pa = 0; pa <= qa; ++pa) {
                if (std::gcd(pa, qa) != 1)
                    continue;
                for (long pb = 0; pb <= qb; ++pb) {
                    if (std::gcd(pb, qb) != 1)
                        continue;
                    // a < b  <=>  pa*qb < pb*qa
                    if (pa * qb < pb * qa)
                        items.push_back(Interval::open(Rational(pa, qa), Rational(pb, qb)));
                }
            }
        }
    }
};

EnumerationCache& enumeration_cache() {
    static EnumerationCache cache;
    return cache;
}

} // namespace

Interval RationalIntervalEnumeration::at(std::size_t index) {
    if (index == 0)
        throw DomainError("interval enumeration is 1-based");
    auto& cache = enumeration_cache();
    std::lock_guard lock(cache.mutex);
    while (cache.items.size() < index)
        cache.emit_sum(cache.next_sum++);
    return cache.items[index - 1];
}

std::size_t RationalIntervalEnumeration::index_of(const Interval& interval) {
    if (interval.lo_closed || interval.hi_closed || !interval.nontrivial() || interval.lo < Rational(0) ||
        interval.hi > Rational(1))
        throw DomainError("not an open subinterval of (0,1): " + interval.str());
    const mpz_class sum = interval.lo.den() + interval.hi.den();
    if (!sum.fits_slong_p() || sum.get_si() > 4096)
        throw DomainError("denominators too large to index: " + interval.str());
    auto& cache = enumeration_cache();
    std::lock_guard lock(cache.mutex);
    while (cache.next_sum <= sum.get_si())
        cache.emit_sum(cache.next_sum++);
    const auto it = std::find(cache.items.begin(), cache.items.end(), interval);
    return static_cast<std::size_t>(it - cache.items.begin()) + 1;
}

// ---------------------------------------------------------------------------
// Gap finding

namespace {

// Longest open gap of `target` left by the depth-`depth` covers of `prior`.
std::optional<Interval> gap_at_depth(std::span<const FatCantorSet> prior, const Interval& open_target,
                                     unsigned depth) {
    std::vector<Interval> parts;
    for (const auto& s : prior)
        s.cover_parts_overlapping(open_target, depth, parts);
    const IntervalSet covered = intersect(IntervalSet(std::move(parts)), IntervalSet(open_target));
    const IntervalSet gaps = complement_within(covered, open_target);
    const Interval* best = nullptr;
    for (const auto& g : gaps.parts())
        if (g.nontrivial() && (best == nullptr || best->length() < g.length()))
            best = &g;
    if (best == nullptr)
        return std::nullopt;
    return Interval::open(best->lo, best->hi);
}

unsigned next_depth(unsigned depth) { return depth == 0 ? 1 : depth * 2; }

} // namespace

GapResult find_gap(std::span<const FatCantorSet> prior, const Interval& target) {
    if (!target.nontrivial())
        throw DomainError("find_gap needs a nontrivial target, got " + target.str());
    const Interval open_target = Interval::open(target.lo, target.hi);
    for (unsigned depth = 0; depth <= SplittingPartition::kMaxDepth; depth = next_depth(depth))
        if (auto gap = gap_at_depth(prior, open_target, depth))
            return {*gap, depth};
    throw std::logic_error("find_gap: no gap up to maximal depth in " + target.str());
}

// ---------------------------------------------------------------------------
// Membership

std::optional<unsigned> PartitionMembership::member() const {
    switch (kind) {
    case Kind::InA:
        return k;
    case Kind::InB:
        return 0u;
    case Kind::Undecided:
        break;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Construction

SplittingPartition SplittingPartition::build(unsigned stages, Rational gap_cap) {
    if (stages == 0)
        throw DomainError("build_partition needs at least one stage");
    if (gap_cap <= Rational(0) || gap_cap > Rational(1))
        throw DomainError("gap_cap must lie in (0,1], got " + gap_cap.str());
    SplittingPartition p;
    p.gap_cap_ = std::move(gap_cap);
    return p.extended(stages);
}

SplittingPartition SplittingPartition::extended(unsigned stages) const {
    SplittingPartition p = *this;
    for (unsigned n = stage_count() + 1; n <= stages; ++n) {
        const Interval target = RationalIntervalEnumeration::at(n);
        GapResult found = p.next_gap(target);

        Interval gap = found.gap;
        const Rational cap = gap_cap_ * Rational::pow2(-static_cast<long>(n));
        if (gap.length() > cap) {
            const Rational mid = gap.midpoint();
            const Rational half = cap / Rational(2);
            gap = Interval::open(mid - half, mid + half);
        }

        StageRecord record{n, gap, found.depth, {}};
        const Rational step = gap.length() / Rational(n + 1);
        for (unsigned i = 0; i <= n; ++i) {
            Interval piece = Interval::open(gap.lo + step * Rational(i), gap.lo + step * Rational(i + 1));
            if (i < n)
                record.sets.push_back({SetKind::T, i + 1, FatCantorSet(std::move(piece))});
            else
                record.sets.push_back({SetKind::B, 0, FatCantorSet(std::move(piece))});
        }
        p.append_stage(std::move(record));
    }
    return p;
}

GapResult SplittingPartition::next_gap(const Interval& target) const {
    // Depth 0: nested hosts lie inside their top-level ancestor, so the free
    // stretches between top-level hosts are exactly the depth-0 gaps.
    auto it = std::partition_point(roots_.begin(), roots_.end(),
                                   [&](std::size_t i) { return nodes_[i].hi <= target.lo; });
    Rational cursor = target.lo;
    std::optional<Interval> best;
    auto consider = [&](const Rational& end) {
        if (cursor < end && (!best || best->length() < end - cursor))
            best = Interval::open(cursor, end);
    };
    for (; it != roots_.end() && nodes_[*it].lo < target.hi; ++it) {
        consider(nodes_[*it].lo);
        cursor = max(cursor, nodes_[*it].hi);
    }
    consider(target.hi);
    if (best)
        return {*best, 0};

    std::vector<FatCantorSet> prior;
    for (const auto& ref : sets_overlapping(target))
        prior.push_back(set(ref).set);
    const Interval open_target = Interval::open(target.lo, target.hi);
    for (unsigned depth = 1; depth <= kMaxDepth; depth = next_depth(depth))
        if (auto gap = gap_at_depth(prior, open_target, depth))
            return {*gap, depth};
    throw std::logic_error("no gap up to maximal depth in " + target.str());
}

void SplittingPartition::append_stage(StageRecord record) {
    stages_.push_back(std::move(record));
    index_stage(stages_.back());
}

void SplittingPartition::index_stage(const StageRecord& record) {
    const Interval& gap = record.gap;
    // Innermost existing host whose closure contains the gap (none: top level).
    std::optional<std::size_t> parent;
    for (;;) {
        const auto& level = parent ? nodes_[*parent].children : roots_;
        auto it = std::upper_bound(level.begin(), level.end(), gap.lo,
                                   [&](const Rational& v, std::size_t i) { return v < nodes_[i].lo; });
        if (it == level.begin())
            break;
        const HostNode& cand = nodes_[*std::prev(it)];
        if (!(cand.lo <= gap.lo && gap.hi <= cand.hi))
            break;
        parent = *std::prev(it);
    }
    std::vector<std::size_t> fresh;
    for (unsigned slot = 0; slot < record.sets.size(); ++slot) {
        const Interval& h = record.sets[slot].set.host();
        fresh.push_back(nodes_.size());
        nodes_.push_back({h.lo, h.hi, {record.n, slot}, {}});
        const unsigned label = record.sets[slot].label();
        if (by_label_.size() <= label)
            by_label_.resize(label + 1);
        by_label_[label].push_back({record.n, slot});
    }
    auto& level = parent ? nodes_[*parent].children : roots_;
    auto pos = std::lower_bound(level.begin(), level.end(), gap.lo,
                                [&](std::size_t i, const Rational& v) { return nodes_[i].lo < v; });
    level.insert(pos, fresh.begin(), fresh.end());
}

std::span<const SetRef> SplittingPartition::sets_with_label(unsigned k) const {
    if (k >= by_label_.size())
        return {};
    return by_label_[k];
}

std::size_t SplittingPartition::set_count() const { return nodes_.size(); }

Rational SplittingPartition::unbuilt_tail(unsigned k) const {
    const unsigned n0 = std::max(stage_count() + 1, k);
    return gap_cap_ * Rational::pow2(-static_cast<long>(n0)) / Rational(n0 + 1);
}

Rational SplittingPartition::unbuilt_tail_all() const {
    return gap_cap_ * Rational::pow2(-static_cast<long>(stage_count())) / Rational(2);
}

void SplittingPartition::collect_overlapping(const std::vector<std::size_t>& level, const Interval& window,
                                             std::vector<SetRef>& out) const {
    auto it = std::partition_point(level.begin(), level.end(),
                                   [&](std::size_t i) { return nodes_[i].hi <= window.lo; });
    for (; it != level.end() && nodes_[*it].lo < window.hi; ++it) {
        out.push_back(nodes_[*it].ref);
        collect_overlapping(nodes_[*it].children, window, out);
    }
}

std::vector<SetRef> SplittingPartition::sets_overlapping(const Interval& window) const {
    std::vector<SetRef> out;
    collect_overlapping(roots_, window, out);
    return out;
}

void SplittingPartition::collect_stabbing(const std::vector<std::size_t>& level, const Rational& x,
                                          std::vector<std::size_t>& out) const {
    auto it = std::upper_bound(level.begin(), level.end(), x,
                               [&](const Rational& v, std::size_t i) { return v < nodes_[i].lo; });
    if (it == level.begin())
        return;
    --it;
    if (x <= nodes_[*it].hi) {
        out.push_back(*it);
        collect_stabbing(nodes_[*it].children, x, out);
    }
    if (it != level.begin() && nodes_[*std::prev(it)].hi == x)
        out.push_back(*std::prev(it));
}

PartitionMembership SplittingPartition::membership(const Rational& x, unsigned depth) const {
    using Kind = PartitionMembership::Kind;
    const Rational local = x - Rational(mpq_class(x.floor()));
    if (local.is_zero())
        return {Kind::InA, 0, 0};
    std::vector<std::size_t> stabbed;
    collect_stabbing(roots_, local, stabbed);
    bool undecided = false;
    std::optional<unsigned> boundary_stage;
    for (std::size_t idx : stabbed) {
        const HostNode& node = nodes_[idx];
        const PartitionSet& s = set(node.ref);
        switch (s.set.membership(local, depth)) {
        case Membership::In:
            if (s.kind == SetKind::T)
                return {Kind::InA, s.k, node.ref.stage};
            return {Kind::InB, 0, node.ref.stage};
        case Membership::Undecided:
            undecided = true;
            break;
        case Membership::Out:
            break;
        }
        if (local == node.lo || local == node.hi)
            boundary_stage = node.ref.stage;
    }
    // A host endpoint lies in the closed cover of its set at every depth, so
    // no later gap can contain it.
    if (!undecided && boundary_stage)
        return {Kind::InA, 0, *boundary_stage};
    return {};
}

// ---------------------------------------------------------------------------
// Measure queries

namespace {

void require_unit_window(const Interval& window) {
    if (!window.nontrivial() || window.lo < Rational(0) || window.hi > Rational(1))
        throw DomainError("measure window must be a nontrivial subinterval of [0,1], got " + window.str());
}

} // namespace

MeasureBound SplittingPartition::label_bound(unsigned k, const Interval& window, unsigned depth) const {
    MeasureBound total;
    for (const SetRef& ref : sets_with_label(k)) {
        const Interval& h = set(ref).set.host();
        if (h.hi <= window.lo || window.hi <= h.lo)
            continue;
        total += set(ref).set.measure_in(window, depth);
    }
    return total;
}

MeasureBound SplittingPartition::measure_at_depth(unsigned k, const Interval& window, unsigned depth) const {
    require_unit_window(window);
    const Rational len = window.length();
    if (k >= 1) {
        MeasureBound b = label_bound(k, window, depth);
        b.hi = min(b.hi + min(unbuilt_tail(k), len), len);
        return b;
    }
    MeasureBound t;
    for (const SetRef& ref : sets_overlapping(window)) {
        const PartitionSet& s = set(ref);
        if (s.kind == SetKind::T)
            t += s.set.measure_in(window, depth);
    }
    const Rational from_complement = len - t.hi - min(unbuilt_tail_all(), len);
    const Rational from_b = label_bound(0, window, depth).lo;
    return {max(max(from_complement, from_b), Rational(0)), len - t.lo};
}

MeasureBound SplittingPartition::measure_in(unsigned k, const Interval& window, const Rational& tol) const {
    require_unit_window(window);
    if (tol <= Rational(0))
        throw DomainError("tolerance must be positive");
    const Rational len = window.length();
    const Rational tail = min(k >= 1 ? unbuilt_tail(k) : unbuilt_tail_all(), len);
    if (tail > tol)
        throw ToleranceExhausted("tolerance " + tol.str() + " below unbuilt-stage tail " + tail.str() +
                                 " at " + std::to_string(stage_count()) + " stages");
    for (unsigned depth = 8; depth <= kMaxDepth; depth *= 2) {
        MeasureBound b = measure_at_depth(k, window, depth);
        if (b.width() <= tol)
            return b;
    }
    throw ToleranceExhausted("tolerance " + tol.str() + " not reached at maximal depth");
}

std::vector<MeasureBound> SplittingPartition::measure_profile(const Interval& window, unsigned depth) const {
    require_unit_window(window);
    std::vector<MeasureBound> out;
    for (unsigned k = 0; k <= stage_count(); ++k)
        out.push_back(measure_at_depth(k, window, depth));
    out.push_back({Rational(0), min(unbuilt_tail_all(), window.length())});
    return out;
}

// ---------------------------------------------------------------------------
// Splitting certificates

SplittingCertificate SplittingPartition::splitting_certificate(unsigned k, const Interval& window) const {
    if (!window.nontrivial())
        throw DomainError("splitting certificate needs a nontrivial window");
    const Interval closed = window.closure();
    std::optional<SetRef> member;
    for (const SetRef& ref : sets_with_label(k))
        if (closed.contains(set(ref).set.host())) {
            member = ref;
            break;
        }
    if (!member)
        throw NotYetCovered("no built set of A_" + std::to_string(k) + " inside " + window.str() + " at " +
                            std::to_string(stage_count()) + " stages");
    std::optional<SetRef> other;
    for (const SetRef& ref : sets_overlapping(window)) {
        const PartitionSet& s = set(ref);
        if (s.label() != k && closed.contains(s.set.host()) &&
            (!other || ref.stage < other->stage || (ref.stage == other->stage && ref.slot < other->slot)))
            other = ref;
    }
    if (!other)
        throw NotYetCovered("no built set outside A_" + std::to_string(k) + " inside " + window.str());
    return {k,
            window,
            *member,
            set(*member).set.limit_measure(),
            *other,
            set(*other).label(),
            set(*other).set.limit_measure()};
}

// ---------------------------------------------------------------------------
// SPLITPART v1

void SplittingPartition::save(std::ostream& out) const {
    out << "SPLITPART v1\n";
    out << "gap_cap " << gap_cap_ << "\n";
    out << "stages " << stage_count() << "\n";
    for (const auto& st : stages_) {
        out << st.n << ' ' << st.gap.lo << ' ' << st.gap.hi << ' ' << st.depth_used;
        for (const auto& s : st.sets) {
            if (s.kind == SetKind::T)
                out << " T " << s.k;
            else
                out << " B";
            out << ' ' << s.set.host().lo << ' ' << s.set.host().hi << ' ' << FatCantorSet::kScheduleId;
        }
        out << '\n';
    }
}

std::string SplittingPartition::to_text() const {
    std::ostringstream out;
    save(out);
    return out.str();
}

SplittingPartition SplittingPartition::load(std::istream& in) {
    auto fail = [](const std::string& what) -> ParseError { return ParseError("SPLITPART: " + what); };
    std::string line;
    if (!std::getline(in, line) || line != "SPLITPART v1")
        throw fail("missing 'SPLITPART v1' header");
    std::string key, value;
    if (!std::getline(in, line))
        throw fail("missing gap_cap line");
    {
        std::istringstream ls(line);
        if (!(ls >> key >> value) || key != "gap_cap")
            throw fail("expected 'gap_cap <p/q>'");
    }
    SplittingPartition p;
    p.gap_cap_ = Rational::parse(value);
    if (p.gap_cap_ <= Rational(0) || p.gap_cap_ > Rational(1))
        throw fail("gap_cap out of (0,1]");
    unsigned count = 0;
    if (!std::getline(in, line))
        throw fail("missing stages line");
    {
        std::istringstream ls(line);
        if (!(ls >> key >> count) || key != "stages")
            throw fail("expected 'stages <N>'");
    }
    for (unsigned n = 1; n <= count; ++n) {
        if (!std::getline(in, line))
            throw fail("truncated: expected " + std::to_string(count) + " stages");
        std::istringstream ls(line);
        std::string gap_lo, gap_hi;
        StageRecord record{};
        if (!(ls >> record.n >> gap_lo >> gap_hi >> record.depth_used) || record.n != n)
            throw fail("bad stage header on line for stage " + std::to_string(n));
        record.gap = Interval::open(Rational::parse(gap_lo), Rational::parse(gap_hi));
        const Interval target = RationalIntervalEnumeration::at(n);
        if (!target.contains(record.gap) || !record.gap.nontrivial())
            throw fail("stage " + std::to_string(n) + " gap not inside I_n");
        if (record.gap.length() > p.gap_cap_ * Rational::pow2(-static_cast<long>(n)))
            throw fail("stage " + std::to_string(n) + " gap longer than cap");
        const Rational step = record.gap.length() / Rational(n + 1);
        for (unsigned i = 0; i <= n; ++i) {
            std::string kind, lo, hi, schedule;
            unsigned k = 0;
            if (!(ls >> kind))
                throw fail("stage " + std::to_string(n) + " has too few sets");
            const bool is_t = kind == "T";
            if (!is_t && kind != "B")
                throw fail("unknown set kind '" + kind + "'");
            if (is_t && !(ls >> k))
                throw fail("T record without index");
            if (!(ls >> lo >> hi >> schedule))
                throw fail("truncated set record");
            if (schedule != FatCantorSet::kScheduleId)
                throw fail("unknown schedule '" + schedule + "'");
            Interval host = Interval::open(Rational::parse(lo), Rational::parse(hi));
            const Interval expected = Interval::open(record.gap.lo + step * Rational(i),
                                                     record.gap.lo + step * Rational(i + 1));
            if (host != expected || is_t != (i < n) || (is_t && k != i + 1))
                throw fail("stage " + std::to_string(n) + " set " + std::to_string(i) + " does not match layout");
            record.sets.push_back({is_t ? SetKind::T : SetKind::B, is_t ? k : 0, FatCantorSet(std::move(host))});
        }
        if (ls >> key)
            throw fail("trailing tokens on stage " + std::to_string(n));
        // The gap must avoid every earlier set's cover at the recorded depth.
        std::vector<Interval> parts;
        for (const auto& ref : p.sets_overlapping(record.gap))
            p.set(ref).set.cover_parts_overlapping(record.gap, record.depth_used, parts);
        if (!intersect(IntervalSet(std::move(parts)), IntervalSet(record.gap)).empty())
            throw fail("stage " + std::to_string(n) + " gap meets an earlier set");
        p.append_stage(std::move(record));
    }
    return p;
}

SplittingPartition SplittingPartition::from_text(const std::string& text) {
    std::istringstream in(text);
    return load(in);
}

} // namespace clarkesat
