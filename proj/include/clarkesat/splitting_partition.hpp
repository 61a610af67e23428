#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clarkesat/errors.hpp"
#include "clarkesat/fat_cantor.hpp"
#include "clarkesat/interval.hpp"

namespace clarkesat {

/// Deterministic enumeration I_1, I_2, ... of the open subintervals of (0,1)
/// with rational endpoints.
///
/// Endpoints are reduced fractions p/q in [0,1] (0/1 and 1/1 included).
/// Pairs (a,b), a < b, are ordered by (den(a)+den(b), den(a), num(a), num(b)),
/// so I_1 = (0,1), I_2 = (0,1/2), I_3 = (1/2,1), I_4 = (0,1/3), ...
/// Every rational open subinterval appears exactly once.
class RationalIntervalEnumeration {
public:
    /// 1-based.
    static Interval at(std::size_t index);
    /// Inverse of at(); throws DomainError if the interval is not a rational
    /// open subinterval of (0,1).
    static std::size_t index_of(const Interval& interval);
};

enum class SetKind { T, B };

/// One fat Cantor set of a stage: T_k^{(n)} or B^{(n)}.
struct PartitionSet {
    SetKind kind;
    unsigned k; // meaningful for T only
    FatCantorSet set;

    /// Index of the partition member containing this set (B lies in A_0).
    unsigned label() const { return kind == SetKind::T ? k : 0; }
    friend bool operator==(const PartitionSet&, const PartitionSet&) = default;
};

struct StageRecord {
    unsigned n;
    Interval gap;        // open, inside I_n
    unsigned depth_used; // cover depth that exposed the gap
    std::vector<PartitionSet> sets; // T_1..T_n then B, left to right over the gap
    friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

struct GapResult {
    Interval gap;
    unsigned depth;
};

/// Longest open subinterval of `target` avoiding the depth-d covers of all
/// `prior` sets (ties: leftmost), for the first d in 0,1,2,4,8,... that
/// exposes one.
GapResult find_gap(std::span<const FatCantorSet> prior, const Interval& target);

/// Certified position of a point with respect to the partition {A_k}.
struct PartitionMembership {
    enum class Kind { InA, InB, Undecided };
    Kind kind = Kind::Undecided;
    unsigned k = 0;     // InA: the member index (0 when certified in A_0 by a boundary point)
    unsigned stage = 0; // stage whose set (or boundary) certified it; 0 for the point 0

    bool decided() const { return kind != Kind::Undecided; }
    /// Member A_j the point is certified to lie in.
    std::optional<unsigned> member() const;
    friend bool operator==(const PartitionMembership&, const PartitionMembership&) = default;
};

/// Locator of a set inside a partition.
struct SetRef {
    unsigned stage; // 1-based stage number
    unsigned slot;  // position within the stage
};

/// Proof that lambda(A_k ∩ W) > 0 and lambda(W \ A_k) > 0.
struct SplittingCertificate {
    unsigned k;
    Interval window;
    SetRef member_witness;         // a set inside A_k hosted in W
    Rational member_lower_bound;   // its exact measure
    SetRef complement_witness;     // a set outside A_k hosted in W
    unsigned complement_label;
    Rational complement_lower_bound;
};

/// Staged construction of the countable splitting partition of [0,1).
///
/// Stage n finds a gap inside I_n avoiding all earlier sets, shrinks it
/// concentrically to length <= gap_cap * 2^-n, cuts it into n+1 equal open
/// pieces and puts T_1^{(n)}, ..., T_n^{(n)}, B^{(n)} on them. Then
/// A_k = ∪_n T_k^{(n)} (k >= 1), A_0 = [0,1) \ ∪_{k>=1} A_k ⊇ B. Points of
/// the real line are handled modulo 1.
///
/// Hosts of later stages may sit inside removed gaps of earlier sets, so
/// hosts are organised as a laminar tree; the sets themselves are disjoint.
/// Immutable once built.
class SplittingPartition {
public:
    static constexpr unsigned kMaxDepth = 4096;

    static Rational default_gap_cap() { return Rational(1, 256); }
    static SplittingPartition build(unsigned stages, Rational gap_cap = default_gap_cap());

    /// Same construction continued to `stages` (a prefix-preserving extension).
    SplittingPartition extended(unsigned stages) const;

    unsigned stage_count() const { return static_cast<unsigned>(stages_.size()); }
    const Rational& gap_cap() const { return gap_cap_; }
    std::span<const StageRecord> stages() const { return stages_; }
    const StageRecord& stage(unsigned n) const { return stages_.at(n - 1); }
    const PartitionSet& set(SetRef r) const { return stages_.at(r.stage - 1).sets.at(r.slot); }
    /// All sets carrying label k (T_k^{(n)} for k >= 1, B^{(n)} for k = 0), by stage.
    std::span<const SetRef> sets_with_label(unsigned k) const;
    std::size_t set_count() const;

    /// Upper bound on sum_{n > N, n >= k} lambda(T_k^{(n)}) over unbuilt stages.
    Rational unbuilt_tail(unsigned k) const;
    /// Upper bound on the total measure of all unbuilt T sets.
    Rational unbuilt_tail_all() const;

    PartitionMembership membership(const Rational& x, unsigned depth) const;

    /// Enclosure of lambda(A_k ∩ window) of width <= tol. window must lie in
    /// [0,1]. Throws ToleranceExhausted when the unbuilt-stage tail exceeds tol.
    MeasureBound measure_in(unsigned k, const Interval& window, const Rational& tol) const;
    /// Same at a fixed refinement depth, without a width requirement.
    MeasureBound measure_at_depth(unsigned k, const Interval& window, unsigned depth) const;

    /// Per-member enclosures for k = 0..stage_count() at fixed depth, plus the
    /// enclosure of lambda(window ∩ ∪_{k > N} A_k) in the last slot.
    std::vector<MeasureBound> measure_profile(const Interval& window, unsigned depth) const;

    /// Throws NotYetCovered when no built set of the right kind is hosted in window.
    SplittingCertificate splitting_certificate(unsigned k, const Interval& window) const;

    /// Sets whose closed host overlaps `window` in positive length.
    std::vector<SetRef> sets_overlapping(const Interval& window) const;

    /// SPLITPART v1 text form.
    void save(std::ostream& out) const;
    std::string to_text() const;
    static SplittingPartition load(std::istream& in);
    static SplittingPartition from_text(const std::string& text);

    friend bool operator==(const SplittingPartition& a, const SplittingPartition& b) {
        return a.gap_cap_ == b.gap_cap_ && a.stages_ == b.stages_;
    }

private:
    struct HostNode {
        Rational lo;
        Rational hi;
        SetRef ref;
        std::vector<std::size_t> children; // sorted by lo
    };

    GapResult next_gap(const Interval& target) const;
    void append_stage(StageRecord record);
    void index_stage(const StageRecord& record);
    void collect_overlapping(const std::vector<std::size_t>& level, const Interval& window,
                             std::vector<SetRef>& out) const;
    void collect_stabbing(const std::vector<std::size_t>& level, const Rational& x,
                          std::vector<std::size_t>& out) const;
    MeasureBound label_bound(unsigned k, const Interval& window, unsigned depth) const;

    Rational gap_cap_{1};
    std::vector<StageRecord> stages_;
    std::vector<HostNode> nodes_;
    std::vector<std::size_t> roots_;
    std::vector<std::vector<SetRef>> by_label_;
};

/// Runs `query` on `partition`, extending it (geometrically) on NotYetCovered
/// until it succeeds or `max_stages` is exceeded, in which case the last
/// NotYetCovered propagates. `partition` is left at the stage count that worked.
template <class Query>
auto with_auto_extension(SplittingPartition& partition, unsigned max_stages, Query&& query)
    -> decltype(query(partition)) {
    for (;;) {
        try {
            return query(partition);
        } catch (const NotYetCovered&) {
            const unsigned n = partition.stage_count();
            if (n >= max_stages)
                throw;
            const unsigned next = std::min(max_stages, n + std::max(4u, n / 2));
            partition = partition.extended(next);
        }
    }
}

} // namespace clarkesat
