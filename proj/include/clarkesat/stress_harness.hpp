#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clarkesat/saturated_function.hpp"

namespace clarkesat {

/// Value enclosure plus one sampled generalized gradient. Undecided
/// coordinates are replaced by 0 (always in the subdifferential here) and flagged.
struct OracleResponse {
    ValueBound value;
    Point gradient;
    std::vector<bool> undecided;
};

OracleResponse oracle(const SaturatedFunction& f, const Point& x, const Rational& tol, unsigned depth);

/// step_t = c / sqrt(t), t >= 1, with the square root rounded to a dyadic of
/// precision 2^-30 so iterates stay exact rationals of bounded size.
struct StepSchedule {
    Rational c{1, 16};
    Rational at(unsigned t) const;
};

struct StressOptions {
    Rational tol{1, 1000000};
    unsigned depth = 64;
    Rational radius{1, 8}; // l1 radius of the certification box
    std::optional<unsigned> truncation; // K; default_truncation(f) when unset
};

struct TrajectoryPoint {
    unsigned t;
    Point x;
    ValueBound value;
    Point gradient;
    std::vector<bool> undecided;
    std::optional<Rational> gap; // nullopt when certification failed at this iterate
};

/// Projected subgradient run x_{t+1} = P(x_t - step_t * g_t), P the clamp into
/// the domain shrunk by 1/1024 of each side. Returns steps+1 points (t = 0..steps).
std::vector<TrajectoryPoint> run_subgradient(const SaturatedFunction& f, const Point& x_init, unsigned steps,
                                             const StepSchedule& schedule, const StressOptions& options = {});

/// Columns t, x1..xd, f_lo, f_hi, gap ("U" when uncertified).
std::string trajectory_csv(std::span<const TrajectoryPoint> trajectory, bool decimal = false);

} // namespace clarkesat
