#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clarkesat/saturated_function.hpp"

namespace clarkesat {

/// One certified gradient value mu_k * v (+ p): every coordinate window of
/// the box meets the member A_{labels[i]} in measure >= lower_bounds[i] > 0.
struct VertexCertificate {
    unsigned k;
    std::vector<int> signs; // v in {-1,+1}^d
    std::vector<unsigned> labels;
    std::vector<Rational> lower_bounds;
    Rational product; // lower bound on the measure of the product set in the box
    Point value;
};

/// Positive-measure region of the box on which the non-affine gradient is 0.
struct ZeroRegion {
    std::vector<unsigned> labels;
    std::vector<Rational> lower_bounds;
    Rational product;
    Point value; // = p
};

/// Inner certificate for the Clarke subdifferential at x: every listed value
/// is taken on a subset of positive measure of every neighbourhood box, so
/// the convex hull of the values lies in the subdifferential.
struct SaturationCertificate {
    Point x;
    Rational radius; // l1 radius; the box has half-width radius/d per coordinate
    unsigned truncation;
    Box box;
    Rational m; // max_{k <= K} |mu_k|
    std::vector<VertexCertificate> vertices;
    std::optional<ZeroRegion> zero;
    std::vector<Interval> hull; // closed cube prod [p_i - m, p_i + m]

    /// Exact re-check: all bounds positive, products consistent, every value
    /// in the hull and every hull corner among the certified values.
    bool verify() const;
    /// Human-readable report, all numbers as p/q.
    std::string report() const;
};

/// K used when none is given: the last nonzero index of a finite mu (0 for mu = 0).
/// Generator sources have no default.
std::optional<unsigned> default_truncation(const SaturatedFunction& f);

/// Certifies mu_k * v for every k <= K with mu_k != 0 and every v in {-1,+1}^d,
/// plus the zero region when one is found. Throws NotYetCovered when some
/// required member has no built set inside a coordinate window, DomainError
/// when the box leaves the domain.
SaturationCertificate certify_saturation(const SaturatedFunction& f, const Point& x, const Rational& r,
                                         unsigned K);

/// l_inf distance from 0 to the certified hull. With m = 0 the hull is {p},
/// which needs the zero region (NotYetCovered otherwise).
Rational stationarity_gap(const SaturatedFunction& f, const Point& x, const Rational& r, unsigned K);

using SignMatrix = std::vector<std::vector<int>>;

/// Witness x_j for j < K: a Cantor point of the first built T_{2j+1} set.
std::vector<Rational> independence_witnesses(const SplittingPartition& partition, unsigned K);
/// M[j][k] = g_k(witness_j). Undecided entries throw NotYetCovered.
SignMatrix independence_fingerprint(const SplittingPartition& partition, std::span<const Rational> witnesses);
SignMatrix independence_fingerprint(const SplittingPartition& partition, unsigned K);
/// Exact rank test.
bool nonsingular(const SignMatrix& m);

struct IsometryWitness {
    Point x;
    std::vector<Rational> gradient; // non-affine part
    Rational witness_norm;          // sup norm of gradient
    Rational truncated_norm;        // max_{k <= K} |mu_k|
};

/// Point whose coordinates all lie in A_{2k*+1}, k* the argmax of |mu_k| over k <= K.
IsometryWitness isometry_witness(const SaturatedFunction& f, unsigned K);

} // namespace clarkesat
