#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clarkesat/interval.hpp"
#include "clarkesat/rational.hpp"
#include "clarkesat/splitting_partition.hpp"

namespace clarkesat {

using Point = std::vector<Rational>;

/// Certified enclosure of a real value.
struct ValueBound {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) / Rational(2); }
    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    bool within(const ValueBound& outer) const { return outer.lo <= lo && hi <= outer.hi; }

    ValueBound& operator+=(const ValueBound& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    friend ValueBound operator+(ValueBound a, const ValueBound& b) { return a += b; }
    friend ValueBound operator-(const ValueBound& a, const ValueBound& b) { return {a.lo - b.hi, a.hi - b.lo}; }
    friend bool operator==(const ValueBound&, const ValueBound&) = default;
};

/// c * [lo, hi], flipping ends for negative c.
ValueBound scale(const Rational& c, const ValueBound& b);

/// Coefficients mu = (mu_k) of a combination sum_k mu_k f_k, with exact sup norm.
class CoefficientSource {
public:
    using Rule = std::function<Rational(unsigned)>;

    /// Finitely supported; indices must be distinct. Zero entries are dropped.
    static CoefficientSource finite(std::vector<std::pair<unsigned, Rational>> entries);
    /// mu = c * e_k.
    static CoefficientSource unit(unsigned k, Rational c = Rational(1));
    /// Bounded sequence given by `rule`, whose exact sup norm is `sup_norm`.
    /// Values exceeding the declared norm are rejected when queried.
    static CoefficientSource generator(std::string name, Rule rule, Rational sup_norm);

    /// "k:p/q,k:p/q,..." or a named generator: "ones" (mu_k = 1),
    /// "alternating" (mu_k = (-1)^k), "harmonic" (mu_k = 1/(k+1)), or "zero".
    static CoefficientSource parse(std::string_view text);

    Rational at(unsigned k) const;
    const Rational& sup_norm() const { return sup_; }
    bool is_finite() const { return !rule_; }
    /// Nonzero entries sorted by index (finite sources only).
    std::span<const std::pair<unsigned, Rational>> support() const { return support_; }
    /// Largest index with a nonzero coefficient (finite sources only; nullopt for mu = 0).
    std::optional<unsigned> last_index() const;
    /// Smallest k <= limit maximising |mu_k|.
    unsigned argmax_up_to(unsigned limit) const;
    Rational max_abs_up_to(unsigned limit) const;

    CoefficientSource scaled(const Rational& factor) const;
    std::string str() const;

private:
    std::vector<std::pair<unsigned, Rational>> support_;
    std::string name_;
    Rule rule_;
    Rational sup_;
};

/// Open box prod_i (lo_i, hi_i) with rational sides.
struct Box {
    std::vector<Interval> sides;

    static Box unit(unsigned d);
    /// "lo:hi,lo:hi,..."
    static Box parse(std::string_view text);
    unsigned dim() const { return static_cast<unsigned>(sides.size()); }
    bool contains(const Point& x) const;
    Point center() const;
    Rational diameter_l1() const;
    std::string str() const;
};

/// f(x) = sum_k mu_k sum_i integral_{x0_i}^{x_i} g_k(t) dt + <p, x - x0>, with
/// g_k = 1_{A_{2k+1}} - 1_{A_{2k}}. The gradient is G(x) = sum_k mu_k G^k(x) + p,
/// G^k(x) = (g_k(x_1), ..., g_k(x_d)). p is zero unless built by shift_to_ball.
class SaturatedFunction {
public:
    SaturatedFunction(std::shared_ptr<const SplittingPartition> partition, CoefficientSource mu, unsigned d = 1,
                      std::optional<Box> domain = std::nullopt, std::optional<Point> x0 = std::nullopt);

    unsigned dim() const { return dim_; }
    const Box& domain() const { return domain_; }
    const Point& x0() const { return x0_; }
    const CoefficientSource& mu() const { return mu_; }
    const SplittingPartition& partition() const { return *partition_; }
    const std::shared_ptr<const SplittingPartition>& partition_handle() const { return partition_; }
    /// Affine slope p (all zeros unless shifted).
    const Point& linear_part() const { return linear_; }
    bool has_linear_part() const;

    /// Derivative of the non-affine part on A_label: mu_k on A_{2k+1}, -mu_k on A_{2k}.
    Rational weight(unsigned label) const;

    SaturatedFunction with_linear_part(Point p) const;
    SaturatedFunction with_partition(std::shared_ptr<const SplittingPartition> partition) const;

private:
    std::shared_ptr<const SplittingPartition> partition_;
    CoefficientSource mu_;
    unsigned dim_;
    Box domain_;
    Point x0_;
    Point linear_;
};

enum class GValue { Minus, Zero, Plus, Undecided };

/// g_k(x) in {-1, 0, +1} when the partition certifies x's member.
GValue eval_g(const SplittingPartition& partition, unsigned k, const Rational& x, unsigned depth);

/// f_k(x) = integral_{x0}^{x} g_k, enclosed with width <= tol, from two
/// measure queries (A_{2k+1} and A_{2k}) at tol/2 each, per unit cell.
ValueBound eval_f1(const SplittingPartition& partition, unsigned k, const Rational& x0, const Rational& x,
                   const Rational& tol);

/// f(x) enclosed with width <= tol. Sums weighted measures of all built sets
/// along each coordinate segment; unbuilt stages are bounded by
/// ||mu||_inf-scaled tails. Throws ToleranceExhausted if the tail exceeds tol.
ValueBound eval_f(const SaturatedFunction& f, const Point& x, const Rational& tol);

/// Per-coordinate certified gradient entries; nullopt where undecided.
using GradientSample = std::vector<std::optional<Rational>>;
GradientSample sample_gradient(const SaturatedFunction& f, const Point& x, unsigned depth);

/// ||f||_Lip w.r.t. the l1 norm on inputs: ||mu||_inf + ||p||_inf.
Rational lipschitz_norm(const SaturatedFunction& f);

/// Largest certified difference quotient |f(x)-f(y)| / ||x-y||_1 found over
/// `budget` witness pairs. Pairs are the end points of deep pieces of the fat
/// Cantor sets on which the dominant coefficient is the derivative, so the
/// quotient approaches lipschitz_norm(f) as the piece level grows.
Rational lipschitz_lower_bound(const SaturatedFunction& f, unsigned budget = 16);

/// The function h1 + <p, . - x0> where h1 is f rescaled to ||mu||_inf = r.
/// Its Clarke subdifferential is the closed l_inf ball around p of radius r.
SaturatedFunction shift_to_ball(const SaturatedFunction& f, Point p, const Rational& r);

/// CSV of samples: x1..xd, f_lo, f_hi, g1..gd (gradient entries or "U").
struct FunctionSample {
    Point x;
    ValueBound value;
    GradientSample gradient;
};
FunctionSample sample_point(const SaturatedFunction& f, const Point& x, const Rational& tol, unsigned depth);
std::string samples_csv(std::span<const FunctionSample> samples, bool decimal = false);

} // namespace clarkesat
