#include "clarkesat/stress_harness.hpp"

#include <sstream>

#include "clarkesat/errors.hpp"
#include "clarkesat/saturation_verifier.hpp"

namespace clarkesat {

OracleResponse oracle(const SaturatedFunction& f, const Point& x, const Rational& tol, unsigned depth) {
    OracleResponse r{eval_f(f, x, tol), {}, {}};
    const GradientSample g = sample_gradient(f, x, depth);
    for (unsigned i = 0; i < g.size(); ++i) {
        r.undecided.push_back(!g[i]);
        r.gradient.push_back(g[i] ? *g[i] : Rational(0));
    }
    return r;
}

Rational StepSchedule::at(unsigned t) const {
    if (t == 0)
        throw DomainError("step index starts at 1");
    // 2^30 / sqrt(t) = sqrt(2^60 / t), rounded down.
    mpz_class q = (mpz_class(1) << 60) / t;
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), q.get_mpz_t());
    return c * Rational(mpq_class(s)) / Rational::pow2(30);
}

namespace {

Rational clamp(const Rational& v, const Rational& lo, const Rational& hi) { return max(lo, min(v, hi)); }

} // namespace

std::vector<TrajectoryPoint> run_subgradient(const SaturatedFunction& f, const Point& x_init, unsigned steps,
                                             const StepSchedule& schedule, const StressOptions& options) {
    if (!f.domain().contains(x_init))
        throw DomainError("initial point outside the domain");
    const unsigned K = options.truncation ? *options.truncation : default_truncation(f).value_or(0);
    const unsigned d = f.dim();

    std::vector<Rational> lo, hi;
    for (const auto& side : f.domain().sides) {
        const Rational margin = side.length() / Rational(1024);
        lo.push_back(side.lo + margin);
        hi.push_back(side.hi - margin);
    }

    std::vector<TrajectoryPoint> out;
    Point x = x_init;
    for (unsigned t = 0;; ++t) {
        const OracleResponse o = oracle(f, x, options.tol, options.depth);
        TrajectoryPoint pt{t, x, o.value, o.gradient, o.undecided, std::nullopt};
        // Shrink the box so that it stays inside the domain.
        Rational room = options.radius;
        for (unsigned i = 0; i < d; ++i) {
            const auto& side = f.domain().sides[i];
            room = min(room, Rational(d) * min(x[i] - side.lo, side.hi - x[i]) / Rational(2));
        }
        try {
            pt.gap = stationarity_gap(f, x, room, K);
        } catch (const NotYetCovered&) {
        }
        out.push_back(std::move(pt));
        if (t == steps)
            break;
        const Rational step = schedule.at(t + 1);
        for (unsigned i = 0; i < d; ++i)
            x[i] = clamp(x[i] - step * o.gradient[i], lo[i], hi[i]);
    }
    return out;
}

std::string trajectory_csv(std::span<const TrajectoryPoint> trajectory, bool decimal) {
    auto num = [decimal](const Rational& v) { return decimal ? v.decimal() : v.str(); };
    std::ostringstream out;
    const std::size_t d = trajectory.empty() ? 1 : trajectory.front().x.size();
    out << 't';
    for (std::size_t i = 1; i <= d; ++i)
        out << ",x" << i;
    out << ",f_lo,f_hi,gap\n";
    for (const auto& p : trajectory) {
        out << p.t;
        for (const auto& xi : p.x)
            out << ',' << num(xi);
        out << ',' << num(p.value.lo) << ',' << num(p.value.hi) << ',' << (p.gap ? num(*p.gap) : "U") << '\n';
    }
    return out.str();
}

} // namespace clarkesat
