#include "clarkesat/saturated_function.hpp"

#include <algorithm>
#include <sstream>

#include "clarkesat/errors.hpp"

namespace clarkesat {

ValueBound scale(const Rational& c, const ValueBound& b) {
    if (c.sign() >= 0)
        return {c * b.lo, c * b.hi};
    return {c * b.hi, c * b.lo};
}

// ---------------------------------------------------------------------------
// CoefficientSource

CoefficientSource CoefficientSource::finite(std::vector<std::pair<unsigned, Rational>> entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].first == entries[i - 1].first)
            throw DomainError("duplicate coefficient index " + std::to_string(entries[i].first));
    CoefficientSource c;
    for (auto& [k, v] : entries) {
        if (v.is_zero())
            continue;
        c.sup_ = max(c.sup_, v.abs());
        c.support_.emplace_back(k, std::move(v));
    }
    c.name_ = "finite";
    return c;
}

CoefficientSource CoefficientSource::unit(unsigned k, Rational c) { return finite({{k, std::move(c)}}); }

CoefficientSource CoefficientSource::generator(std::string name, Rule rule, Rational sup_norm) {
    if (!rule)
        throw DomainError("generator needs a rule");
    if (sup_norm.sign() < 0)
        throw DomainError("sup norm must be nonnegative");
    CoefficientSource c;
    c.name_ = std::move(name);
    c.rule_ = std::move(rule);
    c.sup_ = std::move(sup_norm);
    return c;
}

CoefficientSource CoefficientSource::parse(std::string_view text) {
    if (text == "ones")
        return generator("ones", [](unsigned) { return Rational(1); }, Rational(1));
    if (text == "alternating")
        return generator("alternating", [](unsigned k) { return Rational(k % 2 == 0 ? 1 : -1); }, Rational(1));
    if (text == "harmonic")
        return generator("harmonic", [](unsigned k) { return Rational(1, static_cast<std::int64_t>(k) + 1); },
                         Rational(1));
    if (text == "zero")
        return finite({});
    std::vector<std::pair<unsigned, Rational>> entries;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos || colon == 0)
            throw ParseError("coefficient entry must be 'k:p/q', got '" + item + "'");
        const std::string index = item.substr(0, colon);
        if (index.find_first_not_of("0123456789") != std::string::npos || index.size() > 9)
            throw ParseError("bad coefficient index '" + index + "'");
        entries.emplace_back(static_cast<unsigned>(std::stoul(index)), Rational::parse(item.substr(colon + 1)));
    }
    if (entries.empty())
        throw ParseError("empty coefficient list (use 'zero' for mu = 0)");
    try {
        return finite(std::move(entries));
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

Rational CoefficientSource::at(unsigned k) const {
    if (rule_) {
        Rational v = rule_(k);
        if (v.abs() > sup_)
            throw std::logic_error("generator '" + name_ + "' exceeds its declared sup norm at index " +
                                   std::to_string(k));
        return v;
    }
    auto it = std::lower_bound(support_.begin(), support_.end(), k,
                               [](const auto& e, unsigned key) { return e.first < key; });
    if (it != support_.end() && it->first == k)
        return it->second;
    return Rational(0);
}

std::optional<unsigned> CoefficientSource::last_index() const {
    if (rule_ || support_.empty())
        return std::nullopt;
    return support_.back().first;
}

unsigned CoefficientSource::argmax_up_to(unsigned limit) const {
    unsigned best = 0;
    Rational best_abs = -Rational(1);
    if (rule_) {
        for (unsigned k = 0; k <= limit; ++k) {
            Rational a = at(k).abs();
            if (a > best_abs) {
                best_abs = a;
                best = k;
            }
        }
        return best;
    }
    for (const auto& [k, v] : support_)
        if (k <= limit && v.abs() > best_abs) {
            best_abs = v.abs();
            best = k;
        }
    return best;
}

Rational CoefficientSource::max_abs_up_to(unsigned limit) const { return at(argmax_up_to(limit)).abs(); }

CoefficientSource CoefficientSource::scaled(const Rational& factor) const {
    if (rule_) {
        Rule inner = rule_;
        return generator(factor.str() + "*" + name_, [inner, factor](unsigned k) { return factor * inner(k); },
                         factor.abs() * sup_);
    }
    std::vector<std::pair<unsigned, Rational>> entries;
    for (const auto& [k, v] : support_)
        entries.emplace_back(k, v * factor);
    return finite(std::move(entries));
}

std::string CoefficientSource::str() const {
    if (rule_)
        return name_;
    if (support_.empty())
        return "zero";
    std::string out;
    for (const auto& [k, v] : support_) {
        if (!out.empty())
            out += ',';
        out += std::to_string(k) + ":" + v.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Box

Box Box::unit(unsigned d) {
    return Box{std::vector<Interval>(d, Interval::open(Rational(0), Rational(1)))};
}

Box Box::parse(std::string_view text) {
    Box b;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ParseError("box side must be 'lo:hi', got '" + item + "'");
        Rational lo = Rational::parse(item.substr(0, colon));
        Rational hi = Rational::parse(item.substr(colon + 1));
        if (!(lo < hi))
            throw ParseError("empty box side '" + item + "'");
        b.sides.push_back(Interval::open(std::move(lo), std::move(hi)));
    }
    if (b.sides.empty())
        throw ParseError("empty box");
    return b;
}

bool Box::contains(const Point& x) const {
    if (x.size() != sides.size())
        return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!sides[i].contains(x[i]))
            return false;
    return true;
}

Point Box::center() const {
    Point c;
    for (const auto& s : sides)
        c.push_back(s.midpoint());
    return c;
}

Rational Box::diameter_l1() const {
    Rational d;
    for (const auto& s : sides)
        d += s.length();
    return d;
}

std::string Box::str() const {
    std::string out;
    for (const auto& s : sides) {
        if (!out.empty())
            out += ',';
        out += s.lo.str() + ":" + s.hi.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// SaturatedFunction

SaturatedFunction::SaturatedFunction(std::shared_ptr<const SplittingPartition> partition, CoefficientSource mu,
                                     unsigned d, std::optional<Box> domain, std::optional<Point> x0)
    : partition_(std::move(partition)), mu_(std::move(mu)), dim_(d), domain_(domain ? *domain : Box::unit(d)),
      x0_(x0 ? *x0 : domain_.center()), linear_(d, Rational(0)) {
    if (!partition_)
        throw DomainError("saturated function needs a partition");
    if (d == 0)
        throw DomainError("dimension must be at least 1");
    if (domain_.dim() != d)
        throw DomainError("domain dimension " + std::to_string(domain_.dim()) + " != " + std::to_string(d));
    if (!domain_.contains(x0_))
        throw DomainError("base point outside the domain");
}

bool SaturatedFunction::has_linear_part() const {
    return std::any_of(linear_.begin(), linear_.end(), [](const Rational& v) { return !v.is_zero(); });
}

Rational SaturatedFunction::weight(unsigned label) const {
    if (label % 2 == 1)
        return mu_.at(label / 2);
    return -mu_.at(label / 2);
}

SaturatedFunction SaturatedFunction::with_linear_part(Point p) const {
    if (p.size() != dim_)
        throw DomainError("linear part has wrong dimension");
    SaturatedFunction f = *this;
    f.linear_ = std::move(p);
    return f;
}

SaturatedFunction SaturatedFunction::with_partition(std::shared_ptr<const SplittingPartition> partition) const {
    SaturatedFunction f = *this;
    if (!partition)
        throw DomainError("saturated function needs a partition");
    f.partition_ = std::move(partition);
    return f;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// [a,b] (a < b) cut at the integers and moved into [0,1].
std::vector<Interval> unit_cells(const Rational& a, const Rational& b) {
    std::vector<Interval> cells;
    mpz_class m = a.floor();
    for (;;) {
        const Rational base{mpq_class(m)};
        if (!(base < b))
            break;
        const Rational lo = max(a, base) - base;
        const Rational hi = min(b, base + Rational(1)) - base;
        if (lo < hi)
            cells.push_back(Interval::closed(lo, hi));
        ++m;
    }
    return cells;
}

} // namespace

GValue eval_g(const SplittingPartition& partition, unsigned k, const Rational& x, unsigned depth) {
    const auto member = partition.membership(x, depth).member();
    if (!member)
        return GValue::Undecided;
    if (*member == 2 * k + 1)
        return GValue::Plus;
    if (*member == 2 * k)
        return GValue::Minus;
    return GValue::Zero;
}

ValueBound eval_f1(const SplittingPartition& partition, unsigned k, const Rational& x0, const Rational& x,
                   const Rational& tol) {
    if (tol <= Rational(0))
        throw DomainError("tolerance must be positive");
    if (x == x0)
        return {};
    const bool forward = x0 < x;
    const auto cells = forward ? unit_cells(x0, x) : unit_cells(x, x0);
    const Rational per_query = tol / Rational(2 * static_cast<std::int64_t>(cells.size()));
    ValueBound sum;
    for (const auto& w : cells) {
        const MeasureBound plus = partition.measure_in(2 * k + 1, w, per_query);
        const MeasureBound minus = partition.measure_in(2 * k, w, per_query);
        sum += ValueBound{plus.lo - minus.hi, plus.hi - minus.lo};
    }
    return forward ? sum : ValueBound{-sum.hi, -sum.lo};
}

namespace {

// Integral of the non-affine derivative over one unit cell, split into the
// exactly known part, the sets straddling the cell ends, and the unbuilt tail.
struct CellIntegral {
    Rational orientation; // +1 or -1
    Rational exact;
    std::vector<std::pair<Rational, const FatCantorSet*>> straddling; // (weight - w0, set)
    Interval window;
    ValueBound tail;
};

} // namespace

ValueBound eval_f(const SaturatedFunction& f, const Point& x, const Rational& tol) {
    if (tol <= Rational(0))
        throw DomainError("tolerance must be positive");
    if (!f.domain().contains(x))
        throw DomainError("evaluation point outside the domain");
    const SplittingPartition& part = f.partition();
    const Rational w0 = f.weight(0);
    const Rational sup = f.mu().sup_norm();
    const Rational delta_lo = -sup - w0;
    const Rational delta_hi = sup - w0;

    // Weights are looked up once per label.
    std::vector<std::optional<Rational>> delta_cache;
    auto delta_of = [&](unsigned label) -> const Rational& {
        if (delta_cache.size() <= label)
            delta_cache.resize(label + 1);
        if (!delta_cache[label])
            delta_cache[label] = f.weight(label) - w0;
        return *delta_cache[label];
    };

    Rational linear;
    std::vector<CellIntegral> cells;
    Rational tail_width;
    for (unsigned i = 0; i < f.dim(); ++i) {
        linear += f.linear_part()[i] * (x[i] - f.x0()[i]);
        if (x[i] == f.x0()[i])
            continue;
        const bool forward = f.x0()[i] < x[i];
        for (auto& w : forward ? unit_cells(f.x0()[i], x[i]) : unit_cells(x[i], f.x0()[i])) {
            CellIntegral c{Rational(forward ? 1 : -1), w0 * w.length(), {}, w, {}};
            for (const SetRef& ref : part.sets_overlapping(w)) {
                const PartitionSet& s = part.set(ref);
                if (s.kind != SetKind::T)
                    continue;
                const Rational& delta = delta_of(s.label());
                if (delta.is_zero())
                    continue;
                if (w.contains(s.set.host()))
                    c.exact += delta * s.set.limit_measure();
                else
                    c.straddling.emplace_back(delta, &s.set);
            }
            const Rational t = min(part.unbuilt_tail_all(), w.length());
            c.tail = {delta_lo * t, delta_hi * t};
            tail_width += c.tail.width();
            cells.push_back(std::move(c));
        }
    }
    if (tail_width > tol)
        throw ToleranceExhausted("tolerance " + tol.str() + " below unbuilt-stage tail " + tail_width.str() +
                                 " at " + std::to_string(part.stage_count()) + " stages");

    for (unsigned depth = 8; depth <= SplittingPartition::kMaxDepth; depth *= 2) {
        ValueBound total{linear, linear};
        for (const auto& c : cells) {
            ValueBound v{c.exact, c.exact};
            for (const auto& [delta, set] : c.straddling) {
                const MeasureBound m = set->measure_in(c.window, depth);
                v += scale(delta, ValueBound{m.lo, m.hi});
            }
            v += c.tail;
            total += scale(c.orientation, v);
        }
        if (total.width() <= tol)
            return total;
    }
    throw ToleranceExhausted("tolerance " + tol.str() + " not reached at maximal depth");
}

GradientSample sample_gradient(const SaturatedFunction& f, const Point& x, unsigned depth) {
    if (!f.domain().contains(x))
        throw DomainError("gradient sample point outside the domain");
    GradientSample g;
    // With mu = 0 every member has weight 0, so membership is irrelevant.
    const bool flat = f.mu().sup_norm().is_zero();
    for (unsigned i = 0; i < f.dim(); ++i) {
        if (flat) {
            g.emplace_back(f.linear_part()[i]);
            continue;
        }
        const auto member = f.partition().membership(x[i], depth).member();
        if (member)
            g.emplace_back(f.weight(*member) + f.linear_part()[i]);
        else
            g.emplace_back(std::nullopt);
    }
    return g;
}

Rational lipschitz_norm(const SaturatedFunction& f) {
    Rational p;
    for (const auto& v : f.linear_part())
        p = max(p, v.abs());
    return f.mu().sup_norm() + p;
}

Rational lipschitz_lower_bound(const SaturatedFunction& f, unsigned budget) {
    if (budget == 0)
        throw DomainError("sampling budget must be positive");
    const SplittingPartition& part = f.partition();
    const Rational norm = lipschitz_norm(f);
    if (norm.is_zero())
        return Rational(0);

    unsigned axis = 0;
    for (unsigned i = 1; i < f.dim(); ++i)
        if (f.linear_part()[i].abs() > f.linear_part()[axis].abs())
            axis = i;
    const Rational& slope = f.linear_part()[axis];
    const Interval& side = f.domain().sides[axis];

    // Labels on which the derivative along `axis` is +-mu_k* (same sign as the slope first).
    const unsigned k_star = f.mu().argmax_up_to(part.stage_count());
    std::vector<unsigned> labels{2 * k_star + 1, 2 * k_star};
    if (f.weight(labels[0]).sign() * slope.sign() < 0)
        std::swap(labels[0], labels[1]);

    Rational best;
    unsigned tries = 0;
    for (unsigned label : labels) {
        for (const SetRef& ref : part.sets_with_label(label)) {
            const FatCantorSet& s = part.set(ref).set;
            for (unsigned level : {8u, 6u, 10u}) {
                if (tries == budget)
                    return best;
                const Rational len = s.piece_length(level);
                // Place [a, a+len] inside the domain side by an integer shift.
                const Rational a0 = s.host().lo;
                Rational shift{mpq_class((side.lo - a0).floor() + 1)};
                const Rational a = a0 + shift;
                if (!(side.lo < a && a + len < side.hi))
                    continue;
                ++tries;
                Point x = f.x0();
                Point y = f.x0();
                x[axis] = a;
                y[axis] = a + len;
                const Rational tol = len * norm / Rational(1000);
                try {
                    const ValueBound diff = eval_f(f, y, tol) - eval_f(f, x, tol);
                    const Rational abs_lo = max(max(diff.lo, -diff.hi), Rational(0));
                    best = max(best, abs_lo / len);
                } catch (const ToleranceExhausted&) {
                }
            }
        }
    }
    return best;
}

SaturatedFunction shift_to_ball(const SaturatedFunction& f, Point p, const Rational& r) {
    if (r.sign() < 0)
        throw DomainError("ball radius must be nonnegative");
    if (p.size() != f.dim())
        throw DomainError("ball center has wrong dimension");
    const Rational& sup = f.mu().sup_norm();
    SaturatedFunction base = f;
    if (sup != r) {
        if (sup.is_zero())
            throw DomainError("cannot rescale mu = 0 to radius " + r.str());
        base = SaturatedFunction(f.partition_handle(), f.mu().scaled(r / sup), f.dim(), f.domain(), f.x0());
    }
    return base.with_linear_part(std::move(p));
}

FunctionSample sample_point(const SaturatedFunction& f, const Point& x, const Rational& tol, unsigned depth) {
    return {x, eval_f(f, x, tol), sample_gradient(f, x, depth)};
}

std::string samples_csv(std::span<const FunctionSample> samples, bool decimal) {
    auto num = [decimal](const Rational& v) { return decimal ? v.decimal() : v.str(); };
    std::ostringstream out;
    const std::size_t d = samples.empty() ? 1 : samples.front().x.size();
    for (std::size_t i = 1; i <= d; ++i)
        out << 'x' << i << ',';
    out << "f_lo,f_hi";
    for (std::size_t i = 1; i <= d; ++i)
        out << ",g" << i;
    out << '\n';
    for (const auto& s : samples) {
        for (const auto& xi : s.x)
            out << num(xi) << ',';
        out << num(s.value.lo) << ',' << num(s.value.hi);
        for (const auto& gi : s.gradient)
            out << ',' << (gi ? num(*gi) : std::string("U"));
        out << '\n';
    }
    return out.str();
}

} // namespace clarkesat
