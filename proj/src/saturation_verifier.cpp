#include "clarkesat/saturation_verifier.hpp"

#include <map>
#include <sstream>

#include "clarkesat/errors.hpp"

namespace clarkesat {

namespace {

constexpr unsigned kCertDepth = 8;
constexpr unsigned kMaxVertexDim = 20;

std::string point_str(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            out += ',';
        out += p[i].str();
    }
    return out + ")";
}

// Lower bound on lambda(A_label ∩ w) for a window anywhere on the line.
Rational member_lower_bound(const SplittingPartition& part, unsigned label, const Interval& w) {
    Rational total;
    mpz_class m = w.lo.floor();
    for (;;) {
        const Rational base{mpq_class(m)};
        if (!(base < w.hi))
            break;
        const Rational lo = max(w.lo, base) - base;
        const Rational hi = min(w.hi, base + Rational(1)) - base;
        if (lo < hi)
            total += part.measure_at_depth(label, Interval::closed(lo, hi), kCertDepth).lo;
        ++m;
    }
    return total;
}

Box certification_box(const SaturatedFunction& f, const Point& x, const Rational& r) {
    if (x.size() != f.dim())
        throw DomainError("point has wrong dimension");
    if (r.sign() <= 0)
        throw DomainError("radius must be positive");
    const Rational h = r / Rational(f.dim());
    Box box;
    for (unsigned i = 0; i < f.dim(); ++i) {
        const Interval& side = f.domain().sides[i];
        const Interval s = Interval::closed(x[i] - h, x[i] + h);
        if (!(side.lo < s.lo && s.hi < side.hi))
            throw DomainError("certification box leaves the domain in coordinate " + std::to_string(i + 1));
        box.sides.push_back(s);
    }
    return box;
}

} // namespace

std::optional<unsigned> default_truncation(const SaturatedFunction& f) {
    if (!f.mu().is_finite())
        return std::nullopt;
    return f.mu().last_index().value_or(0);
}

SaturationCertificate certify_saturation(const SaturatedFunction& f, const Point& x, const Rational& r,
                                         unsigned K) {
    if (f.dim() > kMaxVertexDim)
        throw DomainError("too many sign vertices in dimension " + std::to_string(f.dim()));
    const SplittingPartition& part = f.partition();
    SaturationCertificate c{x, r, K, certification_box(f, x, r), f.mu().max_abs_up_to(K), {}, {}, {}};
    const unsigned d = f.dim();
    const Point& p = f.linear_part();

    std::map<std::pair<unsigned, unsigned>, Rational> cache; // (label, coordinate) -> bound
    auto bound = [&](unsigned label, unsigned i) -> const Rational& {
        auto [it, fresh] = cache.try_emplace({label, i});
        if (fresh)
            it->second = member_lower_bound(part, label, c.box.sides[i]);
        return it->second;
    };

    for (unsigned k = 0; k <= K; ++k) {
        const Rational mu = f.mu().at(k);
        if (mu.is_zero())
            continue;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            VertexCertificate v{k, {}, {}, {}, Rational(1), {}};
            for (unsigned i = 0; i < d; ++i) {
                const bool plus = ((mask >> i) & 1u) == 0;
                const unsigned label = plus ? 2 * k + 1 : 2 * k;
                const Rational& lb = bound(label, i);
                if (lb.sign() <= 0)
                    throw NotYetCovered("no built set of A_" + std::to_string(label) + " inside " +
                                        c.box.sides[i].str() + " (increase stages)");
                v.signs.push_back(plus ? 1 : -1);
                v.labels.push_back(label);
                v.lower_bounds.push_back(lb);
                v.product *= lb;
                v.value.push_back((plus ? mu : -mu) + p[i]);
            }
            c.vertices.push_back(std::move(v));
        }
    }

    // Zero region: per coordinate, the first built label of weight 0 with mass in the window.
    ZeroRegion z{{}, {}, Rational(1), p};
    for (unsigned i = 0; i < d && z.labels.size() == i; ++i) {
        for (unsigned label = 0; label <= part.stage_count(); ++label) {
            if (!f.weight(label).is_zero())
                continue;
            const Rational& lb = bound(label, i);
            if (lb.sign() > 0) {
                z.labels.push_back(label);
                z.lower_bounds.push_back(lb);
                z.product *= lb;
                break;
            }
        }
    }
    if (z.labels.size() == d)
        c.zero = std::move(z);

    for (unsigned i = 0; i < d; ++i)
        c.hull.push_back(Interval::closed(p[i] - c.m, p[i] + c.m));
    if (c.m.is_zero() && !c.zero)
        throw NotYetCovered("no certified zero-gradient region in the box (increase stages)");
    return c;
}

bool SaturationCertificate::verify() const {
    const std::size_t d = x.size();
    std::vector<Point> values;
    for (const auto& v : vertices) {
        if (v.labels.size() != d || v.lower_bounds.size() != d || v.value.size() != d)
            return false;
        Rational prod(1);
        for (const auto& lb : v.lower_bounds) {
            if (lb.sign() <= 0)
                return false;
            prod *= lb;
        }
        if (prod != v.product)
            return false;
        values.push_back(v.value);
    }
    if (zero) {
        Rational prod(1);
        for (const auto& lb : zero->lower_bounds) {
            if (lb.sign() <= 0)
                return false;
            prod *= lb;
        }
        if (prod != zero->product || zero->labels.size() != d)
            return false;
        values.push_back(zero->value);
    }
    if (hull.size() != d || values.empty())
        return false;
    for (const auto& val : values)
        for (std::size_t i = 0; i < d; ++i)
            if (!hull[i].contains(val[i]))
                return false;
    // Every corner of the hull cube must be a certified value.
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        Point corner;
        for (std::size_t i = 0; i < d; ++i)
            corner.push_back(((mask >> i) & 1u) ? hull[i].lo : hull[i].hi);
        bool found = false;
        for (const auto& val : values)
            if (val == corner) {
                found = true;
                break;
            }
        if (!found)
            return false;
    }
    return true;
}

std::string SaturationCertificate::report() const {
    std::ostringstream out;
    out << "saturation certificate\n";
    out << "point " << point_str(x) << "\n";
    out << "radius " << radius.str() << " box " << box.str() << "\n";
    out << "truncation K=" << truncation << " m " << m.str() << "\n";
    for (const auto& v : vertices) {
        out << "vertex k=" << v.k << " signs (";
        for (std::size_t i = 0; i < v.signs.size(); ++i)
            out << (i ? "," : "") << (v.signs[i] > 0 ? '+' : '-');
        out << ") value " << point_str(v.value) << " labels (";
        for (std::size_t i = 0; i < v.labels.size(); ++i)
            out << (i ? "," : "") << v.labels[i];
        out << ") lower " << v.product.str() << "\n";
    }
    if (zero) {
        out << "zero value " << point_str(zero->value) << " labels (";
        for (std::size_t i = 0; i < zero->labels.size(); ++i)
            out << (i ? "," : "") << zero->labels[i];
        out << ") lower " << zero->product.str() << "\n";
    }
    out << "hull";
    for (const auto& h : hull)
        out << ' ' << h.str();
    out << "\n";
    return out.str();
}

Rational stationarity_gap(const SaturatedFunction& f, const Point& x, const Rational& r, unsigned K) {
    const SaturationCertificate c = certify_saturation(f, x, r, K);
    Rational gap;
    for (const auto& h : c.hull) {
        if (h.lo.sign() > 0)
            gap = max(gap, h.lo);
        else if (h.hi.sign() < 0)
            gap = max(gap, -h.hi);
    }
    return gap;
}

std::vector<Rational> independence_witnesses(const SplittingPartition& partition, unsigned K) {
    std::vector<Rational> w;
    for (unsigned j = 0; j < K; ++j) {
        const unsigned label = 2 * j + 1;
        const auto refs = label <= partition.stage_count() ? partition.sets_with_label(label)
                                                            : std::span<const SetRef>{};
        if (refs.empty())
            throw NotYetCovered("no built set of A_" + std::to_string(label) + " (increase stages)");
        const FatCantorSet& s = partition.set(refs.front()).set;
        w.push_back(s.host().lo + s.piece_length(1));
    }
    return w;
}

SignMatrix independence_fingerprint(const SplittingPartition& partition, std::span<const Rational> witnesses) {
    SignMatrix m;
    for (const auto& x : witnesses) {
        std::vector<int> row;
        for (unsigned k = 0; k < witnesses.size(); ++k) {
            switch (eval_g(partition, k, x, SplittingPartition::kMaxDepth)) {
            case GValue::Plus: row.push_back(1); break;
            case GValue::Minus: row.push_back(-1); break;
            case GValue::Zero: row.push_back(0); break;
            case GValue::Undecided: throw NotYetCovered("witness " + x.str() + " undecided");
            }
        }
        m.push_back(std::move(row));
    }
    return m;
}

SignMatrix independence_fingerprint(const SplittingPartition& partition, unsigned K) {
    const auto w = independence_witnesses(partition, K);
    return independence_fingerprint(partition, w);
}

bool nonsingular(const SignMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<Rational>> a;
    for (const auto& row : m) {
        if (row.size() != n)
            return false;
        std::vector<Rational> r;
        for (int v : row)
            r.emplace_back(v);
        a.push_back(std::move(r));
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col].is_zero())
            ++piv;
        if (piv == n)
            return false;
        std::swap(a[piv], a[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col].is_zero())
                continue;
            const Rational factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= factor * a[col][c];
        }
    }
    return true;
}

IsometryWitness isometry_witness(const SaturatedFunction& f, unsigned K) {
    const unsigned k = f.mu().argmax_up_to(K);
    IsometryWitness w{{}, {}, Rational(0), f.mu().max_abs_up_to(K)};
    const SplittingPartition& part = f.partition();
    if (w.truncated_norm.is_zero()) {
        w.x = f.x0();
        w.gradient.assign(f.dim(), Rational(0));
        return w;
    }
    const unsigned label = 2 * k + 1;
    const auto refs = label <= part.stage_count() ? part.sets_with_label(label) : std::span<const SetRef>{};
    for (unsigned i = 0; i < f.dim(); ++i) {
        const Interval& side = f.domain().sides[i];
        std::optional<Rational> xi;
        for (const SetRef& ref : refs) {
            const FatCantorSet& s = part.set(ref).set;
            const Rational t = s.host().lo + s.piece_length(1);
            const Rational shifted = t + Rational(mpq_class((side.lo - t).floor() + 1));
            if (side.contains(shifted)) {
                xi = shifted;
                break;
            }
        }
        if (!xi)
            throw NotYetCovered("no built set of A_" + std::to_string(label) + " reachable in coordinate " +
                                std::to_string(i + 1));
        w.x.push_back(*xi);
    }
    const SaturatedFunction plain = f.with_linear_part(Point(f.dim(), Rational(0)));
    for (const auto& g : sample_gradient(plain, w.x, SplittingPartition::kMaxDepth)) {
        if (!g)
            throw NotYetCovered("isometry witness undecided");
        w.gradient.push_back(*g);
        w.witness_norm = max(w.witness_norm, g->abs());
    }
    return w;
}

} // namespace clarkesat
