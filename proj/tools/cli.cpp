#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "clarkesat/errors.hpp"
#include "clarkesat/saturated_function.hpp"
#include "clarkesat/saturation_verifier.hpp"
#include "clarkesat/splitting_partition.hpp"
#include "clarkesat/stress_harness.hpp"

namespace clarkesat::cli {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raw option text; everything is parsed and validated before any computation.
struct Config {
    std::string partition_file;
    unsigned stages = 30;
    std::string gap_cap = SplittingPartition::default_gap_cap().str();
    unsigned max_stages = 400;
    std::string mu = "0:1";
    unsigned d = 1;
    std::string x0;
    std::string domain;
    std::string linear;
    std::string tol = "1/1000000";
    unsigned depth = 64;
    bool decimal = false;
};

Point parse_point(const std::string& text, unsigned d, const char* what) {
    Point p;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        p.push_back(Rational::parse(item));
    if (p.size() != d)
        throw ParseError(std::string(what) + " needs " + std::to_string(d) + " coordinates, got " +
                         std::to_string(p.size()));
    return p;
}

Rational parse_positive(const std::string& text, const char* what) {
    Rational r = Rational::parse(text);
    if (r.sign() <= 0)
        throw ParseError(std::string(what) + " must be positive");
    return r;
}

void print_bound(std::ostream& out, const Rational& lo, const Rational& hi, bool decimal) {
    out << lo.str() << ' ' << hi.str() << '\n';
    if (decimal)
        out << "approx " << lo.decimal() << ' ' << hi.decimal() << '\n';
}

SplittingPartition load_partition(const Config& c) {
    if (c.partition_file.empty())
        return SplittingPartition::build(c.stages, parse_positive(c.gap_cap, "--gap-cap"));
    std::ifstream in(c.partition_file);
    if (!in)
        throw IoError("cannot open " + c.partition_file);
    try {
        return SplittingPartition::load(in);
    } catch (const std::exception& e) {
        throw IoError(c.partition_file + ": " + e.what());
    }
}

struct FunctionSetup {
    CoefficientSource mu;
    Box domain;
    std::optional<Point> x0;
    Point linear;
};

FunctionSetup parse_function(const Config& c) {
    if (c.d == 0)
        throw ParseError("--d must be at least 1");
    FunctionSetup s{CoefficientSource::parse(c.mu), c.domain.empty() ? Box::unit(c.d) : Box::parse(c.domain), {},
                    Point(c.d, Rational(0))};
    if (s.domain.dim() != c.d)
        throw ParseError("--domain has " + std::to_string(s.domain.dim()) + " sides, --d is " + std::to_string(c.d));
    if (!c.x0.empty())
        s.x0 = parse_point(c.x0, c.d, "--x0");
    if (!c.linear.empty())
        s.linear = parse_point(c.linear, c.d, "--linear");
    return s;
}

SaturatedFunction make_function(const FunctionSetup& s, std::shared_ptr<const SplittingPartition> part) {
    return SaturatedFunction(std::move(part), s.mu, static_cast<unsigned>(s.linear.size()), s.domain, s.x0)
        .with_linear_part(s.linear);
}

void write_output(const std::string& file, const std::string& text, std::ostream& out) {
    if (file.empty()) {
        out << text;
        return;
    }
    std::ofstream f(file, std::ios::binary);
    if (!f || !(f << text) || !f.flush())
        throw IoError("cannot write " + file);
}

void add_partition_options(CLI::App* cmd, Config& c) {
    cmd->add_option("--partition", c.partition_file, "SPLITPART v1 file (otherwise built from --stages)");
    cmd->add_option("--stages", c.stages, "stages to build when no file is given")->capture_default_str();
    cmd->add_option("--gap-cap", c.gap_cap, "stage n gap length cap is gap_cap * 2^-n")->capture_default_str();
}

void add_function_options(CLI::App* cmd, Config& c) {
    add_partition_options(cmd, c);
    cmd->add_option("--mu", c.mu, "coefficients 'k:p/q,...' or ones|alternating|harmonic|zero")
        ->capture_default_str();
    cmd->add_option("--d", c.d, "dimension")->capture_default_str();
    cmd->add_option("--x0", c.x0, "base point (default: domain centre)");
    cmd->add_option("--domain", c.domain, "open box 'lo:hi,...' (default (0,1)^d)");
    cmd->add_option("--linear", c.linear, "affine part p, one entry per coordinate");
    cmd->add_option("--tol", c.tol, "value tolerance")->capture_default_str();
    cmd->add_option("--depth", c.depth, "membership depth for gradient samples")->capture_default_str();
    cmd->add_flag("--decimal", c.decimal, "also print approximate decimals");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Clarke-saturated Lipschitz functions with certified bounds", "clarkesat"};
    app.require_subcommand(1);
    Config c;

    std::string out_file;
    auto* build = app.add_subcommand("build", "build a splitting partition and write SPLITPART v1");
    build->add_option("--stages", c.stages, "number of stages")->required();
    build->add_option("--gap-cap", c.gap_cap, "stage n gap length cap is gap_cap * 2^-n")->capture_default_str();
    build->add_option("--out", out_file, "output file (default stdout)");

    std::string x_text;
    auto* eval = app.add_subcommand("eval", "certified enclosure of f(x)");
    add_function_options(eval, c);
    eval->add_option("--x", x_text, "evaluation point")->required();

    std::string point_text, radius_text = "1/100";
    std::optional<unsigned> K;
    auto* certify = app.add_subcommand("certify", "saturation certificate at a point");
    add_function_options(certify, c);
    certify->add_option("--point", point_text, "centre (default x0)");
    certify->add_option("--radius", radius_text, "l1 radius of the box")->capture_default_str();
    certify->add_option("--K", K, "truncation (default: last nonzero index of a finite mu)");
    certify->add_option("--max-stages", c.max_stages, "extend the partition up to this many stages")
        ->capture_default_str();

    unsigned k_index = 0;
    std::string window_text;
    auto* meas = app.add_subcommand("measure", "enclosure of lambda(A_k ∩ window)");
    add_partition_options(meas, c);
    meas->add_option("--k", k_index, "member index")->required();
    meas->add_option("--window", window_text, "interval inside [0,1], e.g. '(0/1,1/1)'")->required();
    meas->add_option("--tol", c.tol, "width")->capture_default_str();
    meas->add_flag("--decimal", c.decimal, "also print approximate decimals");

    unsigned steps = 100;
    std::string step_c = StepSchedule{}.c.str(), init_text, stress_radius = StressOptions{}.radius.str();
    auto* stress = app.add_subcommand("stress", "subgradient run with stationarity certificates, CSV");
    add_function_options(stress, c);
    stress->add_option("--steps", steps, "iterations")->capture_default_str();
    stress->add_option("--step-c", step_c, "step size c in c/sqrt(t)")->capture_default_str();
    stress->add_option("--x-init", init_text, "start (default x0)");
    stress->add_option("--radius", stress_radius, "certification radius")->capture_default_str();
    stress->add_option("--K", K, "truncation");
    stress->add_option("--out", out_file, "CSV file (default stdout)");

    unsigned grid = 0;
    auto* plot = app.add_subcommand("plot", "certified samples of f_k on a grid, CSV");
    add_partition_options(plot, c);
    plot->add_option("--k", k_index, "index k of f_k")->required();
    plot->add_option("--grid", grid, "number of interior grid points")->required();
    plot->add_option("--x0", c.x0, "base point (default domain centre)");
    plot->add_option("--domain", c.domain, "open interval 'lo:hi' (default 0:1)");
    plot->add_option("--tol", c.tol, "value tolerance")->capture_default_str();
    plot->add_option("--depth", c.depth, "membership depth")->capture_default_str();
    plot->add_option("--out", out_file, "CSV file (default stdout)");
    plot->add_flag("--decimal", c.decimal, "decimal columns (approximate)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*build) {
            const Rational cap = parse_positive(c.gap_cap, "--gap-cap");
            if (c.stages == 0)
                throw ParseError("--stages must be at least 1");
            const auto p = SplittingPartition::build(c.stages, cap);
            write_output(out_file, p.to_text(), out);
            if (!out_file.empty())
                out << "stages " << p.stage_count() << " sets " << p.set_count() << '\n';
        } else if (*eval) {
            const Rational tol = parse_positive(c.tol, "--tol");
            const FunctionSetup s = parse_function(c);
            const Point x = parse_point(x_text, c.d, "--x");
            const auto f = make_function(s, std::make_shared<const SplittingPartition>(load_partition(c)));
            const ValueBound v = eval_f(f, x, tol);
            print_bound(out, v.lo, v.hi, c.decimal);
        } else if (*certify) {
            const Rational r = parse_positive(radius_text, "--radius");
            const FunctionSetup s = parse_function(c);
            std::optional<Point> point;
            if (!point_text.empty())
                point = parse_point(point_text, c.d, "--point");
            SplittingPartition part = load_partition(c);
            const auto cert = with_auto_extension(part, c.max_stages, [&](const SplittingPartition& q) {
                const auto f = make_function(s, std::make_shared<const SplittingPartition>(q));
                const auto trunc = K ? K : default_truncation(f);
                if (!trunc)
                    throw ParseError("--K is required for generator coefficients");
                return certify_saturation(f, point ? *point : f.x0(), r, *trunc);
            });
            out << cert.report();
            out << "stages " << part.stage_count() << '\n';
        } else if (*meas) {
            const Rational tol = parse_positive(c.tol, "--tol");
            const Interval w = Interval::parse(window_text);
            const auto m = load_partition(c).measure_in(k_index, w, tol);
            print_bound(out, m.lo, m.hi, c.decimal);
        } else if (*stress) {
            const FunctionSetup s = parse_function(c);
            StepSchedule schedule{Rational::parse(step_c)};
            if (schedule.c.sign() < 0)
                throw ParseError("--step-c must be nonnegative");
            StressOptions opts;
            opts.tol = parse_positive(c.tol, "--tol");
            opts.depth = c.depth;
            opts.radius = parse_positive(stress_radius, "--radius");
            opts.truncation = K;
            const auto f = make_function(s, std::make_shared<const SplittingPartition>(load_partition(c)));
            const Point start = init_text.empty() ? f.x0() : parse_point(init_text, c.d, "--x-init");
            const auto traj = run_subgradient(f, start, steps, schedule, opts);
            write_output(out_file, trajectory_csv(traj, c.decimal), out);
        } else if (*plot) {
            if (grid == 0)
                throw ParseError("--grid must be at least 1");
            c.d = 1;
            c.mu = std::to_string(k_index) + ":1";
            const Rational tol = parse_positive(c.tol, "--tol");
            const FunctionSetup s = parse_function(c);
            const auto f = make_function(s, std::make_shared<const SplittingPartition>(load_partition(c)));
            const Interval& side = f.domain().sides[0];
            std::vector<FunctionSample> samples;
            for (unsigned j = 1; j <= grid; ++j) {
                const Rational t = side.lo + side.length() * Rational(j, static_cast<std::int64_t>(grid) + 1);
                samples.push_back(sample_point(f, {t}, tol, c.depth));
            }
            write_output(out_file, samples_csv(samples, c.decimal), out);
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NotYetCovered& e) {
        err << "not yet covered: " << e.what() << '\n';
        return kNotYetCovered;
    } catch (const ToleranceExhausted& e) {
        err << "tolerance exhausted: " << e.what() << '\n';
        return kToleranceExhausted;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

} // namespace clarkesat::cli
