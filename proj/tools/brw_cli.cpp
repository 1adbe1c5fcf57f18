// Command-line front end: validate / cumulants / simulate / expected /
// expand / martingale / analyze / enumerate. Every output is a deterministic
// function of the flags, the input files, and the seed.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brw/analyze.hpp"
#include "brw/cumulants.hpp"
#include "brw/edgeworth.hpp"
#include "brw/errors.hpp"
#include "brw/io.hpp"
#include "brw/martingale.hpp"
#include "brw/model.hpp"
#include "brw/numeric.hpp"
#include "brw/oracle.hpp"
#include "brw/simulate.hpp"
#include "brw/version.hpp"

namespace {

using namespace brw;

/// Writes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw mismatch_error("cannot open for writing: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void ensure_assumptions(const ModelSpec& model) {
    ValidationReport rep = validate(model);
    if (!rep.all_pass())
        throw validation_error(rep.failing_letters(),
                               "model violates assumption(s) " + rep.failing_letters());
}

void emit_header(std::ostream& os, const ModelSpec& model, const std::string& kind) {
    os << "# version=" << kVersion << "\n";
    os << "# kind=" << kind << "\n";
    os << "# model-hash=" << model_hash_hex(model) << "\n";
}

std::string fmt(double v) { return format_double(v); }

struct Options {
    std::string model_path;
    std::string out;
    std::string run_path;
    std::string expected_path;
    std::vector<double> betas;
    double beta = 0.0;
    std::optional<double> beta_min, beta_max;
    double beta_step = 0.1;
    int order = 4;
    int r = 2;
    int n = -1;
    int steps = 0;
    std::uint64_t seed = 0;
    int snapshot_every = 0;
    std::vector<int> snapshots;
    unsigned long long t_exact = kExactSamplingThreshold;
    std::optional<double> tilt;
    bool show_ranges = false;
    bool exact_table = false;
    std::string what;
    std::string anchor = "floor";
    double alpha = 0.0;
    long long offset = 0;
    std::size_t guard = 1000000;
};

int cmd_validate(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    ValidationReport rep = validate(model);
    Sink sink(opt.out);
    std::ostream& os = sink.stream();
    emit_header(os, model, "validation-report");
    os << "assumption,pass,detail\n";
    for (const auto& r : rep.results)
        os << r.letter << "," << (r.pass ? 1 : 0) << "," << r.detail << "\n";
    if (!rep.all_pass()) {
        std::cerr << "validation failed: assumption(s) " << rep.failing_letters() << "\n";
        return 2;
    }
    return 0;
}

int cmd_cumulants(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    ensure_assumptions(model);
    Sink sink(opt.out);
    std::ostream& os = sink.stream();

    if (opt.show_ranges) {
        RangeInfo ri = ranges(model);
        emit_header(os, model, "tilt-ranges");
        os << "beta_minus,beta_plus,gamma_minus,gamma_plus\n";
        os << fmt(ri.beta_minus) << "," << fmt(ri.beta_plus) << ","
           << fmt(ri.gamma_minus) << "," << fmt(ri.gamma_plus) << "\n";
        return 0;
    }
    if (opt.tilt) {
        double beta = solve_tilt(model, *opt.tilt);
        emit_header(os, model, "tilt-solution");
        os << "theta,beta,information\n";
        os << fmt(*opt.tilt) << "," << fmt(beta) << "," << fmt(information(model, *opt.tilt)) << "\n";
        return 0;
    }
    if (opt.exact_table) {
        std::vector<mpq_class> kap = cumulants_at_origin_exact(model, opt.order);
        emit_header(os, model, "cumulants-exact");
        os << "order,value\n";
        for (std::size_t j = 0; j < kap.size(); ++j)
            os << (j + 1) << "," << kap[j].get_str() << "\n";
        return 0;
    }

    std::vector<double> betas = opt.betas;
    if (opt.beta_min && opt.beta_max) {
        for (double b = *opt.beta_min; b <= *opt.beta_max + 1e-12; b += opt.beta_step)
            betas.push_back(b);
    }
    if (betas.empty()) betas.push_back(0.0);

    emit_header(os, model, "cumulant-table");
    os << "beta,phi";
    for (int j = 1; j <= opt.order; ++j) os << ",kappa" << j;
    os << "\n";
    for (double b : betas) {
        CumulantTable t = cumulants_at(model, b, std::max(opt.order, 2));
        os << fmt(b) << "," << fmt(t.phi);
        for (int j = 1; j <= opt.order; ++j) os << "," << fmt(t.kappa[static_cast<std::size_t>(j - 1)]);
        os << "\n";
    }
    return 0;
}

int cmd_simulate(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    std::vector<int> schedule = opt.snapshots;
    if (opt.snapshot_every > 0)
        for (int t = opt.snapshot_every; t <= opt.steps; t += opt.snapshot_every)
            schedule.push_back(t);
    if (!schedule.empty()) schedule.push_back(opt.steps);
    RunRecord rec = run(model, opt.steps, opt.seed, schedule, opt.t_exact);
    if (opt.out.empty()) throw mismatch_error("simulate requires --out");
    write_run_csv(rec, opt.out);
    return 0;
}

int cmd_expected(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    if (opt.n < 0) throw mismatch_error("expected requires --n");
    ExpectedProfile ep = expected_profile(model, opt.n);
    if (opt.out.empty()) throw mismatch_error("expected requires --out");
    write_expected_csv(ep, model, opt.out);
    return 0;
}

int cmd_expand(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    ensure_assumptions(model);
    if (opt.run_path.empty() && opt.expected_path.empty() && opt.n < 0)
        throw mismatch_error("expand requires --run, --expected, or --n");
    if (opt.r < 0 || opt.r > kMaxExpansionOrder)
        throw mismatch_error("expansion order must lie in [0, 6]");

    int r_build = std::max(opt.r, 2);
    ExpansionSet set = build_expansion_set(model, opt.beta, r_build);
    double phi = set.cum.phi;

    std::optional<ExpectedProfile> expected;
    if (!opt.expected_path.empty())
        expected = read_expected_csv(opt.expected_path, model);
    else if (opt.run_path.empty() && opt.n >= 0)
        expected = expected_profile(model, opt.n);

    Sink sink(opt.out);
    std::ostream& os = sink.stream();
    emit_header(os, model, "expansion-residuals");
    os << "# beta=" << fmt(opt.beta) << "\n";
    os << "# r=" << opt.r << "\n";

    auto tilted = [&](double log_raw, long long n, long long k) {
        return std::isfinite(log_raw)
                   ? std::exp(opt.beta * static_cast<double>(k) - phi * static_cast<double>(n) + log_raw)
                   : 0.0;
    };

    if (!opt.run_path.empty()) {
        RunRecord rec = read_run_csv(opt.run_path, model);
        const Profile& last = rec.final_profile();
        MartingaleEstimate mart = w_n_derivatives(last, model, opt.beta, r_build);
        FSet f = assemble_F(set, mart);
        os << "# martingale-n=" << last.n << "\n";
        os << "n,k,x,predicted_r0,predicted_r1,predicted_r2,actual,residual_r2_scaled";
        if (expected) os << ",expected_actual";
        os << "\n";
        for (const Profile& snap : rec.snapshots) {
            if (snap.n <= 0) continue;
            if (expected && expected->n != snap.n) continue;
            double nd = static_cast<double>(snap.n);
            for (const auto& [k, cnt] : snap.counts) {
                double x = standardized_coord(model, opt.beta, snap.n, k);
                double p0 = eval_profile_expansion(set, f, snap.n, k, 0);
                double p1 = eval_profile_expansion(set, f, snap.n, k, 1);
                double p2 = eval_profile_expansion(set, f, snap.n, k, 2);
                double actual = tilted(log_big(cnt), snap.n, k);
                os << snap.n << "," << k << "," << fmt(x) << "," << fmt(p0) << "," << fmt(p1)
                   << "," << fmt(p2) << "," << fmt(actual) << ","
                   << fmt((actual - p2) * std::pow(nd, 1.5));
                if (expected) os << "," << fmt(tilted(expected->log_value(k), snap.n, k));
                os << "\n";
            }
        }
        return 0;
    }

    // Expected-profile mode: predictions use the deterministic q_j series.
    if (!expected) throw mismatch_error("expand requires --run, --expected, or --n");
    long long n = expected->n;
    if (n <= 0) throw mismatch_error("expansion needs n >= 1");
    double nd = static_cast<double>(n);
    os << "n,k,x,predicted_r0,predicted_r1,predicted_r2,actual,residual_r2_scaled\n";
    long long lo = expected->min_site();
    long long hi = expected->max_site();
    for (long long k = lo; k <= hi; ++k) {
        double actual = tilted(expected->log_value(k), n, k);
        double x = standardized_coord(model, opt.beta, n, k);
        double p0 = eval_expected_expansion(set, n, k, 0);
        double p1 = eval_expected_expansion(set, n, k, 1);
        double p2 = eval_expected_expansion(set, n, k, 2);
        os << n << "," << k << "," << fmt(x) << "," << fmt(p0) << "," << fmt(p1) << ","
           << fmt(p2) << "," << fmt(actual) << "," << fmt((actual - p2) * std::pow(nd, 1.5))
           << "\n";
    }
    return 0;
}

int cmd_martingale(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    ensure_assumptions(model);
    if (opt.run_path.empty()) throw mismatch_error("martingale requires --run");
    RunRecord rec = read_run_csv(opt.run_path, model);
    std::vector<double> betas = opt.betas;
    if (betas.empty()) betas.push_back(0.0);
    int order = std::max(opt.order, 2);

    Sink sink(opt.out);
    std::ostream& os = sink.stream();
    emit_header(os, model, "martingale-series");
    os << "# seed=" << rec.seed << "\n";
    os << "n,beta,W,W1,W2,logd1,logd2\n";
    for (const Profile& snap : rec.snapshots) {
        for (double b : betas) {
            MartingaleEstimate est = w_n_derivatives(snap, model, b, order);
            auto [d1, d2] = log_derivatives(est);
            os << snap.n << "," << fmt(b) << "," << fmt(est.value()) << "," << fmt(est.deriv(1))
               << "," << fmt(est.deriv(2)) << "," << fmt(d1) << "," << fmt(d2) << "\n";
        }
    }
    return 0;
}

int cmd_analyze(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    ensure_assumptions(model);
    if (opt.run_path.empty()) throw mismatch_error("analyze requires --run");
    RunRecord rec = read_run_csv(opt.run_path, model);
    Sink sink(opt.out);
    std::ostream& os = sink.stream();

    if (opt.what == "mode-height") {
        const Profile& last = rec.final_profile();
        MartingaleEstimate mart = w_n_derivatives(last, model, 0.0, 2);
        emit_header(os, model, "mode-height-series");
        os << "# seed=" << rec.seed << "\n";
        os << "# martingale-n=" << last.n << "\n";
        double q0 = height_limit_q(model, mart, 0.0);
        double qh = height_limit_q(model, mart, 0.5);
        os << "n,mode,height,tie,u_star,floor_u_star,ceil_u_star,theta,m_tilde,q_theta,q_zero,q_half\n";
        for (const Profile& snap : rec.snapshots) {
            if (snap.n <= 0) continue;
            ModeHeightEntry e = mode_height(snap, model, mart);
            os << e.n << "," << e.mode << "," << e.height.get_str() << "," << (e.tie ? 1 : 0)
               << "," << fmt(e.u_star) << "," << fmt(std::floor(e.u_star)) << ","
               << fmt(std::ceil(e.u_star)) << "," << fmt(e.theta) << "," << fmt(e.m_tilde)
               << "," << fmt(e.q_theta) << "," << fmt(q0) << "," << fmt(qh) << "\n";
        }
        return 0;
    }
    if (opt.what == "occupation") {
        Anchor anchor;
        if (opt.anchor == "floor") anchor = Anchor::floor_drift;
        else if (opt.anchor == "exact") anchor = Anchor::exact_drift;
        else if (opt.anchor == "sqrt") anchor = Anchor::sqrt_window;
        else throw mismatch_error("unknown anchor: " + opt.anchor);
        OccupationSeries series =
            occupation_series(rec, model, opt.beta, opt.offset, anchor, opt.alpha);
        emit_header(os, model, "occupation-series");
        os << "# seed=" << rec.seed << "\n";
        os << "# beta=" << fmt(series.beta) << "\n";
        os << "# offset=" << series.offset << "\n";
        os << "# anchor=" << opt.anchor << "\n";
        if (anchor == Anchor::sqrt_window) os << "# alpha=" << fmt(series.alpha) << "\n";
        os << "# martingale-n=" << series.mart_n << "\n";
        if (anchor != Anchor::sqrt_window) {
            try {
                MartingaleEstimate mart =
                    w_n_derivatives(rec.final_profile(), model, opt.beta, 2);
                LimitSet ls = limit_set(model, opt.beta, mart, opt.offset);
                os << "# limit-set=";
                for (std::size_t i = 0; i < ls.values.size(); ++i)
                    os << (i ? ";" : "") << fmt(ls.values[i]);
                os << (ls.continuum ? " (continuum endpoints)" : "") << "\n";
            } catch (const rationality_undetermined&) {
                // No exact drift class; the per-row reference column still applies.
            }
        }
        os << "n,k,c,scaled,reference\n";
        for (const auto& e : series.entries)
            os << e.n << "," << e.k << "," << fmt(e.c) << "," << fmt(e.scaled) << ","
               << fmt(e.reference) << "\n";
        return 0;
    }
    if (opt.what == "cdf") {
        emit_header(os, model, "cdf-residual-series");
        os << "# seed=" << rec.seed << "\n";
        os << "n,k,x,lhs,rhs,diff\n";
        for (const Profile& snap : rec.snapshots) {
            if (snap.n <= 0) continue;
            MartingaleEstimate mart = w_n_derivatives(snap, model, 0.0, 2);
            for (const CdfPoint& p : cdf_residual_series(snap, model, mart))
                os << snap.n << "," << p.k << "," << fmt(p.x) << "," << fmt(p.lhs) << ","
                   << fmt(p.rhs) << "," << fmt(p.lhs - p.rhs) << "\n";
        }
        return 0;
    }
    throw mismatch_error("unknown --what: " + opt.what);
}

int cmd_enumerate(const Options& opt) {
    ModelSpec model = load_model(opt.model_path);
    ensure_assumptions(model);
    int n = opt.n < 0 ? 3 : opt.n;
    TinyLaw law = enumerate_law(model, n, opt.guard);
    Sink sink(opt.out);
    std::ostream& os = sink.stream();
    emit_header(os, model, "tiny-law");
    os << "n,profile,prob\n";
    for (const auto& [key, prob] : law.entries) {
        os << law.n << ",";
        for (std::size_t i = 0; i < key.size(); ++i)
            os << (i ? ";" : "") << key[i].first << ":" << key[i].second;
        os << "," << prob.get_str() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice branching random walk: simulation, exact oracles, and profile expansions"};
    app.set_version_flag("--version", std::string(brw::kVersion));
    app.require_subcommand(1);

    Options opt;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", opt.model_path, "model JSON path")->required();
    };
    auto add_out = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--out", opt.out,
                                  required ? "output CSV path" : "output CSV path (stdout when omitted)");
        if (required) o->required();
    };

    CLI::App* validate = app.add_subcommand("validate", "check the standing assumptions");
    add_model(validate);
    add_out(validate, false);

    CLI::App* cumulants = app.add_subcommand("cumulants", "cumulant table, tilt solving, ranges");
    add_model(cumulants);
    cumulants->add_option("--beta", opt.betas, "tilt values (repeatable)");
    cumulants->add_option("--beta-min", opt.beta_min, "grid start");
    cumulants->add_option("--beta-max", opt.beta_max, "grid end");
    cumulants->add_option("--beta-step", opt.beta_step, "grid step");
    cumulants->add_option("--order", opt.order, "highest cumulant order")->check(CLI::Range(1, 8));
    cumulants->add_option("--tilt", opt.tilt, "solve phi'(beta) = theta for beta");
    cumulants->add_flag("--ranges", opt.show_ranges, "print (beta-, beta+) and (Gamma-, Gamma+)");
    cumulants->add_flag("--exact", opt.exact_table, "exact rational cumulants at beta = 0");
    add_out(cumulants, false);

    CLI::App* simulate = app.add_subcommand("simulate", "run the branching walk");
    add_model(simulate);
    simulate->add_option("--steps", opt.steps, "number of generations")->required()->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", opt.seed, "RNG seed")->required();
    simulate->add_option("--snapshot-every", opt.snapshot_every, "record every s generations");
    simulate->add_option("--snapshot", opt.snapshots, "record at these generations (repeatable)");
    simulate->add_option("--t-exact", opt.t_exact, "exact-sampling trial threshold");
    add_out(simulate, true);

    CLI::App* expected = app.add_subcommand("expected", "exact expected profile");
    add_model(expected);
    expected->add_option("--n", opt.n, "time index")->required();
    add_out(expected, true);

    CLI::App* expand = app.add_subcommand("expand", "expansion predictions vs actual values");
    add_model(expand);
    expand->add_option("--run", opt.run_path, "run CSV (profile mode)");
    expand->add_option("--expected", opt.expected_path, "expected-profile CSV (expectation mode)");
    expand->add_option("--n", opt.n, "compute the expected profile at this n instead of reading it");
    expand->add_option("--beta", opt.beta, "tilt");
    expand->add_option("--r", opt.r, "expansion order")->check(CLI::Range(0, 6));
    add_out(expand, false);

    CLI::App* martingale = app.add_subcommand("martingale", "martingale value and derivatives per snapshot");
    add_model(martingale);
    martingale->add_option("--run", opt.run_path, "run CSV")->required();
    martingale->add_option("--beta", opt.betas, "tilt values (repeatable)");
    martingale->add_option("--order", opt.order, "derivative order")->check(CLI::Range(2, 6));
    add_out(martingale, false);

    CLI::App* analyze = app.add_subcommand("analyze", "mode/height, occupation, or CDF series");
    add_model(analyze);
    analyze->add_option("--run", opt.run_path, "run CSV")->required();
    analyze->add_option("--what", opt.what, "mode-height | occupation | cdf")->required();
    analyze->add_option("--beta", opt.beta, "tilt (occupation)");
    analyze->add_option("--offset", opt.offset, "site offset a (occupation)");
    analyze->add_option("--anchor", opt.anchor, "floor | exact | sqrt (occupation)");
    analyze->add_option("--alpha", opt.alpha, "window position (anchor sqrt)");
    add_out(analyze, false);

    CLI::App* enumerate = app.add_subcommand("enumerate", "exact tiny-n law over profiles");
    add_model(enumerate);
    enumerate->add_option("--n", opt.n, "time index (default 3)");
    enumerate->add_option("--guard", opt.guard, "state-count guard");
    add_out(enumerate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(opt);
        if (app.got_subcommand(cumulants)) return cmd_cumulants(opt);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt);
        if (app.got_subcommand(expected)) return cmd_expected(opt);
        if (app.got_subcommand(expand)) return cmd_expand(opt);
        if (app.got_subcommand(martingale)) return cmd_martingale(opt);
        if (app.got_subcommand(analyze)) return cmd_analyze(opt);
        if (app.got_subcommand(enumerate)) return cmd_enumerate(opt);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const brw::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!e.letters().empty()) std::cerr << "failing assumption(s): " << e.letters() << "\n";
        return 2;
    } catch (const brw::range_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
