#include "brw/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brw/errors.hpp"
#include "brw/numeric.hpp"

namespace brw {

double standardized_coord(const ModelSpec& model, double beta, long long n, long long k) {
    if (n <= 0) throw mismatch_error("standardized coordinate needs n >= 1");
    CumulantTable cum = cumulants_at(model, beta, 2);
    double nd = static_cast<double>(n);
    return (static_cast<double>(k) - cum.mu() * nd) / (cum.sigma() * std::sqrt(nd));
}

std::map<long long, double> centered_profile(const Profile& profile, const ModelSpec& model,
                                             double beta, const ExpectedProfile& expected,
                                             const MartingaleEstimate& mart) {
    if (profile.n != expected.n) throw mismatch_error("profile and expected profile disagree on n");
    if (mart.beta != beta) throw mismatch_error("martingale estimate tilt differs");
    double w = mart.value();
    std::map<long long, double> out;
    for (const auto& [site, cnt] : profile.counts)
        out[site] = mpz_get_d(cnt.get_mpz_t()) - w * expected.value(site);
    if (expected.exact) {
        for (const auto& [site, wt] : expected.weights)
            if (!out.count(site)) out[site] = -w * wt.get_d();
    } else {
        for (const auto& [site, wt] : expected.weights_d)
            if (!out.count(site)) out[site] = -w * wt;
    }
    return out;
}

double r_of_c_params(double sigma, double kappa3, double w1, double w2, double c) {
    double s2 = sigma * sigma;
    return (w1 * (c + kappa3 / (2.0 * s2)) - 0.5 * w2) /
           (std::sqrt(2.0 * std::numbers::pi) * s2 * sigma);
}

double r_of_c(const ModelSpec& model, double beta, const MartingaleEstimate& mart, double c) {
    if (mart.order() < 2) throw mismatch_error("R(c) needs martingale order >= 2");
    if (mart.beta != beta) throw mismatch_error("martingale estimate tilt differs");
    CumulantTable cum = cumulants_at(model, beta, 3);
    return r_of_c_params(cum.sigma(), cum.kappa[2], mart.deriv(1), mart.deriv(2), c);
}

LimitSet limit_set(const ModelSpec& model, double beta, const MartingaleEstimate& mart,
                   long long a) {
    LimitSet out;
    double ad = static_cast<double>(a);
    if (model.drift == DriftClass::declared_irrational) {
        if (beta != 0.0) throw rationality_undetermined("tilted drift rationality is not decidable");
        out.continuum = true;
        out.values = {r_of_c(model, beta, mart, ad - 1.0), r_of_c(model, beta, mart, ad)};
        return out;
    }
    if (beta != 0.0) throw rationality_undetermined("tilted drift rationality is not decidable");
    if (!model.exact()) throw rationality_undetermined("drift rationality needs exact probabilities");
    std::vector<mpq_class> kap = cumulants_at_origin_exact(model, 1);
    mpq_class drift = kap[0];
    mpz_class q = drift.get_den();
    if (mpz_fits_slong_p(q.get_mpz_t()) == 0)
        throw explosion_guard_error("drift denominator too large to enumerate");
    long qq = mpz_get_si(q.get_mpz_t());
    out.values.reserve(static_cast<std::size_t>(qq));
    for (long j = 0; j < qq; ++j)
        out.values.push_back(r_of_c(model, beta, mart, ad - static_cast<double>(j) / static_cast<double>(qq)));
    return out;
}

ModeHeightEntry mode_height(const Profile& profile, const ModelSpec& model,
                            const MartingaleEstimate& mart) {
    if (!profile.occupied()) throw empty_profile_error("profile has no particles");
    if (profile.n <= 0) throw mismatch_error("mode analysis needs n >= 1");
    if (mart.beta != 0.0) throw mismatch_error("mode analysis works at beta = 0");
    if (mart.order() < 2) throw mismatch_error("mode analysis needs martingale order >= 2");

    ModeHeightEntry e;
    e.n = profile.n;
    e.height = 0;
    bool first = true;
    for (const auto& [site, cnt] : profile.counts) {
        if (first || cnt > e.height) {
            e.mode = site;
            e.height = cnt;
            e.tie = false;
            first = false;
        } else if (cnt == e.height) {
            e.tie = true;  // smallest site kept; counts.begin() iterates ascending
        }
    }

    CumulantTable cum = cumulants_at(model, 0.0, 4);
    double sigma2 = cum.sigma2();
    double kappa3 = cum.kappa[2];
    auto [d1, d2] = log_derivatives(mart);
    double nd = static_cast<double>(profile.n);
    e.u_star = cum.mu() * nd + d1 - kappa3 / (2.0 * sigma2);
    double frac = e.u_star - std::floor(e.u_star);
    e.theta = std::min(frac, 1.0 - frac);

    double w = mart.value();
    double log_height = log_big(e.height);
    double log_mn = nd * cum.phi;  // phi(0) = log m
    double ratio = std::exp(0.5 * std::log(2.0 * std::numbers::pi * nd) + std::log(cum.sigma()) +
                            log_height - std::log(w) - log_mn);
    e.m_tilde = 2.0 * sigma2 * nd * (1.0 - ratio);
    e.q_theta = kappa3 * kappa3 / (6.0 * sigma2 * sigma2) - cum.kappa[3] / (4.0 * sigma2) +
                e.theta * e.theta + d2;
    return e;
}

double height_limit_q(const ModelSpec& model, const MartingaleEstimate& mart, double theta) {
    if (mart.beta != 0.0) throw mismatch_error("height limit works at beta = 0");
    CumulantTable cum = cumulants_at(model, 0.0, 4);
    double sigma2 = cum.sigma2();
    double kappa3 = cum.kappa[2];
    auto [d1, d2] = log_derivatives(mart);
    (void)d1;
    return kappa3 * kappa3 / (6.0 * sigma2 * sigma2) - cum.kappa[3] / (4.0 * sigma2) +
           theta * theta + d2;
}

std::vector<CdfPoint> cdf_residual_series(const Profile& profile, const ModelSpec& model,
                                          const MartingaleEstimate& mart) {
    if (!profile.occupied()) throw empty_profile_error("profile has no particles");
    if (profile.n <= 0) throw mismatch_error("cdf analysis needs n >= 1");
    if (mart.beta != 0.0) throw mismatch_error("cdf analysis works at beta = 0");
    if (mart.order() < 2) throw mismatch_error("cdf analysis needs martingale order >= 2");

    CumulantTable cum = cumulants_at(model, 0.0, 3);
    double nd = static_cast<double>(profile.n);
    double sigma = cum.sigma();
    double sigma2 = cum.sigma2();
    double kappa3 = cum.kappa[2];
    double root_n = std::sqrt(nd);
    double w = mart.value();
    if (!(w > 0.0)) throw non_positive_w_error("martingale value is not positive");
    double d1 = mart.deriv(1) / w;
    double log_norm = std::log(w) + nd * cum.phi;

    std::vector<CdfPoint> out;
    out.reserve(profile.counts.size());
    mpz_class partial = 0;
    for (const auto& [site, cnt] : profile.counts) {
        partial += cnt;
        CdfPoint p;
        p.k = site;
        p.x = (static_cast<double>(site) - cum.mu() * nd) / (sigma * root_n);
        p.lhs = std::exp(log_big(partial) - log_norm) - normal_cdf(p.x);
        p.rhs = std::exp(-0.5 * p.x * p.x) / (sigma * std::sqrt(2.0 * std::numbers::pi * nd)) *
                (0.5 - kappa3 / (6.0 * sigma2) * (p.x * p.x - 1.0) - d1);
        out.push_back(p);
    }
    return out;
}

std::pair<double, double> cdf_residual(const Profile& profile, const ModelSpec& model,
                                       const MartingaleEstimate& mart, long long k) {
    if (!profile.occupied()) throw empty_profile_error("profile has no particles");
    if (profile.n <= 0) throw mismatch_error("cdf analysis needs n >= 1");
    if (mart.beta != 0.0) throw mismatch_error("cdf analysis works at beta = 0");
    double w = mart.value();
    if (!(w > 0.0)) throw non_positive_w_error("martingale value is not positive");

    CumulantTable cum = cumulants_at(model, 0.0, 3);
    double nd = static_cast<double>(profile.n);
    double x = (static_cast<double>(k) - cum.mu() * nd) / (cum.sigma() * std::sqrt(nd));
    double log_norm = std::log(w) + nd * cum.phi;
    mpz_class partial = 0;
    for (const auto& [site, cnt] : profile.counts) {
        if (site > k) break;
        partial += cnt;
    }
    double lhs = (partial > 0 ? std::exp(log_big(partial) - log_norm) : 0.0) - normal_cdf(x);
    double rhs = std::exp(-0.5 * x * x) / (cum.sigma() * std::sqrt(2.0 * std::numbers::pi * nd)) *
                 (0.5 - cum.kappa[2] / (6.0 * cum.sigma2()) * (x * x - 1.0) - mart.deriv(1) / w);
    return {lhs, rhs};
}

OccupationSeries occupation_series(const RunRecord& rec, const ModelSpec& model, double beta,
                                   long long offset, Anchor anchor, double alpha) {
    if (rec.snapshots.empty()) throw empty_profile_error("run record holds no snapshots");
    RangeInfo ri = ranges(model);
    if (!(beta > ri.beta_minus && beta < ri.beta_plus))
        throw range_error("tilt lies outside the admissible interval");

    CumulantTable cum = cumulants_at(model, beta, 3);
    double mu = cum.mu();
    double sigma = cum.sigma();
    double sigma2 = cum.sigma2();
    double kappa3 = cum.kappa[2];

    const Profile& last = rec.final_profile();
    MartingaleEstimate mart = w_n_derivatives(last, model, beta, 2);
    double w1 = mart.deriv(1);
    double w2 = mart.deriv(2);

    // One iterative pass covers every snapshot's expected profile.
    std::vector<ExpectedProfile> eps = expected_profile_sequence(model, last.n);

    OccupationSeries series;
    series.beta = beta;
    series.offset = offset;
    series.anchor = anchor;
    series.alpha = alpha;
    series.mart_n = last.n;

    for (const Profile& snap : rec.snapshots) {
        if (snap.n <= 0) continue;
        double nd = static_cast<double>(snap.n);
        OccupationEntry e;
        e.n = snap.n;
        switch (anchor) {
            case Anchor::floor_drift:
                e.k = static_cast<long long>(std::floor(mu * nd)) + offset;
                break;
            case Anchor::exact_drift: {
                double kn = mu * nd;
                double rounded = std::round(kn);
                if (std::abs(kn - rounded) > 1e-9)
                    throw mismatch_error("exact anchoring needs integer drift positions");
                e.k = static_cast<long long>(rounded) + offset;
                break;
            }
            case Anchor::sqrt_window:
                e.k = static_cast<long long>(std::floor(mu * nd)) +
                      static_cast<long long>(std::ceil(alpha * sigma * std::sqrt(nd)));
                break;
        }
        e.c = static_cast<double>(e.k) - mu * nd;

        // Centered value e^{beta k - phi n} (L_n(k) - W E L_n(k)).
        const ExpectedProfile& ep = eps[static_cast<std::size_t>(snap.n)];
        double centered = 0.0;
        {
            double lw = beta * static_cast<double>(e.k) - cum.phi * nd;
            double actual = 0.0;
            mpz_class cnt = snap.count(e.k);
            if (cnt > 0) actual = std::exp(lw + log_big(cnt));
            double expv = 0.0;
            double lv = ep.log_value(e.k);
            if (std::isfinite(lv)) expv = std::exp(lw + lv);
            centered = actual - mart.value() * expv;
        }

        if (anchor == Anchor::sqrt_window) {
            e.scaled = nd * centered;
            e.reference = alpha * std::exp(-0.5 * alpha * alpha) * w1 /
                          (std::sqrt(2.0 * std::numbers::pi) * sigma2);
        } else {
            e.scaled = std::pow(nd, 1.5) * centered;
            e.reference = r_of_c_params(sigma, kappa3, w1, w2, e.c);
        }
        series.entries.push_back(e);
    }
    return series;
}

}  // namespace brw
