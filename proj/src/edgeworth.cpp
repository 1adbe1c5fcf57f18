#include "brw/edgeworth.hpp"

#include <cmath>
#include <numbers>

#include "brw/errors.hpp"

namespace brw {

ExpansionSet build_expansion_set(const ModelSpec& model, double beta, int r) {
    if (r < 0 || r > kMaxExpansionOrder)
        throw mismatch_error("expansion order must lie in [0, 6]");
    ExpansionSet set;
    set.beta = beta;
    set.r = r;
    set.cum = cumulants_at(model, beta, std::max(r + 2, 2));
    double sigma = set.cum.sigma();

    std::vector<Polynomial<double>> p = tilde_p<double>(set.cum.kappa, r);

    set.Q.resize(static_cast<std::size_t>(r) + 1);
    set.q.resize(static_cast<std::size_t>(r) + 1);
    for (int j = 0; j <= r; ++j) {
        auto& row = set.Q[static_cast<std::size_t>(j)];
        row.resize(static_cast<std::size_t>(j) + 1);
        // Q_{m,j} is the image of u^m P_{j-m}(u) under u -> -D/sigma.
        for (int m = 0; m <= j; ++m)
            row[static_cast<std::size_t>(m)] =
                operator_image<double>(p[static_cast<std::size_t>(j - m)].shifted(m), sigma);
        set.q[static_cast<std::size_t>(j)] = row[0];
    }
    return set;
}

FSet assemble_F(const ExpansionSet& set, const MartingaleEstimate& mart) {
    if (mart.order() < set.r)
        throw mismatch_error("martingale estimate order below expansion order");
    if (mart.beta != set.beta)
        throw mismatch_error("martingale estimate tilt differs from expansion tilt");
    FSet f;
    f.beta = set.beta;
    f.r = set.r;
    f.F.resize(static_cast<std::size_t>(set.r) + 1);
    f.Fcirc.resize(static_cast<std::size_t>(set.r) + 1);
    double mfact = 1.0;
    std::vector<double> wm(static_cast<std::size_t>(set.r) + 1);
    for (int m = 0; m <= set.r; ++m) {
        if (m > 0) mfact *= static_cast<double>(m);
        wm[static_cast<std::size_t>(m)] = mart.deriv(m) / mfact;
    }
    for (int j = 0; j <= set.r; ++j) {
        HermiteSeries<double> acc;
        for (int m = 0; m <= j; ++m)
            acc.add_scaled(set.Q[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)],
                           wm[static_cast<std::size_t>(m)]);
        f.F[static_cast<std::size_t>(j)] = acc;
        HermiteSeries<double> circ = acc;
        circ.add_scaled(set.q[static_cast<std::size_t>(j)], -mart.value());
        circ.trim();
        f.Fcirc[static_cast<std::size_t>(j)] = circ;
    }
    return f;
}

namespace {

double eval_series(const ExpansionSet& set, const std::vector<HermiteSeries<double>>& terms,
                   long long n, long long k, int r) {
    if (n <= 0) throw mismatch_error("expansion needs n >= 1");
    if (r < 0) r = set.r;
    if (r > set.r) throw mismatch_error("requested order exceeds the built set");
    double nd = static_cast<double>(n);
    double root_n = std::sqrt(nd);
    double sigma = set.cum.sigma();
    double x = (static_cast<double>(k) - set.cum.mu() * nd) / (sigma * root_n);
    double sum = 0.0;
    double scale = 1.0;
    for (int j = 0; j <= r; ++j) {
        sum += terms[static_cast<std::size_t>(j)].value(x) * scale;
        scale /= root_n;
    }
    double pref = std::exp(-0.5 * x * x) / (sigma * std::sqrt(2.0 * std::numbers::pi * nd));
    return pref * sum;
}

}  // namespace

double eval_profile_expansion(const ExpansionSet& set, const MartingaleEstimate& mart,
                              long long n, long long k, int r) {
    return eval_series(set, assemble_F(set, mart).F, n, k, r);
}

double eval_profile_expansion(const ExpansionSet& set, const FSet& f,
                              long long n, long long k, int r) {
    if (f.beta != set.beta || f.r != set.r) throw mismatch_error("F set does not match expansion set");
    return eval_series(set, f.F, n, k, r);
}

double eval_expected_expansion(const ExpansionSet& set, long long n, long long k, int r) {
    return eval_series(set, set.q, n, k, r);
}

namespace {

// Shared core of the uniform (tilt-at-k/n) predictions: at x = 0 only the
// even-order terms survive, and the tilt makes the phase e^{n I(k/n)} exact.
double eval_uniform(const ModelSpec& model, const MartingaleEstimate* mart,
                    long long n, long long k, int r) {
    if (n <= 0) throw mismatch_error("expansion needs n >= 1");
    if (r < 0 || r > kMaxExpansionOrder) throw mismatch_error("expansion order must lie in [0, 6]");
    double theta = static_cast<double>(k) / static_cast<double>(n);
    double beta = solve_tilt(model, theta);
    ExpansionSet set = build_expansion_set(model, beta, r);
    double nd = static_cast<double>(n);
    double sum = 0.0;
    if (mart) {
        FSet f = assemble_F(set, *mart);
        for (int j = 0; j <= r; j += 2)
            sum += f.F[static_cast<std::size_t>(j)].value(0.0) * std::pow(nd, -0.5 * j);
    } else {
        for (int j = 0; j <= r; j += 2)
            sum += set.q[static_cast<std::size_t>(j)].value(0.0) * std::pow(nd, -0.5 * j);
    }
    return sum / (set.cum.sigma() * std::sqrt(2.0 * std::numbers::pi * nd));
}

}  // namespace

double eval_uniform_expected(const ModelSpec& model, long long n, long long k, int r) {
    return eval_uniform(model, nullptr, n, k, r);
}

double eval_uniform_profile(const ModelSpec& model, const Profile& profile, long long k, int r) {
    if (!profile.occupied()) throw empty_profile_error("profile has no particles");
    long long n = profile.n;
    double theta = static_cast<double>(k) / static_cast<double>(n);
    double beta = solve_tilt(model, theta);
    MartingaleEstimate mart = w_n_derivatives(profile, model, beta, std::max(r, 2));
    return eval_uniform(model, &mart, n, k, r);
}

}  // namespace brw
