#include "brw/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "brw/cumulants.hpp"
#include "brw/errors.hpp"
#include "brw/numeric.hpp"

namespace brw {

MartingaleEstimate w_n_derivatives(const Profile& profile, const ModelSpec& model,
                                   double beta, int order) {
    if (!profile.occupied()) throw empty_profile_error("profile has no particles");
    if (order < 0) throw mismatch_error("derivative order must be nonnegative");

    int phi_order = std::max(order + 1, 2);
    if (phi_order > kMaxCumulantOrder) phi_order = kMaxCumulantOrder;
    CumulantTable cum = cumulants_at(model, beta, phi_order);
    double n = static_cast<double>(profile.n);

    // Per-site factor is e^{beta k - phi n} * count; kept as log magnitude so
    // populations far beyond double range still accumulate safely.
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> site_log;
    site_log.reserve(profile.counts.size());
    for (const auto& [site, cnt] : profile.counts) {
        double lw = beta * static_cast<double>(site) - cum.phi * n + log_big(cnt);
        site_log.push_back(lw);
        max_log = std::max(max_log, lw);
    }

    // Complete Bell recursion Y_{j+1} = sum_i C(j, i) Y_{j-i} g_{i+1} with
    // g_1 = k - phi'(beta) n and g_l = -phi^{(l)}(beta) n for l >= 2.
    std::vector<double> acc(static_cast<std::size_t>(order) + 1, 0.0);
    std::vector<double> g(static_cast<std::size_t>(order) + 1, 0.0);
    for (int l = 2; l <= order; ++l) {
        double phil = l <= phi_order ? cum.kappa[static_cast<std::size_t>(l - 1)] : 0.0;
        g[static_cast<std::size_t>(l)] = -phil * n;
    }
    std::vector<double> y(static_cast<std::size_t>(order) + 1, 0.0);
    std::size_t idx = 0;
    for (const auto& [site, cnt] : profile.counts) {
        double scale = std::exp(site_log[idx++] - max_log);
        g[0] = 0.0;
        if (order >= 1) g[1] = static_cast<double>(site) - cum.kappa[0] * n;
        y[0] = 1.0;
        for (int j = 0; j < order; ++j) {
            double s = 0.0;
            double c = 1.0;  // C(j, i) built incrementally
            for (int i = 0; i <= j; ++i) {
                s += c * y[static_cast<std::size_t>(j - i)] * g[static_cast<std::size_t>(i + 1)];
                c = c * static_cast<double>(j - i) / static_cast<double>(i + 1);
            }
            y[static_cast<std::size_t>(j + 1)] = s;
        }
        for (int j = 0; j <= order; ++j) acc[static_cast<std::size_t>(j)] += scale * y[static_cast<std::size_t>(j)];
    }

    MartingaleEstimate est;
    est.beta = beta;
    est.n = profile.n;
    est.w.resize(static_cast<std::size_t>(order) + 1);
    double rescale = std::exp(max_log);
    for (int j = 0; j <= order; ++j) est.w[static_cast<std::size_t>(j)] = acc[static_cast<std::size_t>(j)] * rescale;
    return est;
}

std::pair<double, double> log_derivatives(const MartingaleEstimate& est) {
    if (est.order() < 2) throw mismatch_error("log derivatives need order >= 2");
    double w = est.value();
    if (!(w > 0.0)) throw non_positive_w_error("martingale value is not positive");
    double d1 = est.deriv(1) / w;
    double d2 = est.deriv(2) / w - d1 * d1;
    return {d1, d2};
}

std::complex<double> char_function(const Profile& profile, const ModelSpec& model,
                                   double beta, double s) {
    if (!profile.occupied()) throw empty_profile_error("profile has no particles");
    CumulantTable cum = cumulants_at(model, beta, 2);
    double n = static_cast<double>(profile.n);
    double mu = cum.kappa[0];
    double sig = cum.sigma();
    double root_n = std::sqrt(std::max(n, 1.0));

    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> site_log;
    site_log.reserve(profile.counts.size());
    for (const auto& [site, cnt] : profile.counts) {
        double lw = beta * static_cast<double>(site) - cum.phi * n + log_big(cnt);
        site_log.push_back(lw);
        max_log = std::max(max_log, lw);
    }
    std::complex<double> acc = 0.0;
    std::size_t idx = 0;
    for (const auto& [site, cnt] : profile.counts) {
        double x = (static_cast<double>(site) - mu * n) / (sig * root_n);
        acc += std::exp(site_log[idx++] - max_log) * std::polar(1.0, s * x);
    }
    return acc * std::exp(max_log);
}

}  // namespace brw
