#include "brw/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "brw/errors.hpp"
#include "brw/numeric.hpp"

namespace brw {

namespace {

struct TiltedSums {
    // s[j] = sum_k w(k) k^j e^{beta k - shift}; shift = beta * argmax term.
    std::vector<double> s;
    double shift = 0.0;
};

TiltedSums tilted_sums(const IntensityMeasure& im, double beta, int order) {
    TiltedSums ts;
    ts.s.assign(static_cast<std::size_t>(order) + 1, 0.0);
    ts.shift = -std::numeric_limits<double>::infinity();
    for (const auto& [k, w] : im.weights) ts.shift = std::max(ts.shift, beta * static_cast<double>(k));
    for (const auto& [k, w] : im.weights) {
        double e = w * std::exp(beta * static_cast<double>(k) - ts.shift);
        double kp = 1.0;
        for (int j = 0; j <= order; ++j) {
            ts.s[static_cast<std::size_t>(j)] += e * kp;
            kp *= static_cast<double>(k);
        }
    }
    return ts;
}

// kappa_n = m_n - sum_{j=1}^{n-1} C(n-1, j-1) kappa_j m_{n-j}
template <typename T>
std::vector<T> moments_to_cumulants(const std::vector<T>& m) {
    std::vector<T> kappa(m.size());
    for (std::size_t n = 1; n <= m.size(); ++n) {
        T acc = m[n - 1];
        for (std::size_t j = 1; j < n; ++j)
            acc -= T(static_cast<long>(binom_small(static_cast<int>(n) - 1, static_cast<int>(j) - 1))) *
                   kappa[j - 1] * m[n - j - 1];
        kappa[n - 1] = acc;
    }
    return kappa;
}

}  // namespace

double CumulantTable::sigma() const { return std::sqrt(sigma2()); }

double log_mgf(const ModelSpec& model, double beta) {
    IntensityMeasure im = intensity(model);
    TiltedSums ts = tilted_sums(im, beta, 0);
    return ts.shift + std::log(ts.s[0]);
}

CumulantTable cumulants_at(const ModelSpec& model, double beta, int order) {
    if (order < 2 || order > kMaxCumulantOrder)
        throw mismatch_error("cumulant order must lie in [2, 8]");
    IntensityMeasure im = intensity(model);
    TiltedSums ts = tilted_sums(im, beta, order);

    std::vector<double> m(static_cast<std::size_t>(order));
    for (int j = 1; j <= order; ++j)
        m[static_cast<std::size_t>(j) - 1] = ts.s[static_cast<std::size_t>(j)] / ts.s[0];

    CumulantTable table;
    table.beta = beta;
    table.phi = ts.shift + std::log(ts.s[0]);
    table.kappa = moments_to_cumulants(m);
    if (!(table.sigma2() > 0.0))
        throw range_error("degenerate tilted variance: intensity support has fewer than two points");
    return table;
}

std::vector<mpq_class> cumulants_at_origin_exact(const ModelSpec& model, int order) {
    if (order < 1 || order > kMaxCumulantOrder)
        throw mismatch_error("cumulant order must lie in [1, 8]");
    if (!model.exact())
        throw rationality_undetermined("exact cumulants need exact rational probabilities");
    IntensityMeasure im = intensity(model);

    std::vector<mpq_class> m(static_cast<std::size_t>(order), mpq_class(0));
    for (const auto& [k, w] : im.weights_exact) {
        mpq_class site(static_cast<long>(k));
        mpq_class kp = site;
        for (int j = 1; j <= order; ++j) {
            m[static_cast<std::size_t>(j) - 1] += w * kp;
            kp *= site;
        }
    }
    for (auto& v : m) v /= im.mass_exact;
    return moments_to_cumulants(m);
}

namespace {

// phi' and phi'' without building a full table; shift-stable for any beta.
std::pair<double, double> phi_d1_d2(const IntensityMeasure& im, double beta) {
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& [k, w] : im.weights) shift = std::max(shift, beta * static_cast<double>(k));
    double s0 = 0, s1 = 0, s2 = 0;
    for (const auto& [k, w] : im.weights) {
        double kd = static_cast<double>(k);
        double e = w * std::exp(beta * kd - shift);
        s0 += e;
        s1 += e * kd;
        s2 += e * kd * kd;
    }
    double mu = s1 / s0;
    return {mu, s2 / s0 - mu * mu};
}

}  // namespace

double solve_tilt(const ModelSpec& model, double theta) {
    IntensityMeasure im = intensity(model);
    double lo_support = static_cast<double>(im.min_site());
    double hi_support = static_cast<double>(im.max_site());
    if (!(theta > lo_support && theta < hi_support))
        throw range_error("tilt target must lie strictly inside the intensity support interval");

    const double tol = 1e-12 * std::max(1.0, std::fabs(theta));

    // Expand a bracket [lo, hi] with phi'(lo) < theta < phi'(hi).
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 200 && phi_d1_d2(im, lo).first >= theta; ++i) lo *= 2.0;
    for (int i = 0; i < 200 && phi_d1_d2(im, hi).first <= theta; ++i) hi *= 2.0;

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        auto [d1, d2] = phi_d1_d2(im, x);
        double f = d1 - theta;
        if (std::fabs(f) <= tol) return x;
        if (f < 0) lo = x; else hi = x;
        double step = f / d2;
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

double information(const ModelSpec& model, double theta) {
    double beta = solve_tilt(model, theta);
    return beta * theta - log_mgf(model, beta);
}

namespace {

struct HalfRange {
    double beta;   // +inf when capped
    double gamma;
};

// Positive-side analysis: root of g(b) = b phi'(b) - phi(b) on b > 0, and the
// minimum of phi(b)/b found by a grid scan plus golden-section refinement.
HalfRange positive_side(const ModelSpec& model) {
    IntensityMeasure im = intensity(model);
    double kabs = std::max(std::fabs(static_cast<double>(im.min_site())),
                           std::fabs(static_cast<double>(im.max_site())));
    double cap = 700.0 / std::max(1.0, kabs);

    auto g = [&](double b) { return b * phi_d1_d2(im, b).first - log_mgf(model, b); };

    // g is negative at 0+ and strictly increasing on b > 0.
    double lo = 0.0, hi = cap * 0x1p-20;
    bool bracketed = false;
    while (hi <= cap) {
        if (g(hi) > 0) { bracketed = true; break; }
        lo = hi;
        hi *= 2.0;
    }
    if (!bracketed && g(cap) > 0) { hi = cap; bracketed = true; }

    HalfRange out;
    if (!bracketed) {
        out.beta = std::numeric_limits<double>::infinity();
        out.gamma = static_cast<double>(im.max_site());  // unattained limit of phi/beta
        return out;
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? hi : lo) = mid;
    }
    out.beta = 0.5 * (lo + hi);

    auto ratio = [&](double b) { return log_mgf(model, b) / b; };
    int grid_n = 256;
    double b0 = cap * 0x1p-24, best = ratio(b0);
    int besti = 0;
    std::vector<double> grid(static_cast<std::size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i) {
        double t = static_cast<double>(i) / (grid_n - 1);
        grid[static_cast<std::size_t>(i)] = b0 * std::pow(cap / b0, t);
        double v = ratio(grid[static_cast<std::size_t>(i)]);
        if (v < best) { best = v; besti = i; }
    }
    double a = grid[static_cast<std::size_t>(std::max(0, besti - 1))];
    double b = grid[static_cast<std::size_t>(std::min(grid_n - 1, besti + 1))];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = ratio(x1), f2 = ratio(x2);
    for (int i = 0; i < 200; ++i) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = ratio(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = ratio(x2);
        }
    }
    out.gamma = std::min(f1, f2);
    return out;
}

ModelSpec reflected(const ModelSpec& model) {
    ModelSpec r = model;
    for (auto& o : r.outcomes) {
        for (auto& d : o.displacements) d = -d;
        std::sort(o.displacements.begin(), o.displacements.end());
    }
    return r;
}

}  // namespace

RangeInfo ranges(const ModelSpec& model) {
    HalfRange pos = positive_side(model);
    HalfRange neg = positive_side(reflected(model));
    RangeInfo r;
    r.beta_plus = pos.beta;
    r.gamma_plus = pos.gamma;
    r.beta_minus = -neg.beta;
    r.gamma_minus = -neg.gamma;
    return r;
}

}  // namespace brw
