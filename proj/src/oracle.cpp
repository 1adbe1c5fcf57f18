#include "brw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "brw/errors.hpp"
#include "brw/numeric.hpp"

namespace brw {

double ExpectedProfile::value(long long k) const {
    if (exact) {
        auto it = weights.find(k);
        return it == weights.end() ? 0.0 : it->second.get_d();
    }
    auto it = weights_d.find(k);
    return it == weights_d.end() ? 0.0 : it->second;
}

double ExpectedProfile::log_value(long long k) const {
    if (exact) {
        auto it = weights.find(k);
        return it == weights.end() ? -std::numeric_limits<double>::infinity() : log_big(it->second);
    }
    auto it = weights_d.find(k);
    return it == weights_d.end() ? -std::numeric_limits<double>::infinity() : std::log(it->second);
}

mpq_class ExpectedProfile::exact_value(long long k) const {
    if (!exact) throw rationality_undetermined("expected profile was computed in double precision");
    auto it = weights.find(k);
    return it == weights.end() ? mpq_class(0) : it->second;
}

mpq_class ExpectedProfile::mass() const {
    if (!exact) throw rationality_undetermined("expected profile was computed in double precision");
    mpq_class s = 0;
    for (const auto& [k, w] : weights) s += w;
    return s;
}

long long ExpectedProfile::min_site() const {
    if (exact) {
        if (weights.empty()) throw empty_profile_error("expected profile is empty");
        return weights.begin()->first;
    }
    if (weights_d.empty()) throw empty_profile_error("expected profile is empty");
    return weights_d.begin()->first;
}

long long ExpectedProfile::max_site() const {
    if (exact) {
        if (weights.empty()) throw empty_profile_error("expected profile is empty");
        return weights.rbegin()->first;
    }
    if (weights_d.empty()) throw empty_profile_error("expected profile is empty");
    return weights_d.rbegin()->first;
}

namespace {

template <typename T>
std::map<long long, T> convolve(const std::map<long long, T>& a, const std::map<long long, T>& b) {
    std::map<long long, T> out;
    for (const auto& [ka, wa] : a)
        for (const auto& [kb, wb] : b) out[ka + kb] += wa * wb;
    return out;
}

template <typename T>
std::map<long long, T> intensity_map(const IntensityMeasure& one) {
    std::map<long long, T> m;
    if constexpr (std::is_same_v<T, mpq_class>) {
        for (const auto& [k, w] : one.weights_exact) m[k] = w;
    } else {
        for (const auto& [k, w] : one.weights) m[k] = w;
    }
    return m;
}

template <typename T>
std::map<long long, T> convolution_power(std::map<long long, T> base, int n) {
    std::map<long long, T> acc;
    acc[0] = T(1);
    while (n > 0) {
        if (n & 1) acc = convolve(acc, base);
        n >>= 1;
        if (n > 0) base = convolve(base, base);
    }
    return acc;
}

}  // namespace

ExpectedProfile expected_profile(const ModelSpec& model, int n) {
    if (n < 0) throw mismatch_error("time index must be nonnegative");
    IntensityMeasure one = intensity(model);
    ExpectedProfile out;
    out.n = n;
    out.exact = one.exact;
    if (one.exact) {
        out.weights = convolution_power(intensity_map<mpq_class>(one), n);
    } else {
        out.weights_d = convolution_power(intensity_map<double>(one), n);
        double mass = 0.0;
        for (const auto& [k, w] : out.weights_d) mass += w;
        out.mass_defect = std::abs(mass - std::pow(one.mass, n));
    }
    return out;
}

std::vector<ExpectedProfile> expected_profile_sequence(const ModelSpec& model, int n_max) {
    if (n_max < 0) throw mismatch_error("time index must be nonnegative");
    IntensityMeasure one = intensity(model);
    std::vector<ExpectedProfile> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    if (one.exact) {
        auto base = intensity_map<mpq_class>(one);
        std::map<long long, mpq_class> cur;
        cur[0] = 1;
        for (int n = 0; n <= n_max; ++n) {
            ExpectedProfile ep;
            ep.n = n;
            ep.exact = true;
            ep.weights = cur;
            out.push_back(std::move(ep));
            if (n < n_max) cur = convolve(cur, base);
        }
    } else {
        auto base = intensity_map<double>(one);
        std::map<long long, double> cur;
        cur[0] = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            ExpectedProfile ep;
            ep.n = n;
            ep.exact = false;
            ep.weights_d = cur;
            double mass = 0.0;
            for (const auto& [k, w] : cur) mass += w;
            ep.mass_defect = std::abs(mass - std::pow(one.mass, n));
            out.push_back(std::move(ep));
            if (n < n_max) cur = convolve(cur, base);
        }
    }
    return out;
}

std::map<long long, mpq_class> TinyLaw::population_law() const {
    std::map<long long, mpq_class> out;
    for (const auto& [key, prob] : entries) {
        long long total = 0;
        for (const auto& [site, cnt] : key) total += cnt;
        out[total] += prob;
    }
    return out;
}

std::map<long long, mpq_class> TinyLaw::expectation() const {
    std::map<long long, mpq_class> out;
    for (const auto& [key, prob] : entries)
        for (const auto& [site, cnt] : key) out[site] += mpq_class(static_cast<long>(cnt)) * prob;
    return out;
}

namespace {

// mpq power with nonnegative integer exponent.
mpq_class rational_pow(const mpq_class& base, long long e) {
    mpq_class acc = 1;
    mpq_class b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        e >>= 1;
        if (e > 0) b *= b;
    }
    return acc;
}

// All ways to split `count` particles over the outcomes, with the exact
// multinomial weight of each split accumulated into `next`.
void assign_site(const ModelSpec& model, const ProfileKey& sites, std::size_t site_idx,
                 std::map<long long, long long>& occ, const mpq_class& weight,
                 std::map<ProfileKey, mpq_class>& next, std::size_t state_guard,
                 std::size_t& states) {
    if (site_idx == sites.size()) {
        ProfileKey key(occ.begin(), occ.end());
        next[key] += weight;
        if (++states > state_guard)
            throw explosion_guard_error("enumeration exceeded the state guard");
        return;
    }
    auto [site, count] = sites[site_idx];
    std::size_t n_out = model.outcomes.size();

    // Depth-first over counts assigned to each outcome at this site.
    std::vector<long long> pick(n_out, 0);
    auto rec = [&](auto&& self, std::size_t o, long long left, const mpq_class& w) -> void {
        if (o + 1 == n_out) {
            pick[o] = left;
            mpq_class w2 = w * rational_pow(model.outcomes[o].prob_exact.value(), left);
            std::vector<std::pair<long long, long long>> touched;
            for (std::size_t i = 0; i < n_out; ++i) {
                if (pick[i] == 0) continue;
                for (long long d : model.outcomes[i].displacements) {
                    occ[site + d] += pick[i];
                    touched.emplace_back(site + d, pick[i]);
                }
            }
            assign_site(model, sites, site_idx + 1, occ, w2, next, state_guard, states);
            for (auto [s, c] : touched) {
                auto it = occ.find(s);
                it->second -= c;
                if (it->second == 0) occ.erase(it);
            }
            return;
        }
        // Multinomial factor built incrementally: C(left, j) p^j.
        mpq_class wj = w;
        for (long long j = 0; j <= left; ++j) {
            pick[o] = j;
            self(self, o + 1, left - j, wj);
            wj *= model.outcomes[o].prob_exact.value();
            wj *= mpq_class(static_cast<long>(left - j));
            wj /= mpq_class(static_cast<long>(j + 1));
        }
    };
    rec(rec, 0, count, weight);
}

}  // namespace

TinyLaw enumerate_law(const ModelSpec& model, int n, std::size_t state_guard) {
    if (n < 0) throw mismatch_error("time index must be nonnegative");
    if (!model.exact()) throw rationality_undetermined("enumeration needs exact probabilities");

    TinyLaw law;
    law.n = n;
    std::map<ProfileKey, mpq_class> cur;
    cur[{{0, 1}}] = 1;
    if (n == 0) {
        law.entries = std::move(cur);
        return law;
    }
    for (int t = 0; t < n; ++t) {
        std::map<ProfileKey, mpq_class> next;
        std::size_t states = 0;
        for (const auto& [key, prob] : cur) {
            std::map<long long, long long> occ;
            assign_site(model, key, 0, occ, prob, next, state_guard, states);
            if (next.size() > state_guard)
                throw explosion_guard_error("enumeration exceeded the state guard");
        }
        cur = std::move(next);
    }
    law.entries = std::move(cur);
    return law;
}

GoodnessReport empirical_compare(const std::vector<Profile>& samples, const TinyLaw& law) {
    if (samples.empty()) throw mismatch_error("no samples to compare");
    for (const auto& s : samples)
        if (s.n != law.n) throw mismatch_error("sample time index disagrees with the law");

    std::map<ProfileKey, long long> observed;
    for (const auto& s : samples) {
        ProfileKey key;
        key.reserve(s.counts.size());
        for (const auto& [site, cnt] : s.counts) {
            if (mpz_fits_slong_p(cnt.get_mpz_t()) == 0)
                throw mismatch_error("sample counts exceed the enumerable regime");
            key.emplace_back(site, mpz_get_si(cnt.get_mpz_t()));
        }
        ++observed[key];
    }

    GoodnessReport rep;
    double total = static_cast<double>(samples.size());
    long long matched = 0;
    double chi = 0.0;
    double pooled_exp = 0.0;
    long long pooled_obs = 0;
    int cells = 0;
    int pooled = 0;
    for (const auto& [key, prob] : law.entries) {
        double e = prob.get_d() * total;
        auto it = observed.find(key);
        long long o = it == observed.end() ? 0 : it->second;
        matched += o;
        rep.z_scores.push_back(e > 0.0 ? (static_cast<double>(o) - e) / std::sqrt(e) : 0.0);
        if (e < 5.0) {
            pooled_exp += e;
            pooled_obs += o;
            ++pooled;
        } else {
            double d = static_cast<double>(o) - e;
            chi += d * d / e;
            ++cells;
        }
    }
    if (matched != static_cast<long long>(samples.size())) rep.impossible_observed = true;
    if (pooled > 0 && pooled_exp > 0.0) {
        double d = static_cast<double>(pooled_obs) - pooled_exp;
        chi += d * d / pooled_exp;
        ++cells;
    }
    rep.chi_square = chi;
    rep.cells = cells;
    rep.pooled = pooled;
    rep.dof = cells > 1 ? cells - 1 : 0;
    rep.p_value = rep.dof > 0 ? boost::math::gamma_q(0.5 * rep.dof, 0.5 * chi) : 1.0;
    return rep;
}

}  // namespace brw
