#include "brw/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brw/errors.hpp"
#include "brw/numeric.hpp"
#include "brw/version.hpp"

namespace brw {

Profile Profile::initial() {
    Profile p;
    p.n = 0;
    p.counts[0] = 1;
    p.population = 1;
    return p;
}

mpz_class Profile::count(long long k) const {
    auto it = counts.find(k);
    return it == counts.end() ? mpz_class(0) : it->second;
}

long long Profile::min_site() const { return counts.begin()->first; }
long long Profile::max_site() const { return counts.rbegin()->first; }

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

unsigned long long Rng::binomial(unsigned long long trials, double p) {
    if (trials == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    bool flip = p > 0.5;
    double q = flip ? 1.0 - p : p;
    double t = static_cast<double>(trials);
    unsigned long long result;

    if (t * q < 30.0) {
        // Bottom-up inversion; the start pmf (1-q)^trials >= e^{-38} stays normal.
        double r = q / (1.0 - q);
        double f = std::exp(t * std::log1p(-q));
        double u = uniform();
        unsigned long long k = 0;
        double cdf = f;
        while (u > cdf && k < trials) {
            ++k;
            f *= r * (t - static_cast<double>(k) + 1.0) / static_cast<double>(k);
            cdf += f;
        }
        result = k;
    } else {
        // Mode-centered two-sided inversion; expected O(sqrt(trials q)) terms.
        unsigned long long m = static_cast<unsigned long long>((t + 1.0) * q);
        if (m > trials) m = trials;
        double md = static_cast<double>(m);
        double lf = std::lgamma(t + 1.0) - std::lgamma(md + 1.0) - std::lgamma(t - md + 1.0) +
                    md * std::log(q) + (t - md) * std::log1p(-q);
        double fm = std::exp(lf);
        double r = q / (1.0 - q);
        double u = uniform();
        double acc = fm;
        result = m;
        if (u > acc) {
            unsigned long long lo = m, hi = m;
            double flo = fm, fhi = fm;
            for (;;) {
                bool stepped = false;
                if (hi < trials) {
                    double hd = static_cast<double>(hi);
                    fhi *= r * (t - hd) / (hd + 1.0);
                    ++hi;
                    acc += fhi;
                    stepped = true;
                    if (u <= acc) { result = hi; break; }
                }
                if (lo > 0) {
                    double ld = static_cast<double>(lo);
                    flo *= ld / (r * (t - ld + 1.0));
                    --lo;
                    acc += flo;
                    stepped = true;
                    if (u <= acc) { result = lo; break; }
                }
                if (!stepped) { result = m; break; }  // fp remainder of the CDF
            }
        }
    }
    return flip ? trials - result : result;
}

namespace {

mpz_class rounded_to_mpz(double v) {
    mpz_class r;
    mpz_set_d(r.get_mpz_t(), v >= 0 ? v + 0.5 : v - 0.5);
    return r;
}

}  // namespace

mpz_class Rng::binomial_big(const mpz_class& trials, double p, unsigned long long exact_threshold) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    if (mpz_cmp_ui(trials.get_mpz_t(), exact_threshold) <= 0)
        return mpz_class(static_cast<unsigned long>(binomial(mpz_get_ui(trials.get_mpz_t()), p)));

    // Exact integer-rounded mean: p = mant * 2^{e-53} with mant a 53-bit integer.
    int e = 0;
    double fm = std::frexp(p, &e);
    long mant = static_cast<long>(std::ldexp(fm, 53));
    int sh = 53 - e;  // >= 53 since p < 1
    mpz_class mean = trials;
    mean *= mant;
    mean += mpz_class(1) << (sh - 1);
    mean >>= sh;

    double l2sd = 0.5 * (log_big(trials) + std::log(p) + std::log1p(-p)) / std::numbers::ln2;
    double z = normal();
    mpz_class x = mean;
    if (l2sd <= 62.0) {
        x += rounded_to_mpz(std::exp2(l2sd) * z);
    } else {
        // Keep the standard deviation as mantissa * 2^exponent to avoid overflow.
        long se = static_cast<long>(std::floor(l2sd)) - 52;
        double sm = std::exp2(l2sd - static_cast<double>(se));
        mpz_class delta = rounded_to_mpz(sm * z);
        x += delta << se;
    }
    if (x < 0) x = 0;
    if (x > trials) x = trials;
    return x;
}

std::vector<mpz_class> sample_multinomial(const mpz_class& count, const std::vector<double>& probs,
                                          Rng& rng, unsigned long long exact_threshold) {
    std::vector<mpz_class> out(probs.size(), mpz_class(0));
    if (probs.empty()) return out;
    mpz_class rem = count;
    double psum = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        if (rem == 0) { psum -= probs[i]; continue; }
        double pc = psum > 0.0 ? std::min(probs[i] / psum, 1.0) : 1.0;
        out[i] = rng.binomial_big(rem, pc, exact_threshold);
        rem -= out[i];
        psum -= probs[i];
    }
    out.back() = rem;
    return out;
}

Profile step(const Profile& profile, const ModelSpec& model, Rng& rng,
             unsigned long long exact_threshold, StepStats* stats) {
    std::vector<double> probs;
    probs.reserve(model.outcomes.size());
    for (const auto& o : model.outcomes) probs.push_back(o.prob);

    if (stats) stats->outcome_totals.assign(model.outcomes.size(), mpz_class(0));

    Profile next;
    next.n = profile.n + 1;
    for (const auto& [site, cnt] : profile.counts) {
        std::vector<mpz_class> split = sample_multinomial(cnt, probs, rng, exact_threshold);
        for (std::size_t o = 0; o < split.size(); ++o) {
            if (split[o] == 0) continue;
            if (stats) stats->outcome_totals[o] += split[o];
            for (long long d : model.outcomes[o].displacements) next.counts[site + d] += split[o];
        }
    }
    next.population = 0;
    for (const auto& [site, cnt] : next.counts) next.population += cnt;
    return next;
}

const Profile& RunRecord::final_profile() const {
    if (snapshots.empty()) throw empty_profile_error("run record holds no snapshots");
    return snapshots.back();
}

RunRecord run(const ModelSpec& model, int steps, std::uint64_t seed,
              const std::vector<int>& snapshot_schedule, unsigned long long exact_threshold) {
    if (steps < 0) throw mismatch_error("steps must be nonnegative");
    std::vector<int> sched = snapshot_schedule;
    if (sched.empty()) sched.push_back(steps);
    std::sort(sched.begin(), sched.end());
    sched.erase(std::unique(sched.begin(), sched.end()), sched.end());
    if (sched.front() < 0 || sched.back() > steps)
        throw mismatch_error("snapshot times must lie in [0, steps]");

    RunRecord rec;
    rec.model = model;
    rec.seed = seed;
    rec.rng_id = kRngId;
    rec.exact_threshold = exact_threshold;

    Rng rng(seed);
    Profile cur = Profile::initial();
    std::size_t si = 0;
    if (si < sched.size() && sched[si] == 0) {
        rec.snapshots.push_back(cur);
        ++si;
    }
    for (int t = 1; t <= steps; ++t) {
        cur = step(cur, model, rng, exact_threshold);
        if (si < sched.size() && sched[si] == t) {
            rec.snapshots.push_back(cur);
            ++si;
        }
    }
    return rec;
}

}  // namespace brw
