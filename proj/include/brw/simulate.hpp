#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "brw/model.hpp"

namespace brw {

/// Largest binomial trial count sampled exactly; above it a rounded Gaussian
/// with the exact integer-rounded mean is used (clamped to [0, trials]).
inline constexpr unsigned long long kExactSamplingThreshold = 1ull << 20;

/// Occupation counts at one time index. Counts are exact big integers.
struct Profile {
    int n = 0;
    std::map<long long, mpz_class> counts;  // site -> count, all positive
    mpz_class population;                   // sum of counts

    static Profile initial();  // n = 0, one particle at the origin

    bool occupied() const { return !counts.empty(); }
    mpz_class count(long long k) const;
    long long min_site() const;
    long long max_site() const;
};

/// Deterministic draw source. All distributions are implemented in-library so
/// the stream of values is a pure function of the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform();  // [0, 1), 53-bit resolution
    double normal();   // Box-Muller, two uniforms per call

    /// Exact inversion sampling (from 0 for small mean, from the mode otherwise).
    unsigned long long binomial(unsigned long long trials, double p);

    /// Exact below `exact_threshold` trials, Gaussian-approximated above.
    mpz_class binomial_big(const mpz_class& trials, double p, unsigned long long exact_threshold = kExactSamplingThreshold);

private:
    std::mt19937_64 eng_;
};

/// Sequential conditional binomials; the components always sum to `count`.
std::vector<mpz_class> sample_multinomial(const mpz_class& count,
                                          const std::vector<double>& probs,
                                          Rng& rng,
                                          unsigned long long exact_threshold = kExactSamplingThreshold);

struct StepStats {
    std::vector<mpz_class> outcome_totals;  // particles assigned to each outcome
};

/// One generation: every occupied site (ascending) splits its count over the
/// outcomes (in model order); each assigned particle leaves children at
/// site + d for every displacement d of its outcome.
Profile step(const Profile& profile, const ModelSpec& model, Rng& rng,
             unsigned long long exact_threshold = kExactSamplingThreshold,
             StepStats* stats = nullptr);

struct RunRecord {
    ModelSpec model;
    std::uint64_t seed = 0;
    std::string rng_id;
    unsigned long long exact_threshold = kExactSamplingThreshold;
    std::vector<Profile> snapshots;  // strictly increasing in n

    const Profile& final_profile() const;
};

/// Deterministic function of (model, steps, seed, schedule, threshold).
/// An empty schedule records only the final profile.
RunRecord run(const ModelSpec& model, int steps, std::uint64_t seed,
              const std::vector<int>& snapshot_schedule = {},
              unsigned long long exact_threshold = kExactSamplingThreshold);

}  // namespace brw
