#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "brw/model.hpp"
#include "brw/simulate.hpp"

namespace brw {

/// Expected profile at time n: the n-fold convolution power of the one-step
/// intensity. Exact rationals when the model probabilities are exact,
/// doubles (with the accumulated mass defect reported) otherwise.
struct ExpectedProfile {
    int n = 0;
    bool exact = false;
    std::map<long long, mpq_class> weights;
    std::map<long long, double> weights_d;
    double mass_defect = 0.0;  // |sum - m^n| in inexact mode

    double value(long long k) const;
    double log_value(long long k) const;  // -inf outside the support
    mpq_class exact_value(long long k) const;
    mpq_class mass() const;  // exact mode only
    long long min_site() const;
    long long max_site() const;
};

/// Sparse convolution power by binary exponentiation.
ExpectedProfile expected_profile(const ModelSpec& model, int n);

/// All expected profiles for n = 0..n_max in one iterative pass.
std::vector<ExpectedProfile> expected_profile_sequence(const ModelSpec& model, int n_max);

/// Canonical profile encoding: ascending (site, count) pairs.
using ProfileKey = std::vector<std::pair<long long, long long>>;

/// Exact distribution over profiles at a tiny time index.
struct TinyLaw {
    int n = 0;
    std::map<ProfileKey, mpq_class> entries;

    std::map<long long, mpq_class> population_law() const;   // law of the particle count
    std::map<long long, mpq_class> expectation() const;      // E L_n(k), site by site
};

/// Recursive exact expansion over per-particle outcome assignments; requires
/// exact probabilities. Throws explosion_guard_error past `state_guard` states.
TinyLaw enumerate_law(const ModelSpec& model, int n, std::size_t state_guard = 1000000);

struct GoodnessReport {
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int cells = 0;             // cells entering the statistic (after pooling)
    int pooled = 0;            // low-expectation cells merged into one
    bool impossible_observed = false;
    std::vector<double> z_scores;  // per unpooled cell, law iteration order
};

/// Chi-square comparison of simulated profiles against the exact law; cells
/// with expected count < 5 are pooled. Throws mismatch_error when the sample
/// time indices disagree with the law.
GoodnessReport empirical_compare(const std::vector<Profile>& samples, const TinyLaw& law);

}  // namespace brw
