#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace brw {

/// One branching outcome: with probability `prob` a particle is replaced by
/// children at the listed relative displacements (a multiset; repeats allowed).
struct Outcome {
    double prob = 0.0;
    std::optional<mpq_class> prob_exact;  // present when the input was exact
    std::vector<long long> displacements;
};

enum class DriftClass {
    computed,             // classify from exact rational arithmetic when possible
    declared_irrational,  // the model file asserts an irrational drift
};

/// Offspring law: a finite list of (probability, displacement multiset) outcomes.
struct ModelSpec {
    std::vector<Outcome> outcomes;
    DriftClass drift = DriftClass::computed;

    /// True when every outcome carries an exact probability and they sum to 1.
    bool exact() const;
    /// Mean number of children per particle.
    double mean_offspring() const;
};

/// One-step expected profile: weight(k) = expected children at displacement k.
struct IntensityMeasure {
    std::map<long long, double> weights;
    std::map<long long, mpq_class> weights_exact;  // populated in exact mode
    bool exact = false;
    double mass = 0.0;
    mpq_class mass_exact;

    long long min_site() const;
    long long max_site() const;
};

struct AssumptionResult {
    char letter = '?';
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<AssumptionResult> results;  // letters A..E in order
    bool all_pass() const;
    std::string failing_letters() const;
};

/// Checks the standing assumptions; failures are reported as data, not thrown.
ValidationReport validate(const ModelSpec& model);

IntensityMeasure intensity(const ModelSpec& model);

/// (n, k) -> (k - offset*n) / span; maps a span-reduced walk back and forth.
struct AffineMap {
    long long offset = 0;
    long long span = 1;

    double to_normalized(double n, double k) const { return (k - static_cast<double>(offset) * n) / static_cast<double>(span); }
    long long site_to_normalized(long long n, long long k) const;  // exactness-checked
    long long site_from_normalized(long long n, long long k) const { return offset * n + span * k; }
};

/// Rescales a model whose intensity support has span > 1 down to span 1.
/// Throws std::invalid_argument when the model already has span 1 (no-op) or
/// its support is a single point; throws validation_error when an assumption
/// other than the span one fails.
std::pair<ModelSpec, AffineMap> lattice_normalize(const ModelSpec& model);

/// Model JSON:
///   {"outcomes":[{"prob":0.5,"displacements":[0]},
///                {"prob":"1/2","displacements":[-1,1]}],
///    "drift":"irrational"}            (optional declaration)
/// Probabilities may be numbers (integers are kept exact) or "p/q" strings
/// (exact rationals). Throws validation_error on malformed input.
ModelSpec parse_model(const std::string& json_text);
ModelSpec load_model(const std::string& path);

/// Canonical serialization (stable field order, sorted displacements).
std::string canonical_json(const ModelSpec& model);

/// FNV-1a 64 over the canonical serialization.
std::uint64_t model_hash(const ModelSpec& model);
std::string model_hash_hex(const ModelSpec& model);

}  // namespace brw
