#pragma once

#include <vector>

#include <gmpxx.h>

#include "brw/model.hpp"

namespace brw {

/// Highest derivative order served by the analytic machinery (expansion order 6
/// needs cumulants up to order 8).
inline constexpr int kMaxCumulantOrder = 8;

/// Log-mass and tilted cumulants at a fixed tilt beta.
struct CumulantTable {
    double beta = 0.0;
    double phi = 0.0;
    std::vector<double> kappa;  // kappa[j-1] = j-th derivative of phi at beta

    int order() const { return static_cast<int>(kappa.size()); }
    double mu() const { return kappa.at(0); }
    double sigma2() const { return kappa.at(1); }
    double sigma() const;
};

/// phi(beta) = log sum_k w(k) e^{beta k}, computed with a max-shift so any
/// real beta is safe for finite-support models.
double log_mgf(const ModelSpec& model, double beta);

/// Exact analytic derivatives via tilted moments and the moment-to-cumulant
/// recursion; order in [2, kMaxCumulantOrder].
CumulantTable cumulants_at(const ModelSpec& model, double beta, int order);

/// Rational cumulants at beta = 0; requires exact outcome probabilities.
std::vector<mpq_class> cumulants_at_origin_exact(const ModelSpec& model, int order);

/// Solves phi'(beta) = theta to |phi'(beta) - theta| <= 1e-12 * max(1, |theta|)
/// by Newton iteration with a bisection fallback on a maintained bracket.
/// Throws range_error when theta is not strictly inside the support interval.
double solve_tilt(const ModelSpec& model, double theta);

/// I(theta) = beta(theta) * theta - phi(beta(theta)).
double information(const ModelSpec& model, double theta);

struct RangeInfo {
    double beta_minus = 0.0;   // -inf when the search cap is passed
    double beta_plus = 0.0;    // +inf when the search cap is passed
    double gamma_minus = 0.0;
    double gamma_plus = 0.0;
};

/// Tilt range (beta-, beta+) where beta*phi'(beta) < phi(beta), and the walk's
/// asymptotic speed range (gamma-, gamma+). The beta search is capped at
/// |beta| = 700 / max|k|; past the cap the endpoint is reported as +-inf and
/// gamma equals the extreme support point (the unattained limit of phi/beta).
RangeInfo ranges(const ModelSpec& model);

}  // namespace brw
