#pragma once

#include <map>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "brw/cumulants.hpp"
#include "brw/martingale.hpp"
#include "brw/model.hpp"
#include "brw/oracle.hpp"
#include "brw/simulate.hpp"

namespace brw {

/// x_n(k) = (k - phi'(beta) n) / (sigma(beta) sqrt(n)).
double standardized_coord(const ModelSpec& model, double beta, long long n, long long k);

/// Centered profile L_n(k) - W_n(beta) E L_n(k) over the union of supports.
std::map<long long, double> centered_profile(const Profile& profile, const ModelSpec& model,
                                             double beta, const ExpectedProfile& expected,
                                             const MartingaleEstimate& mart);

/// R(c) = (W'(beta)(c + kappa_3/(2 sigma^2)) - W''(beta)/2) / (sqrt(2 pi) sigma^3).
double r_of_c(const ModelSpec& model, double beta, const MartingaleEstimate& mart, double c);
double r_of_c_params(double sigma, double kappa3, double w1, double w2, double c);

/// Subsequential limits of the scaled centered occupation numbers along
/// k_n = floor(drift * n) + a. Rational drift p/q gives the q points
/// R(a - j/q); integer drift gives {R(a)}; declared-irrational drift gives the
/// continuum endpoints {R(a-1), R(a)} with the flag set. Throws
/// rationality_undetermined when the drift class cannot be decided exactly.
struct LimitSet {
    std::vector<double> values;
    bool continuum = false;
};
LimitSet limit_set(const ModelSpec& model, double beta, const MartingaleEstimate& mart, long long a);

/// Per-snapshot mode/height data. The mode tie-break picks the smallest site
/// and raises the flag; u* = phi'(0) n + W'/W - kappa_3/(2 sigma^2);
/// theta = distance from u* to the nearest integer;
/// m_tilde = 2 sigma^2 n (1 - sqrt(2 pi n) sigma M_n / (W m^n));
/// q(theta) = kappa_3^2/(6 sigma^4) - kappa_4/(4 sigma^2) + theta^2 + (log W)''.
struct ModeHeightEntry {
    int n = 0;
    long long mode = 0;
    mpz_class height;
    bool tie = false;
    double u_star = 0.0;
    double theta = 0.0;
    double m_tilde = 0.0;
    double q_theta = 0.0;
};
ModeHeightEntry mode_height(const Profile& profile, const ModelSpec& model,
                            const MartingaleEstimate& mart);

/// The height-limit polynomial q(theta) on its own (q(1/2) - q(0) = 1/4).
double height_limit_q(const ModelSpec& model, const MartingaleEstimate& mart, double theta);

/// Normalized-CDF residual data at beta = 0:
/// lhs = (1/(W m^n)) sum_{h<=k} L_n(h) - Phi(x_n(k)),
/// rhs = (e^{-x^2/2}/(sigma sqrt(2 pi n))) (1/2 - kappa_3/(6 sigma^2)(x^2-1) - W'/W).
struct CdfPoint {
    long long k = 0;
    double x = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};
std::vector<CdfPoint> cdf_residual_series(const Profile& profile, const ModelSpec& model,
                                          const MartingaleEstimate& mart);
std::pair<double, double> cdf_residual(const Profile& profile, const ModelSpec& model,
                                       const MartingaleEstimate& mart, long long k);

/// Site anchoring for occupation-number series.
enum class Anchor {
    floor_drift,  // k_n = floor(phi'(beta) n) + a, scale n^{3/2}, reference R(c_n)
    exact_drift,  // k_n = phi'(beta) n + a (integer drift), same scale/reference
    sqrt_window,  // k_n = floor(phi'(beta) n) + ceil(alpha sigma sqrt n), scale n,
                  // reference alpha e^{-alpha^2/2} W' / (sqrt(2 pi) sigma^2)
};

struct OccupationEntry {
    int n = 0;
    long long k = 0;
    double c = 0.0;          // k - phi'(beta) n
    double scaled = 0.0;     // scaled centered occupation number
    double reference = 0.0;  // predicted limit for this entry
};

struct OccupationSeries {
    double beta = 0.0;
    long long offset = 0;
    Anchor anchor = Anchor::floor_drift;
    double alpha = 0.0;
    int mart_n = 0;  // snapshot supplying the martingale derivatives
    std::vector<OccupationEntry> entries;
};

/// Builds the series over the run's snapshots; martingale derivatives come
/// from the final snapshot. Throws range_error when beta is outside
/// (beta-, beta+).
OccupationSeries occupation_series(const RunRecord& rec, const ModelSpec& model, double beta,
                                   long long offset, Anchor anchor, double alpha = 0.0);

}  // namespace brw
