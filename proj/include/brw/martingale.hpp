#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "brw/model.hpp"
#include "brw/simulate.hpp"

namespace brw {

/// Additive-martingale value and its tilt-derivatives read off one profile.
struct MartingaleEstimate {
    double beta = 0.0;
    int n = 0;
    std::vector<double> w;  // w[j] = j-th derivative at beta; w[0] is the value

    int order() const { return static_cast<int>(w.size()) - 1; }
    double value() const { return w.at(0); }
    double deriv(int j) const { return w.at(static_cast<std::size_t>(j)); }
};

/// W_n^{(j)}(beta) = sum_k e^{beta k - phi(beta) n} L_n(k) Y_j(g_1,...,g_j)
/// with g_1 = k - phi'(beta) n, g_l = -phi^{(l)}(beta) n for l >= 2, and Y_j
/// the complete Bell polynomials. Accumulation is log-space safe for counts
/// beyond double range. Throws empty_profile_error on an extinct profile.
MartingaleEstimate w_n_derivatives(const Profile& profile, const ModelSpec& model,
                                   double beta, int order);

/// (W'/W, W''/W - (W'/W)^2). Throws non_positive_w_error when W <= 0 and
/// mismatch_error when the estimate has order < 2.
std::pair<double, double> log_derivatives(const MartingaleEstimate& est);

/// Diagnostic characteristic function
/// psi_n(s; beta) = e^{-phi(beta) n} sum_k e^{i s x_n(k)} e^{beta k} L_n(k).
std::complex<double> char_function(const Profile& profile, const ModelSpec& model,
                                   double beta, double s);

}  // namespace brw
