#pragma once

#include <vector>

#include "brw/cumulants.hpp"
#include "brw/martingale.hpp"
#include "brw/model.hpp"
#include "brw/polynomials.hpp"
#include "brw/simulate.hpp"

namespace brw {

/// Highest supported expansion order (needs cumulants up to order r + 2).
inline constexpr int kMaxExpansionOrder = 6;

/// Correction polynomials P_0..P_r from the truncated formal identity
/// exp( sum_{j>=1} kappa_{j+2} z^{j+2} u^j / (j+2)! ) = sum_j P_j(z) u^j,
/// computed with the B' = A'B series-exponential recurrence.
/// `kappa[j-1]` holds kappa_j; kappa.size() >= r + 2. P_j has z-degree 3j and
/// the parity of j.
template <typename T>
std::vector<Polynomial<T>> tilde_p(const std::vector<T>& kappa, int r) {
    if (r < 0) throw mismatch_error("expansion order must be nonnegative");
    if (static_cast<int>(kappa.size()) < r + 2 && r > 0)
        throw mismatch_error("cumulant table too short for requested order");
    // A_i(z) = kappa_{i+2} z^{i+2} / (i+2)!
    std::vector<Polynomial<T>> a(static_cast<std::size_t>(r) + 1);
    T fact(2);
    for (int i = 1; i <= r; ++i) {
        fact *= T(i + 2);
        std::vector<T> coeffs(static_cast<std::size_t>(i) + 3, T(0));
        coeffs.back() = kappa[static_cast<std::size_t>(i) + 1] / fact;
        a[static_cast<std::size_t>(i)] = Polynomial<T>(std::move(coeffs));
    }
    std::vector<Polynomial<T>> b(static_cast<std::size_t>(r) + 1);
    b[0] = Polynomial<T>::constant(T(1));
    for (int m = 1; m <= r; ++m) {
        Polynomial<T> acc;
        for (int i = 1; i <= m; ++i) acc += (a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(m - i)]).scaled(T(i));
        b[static_cast<std::size_t>(m)] = acc.scaled(T(1) / T(m));
    }
    return b;
}

/// Image of S(-D/sigma) acting on the Gaussian kernel: with
/// (-D)^l e^{-z^2/2} = He_l(z) e^{-z^2/2}, the monomial coefficients s_l of S
/// map to the Hermite-basis coefficients s_l sigma^{-l}.
template <typename T>
HermiteSeries<T> operator_image(const Polynomial<T>& s, const T& sigma) {
    HermiteSeries<T> h;
    h.c.assign(s.c.size(), T(0));
    T power(1);
    for (std::size_t l = 0; l < s.c.size(); ++l) {
        h.c[l] = s.c[l] / power;
        power *= sigma;
    }
    h.trim();
    return h;
}

/// All polynomial data of the order-r expansion at one tilt:
/// Q[j][m] for 0 <= m <= j <= r, and q[j] = Q[j][0].
struct ExpansionSet {
    double beta = 0.0;
    int r = 0;
    CumulantTable cum;
    std::vector<HermiteSeries<double>> q;
    std::vector<std::vector<HermiteSeries<double>>> Q;
};

ExpansionSet build_expansion_set(const ModelSpec& model, double beta, int r);

/// F[j] = sum_{m<=j} W^{(m)}/m! * Q[j][m]; Fcirc[j] = F[j] - W * q[j]
/// (the expected-profile-centered variant).
struct FSet {
    double beta = 0.0;
    int r = 0;
    std::vector<HermiteSeries<double>> F;
    std::vector<HermiteSeries<double>> Fcirc;
};

FSet assemble_F(const ExpansionSet& set, const MartingaleEstimate& mart);

/// Predicted e^{beta k - phi(beta) n} L_n(k):
/// (e^{-x^2/2} / (sigma sqrt(2 pi n))) sum_{j<=r} n^{-j/2} F_j(x),
/// x = (k - mu n) / (sigma sqrt n). r = -1 uses the set's full order.
double eval_profile_expansion(const ExpansionSet& set, const MartingaleEstimate& mart,
                              long long n, long long k, int r = -1);
double eval_profile_expansion(const ExpansionSet& set, const FSet& f,
                              long long n, long long k, int r = -1);

/// Same with F_j replaced by q_j: predicts e^{beta k - phi(beta) n} E L_n(k).
double eval_expected_expansion(const ExpansionSet& set, long long n, long long k, int r = -1);

/// Tilt-adapted prediction for e^{n I(k/n)} E L_n(k); odd-order terms vanish
/// at x = 0 and are skipped. Throws range_error when k/n has no tilt.
double eval_uniform_expected(const ModelSpec& model, long long n, long long k, int r);

/// Tilt-adapted prediction for e^{n I(k/n)} L_n(k); martingale derivatives are
/// estimated from `profile` at the tilted beta.
double eval_uniform_profile(const ModelSpec& model, const Profile& profile, long long k, int r);

}  // namespace brw
