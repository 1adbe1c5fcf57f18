#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "brw/edgeworth.hpp"
#include "brw/errors.hpp"
#include "brw/numeric.hpp"
#include "brw/oracle.hpp"
#include "brw/polynomials.hpp"
#include "fixtures.hpp"

using namespace brw;
using namespace brw::fixtures;

TEST_SUITE("edgeworth") {

TEST_CASE("Hermite polynomials by recursion") {
    CHECK(hermite_poly<double>(0).c == std::vector<double>{1});
    CHECK(hermite_poly<double>(1).c == std::vector<double>{0, 1});
    CHECK(hermite_poly<double>(2).c == std::vector<double>{-1, 0, 1});
    CHECK(hermite_poly<double>(3).c == std::vector<double>{0, -3, 0, 1});
    CHECK(hermite_poly<double>(4).c == std::vector<double>{3, 0, -6, 0, 1});
    CHECK(hermite_poly<double>(6).c == std::vector<double>{-15, 0, 45, 0, -15, 0, 1});
    // Exact in rational arithmetic as well.
    auto he5 = hermite_poly<mpq_class>(5);
    CHECK(he5.c == std::vector<mpq_class>{0, 15, 0, -10, 0, 1});
}

TEST_CASE("correction polynomials in exact arithmetic") {
    // Arbitrary rational cumulants; only kappa_3.. enter the P_j.
    mpq_class k3(5, 7), k4(-3, 11), k5(2, 13);
    std::vector<mpq_class> kappa = {0, 1, k3, k4, k5};
    auto p = tilde_p<mpq_class>(kappa, 3);
    REQUIRE(p.size() == 4);

    CHECK(p[0].c == std::vector<mpq_class>{1});

    CHECK(p[1].degree() == 3);
    CHECK(p[1].coeff(3) == k3 / 6);
    CHECK(p[1].coeff(1) == 0);

    CHECK(p[2].degree() == 6);
    CHECK(p[2].coeff(4) == k4 / 24);
    CHECK(p[2].coeff(6) == k3 * k3 / 72);
    CHECK(p[2].coeff(5) == 0);

    CHECK(p[3].degree() == 9);
    CHECK(p[3].coeff(5) == k5 / 120);
    CHECK(p[3].coeff(7) == k3 * k4 / 144);
    CHECK(p[3].coeff(9) == k3 * k3 * k3 / 1296);
    CHECK(p[3].coeff(3) == 0);
}

TEST_CASE("correction polynomial degree and parity") {
    std::vector<double> kappa = {0.3, 1.1, -0.4, 0.25, -0.9, 0.6, 0.15, -0.35};
    auto p = tilde_p<double>(kappa, 6);
    for (int j = 0; j <= 6; ++j) {
        const auto& pj = p[static_cast<std::size_t>(j)];
        CHECK(pj.degree() == 3 * j);
        for (int l = 0; l <= pj.degree(); ++l)
            if ((l % 2) != (j % 2)) CHECK(pj.coeff(static_cast<std::size_t>(l)) == 0.0);
    }
    CHECK_THROWS_AS(tilde_p<double>(std::vector<double>{1.0}, 3), mismatch_error);
}

TEST_CASE("operator image maps monomial coefficients to scaled Hermite ones") {
    Polynomial<mpq_class> s(std::vector<mpq_class>{0, 1});  // S(u) = u
    HermiteSeries<mpq_class> h = operator_image<mpq_class>(s, mpq_class(1));
    CHECK(h.c == std::vector<mpq_class>{0, 1});  // He_1

    mpq_class sigma(2);
    mpq_class k3(5, 7);
    std::vector<mpq_class> kappa = {0, 1, k3};
    auto p1 = tilde_p<mpq_class>(kappa, 1)[1];
    HermiteSeries<mpq_class> q1 = operator_image<mpq_class>(p1, sigma);
    CHECK(q1.degree() == 3);
    CHECK(q1.coeff(3) == k3 / (6 * sigma * sigma * sigma));
    CHECK(q1.coeff(1) == 0);
}

TEST_CASE("Hermite-basis evaluation matches the monomial expansion") {
    ExpansionSet set = build_expansion_set(quarter_drift_model(), 0.3, 4);
    for (int j = 0; j <= 4; ++j) {
        const auto& qj = set.q[static_cast<std::size_t>(j)];
        Polynomial<double> mono = qj.to_monomial();
        for (double x : {-2.7, -0.4, 0.0, 1.3, 3.1})
            CHECK(qj.value(x) == doctest::Approx(mono.eval(x)).epsilon(1e-12));
    }
}

TEST_CASE("expansion set structure") {
    ExpansionSet set = build_expansion_set(quarter_drift_model(), 0.0, 4);
    double sigma = set.cum.sigma();
    double k3 = set.cum.kappa[2];
    double k4 = set.cum.kappa[3];

    // q_0 = 1; q_1 = (kappa_3 / 6 sigma^3) He_3;
    // q_2 = (kappa_4 / 24 sigma^4) He_4 + (kappa_3^2 / 72 sigma^6) He_6.
    CHECK(set.q[0].c == std::vector<double>{1});
    CHECK(set.q[1].coeff(3) == doctest::Approx(k3 / (6 * std::pow(sigma, 3))).epsilon(1e-14));
    CHECK(set.q[2].coeff(4) == doctest::Approx(k4 / (24 * std::pow(sigma, 4))).epsilon(1e-14));
    CHECK(set.q[2].coeff(6) == doctest::Approx(k3 * k3 / (72 * std::pow(sigma, 6))).epsilon(1e-14));

    // Q_{0,j} = q_j; Q_{1,1} = He_1 / sigma; Q_{2,2} = He_2 / sigma^2.
    for (int j = 0; j <= 4; ++j) {
        const auto& row = set.Q[static_cast<std::size_t>(j)];
        REQUIRE(row.size() == static_cast<std::size_t>(j) + 1);
        CHECK(row[0].c == set.q[static_cast<std::size_t>(j)].c);
    }
    CHECK(set.Q[1][1].c == std::vector<double>{0, 1 / sigma});
    CHECK(set.Q[2][2].coeff(2) == doctest::Approx(1 / (sigma * sigma)).epsilon(1e-14));

    // Parity and degree of Q_{m,j}: 3j - 2m with the parity of j.
    for (int j = 0; j <= 4; ++j)
        for (int m = 0; m <= j; ++m) {
            const auto& Q = set.Q[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
            CHECK(Q.degree() == 3 * j - 2 * m);
        }
    CHECK_THROWS_AS(build_expansion_set(quarter_drift_model(), 0.0, 7), mismatch_error);
}

TEST_CASE("F assembly and centered variants") {
    ExpansionSet set = build_expansion_set(quarter_drift_model(), 0.0, 2);
    double sigma = set.cum.sigma();
    double k3 = set.cum.kappa[2];

    MartingaleEstimate mart;
    mart.beta = 0.0;
    mart.n = 100;
    mart.w = {1.25, -0.4, 0.85};
    FSet f = assemble_F(set, mart);

    // F_j - W q_j: F_1o = (x / sigma) W'; F_2o = (k3 W'/6 sigma^4) He_4 + (W''/2 sigma^2) He_2.
    CHECK(f.Fcirc[0].degree() == -1);
    CHECK(f.Fcirc[1].coeff(1) == doctest::Approx(mart.w[1] / sigma).epsilon(1e-14));
    CHECK(f.Fcirc[1].coeff(3) == 0.0);
    CHECK(f.Fcirc[2].coeff(4) ==
          doctest::Approx(k3 * mart.w[1] / (6 * std::pow(sigma, 4))).epsilon(1e-14));
    CHECK(f.Fcirc[2].coeff(2) ==
          doctest::Approx(mart.w[2] / (2 * sigma * sigma)).epsilon(1e-14));

    // Deterministic reduction: W = 1, derivatives 0 gives F_j = q_j.
    MartingaleEstimate unit;
    unit.beta = 0.0;
    unit.n = 100;
    unit.w = {1.0, 0.0, 0.0};
    FSet fu = assemble_F(set, unit);
    for (int j = 0; j <= 2; ++j) {
        CHECK(fu.F[static_cast<std::size_t>(j)].c == set.q[static_cast<std::size_t>(j)].c);
        if (j > 0) CHECK(fu.Fcirc[static_cast<std::size_t>(j)].degree() == -1);
    }

    MartingaleEstimate shallow;
    shallow.beta = 0.0;
    shallow.w = {1.0, 0.0};
    CHECK_THROWS_AS(assemble_F(set, shallow), mismatch_error);
    MartingaleEstimate wrong_beta;
    wrong_beta.beta = 0.5;
    wrong_beta.w = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS(assemble_F(set, wrong_beta), mismatch_error);
}

TEST_CASE("expected expansion peak value") {
    // Pascal: mu = 1/2, sigma = 1/2; at k = n/2 the coordinate is exactly 0 and
    // the r = 0 prediction is 1 / (sigma sqrt(2 pi n)).
    ModelSpec pas = pascal_model();
    ExpansionSet set = build_expansion_set(pas, 0.0, 2);
    long long n = 64;
    double want = 1.0 / (0.5 * std::sqrt(2.0 * std::numbers::pi * static_cast<double>(n)));
    CHECK(eval_expected_expansion(set, n, n / 2, 0) == doctest::Approx(want).epsilon(1e-14));

    MartingaleEstimate unit;
    unit.beta = 0.0;
    unit.w = {1.0, 0.0, 0.0};
    CHECK(eval_profile_expansion(set, unit, n, n / 2, 2) ==
          doctest::Approx(eval_expected_expansion(set, n, n / 2, 2)).epsilon(1e-14));
}

TEST_CASE("expected expansion converges to the exact oracle") {
    // Residuals against the exact convolution shrink at the n^{-3/2} rate;
    // check monotone sup decay along a doubling grid.
    ModelSpec m = quarter_drift_model();
    ExpansionSet set = build_expansion_set(m, 0.0, 2);
    double prev = 1e300;
    for (int n : {16, 64, 256}) {
        ExpectedProfile ep = expected_profile(m, n);
        double phi_n = static_cast<double>(n) * set.cum.phi;
        double sup = 0.0;
        for (long long k = ep.min_site(); k <= ep.max_site(); ++k) {
            double actual = std::exp(ep.log_value(k) - phi_n);
            double pred = eval_expected_expansion(set, n, k, 2);
            sup = std::max(sup, std::fabs(actual - pred));
        }
        double scaled = std::pow(static_cast<double>(n), 1.5) * sup;
        CHECK(scaled < prev);
        prev = scaled;
    }
}

TEST_CASE("uniform expansion: expected variant") {
    // r = 0 prediction is the constant 1 after the sqrt(2 pi n) sigma scaling.
    ModelSpec m = quarter_drift_model();
    int n = 50;
    for (long long k : {5LL, 13LL, 20LL, 30LL}) {
        double beta = solve_tilt(m, static_cast<double>(k) / static_cast<double>(n));
        double sigma = cumulants_at(m, beta, 2).sigma();
        double val = eval_uniform_expected(m, n, k, 0);
        CHECK(val * sigma * std::sqrt(2.0 * std::numbers::pi * static_cast<double>(n)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    // r = 2 tracks the exact oracle uniformly over a wide tilt window.
    ExpectedProfile ep = expected_profile(m, n);
    double sup = 0.0;
    for (long long k = ep.min_site(); k <= ep.max_site(); ++k) {
        double theta = static_cast<double>(k) / static_cast<double>(n);
        double beta;
        try {
            beta = solve_tilt(m, theta);
        } catch (const brw::range_error&) {
            continue;
        }
        if (std::fabs(beta) > 1.0) continue;
        double info = beta * theta - log_mgf(m, beta);
        double actual = std::exp(static_cast<double>(n) * info + ep.log_value(k));
        double sigma = cumulants_at(m, beta, 2).sigma();
        double scale = sigma * std::sqrt(2.0 * std::numbers::pi * static_cast<double>(n));
        sup = std::max(sup, std::fabs(scale * eval_uniform_expected(m, n, k, 2) - scale * actual));
    }
    CHECK(sup < 0.1);

    CHECK_THROWS_AS(eval_uniform_expected(m, 50, 200, 2), brw::range_error);
}

}  // TEST_SUITE
