#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <mpfr.h>

#include "brw/cumulants.hpp"
#include "brw/errors.hpp"
#include "brw/model.hpp"
#include "brw/numeric.hpp"
#include "fixtures.hpp"

using namespace brw;
using namespace brw::fixtures;

namespace {

// Independent high-precision oracle: j-th derivative of phi at beta by the
// central difference (1/h^j) sum_i (-1)^i C(j,i) phi(beta + (j-2i) h/2),
// evaluated in 256-bit arithmetic so subtractive cancellation is harmless.
double phi_derivative_fd(const ModelSpec& model, double beta, int j) {
    IntensityMeasure im = intensity(model);
    const double h = 0x1p-14;  // binary step: offsets are exact
    const mpfr_prec_t prec = 256;

    mpfr_t acc, x, term, e, half_h;
    mpfr_inits2(prec, acc, x, term, e, half_h, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(acc, 0.0, MPFR_RNDN);
    mpfr_set_d(half_h, h / 2.0, MPFR_RNDN);

    double coeff = 1.0;  // (-1)^i C(j,i), built incrementally
    for (int i = 0; i <= j; ++i) {
        mpfr_mul_si(x, half_h, j - 2 * i, MPFR_RNDN);
        mpfr_add_d(x, x, beta, MPFR_RNDN);
        // term = log(sum_k w_k e^{x k})
        mpfr_set_d(term, 0.0, MPFR_RNDN);
        for (const auto& [k, w] : im.weights) {
            mpfr_mul_si(e, x, k, MPFR_RNDN);
            mpfr_exp(e, e, MPFR_RNDN);
            mpfr_mul_d(e, e, w, MPFR_RNDN);
            mpfr_add(term, term, e, MPFR_RNDN);
        }
        mpfr_log(term, term, MPFR_RNDN);
        mpfr_mul_d(term, term, coeff, MPFR_RNDN);
        mpfr_add(acc, acc, term, MPFR_RNDN);
        coeff *= -static_cast<double>(j - i) / static_cast<double>(i + 1);
    }
    mpfr_div_d(acc, acc, std::pow(h, j), MPFR_RNDN);
    double out = mpfr_get_d(acc, MPFR_RNDN);
    mpfr_clears(acc, x, term, e, half_h, static_cast<mpfr_ptr>(nullptr));
    return out;
}

}  // namespace

TEST_SUITE("cumulants") {

TEST_CASE("log mgf closed forms") {
    ModelSpec sym = symmetric_model();
    CHECK(log_mgf(sym, 0.0) == doctest::Approx(std::log(1.5)).epsilon(1e-14));
    for (double b : {-2.0, -0.5, 0.3, 1.7})
        CHECK(log_mgf(sym, b) == doctest::Approx(std::log(0.5 + std::cosh(b))).epsilon(1e-14));
    // Far tilts stay finite thanks to the max-shift: phi(b) - b -> log(1/2).
    CHECK(log_mgf(sym, 500.0) - 500.0 == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    ModelSpec pas = pascal_model();
    for (double b : {-1.0, 0.0, 2.0})
        CHECK(log_mgf(pas, b) == doctest::Approx(std::log1p(std::exp(b))).epsilon(1e-14));
}

TEST_CASE("cumulant tables at the origin") {
    CumulantTable sym = cumulants_at(symmetric_model(), 0.0, 6);
    CHECK(sym.mu() == doctest::Approx(0.0));
    CHECK(sym.sigma2() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(sym.kappa[2] == doctest::Approx(0.0));
    CHECK(sym.kappa[3] == doctest::Approx(-2.0 / 3.0).epsilon(1e-13));

    CumulantTable pas = cumulants_at(pascal_model(), 0.0, 6);
    CHECK(pas.mu() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pas.sigma2() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(pas.kappa[3] == doctest::Approx(-0.125).epsilon(1e-13));
}

TEST_CASE("exact rational cumulants") {
    std::vector<mpq_class> q = cumulants_at_origin_exact(quarter_drift_model(), 6);
    CHECK(q[0] == mpq_class(1, 4));
    CHECK(q[1] == mpq_class(11, 16));
    CHECK(q[2] == mpq_class(-9, 32));
    CHECK(q[3] == mpq_class(-83, 128));
    CHECK(q[4] == mpq_class(165, 128));
    CHECK(q[5] == mpq_class(1057, 512));

    std::vector<mpq_class> s = cumulants_at_origin_exact(symmetric_model(), 6);
    CHECK(s[0] == 0);
    CHECK(s[1] == mpq_class(2, 3));
    CHECK(s[2] == 0);
    CHECK(s[3] == mpq_class(-2, 3));
    CHECK(s[4] == 0);
    CHECK(s[5] == mpq_class(26, 9));

    std::vector<mpq_class> p = cumulants_at_origin_exact(pascal_model(), 6);
    CHECK(p[0] == mpq_class(1, 2));
    CHECK(p[1] == mpq_class(1, 4));
    CHECK(p[2] == 0);
    CHECK(p[3] == mpq_class(-1, 8));
    CHECK(p[4] == 0);
    CHECK(p[5] == mpq_class(1, 4));
}

TEST_CASE("double table agrees with the exact table at the origin") {
    for (const ModelSpec& m : {symmetric_model(), quarter_drift_model(), pascal_model()}) {
        CumulantTable t = cumulants_at(m, 0.0, 6);
        std::vector<mpq_class> q = cumulants_at_origin_exact(m, 6);
        for (int j = 1; j <= 6; ++j)
            CHECK(t.kappa[static_cast<std::size_t>(j - 1)] ==
                  doctest::Approx(q[static_cast<std::size_t>(j - 1)].get_d()).epsilon(1e-12));
    }
}

TEST_CASE("cumulants match high-precision finite differences of phi") {
    for (const ModelSpec& m : {symmetric_model(), quarter_drift_model()}) {
        for (double beta : {0.0, 0.4, -0.9}) {
            CumulantTable t = cumulants_at(m, beta, 6);
            CHECK(log_mgf(m, beta) == doctest::Approx(t.phi).epsilon(1e-14));
            for (int j = 1; j <= 6; ++j) {
                double fd = phi_derivative_fd(m, beta, j);
                double kj = t.kappa[static_cast<std::size_t>(j - 1)];
                CHECK(std::fabs(fd - kj) <= 1e-6 * std::max(1.0, std::fabs(kj)));
            }
        }
    }
}

TEST_CASE("order bounds and degenerate variance") {
    CHECK_THROWS_AS(cumulants_at(symmetric_model(), 0.0, 1), mismatch_error);
    CHECK_THROWS_AS(cumulants_at(symmetric_model(), 0.0, 9), mismatch_error);
    ModelSpec point = parse_model(R"({"outcomes":[{"prob":1,"displacements":[2,2]}]})");
    CHECK_THROWS_AS(cumulants_at(point, 0.0, 2), brw::range_error);
    CHECK_THROWS_AS(cumulants_at_origin_exact(symmetric_model_inexact(), 4),
                    rationality_undetermined);
}

TEST_CASE("variance positive across the tilt grid") {
    for (const ModelSpec& m : {symmetric_model(), quarter_drift_model(), pascal_model()})
        for (double b = -3.0; b <= 3.0; b += 0.25)
            CHECK(cumulants_at(m, b, 2).sigma2() > 0.0);
}

TEST_CASE("tilt solving inverts phi'") {
    for (const ModelSpec& m : {symmetric_model(), quarter_drift_model()}) {
        for (double target : {-1.2, -0.3, 0.0, 0.7, 2.0}) {
            double theta = cumulants_at(m, target, 2).mu();
            double beta = solve_tilt(m, theta);
            CHECK(beta == doctest::Approx(target).epsilon(1e-9));
            CHECK(cumulants_at(m, beta, 2).mu() ==
                  doctest::Approx(theta).epsilon(1e-11));
        }
    }
    // Bernoulli closed form: phi'(beta) = theta at beta = log(theta/(1-theta)).
    CHECK(solve_tilt(pascal_model(), 0.8) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("tilt target must lie inside the support interval") {
    ModelSpec sym = symmetric_model();
    CHECK_THROWS_AS(solve_tilt(sym, 1.0), brw::range_error);
    CHECK_THROWS_AS(solve_tilt(sym, -1.0), brw::range_error);
    CHECK_THROWS_AS(solve_tilt(sym, 3.7), brw::range_error);
}

TEST_CASE("information function values") {
    // At the drift the tilt vanishes and I = -phi(0) = -log m.
    CHECK(information(quarter_drift_model(), 0.25) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-10));
    CHECK(information(symmetric_model(), 0.0) ==
          doctest::Approx(-std::log(1.5)).epsilon(1e-10));
    // Bernoulli closed form: I(theta) = theta log theta + (1-theta) log(1-theta).
    double theta = 0.25;
    CHECK(information(pascal_model(), theta) ==
          doctest::Approx(theta * std::log(theta) + (1 - theta) * std::log1p(-theta))
              .epsilon(1e-10));
    // I is minimized at the drift.
    CHECK(information(quarter_drift_model(), 0.6) > information(quarter_drift_model(), 0.25));
}

TEST_CASE("admissible tilt ranges: symmetric model") {
    RangeInfo ri = ranges(symmetric_model());
    CHECK(std::isfinite(ri.beta_plus));
    CHECK(ri.beta_plus > 0.0);
    CHECK(ri.beta_minus == doctest::Approx(-ri.beta_plus).epsilon(1e-9));
    CHECK(ri.gamma_minus == doctest::Approx(-ri.gamma_plus).epsilon(1e-9));
    // At the endpoint, beta phi'(beta) = phi(beta) and Gamma = phi'(beta).
    double b = ri.beta_plus;
    double mu = cumulants_at(symmetric_model(), b, 2).mu();
    CHECK(b * mu == doctest::Approx(log_mgf(symmetric_model(), b)).epsilon(1e-9));
    CHECK(ri.gamma_plus == doctest::Approx(mu).epsilon(1e-6));
    CHECK(ri.gamma_plus > 0.0);
    CHECK(ri.gamma_plus < 1.0);  // below the support edge
}

TEST_CASE("admissible tilt ranges: capped positive side") {
    // Top intensity weight 1 at k=1: beta phi' - phi has no positive root and
    // phi(beta)/beta decreases to the (unattained) support edge.
    RangeInfo qd = ranges(quarter_drift_model());
    CHECK(std::isinf(qd.beta_plus));
    CHECK(qd.gamma_plus == doctest::Approx(1.0));
    CHECK(std::isfinite(qd.beta_minus));
    CHECK(qd.beta_minus < 0.0);
    CHECK(qd.gamma_minus < 0.0);
    CHECK(qd.gamma_minus > -1.0);

    RangeInfo pas = ranges(pascal_model());
    CHECK(std::isinf(pas.beta_plus));
    CHECK(pas.gamma_plus == doctest::Approx(1.0));
    CHECK(std::isinf(pas.beta_minus));
    CHECK(pas.gamma_minus == doctest::Approx(0.0));
}

}  // TEST_SUITE
