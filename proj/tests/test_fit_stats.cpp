#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "errors.hpp"
#include "fit_stats.hpp"
#include "tail_prob.hpp"
#include "test_support.hpp"

using namespace dra;
using namespace dra::test;

TEST_CASE("tail functions match the boost.math oracle to 1e-8") {
    for (double x : {0.01, 0.4, 1.0, 3.841, 9.2, 31.0}) {
        for (double df : {1.0, 2.0, 5.0, 30.0, 500.0}) {
            boost::math::chi_squared chi(df);
            CHECK(chisq_upper_tail(x, df) ==
                  doctest::Approx(boost::math::cdf(boost::math::complement(chi, x)))
                      .scale(1).epsilon(1e-8));
            boost::math::students_t t(df);
            double two_sided = 2.0 * boost::math::cdf(boost::math::complement(t, x));
            CHECK(student_t_two_sided(x, df) ==
                  doctest::Approx(two_sided).scale(1).epsilon(1e-8));
        }
        for (double df1 : {1.0, 3.0, 10.0})
            for (double df2 : {2.0, 8.0, 120.0}) {
                boost::math::fisher_f f(df1, df2);
                CHECK(f_upper_tail(x, df1, df2) ==
                      doctest::Approx(boost::math::cdf(boost::math::complement(f, x)))
                          .scale(1).epsilon(1e-8));
            }
    }
    boost::math::normal norm;
    for (double z : {-3.0, -0.5, 0.0, 1.1, 3.174070034227254, 6.0})
        CHECK(normal_upper_tail(z) ==
              doctest::Approx(boost::math::cdf(boost::math::complement(norm, z)))
                  .scale(1).epsilon(1e-10));
}

TEST_CASE("frozen tail values") {
    CHECK(chisq_upper_tail(3.841, 1) == doctest::Approx(0.05001368376).epsilon(1e-8));
    CHECK(f_upper_tail(4.96, 1, 8) == doctest::Approx(0.05655175434).epsilon(1e-8));
    CHECK(student_t_two_sided(1.1694372850175818, 500) ==
          doctest::Approx(0.242785).epsilon(1e-5));
    CHECK(2.0 * normal_upper_tail(3.174070034227254) ==
          doctest::Approx(0.00150317).epsilon(1e-5));
}

TEST_CASE("quantiles invert the tails") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    CHECK(student_t_quantile(0.975, 500) ==
          doctest::Approx(1.9647198374673438).epsilon(1e-10));
    for (double p : {0.025, 0.2, 0.5, 0.9, 0.995}) {
        CHECK(normal_upper_tail(normal_quantile(p)) == doctest::Approx(1 - p).epsilon(1e-10));
        double tq = student_t_quantile(p, 17);
        double back = tq >= 0 ? 1.0 - student_t_two_sided(tq, 17) / 2.0
                              : student_t_two_sided(-tq, 17) / 2.0;
        CHECK(back == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("linear_fit_stats: hand-computed example") {
    FitReport r = linear_fit_stats(10.0, 40.0, 10, 2, 10.0 / 8.0, true, 3.0);
    CHECK(r.get("R_Square") == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.get("Adj_R_Sq") == doctest::Approx(1.0 - 0.25 * 9.0 / 8.0).epsilon(1e-15));
    CHECK(r.get("AIC") == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.get("SBC") == doctest::Approx(2.0 * std::log(10.0)).epsilon(1e-12));
    CHECK(r.get("BIC_Sawa") == doctest::Approx(6.875).epsilon(1e-12));
    CHECK(r.get("Root_MSE") == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(r.get("Coeff_Var") ==
          doctest::Approx(100.0 * std::sqrt(1.25) / 3.0).epsilon(1e-15));
}

TEST_CASE("linear_fit_stats: null and perfect fits") {
    FitReport null_fit = linear_fit_stats(40.0, 40.0, 10, 2, 5.0, true, 1.0);
    CHECK(null_fit.get("R_Square") == 0.0);

    FitReport perfect = linear_fit_stats(0.0, 40.0, 10, 2, 0.0, true, 1.0);
    CHECK(perfect.get("R_Square") == 1.0);
    CHECK(perfect.perfect_fit);
    CHECK(std::isinf(perfect.get("AIC")));

    CHECK_THROWS_AS(linear_fit_stats(0.0, 0.0, 10, 2, 1.0, true, 1.0), DataError);
    CHECK_THROWS_AS(linear_fit_stats(1.0, 2.0, 2, 2, 1.0, true, 1.0), DataError);
}

TEST_CASE("logistic_fit_stats: -2LL criteria reproduce the published fit table") {
    FitReport r = logistic_fit_stats(-261.03195, 506, 6, 0.494);
    CHECK(r.get("Log_Likelihood") == -261.03195);
    CHECK(r.get("AIC") == doctest::Approx(534.06390).epsilon(5e-8));
    CHECK(r.get("AICC") == doctest::Approx(534.23223).epsilon(5e-8));
    CHECK(r.get("BIC") == doctest::Approx(559.42312).epsilon(5e-8));
    CHECK(r.get("Deviance") == doctest::Approx(522.06390).epsilon(1e-12));
}

TEST_CASE("logistic_fit_stats: null model and limits") {
    double n = 200, ybar = 0.3;
    double ll0 = loglik_null(n, ybar);
    FitReport r = logistic_fit_stats(ll0, n, 4, ybar);
    CHECK(r.get("R_Square") == doctest::Approx(0.0).scale(1).epsilon(1e-14));

    FitReport big = logistic_fit_stats(-1000.0, 1e8, 4, 0.5);
    CHECK(big.get("AICC") == doctest::Approx(big.get("AIC")).epsilon(1e-9));

    CHECK_THROWS_AS(logistic_fit_stats(-10.0, 100, 2, 0.0), DataError);
    CHECK_THROWS_AS(logistic_fit_stats(-10.0, 100, 2, 1.0), DataError);
}

TEST_CASE("logistic_fit_stats: max-rescaled R-square formula") {
    double n = 506, ll = -261.03195, ybar = 0.494071146245059;
    FitReport r = logistic_fit_stats(ll, n, 6, ybar);
    double ll0 = loglik_null(n, ybar);
    double g = 1.0 - std::exp(2.0 * (ll0 - ll) / n);
    CHECK(r.get("R_Square") == doctest::Approx(g).epsilon(1e-14));
    CHECK(r.get("Max_Rescaled_R_Square") ==
          doctest::Approx(g / (1.0 - std::exp(2.0 * ll0 / n))).epsilon(1e-14));
}

TEST_CASE("global_null_test") {
    ChiSqTest null_case = global_null_test(-100.0, -100.0, 3);
    CHECK(null_case.chi_sq == 0.0);
    CHECK(null_case.p_value == 1.0);

    ChiSqTest t = global_null_test(-98.0795, -100.0, 1);
    CHECK(t.chi_sq == doctest::Approx(3.841).epsilon(1e-12));
    CHECK(t.p_value == doctest::Approx(0.0500).epsilon(1e-2));

    CHECK_THROWS_AS(global_null_test(-101.0, -100.0, 1), NumericalError);
}

TEST_CASE("anova_table") {
    AnovaTable null_fit = anova_table(40.0, 40.0, 10, 2);
    CHECK(null_fit.f_value == 0.0);
    CHECK(null_fit.p_value == 1.0);

    AnovaTable t = anova_table(8.0, 12.96, 10, 2);
    CHECK(t.f_value == doctest::Approx(4.96).epsilon(1e-12));
    CHECK(t.p_value == doctest::Approx(0.0565).epsilon(1e-3));
    CHECK(t.model_df == 1);
    CHECK(t.error_df == 8);

    double sse = 31.1, sse1 = 47.54, n = 506;
    int p = 6;
    AnovaTable a = anova_table(sse, sse1, n, p);
    double rsq = 1.0 - sse / sse1;
    CHECK(a.f_value ==
          doctest::Approx((rsq / (p - 1)) / ((1.0 - rsq) / (n - p))).epsilon(1e-12));
}

TEST_CASE("inference_table: published-scale p-values and CI symmetry") {
    std::vector<std::string> labels = {"b"};
    Eigen::VectorXd beta(1);
    Eigen::MatrixXd cov(1, 1), rcov(1, 1);

    beta << -1.22053;
    cov << 1.04369 * 1.04369;
    rcov << 1.04369 * 1.04369;
    auto rows = inference_table(labels, beta, cov, rcov, 0.05,
                                FamilySpec{Family::linear}, 506, 6);
    CHECK(rows[0].p_value == doctest::Approx(0.2428).epsilon(2e-4));
    CHECK(rows[0].estimate - rows[0].lower_cl ==
          doctest::Approx(rows[0].upper_cl - rows[0].estimate).epsilon(1e-12));

    beta << 1.68778;
    cov << 0.53174 * 0.53174;
    auto lrows = inference_table(labels, beta, cov, cov, 0.05,
                                 FamilySpec{Family::logistic}, 506, 6);
    CHECK(lrows[0].p_value == doctest::Approx(0.0015033).epsilon(1e-4));

    cov << 0.0;
    auto zrows = inference_table(labels, beta, cov, cov, 0.05,
                                 FamilySpec{Family::linear}, 506, 6);
    CHECK(std::isnan(zrows[0].p_value));
    CHECK(std::isnan(zrows[0].lower_cl));
}

TEST_CASE("site statistics: additive across sites and round-trip exact") {
    auto rng = make_rng(11);
    RandomDataOptions opt;
    opt.n = 40;
    opt.family = Family::logistic;
    opt.with_freq = true;
    opt.with_weight = true;
    AnalyticDataset ds = make_random_dataset(rng, opt);
    ModelSpec spec = make_spec(ds, Family::logistic);
    const FamilySpec family{Family::logistic};
    Eigen::VectorXd beta(4);
    beta << 0.2, -0.3, 0.1, 0.05;

    SiteStatContribution pooled =
        compute_site_stats(build_design(ds, spec), family, beta, 0);
    auto parts = split_dataset(ds, {15, 25});
    std::vector<SiteStatContribution> contribs;
    for (auto& part : parts)
        contribs.push_back(
            compute_site_stats(build_design(part, spec), family, beta, part.partner_id));
    SiteStatContribution sum = add_site_stats(contribs);
    CHECK(sum.loglik_local == doctest::Approx(pooled.loglik_local).epsilon(1e-10));
    CHECK(sum.sum_y == doctest::Approx(pooled.sum_y).epsilon(1e-10));
    CHECK(sum.sum_y_sq == doctest::Approx(pooled.sum_y_sq).epsilon(1e-10));
    CHECK(sum.sum_freq == pooled.sum_freq);

    SiteStatContribution back =
        parse_site_stats(serialize_site_stats(contribs[0]), "test");
    CHECK(back.loglik_local == contribs[0].loglik_local);
    CHECK(back.sum_resid_sq == contribs[0].sum_resid_sq);
    CHECK(back.dp_cd == contribs[0].dp_cd);
}
