// Randomized property suites, runnable standalone:
//   sscp additivity/symmetry/scaling, XCONV branch behavior at the 0.01
//   boundary, binning floor + count conservation, parameter-file round
//   trips. Each case count is >= 1000.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "binning.hpp"
#include "exchange.hpp"
#include "solver.hpp"
#include "summaries.hpp"
#include "test_support.hpp"

using namespace dra;
using namespace dra::test;

namespace {
constexpr int kCases = 1000;
}

TEST_CASE("property: sscp additivity, symmetry, scaling") {
    auto rng = make_rng(0xA11CE);
    std::uniform_int_distribution<int> n_dist(2, 24);
    std::uniform_int_distribution<int> p_dist(1, 4);
    std::uniform_int_distribution<size_t> cut_point(1, 100);
    std::uniform_real_distribution<double> wdist(0.0, 3.0);
    std::normal_distribution<double> gauss;

    for (int rep = 0; rep < kCases; ++rep) {
        const size_t n = static_cast<size_t>(n_dist(rng));
        const int p = p_dist(rng);
        std::vector<DesignRow> rows(n);
        std::vector<double> y(n), w(n);
        for (size_t i = 0; i < n; ++i) {
            rows[i].z.resize(p);
            for (int j = 0; j < p; ++j) rows[i].z[j] = gauss(rng);
            rows[i].freq = 1;
            rows[i].weight = rows[i].effective_weight = 1;
            y[i] = gauss(rng);
            w[i] = wdist(rng);
        }
        SscpMatrix whole = local_sscp(rows, y, w);

        // symmetry, bitwise
        REQUIRE(whole.values == whole.values.transpose().eval());

        // additivity across an arbitrary split
        size_t cut = 1 + cut_point(rng) % (n > 1 ? n - 1 : 1);
        std::vector<DesignRow> a(rows.begin(), rows.begin() + cut);
        std::vector<DesignRow> b(rows.begin() + cut, rows.end());
        SscpMatrix ma = local_sscp(a, {y.data(), cut}, {w.data(), cut});
        SscpMatrix mb = local_sscp(b, {y.data() + cut, n - cut}, {w.data() + cut, n - cut});
        double scale = std::max(1.0, whole.values.cwiseAbs().maxCoeff());
        REQUIRE((ma.values + mb.values - whole.values).cwiseAbs().maxCoeff() <=
                1e-12 * scale);

        // doubling every weight doubles every entry
        std::vector<double> w2(n);
        for (size_t i = 0; i < n; ++i) w2[i] = 2.0 * w[i];
        SscpMatrix doubled = local_sscp(rows, y, w2);
        REQUIRE((doubled.values - 2.0 * whole.values).cwiseAbs().maxCoeff() <=
                1e-12 * scale);
    }
}

TEST_CASE("property: XCONV branches at the 0.01 magnitude boundary") {
    auto rng = make_rng(0xB0B);
    std::uniform_real_distribution<double> mag(0.0, 0.02);
    std::uniform_real_distribution<double> step(-3e-4, 3e-4);
    std::uniform_int_distribution<int> sign(0, 1);

    for (int rep = 0; rep < kCases; ++rep) {
        double prev = (sign(rng) ? 1 : -1) * mag(rng);
        double d = step(rng);
        double next = prev + d;
        Eigen::VectorXd pv(1), nv(1);
        pv << prev;
        nv << next;
        ConvergenceCheck chk = check_convergence(pv, nv, 1e-4);
        double expect = std::fabs(prev) < 0.01 ? std::fabs(d) : std::fabs(d / prev);
        REQUIRE(chk.max_abs_delta == doctest::Approx(expect).epsilon(1e-12));
        REQUIRE(chk.converged == (expect < 1e-4));
    }
    // exactly at the boundary the relative branch applies
    Eigen::VectorXd pv(1), nv(1);
    pv << 0.01;
    nv << 0.01 + 5e-7;
    CHECK(check_convergence(pv, nv, 1e-4).max_abs_delta ==
          doctest::Approx(5e-5).epsilon(1e-6));
}

TEST_CASE("property: binning floor and count conservation") {
    auto rng = make_rng(0xB1A5);
    std::uniform_int_distribution<int> n_rows(1, 200);
    std::uniform_int_distribution<int> tie_levels(1, 40);
    std::uniform_int_distribution<int> freq_dist(1, 4);
    std::uniform_int_distribution<long> min_dist(1, 9);
    std::uniform_int_distribution<long> grp_dist(1, 15);
    std::uniform_int_distribution<int> coin(0, 1);

    for (int rep = 0; rep < kCases; ++rep) {
        const int n = n_rows(rng);
        const int levels = tie_levels(rng);
        std::vector<ScoredRow> rows;
        double total = 0, resp = 0;
        for (int i = 0; i < n; ++i) {
            ScoredRow s;
            s.mu = static_cast<double>(rng() % static_cast<unsigned>(levels)) /
                   static_cast<double>(levels);
            s.outcome = coin(rng);
            s.resid = s.outcome - s.mu;
            s.variance = 1;
            s.freq = freq_dist(rng);
            total += s.freq;
            resp += s.outcome ? s.freq : 0;
            rows.push_back(s);
        }
        BinningPolicy policy{grp_dist(rng), min_dist(rng), 10000};
        auto bins = residual_summary(rows, policy, 1, FamilySpec{Family::logistic});

        double n_sum = 0, resp_sum = 0;
        for (auto& b : bins) {
            n_sum += b.n_obs;
            resp_sum += b.resp_count;
            REQUIRE(b.distinct_prob_count <= b.n_obs);
            REQUIRE(b.resp_count + b.noresp_count == b.n_obs);
            if (total >= static_cast<double>(policy.n_min))
                REQUIRE(b.n_obs >= static_cast<double>(policy.n_min));
        }
        REQUIRE(n_sum == total);
        REQUIRE(resp_sum == resp);
        // bins ordered by value, means within range
        for (size_t i = 1; i < bins.size(); ++i)
            REQUIRE(bins[i].prob_mean > bins[i - 1].prob_mean);
    }
}

TEST_CASE("property: parameter files round-trip verbatim") {
    auto rng = make_rng(0xF00D);
    const std::string name_chars =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789";
    const std::string value_chars = name_chars + " .-+:;/()[]!@#$%^&*";
    std::uniform_int_distribution<int> extra(0, 8);
    std::uniform_int_distribution<size_t> name_len(1, 20), value_len(0, 40);

    for (int rep = 0; rep < kCases; ++rep) {
        ParamSet p;
        p.set("reg_ds_in", "ds");
        p.set("independent_vars", "x1 x2");
        p.set("dependent_vars", "y");
        p.set("regr_type_cd", rep % 2 ? "1" : "2");
        p.set("iter_nb", std::to_string(rep));
        p.set("last_iter_in", rep % 3 ? "0" : "1");
        p.set("end_job_dp_in", rep % 3 ? "0" : "1");
        int n_extra = extra(rng);
        for (int e = 0; e < n_extra; ++e) {
            std::string name = "k";
            for (size_t i = 0; i < name_len(rng); ++i)
                name += name_chars[rng() % name_chars.size()];
            name += std::to_string(e);  // uniqueness
            std::string value;
            for (size_t i = 0; i < value_len(rng); ++i)
                value += value_chars[rng() % value_chars.size()];
            p.set(name, value);
        }
        ParamSet back = decode_params(encode_params(p));
        REQUIRE(back.pairs == p.pairs);
    }
}
