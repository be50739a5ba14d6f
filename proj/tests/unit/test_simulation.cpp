#include "tzinf/errors.hpp"
#include "tzinf/simulation.hpp"

#include <doctest.h>

#include <cmath>

using namespace tzinf;

namespace {

double corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    return ca.dot(cb) / (ca.norm() * cb.norm());
}

StudyConfig small_study() {
    StudyConfig c;
    c.n = 40;
    c.p = 10;
    c.k_signals = 2;
    c.signal = SignalLevel::explicit_value;
    c.signal_value = 0.8;
    c.lambda_rule = LambdaRule::explicit_value;
    c.lambda_value = 0.2;
    c.target = TargetKind::full;
    c.replications = 24;
    c.seed = 77;
    return c;
}

bool same_report(const StudyReport& a, const StudyReport& b) {
    if (a.methods.size() != b.methods.size() || a.mean_selected != b.mean_selected) return false;
    for (size_t m = 0; m < a.methods.size(); ++m) {
        if (a.methods[m].lengths != b.methods[m].lengths || a.methods[m].covered != b.methods[m].covered) return false;
    }
    return true;
}

} // namespace

TEST_SUITE("simulation") {

TEST_CASE("design correlations") {
    const int n = 400;
    const double tol = 4.0 / std::sqrt(n);
    SUBCASE("block scheme with rho = 0 is independent") {
        DesignScheme s{DesignKind::block_equicorr, 0.0, 5};
        const Eigen::MatrixXd X = gen_design(n, 20, s, 1).values();
        for (int a = 0; a < 20; ++a)
            for (int b = a + 1; b < 20; ++b) CHECK(std::abs(corr(X.col(a), X.col(b))) < tol);
    }
    SUBCASE("Toeplitz") {
        DesignScheme s{DesignKind::toeplitz, 0.5, 5};
        const Eigen::MatrixXd X = gen_design(n, 10, s, 2).values();
        CHECK(std::abs(corr(X.col(3), X.col(5)) - 0.25) < tol);
        CHECK(std::abs(corr(X.col(3), X.col(4)) - 0.5) < tol);
        CHECK(std::abs(X.col(0).squaredNorm() / n - 1.0) < 0.2);
    }
    SUBCASE("block equicorrelation") {
        DesignScheme s{DesignKind::block_equicorr, 0.5, 5};
        const int p = 25;  // 5 leaders, 4 derived columns per block
        const Eigen::MatrixXd X = gen_design(n, p, s, 3).values();
        // Block 0 derived columns are 5..8 with leader 0.
        CHECK(std::abs(corr(X.col(5), X.col(6)) - 0.25) < tol);
        CHECK(std::abs(corr(X.col(0), X.col(5)) - 0.5) < tol);
        CHECK(std::abs(corr(X.col(0), X.col(9))) < tol);
        CHECK(std::abs(corr(X.col(1), X.col(9)) - 0.5) < tol);
    }
    CHECK_THROWS_AS(gen_design(10, 12, DesignScheme{DesignKind::block_equicorr, 0.5, 5}, 1), InputError);
    CHECK_THROWS_AS(gen_design(10, 10, DesignScheme{DesignKind::toeplitz, 1.0, 5}, 1), InputError);
}

TEST_CASE("signal placement") {
    StudyConfig c;
    c.p = 30;
    c.k_signals = 4;
    Rng rng(1);
    Eigen::VectorXd b = gen_beta(c, 0.5, rng);
    CHECK(b.head(4).isConstant(0.5));
    CHECK(b.tail(26).isZero());
    c.design.kind = DesignKind::toeplitz;
    c.design.rho = 0.5;
    b = gen_beta(c, 0.5, rng);
    CHECK((b.array() != 0.0).count() == 4);
    CHECK(b.sum() == doctest::Approx(2.0));
}

TEST_CASE("noise generators") {
    Rng rng(5);
    const DesignMatrix X(Eigen::MatrixXd::Identity(6, 3).eval() + Eigen::MatrixXd::Ones(6, 3));
    const Eigen::Vector3d beta(1, -2, 0.5);
    NoiseScheme none;
    none.sigma = 0.0;
    CHECK((gen_response(X, beta, none, 1).values() - X.values() * beta).norm() == 0.0);

    NoiseScheme normal;
    normal.sigma = 2.0;
    const Eigen::VectorXd e = gen_noise(1000, normal, rng);
    const double var = (e.array() - e.mean()).square().sum() / 999.0;
    CHECK(std::abs(var - 4.0) < 0.2 * 4.0);

    NoiseScheme t3;
    t3.kind = NoiseKind::student_t;
    const Eigen::VectorXd t = gen_noise(100000, t3, rng);
    const Eigen::ArrayXd ct = t.array() - t.mean();
    const double m2 = ct.square().mean();
    const double kurt = ct.pow(4).mean() / (m2 * m2) - 3.0;
    CHECK(kurt > 3.0);

    NoiseScheme skew;
    skew.kind = NoiseKind::skew_normal;
    const Eigen::VectorXd s = gen_noise(100000, skew, rng);
    const Eigen::ArrayXd cs = s.array() - s.mean();
    CHECK(std::abs(s.mean()) < 0.02);
    CHECK(std::abs(cs.square().mean() - 1.0) < 0.03);
    CHECK(cs.cube().mean() > 0.5);

    t3.dof = 2.0;
    CHECK_THROWS_AS(gen_noise(10, t3, rng), InputError);
}

TEST_CASE("calibration constants") {
    CHECK(universal_lambda(100, 250) == doctest::Approx(0.33).epsilon(0.01));
    CHECK(universal_lambda(100, 50) == doctest::Approx(0.28).epsilon(0.01));
    CHECK(universal_lambda(100, 1250) == doctest::Approx(0.38).epsilon(0.01));
    const int n = 64;
    const DeltaCalibration d = calibrate_delta(n, 1, DesignScheme{}, 4000, 3);
    CHECK(d.delta_low == doctest::Approx(0.6745 / std::sqrt(n)).epsilon(0.05));
    CHECK(d.delta_high > d.delta_low + 0.25);
}

TEST_CASE("quantile helper") {
    CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(quantile({1, inf, inf}, 0.5) == inf);
    CHECK(quantile({1, 2, inf}, 0.5) == 2.0);
    CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("null replication with a huge penalty selects nothing") {
    StudyConfig c = small_study();
    c.signal = SignalLevel::null;
    c.replications = 1;
    c.lambda_value = 100.0;
    const StudyReport r = run_study(c);
    CHECK(r.zero_selection_replications == 1);
    CHECK(r.mean_selected == 0.0);
    for (const auto& m : r.methods) CHECK(m.intervals == 0);
}

TEST_CASE("studies are reproducible and independent of the thread count") {
    StudyConfig c = small_study();
    c.threads = 1;
    const StudyReport a = run_study(c);
    const StudyReport b = run_study(c);
    c.threads = 4;
    const StudyReport d = run_study(c);
    CHECK(same_report(a, b));
    CHECK(same_report(a, d));
    CHECK(a.replications == 24);
    CHECK(a.failed_replications == 0);
    for (const auto& m : a.methods) {
        CHECK(m.intervals > 0);
        CHECK(m.coverage >= 0.0);
        CHECK(m.coverage <= 1.0);
    }
    c.seed = 78;
    CHECK_FALSE(same_report(a, run_study(c)));
}

TEST_CASE("config validation lists every problem") {
    StudyConfig c;
    c.n = 1;
    c.alpha = 2.0;
    c.methods.clear();
    const auto bad = c.problems();
    CHECK(bad.size() >= 3);
    CHECK_THROWS_AS(c.validate(), InputError);
    StudyConfig f;
    f.p = 150;
    f.target = TargetKind::full;
    CHECK_THROWS_AS(f.validate(), InputError);
}

}
