#include "oracles.hpp"

#include "tzinf/errors.hpp"
#include "tzinf/geometry.hpp"
#include "tzinf/inference.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tzinf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IndexList all_columns(int p) {
    IndexList idx(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) idx[static_cast<size_t>(j)] = j;
    return idx;
}

LassoFit solve(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda) {
    LassoOptions o;
    o.penalty = lambda;
    o.convergence_tol = 1e-10;
    return fit_lasso(X, ResponseVector(y), o);
}

// Design used for the two-variable geometry pictures.
DesignMatrix two_by_two(double rho) {
    Eigen::Matrix2d M;
    M << 1.0, rho, 0.0, std::sqrt(1.0 - rho * rho);
    return DesignMatrix(M);
}

struct Instance {
    DesignMatrix X;
    Eigen::VectorXd y;
    double lambda;
    LassoFit fit;
};

// Random instance whose lasso fit at y selects at least one variable.
Instance random_instance(int n, int p, std::uint64_t seed, double frac = 0.4) {
    Rng rng(seed);
    Eigen::MatrixXd Xv = oracle::gaussian_matrix(n, p, rng);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta(0) = 1.0;
    beta(1 % p) = -0.8;
    const Eigen::VectorXd y = Xv * beta + oracle::gaussian_vector(n, rng);
    DesignMatrix X(Xv);
    const double lambda = frac * lambda_max(X, ResponseVector(y));
    LassoFit fit = solve(X, y, lambda);
    return {X, y, lambda, fit};
}

bool same_model(const std::pair<IndexList, SignList>& got, const IndexList& M, const SignList& s) {
    return got.first == M && got.second == s;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("line decomposition") {
    const Eigen::Vector3d eta(1, 2, 2), y(3, -1, 0.5);
    const LineDecomposition L = decompose_line(eta, y);
    CHECK(L.z_obs == doctest::Approx(eta.dot(y)));
    CHECK(std::abs(L.eta.dot(L.nu)) < 1e-12);
    CHECK((L.point(L.z_obs) - y).norm() < 1e-12);
    CHECK_THROWS_AS(decompose_line(Eigen::Vector3d::Zero(), y), InputError);
}

TEST_CASE("polyhedron: orthonormal design decouples") {
    const DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
    const double lambda = 1.0;
    const Polyhedron P = polyhedron_for_model_signs(X, {0}, {1}, lambda);
    Rng rng(1);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int k = 0; k < 2000; ++k) {
        const Eigen::Vector3d y(U(rng), U(rng), U(rng));
        const bool expected = y(0) >= lambda && std::abs(y(1)) <= lambda && std::abs(y(2)) <= lambda;
        CHECK(P.contains(y, 1e-12) == expected);
    }
}

TEST_CASE("polyhedron: empty model is the central parallelogram") {
    const double rho = 0.6, lambda = 1.0;
    const DesignMatrix X = two_by_two(rho);
    const Polyhedron P = polyhedron_for_model_signs(X, {}, {}, lambda);
    Rng rng(2);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int k = 0; k < 2000; ++k) {
        const Eigen::Vector2d y(U(rng), U(rng));
        const Eigen::Vector2d score = X.values().transpose() * y;
        CHECK(P.contains(y) == (score.cwiseAbs().maxCoeff() <= lambda));
    }
}

TEST_CASE("polyhedron membership agrees with refitting") {
    const Instance in = random_instance(15, 6, 33);
    REQUIRE(!in.fit.active_set.empty());
    const Polyhedron P = polyhedron_for_model_signs(in.X, in.fit.active_set, in.fit.signs, in.lambda);
    CHECK(P.contains(in.y, 1e-9));
    Rng rng(4);
    int inside = 0;
    for (int k = 0; k < 1000; ++k) {
        const Eigen::VectorXd y = in.y + 0.3 * oracle::gaussian_vector(15, rng);
        const double worst = (P.A * y - P.b).maxCoeff();
        if (std::abs(worst) < 1e-8) continue;
        const bool member = worst <= 0.0;
        inside += member;
        CHECK(member == same_model(oracle::refit(in.X, y, in.lambda), in.fit.active_set, in.fit.signs));
    }
    CHECK(inside > 50);
    CHECK(inside < 950);
}

TEST_CASE("truncation interval: simple cases") {
    Polyhedron P;
    P.A = Eigen::MatrixXd::Ones(1, 1);
    P.b = Eigen::VectorXd::Constant(1, 2.0);
    LineDecomposition L;
    L.eta = L.c = Eigen::VectorXd::Ones(1);
    L.nu = Eigen::VectorXd::Zero(1);
    const SliceBounds s = truncation_interval(P, L);
    CHECK(s.v_minus == -kInf);
    CHECK(s.v_plus == doctest::Approx(2.0));
    CHECK(s.v_zero == kInf);

    P.A.resize(2, 1);
    P.A << 1, -1;
    P.b.resize(2);
    P.b << 3, 1;
    const SliceBounds box = truncation_interval(P, L);
    CHECK(box.v_minus == doctest::Approx(-1.0));
    CHECK(box.v_plus == doctest::Approx(3.0));

    P.b << -2, 1;
    CHECK_THROWS_AS(truncation_interval(P, L), EmptyEventError);
}

TEST_CASE("truncation interval matches the vertex-scan LP") {
    Rng rng(7);
    int checked = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 3 + rep % 4;
        const Eigen::MatrixXd A = oracle::gaussian_matrix(8, n, rng);
        const Eigen::VectorXd nu = oracle::gaussian_vector(n, rng);
        const Eigen::VectorXd c = oracle::gaussian_vector(n, rng);
        const Eigen::VectorXd b = A * nu + Eigen::VectorXd::Random(8).cwiseAbs() + Eigen::VectorXd::Constant(8, 0.1);
        Polyhedron P{A, b};
        LineDecomposition L;
        L.c = c;
        L.eta = c / c.squaredNorm();
        L.nu = nu;
        const SliceBounds s = truncation_interval(P, L);
        const oracle::LpRange lp = oracle::lp_extremes(A, b, nu, c);
        REQUIRE(lp.feasible);
        CAPTURE(rep);
        if (std::isinf(lp.lo)) CHECK(s.v_minus == lp.lo);
        else CHECK(std::abs(s.v_minus - lp.lo) < 1e-8 * (1 + std::abs(lp.lo)));
        if (std::isinf(lp.hi)) CHECK(s.v_plus == lp.hi);
        else CHECK(std::abs(s.v_plus - lp.hi) < 1e-8 * (1 + std::abs(lp.hi)));
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("full-target closed form: orthonormal design") {
    Eigen::MatrixXd Xv = Eigen::MatrixXd::Zero(4, 3);
    Xv.topRows(3).setIdentity();
    const DesignMatrix X(Xv);
    const ResponseVector y(Eigen::Vector4d(2.0, 0.3, -0.2, 0.7));
    const double lambda = 1.0;
    for (int j = 0; j < 3; ++j) {
        const TruncationSet t = full_target_truncation(X, y, j, lambda);
        REQUIRE(t.size() == 2);
        CHECK(t.intervals()[0].hi == doctest::Approx(-lambda));
        CHECK(t.intervals()[1].lo == doctest::Approx(lambda));
    }
    CHECK_THROWS_AS(full_target_truncation(DesignMatrix(Eigen::MatrixXd::Identity(3, 3)),
                                           ResponseVector(Eigen::Vector3d::Ones()), 0, 1.0),
                    RankError);
}

TEST_CASE("full-target closed form matches a dense lasso scan and the partition") {
    for (int rep = 0; rep < 3; ++rep) {
        const Instance in = random_instance(20, 5, 100 + static_cast<std::uint64_t>(rep));
        REQUIRE(!in.fit.active_set.empty());
        const int j = in.fit.active_set.front();
        const TruncationSet closed = full_target_truncation(in.X, ResponseVector(in.y), j, in.lambda);
        const Eigen::VectorXd eta = coefficient_contrast(in.X, all_columns(5), j);
        const LineDecomposition L = decompose_line(eta, in.y);
        const double w = 8.0 * eta.norm();
        const double lo = L.z_obs - w, hi = L.z_obs + w;

        const auto scan = oracle::dense_scan(
            [&](double z) {
                const auto m = oracle::refit(in.X, L.point(z), in.lambda);
                return std::find(m.first.begin(), m.first.end(), j) != m.first.end();
            },
            lo, hi, 10000);
        CAPTURE(rep);
        CHECK(oracle::matches_scan(closed, scan, lo, hi));

        const LinePartition part = line_partition(in.X, L, in.lambda, lo, hi);
        const TruncationSet routed = variable_truncation(part, j);
        CHECK(routed.clip(lo, hi).endpoint_distance(closed.clip(lo, hi)) < 1e-6);
    }
}

TEST_CASE("partition: two-variable picture") {
    const DesignMatrix X = two_by_two(0.0);
    const double lambda = 1.0;
    const Eigen::Vector2d y(2.5, 0.4);
    const LineDecomposition L = decompose_line(Eigen::Vector2d(1, 0), y);
    const LinePartition part = line_partition(X, L, lambda, -6, 6);
    REQUIRE(part.segments.size() == 3);
    CHECK(part.segments[0].active == IndexList{0});
    CHECK(part.segments[0].signs == SignList{-1});
    CHECK(part.segments[0].z_hi == doctest::Approx(-lambda));
    CHECK(part.segments[1].active.empty());
    CHECK(part.segments[1].z_hi == doctest::Approx(lambda));
    CHECK(part.segments[2].active == IndexList{0});
    CHECK(part.segments[2].signs == SignList{1});
    CHECK(part.left_extent == -kInf);
    CHECK(part.right_extent == kInf);

    const TruncationSet m = model_truncation(part, {0});
    REQUIRE(m.size() == 2);
    CHECK(m.intervals()[0].lo == -kInf);
    CHECK(m.intervals()[0].hi == doctest::Approx(-lambda));
    CHECK(m.intervals()[1].lo == doctest::Approx(lambda));
    CHECK(m.intervals()[1].hi == kInf);

    const TruncationSet ms = model_sign_truncation(part, {0}, {-1});
    REQUIRE(ms.size() == 1);
    CHECK(ms.intervals()[0].lo == -kInf);
    CHECK(ms.intervals()[0].hi == doctest::Approx(-lambda));

    const TruncationSet v = variable_truncation(part, 0);
    CHECK(v.endpoint_distance(m) < 1e-12);
    CHECK_THROWS_AS(model_truncation(part, {1}), EmptyEventError);
}

TEST_CASE("partition: penalty above the whole range gives one empty-model segment") {
    Rng rng(8);
    const DesignMatrix X(oracle::gaussian_matrix(10, 4, rng));
    const Eigen::VectorXd y = oracle::gaussian_vector(10, rng);
    const LineDecomposition L = decompose_line(X.col(0), y);
    double sup = 0.0;
    for (double z : {-5.0, 5.0}) sup = std::max(sup, (X.values().transpose() * L.point(z)).lpNorm<Eigen::Infinity>());
    const LinePartition part = line_partition(X, L, sup * 1.01, -5, 5);
    REQUIRE(part.segments.size() == 1);
    CHECK(part.segments[0].active.empty());
}

TEST_CASE("partition: midpoint refits reproduce every segment") {
    for (int rep = 0; rep < 5; ++rep) {
        const Instance in = random_instance(25, 10, 200 + static_cast<std::uint64_t>(rep), 0.25);
        REQUIRE(!in.fit.active_set.empty());
        const Eigen::VectorXd eta = coefficient_contrast(in.X, in.fit.active_set, in.fit.active_set.front());
        const LineDecomposition L = decompose_line(eta, in.y);
        const double w = 10.0 * eta.norm();
        const LinePartition part = line_partition(in.X, L, in.lambda, L.z_obs - w, L.z_obs + w);
        CHECK(part.segments.size() > 1);
        for (size_t i = 0; i < part.segments.size(); ++i) {
            const Segment& s = part.segments[i];
            CHECK(s.z_lo < s.z_hi);
            if (i > 0) CHECK(s.z_lo == part.segments[i - 1].z_hi);
            CHECK(same_model(oracle::refit(in.X, L.point(0.5 * (s.z_lo + s.z_hi)), in.lambda), s.active, s.signs));
        }
    }
}

TEST_CASE("model and model-sign sets contain the observation and match scans") {
    for (int rep = 0; rep < 3; ++rep) {
        const Instance in = random_instance(20, 6, 300 + static_cast<std::uint64_t>(rep), 0.3);
        const IndexList& M = in.fit.active_set;
        const SignList& s = in.fit.signs;
        REQUIRE(!M.empty());
        const Eigen::VectorXd eta = coefficient_contrast(in.X, M, M.back());
        const LineDecomposition L = decompose_line(eta, in.y);
        const double w = 8.0 * eta.norm();
        const double lo = L.z_obs - w, hi = L.z_obs + w;
        const LinePartition part = line_partition(in.X, L, in.lambda, lo, hi);

        const TruncationSet tm = model_truncation(part, M);
        const TruncationSet tms = model_sign_truncation(part, M, s);
        CHECK(tm.contains(L.z_obs));
        CHECK(tms.contains(L.z_obs));
        CHECK(tms.subset_of(tm));

        const auto scan_m = oracle::dense_scan(
            [&](double z) { return oracle::refit(in.X, L.point(z), in.lambda).first == M; }, lo, hi, 10000);
        CAPTURE(rep);
        CHECK(oracle::matches_scan(tm, scan_m, lo, hi));

        // The polyhedral formulas give the same interval as the sweep.
        const SliceBounds sb = truncation_interval(polyhedron_for_model_signs(in.X, M, s, in.lambda), L);
        REQUIRE(tms.size() == 1);
        const TruncationSet poly = TruncationSet::single(sb.v_minus, sb.v_plus);
        CHECK(tms.endpoint_distance(poly) < 1e-8 * (1 + std::abs(L.z_obs)));
    }
}

TEST_CASE("variable truncation: orthonormal design and always-active variable") {
    const DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
    const double lambda = 1.0;
    const LineDecomposition L = decompose_line(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(2.0, 0.2, -0.5));
    const TruncationSet v = variable_truncation(line_partition(X, L, lambda, -10, 10), 0);
    REQUIRE(v.size() == 2);
    CHECK(v.intervals()[0].hi == doctest::Approx(-lambda));
    CHECK(v.intervals()[1].lo == doctest::Approx(lambda));

    // Variable 1 has score 5 everywhere on this line.
    const LineDecomposition L2 = decompose_line(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(2.0, 5.0, -0.5));
    const LinePartition part = line_partition(X, L2, lambda, -4, 4);
    const TruncationSet always = variable_truncation(part, 1);
    REQUIRE(always.size() == 1);
    CHECK(always.infimum() <= part.z_min);
    CHECK(always.supremum() >= part.z_max);
}

TEST_CASE("stable-t truncation") {
    SUBCASE("single high-value variable under an orthonormal design") {
        const DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
        const double lambda = 1.0, cutoff = 2.0, sigma = 1.0;
        const LineDecomposition L = decompose_line(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(3.0, 0.2, -0.5));
        const LinePartition part = line_partition(X, L, lambda, -10, 10);
        const TruncationSet t = stable_t_truncation(part, X, L, 0, {0}, cutoff, sigma);
        REQUIRE(t.size() == 2);
        CHECK(t.intervals()[0].lo == -kInf);
        CHECK(t.intervals()[0].hi == doctest::Approx(-cutoff * sigma));
        CHECK(t.intervals()[1].lo == doctest::Approx(cutoff * sigma));
        CHECK(t.intervals()[1].hi == kInf);
    }
    SUBCASE("random instance matches a dense scan") {
        const Instance in = random_instance(30, 8, 401, 0.3);
        const IndexList& M = in.fit.active_set;
        REQUIRE(M.size() >= 2);
        const double sigma = 1.0, cutoff = 1.5;
        const IndexList H = select_high_value_t(in.X, ResponseVector(in.y), M, sigma, cutoff);
        const int j = M.front();
        const Eigen::VectorXd eta = coefficient_contrast(in.X, M, j);
        const LineDecomposition L = decompose_line(eta, in.y);
        const double w = 8.0 * eta.norm();
        const double lo = L.z_obs - w, hi = L.z_obs + w;
        const LinePartition part = line_partition(in.X, L, in.lambda, lo, hi);
        const TruncationSet t = stable_t_truncation(part, in.X, L, j, H, cutoff, sigma);
        CHECK(t.contains(L.z_obs, 1e-9));
        const auto scan = oracle::dense_scan(
            [&](double z) {
                const Eigen::VectorXd yz = L.point(z);
                const IndexList Mz = oracle::refit(in.X, yz, in.lambda).first;
                if (std::find(Mz.begin(), Mz.end(), j) == Mz.end()) return false;
                return select_high_value_t(in.X, ResponseVector(yz), Mz, sigma, cutoff) == H;
            },
            lo, hi, 10000);
        CHECK(oracle::matches_scan(t, scan, lo, hi));
    }
}

TEST_CASE("stable-l1 truncation") {
    SUBCASE("vacuous high-penalty condition") {
        const Instance in = random_instance(20, 5, 501, 0.3);
        const int j = in.fit.active_set.front();
        const Eigen::VectorXd eta = coefficient_contrast(in.X, in.fit.active_set, j);
        const LineDecomposition L = decompose_line(eta, in.y);
        const double w = 6.0 * eta.norm();
        double top = 0.0;
        for (double z : {L.z_obs - w, L.z_obs + w})
            top = std::max(top, (in.X.values().transpose() * L.point(z)).lpNorm<Eigen::Infinity>());
        const TruncationSet t =
            stable_l1_truncation(in.X, L, j, in.lambda, 1.5 * top, {}, L.z_obs - w, L.z_obs + w);
        const TruncationSet v = variable_truncation(line_partition(in.X, L, in.lambda, L.z_obs - w, L.z_obs + w), j);
        CHECK(t.clip(L.z_obs - w, L.z_obs + w).endpoint_distance(v.clip(L.z_obs - w, L.z_obs + w)) < 1e-12);
    }
    SUBCASE("orthonormal design decouples the thresholds") {
        const DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
        const LineDecomposition L = decompose_line(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(3.0, 0.2, -0.5));
        const TruncationSet t = stable_l1_truncation(X, L, 0, 1.0, 2.0, {0}, -10, 10);
        REQUIRE(t.size() == 2);
        CHECK(t.intervals()[0].hi == doctest::Approx(-2.0));
        CHECK(t.intervals()[1].lo == doctest::Approx(2.0));
    }
    SUBCASE("random instance matches a dense scan") {
        const Instance in = random_instance(30, 8, 502, 0.2);
        const double lambda_high = 2.0 * in.lambda;
        const IndexList H = solve(in.X, in.y, lambda_high).active_set;
        const int j = in.fit.active_set.back();
        const Eigen::VectorXd eta = coefficient_contrast(in.X, in.fit.active_set, j);
        const LineDecomposition L = decompose_line(eta, in.y);
        const double w = 8.0 * eta.norm();
        const double lo = L.z_obs - w, hi = L.z_obs + w;
        const TruncationSet t = stable_l1_truncation(in.X, L, j, in.lambda, lambda_high, H, lo, hi);
        CHECK(t.contains(L.z_obs, 1e-9));
        const auto scan = oracle::dense_scan(
            [&](double z) {
                const Eigen::VectorXd yz = L.point(z);
                const IndexList Mz = oracle::refit(in.X, yz, in.lambda).first;
                if (std::find(Mz.begin(), Mz.end(), j) == Mz.end()) return false;
                return oracle::refit(in.X, yz, lambda_high).first == H;
            },
            lo, hi, 10000);
        CHECK(oracle::matches_scan(t, scan, lo, hi));
    }
}

TEST_CASE("grid truncation") {
    const Instance in = random_instance(20, 5, 601, 0.3);
    const int j = in.fit.active_set.front();
    const Eigen::VectorXd eta = coefficient_contrast(in.X, all_columns(5), j);
    const LineDecomposition L = decompose_line(eta, in.y);
    const double w = 6.0 * eta.norm();
    const auto grid = make_grid(L.z_obs - w, L.z_obs + w, w / 200);
    const double tol = 1e-9;

    const TruncationSet everything = grid_truncation([](const Eigen::VectorXd&) { return true; }, L, grid, tol);
    REQUIRE(everything.size() == 1);
    CHECK(everything.infimum() == grid.front());
    CHECK(everything.supremum() == doctest::Approx(grid.back()));

    const TruncationSet sel = grid_truncation(
        [&](const Eigen::VectorXd& y) {
            const IndexList M = oracle::refit(in.X, y, in.lambda).first;
            return std::find(M.begin(), M.end(), j) != M.end();
        },
        L, grid, tol);
    const TruncationSet closed = full_target_truncation(in.X, ResponseVector(in.y), j, in.lambda);
    CHECK(sel.endpoint_distance(closed.clip(grid.front(), grid.back())) < 1e-6);

    const IndexList& M = in.fit.active_set;
    const SignList& s = in.fit.signs;
    const TruncationSet ms = grid_truncation(
        [&](const Eigen::VectorXd& y) { return same_model(oracle::refit(in.X, y, in.lambda), M, s); }, L, grid, tol);
    const TruncationSet exact =
        model_sign_truncation(line_partition(in.X, L, in.lambda, grid.front(), grid.back()), M, s);
    CHECK(ms.endpoint_distance(exact.clip(grid.front(), grid.back())) < 1e-6);

    CHECK_THROWS_AS(grid_truncation([](const Eigen::VectorXd&) -> bool { throw std::runtime_error("boom"); }, L,
                                    grid, tol),
                    NumericalError);
}

}
