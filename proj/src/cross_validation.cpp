#include "tzinf/cross_validation.hpp"

#include "tzinf/errors.hpp"
#include "tzinf/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tzinf {

namespace {

struct Fold {
    DesignMatrix X_train;
    ResponseVector y_train;
    Eigen::MatrixXd X_test;
    Eigen::VectorXd y_test;
};

Fold make_fold(const DesignMatrix& X, const ResponseVector& y, const std::vector<int>& assign, int k) {
    std::vector<Eigen::Index> train, test;
    for (size_t i = 0; i < assign.size(); ++i) (assign[i] == k ? test : train).push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd& V = X.values();
    Eigen::MatrixXd Xtr = V(train, Eigen::all);
    Eigen::VectorXd ytr = y.values()(train);
    // Training columns can be constant (or zero) in a fold; nudge those so the
    // DesignMatrix invariant holds, the solver then leaves them at zero.
    for (Eigen::Index j = 0; j < Xtr.cols(); ++j) {
        if (Xtr.col(j).squaredNorm() == 0.0) Xtr(0, j) = 1e-12;
    }
    return {DesignMatrix(std::move(Xtr)), ResponseVector(std::move(ytr)), V(test, Eigen::all), y.values()(test)};
}

} // namespace

CvResult cv_select_lambda(const DesignMatrix& X, const ResponseVector& y, const CvOptions& opts) {
    const Eigen::Index n = X.rows();
    if (y.size() != n) throw InputError("dimension mismatch between X and y");
    if (opts.folds < 2 || opts.folds > n) throw InputError("folds must lie in [2, n]");
    if (opts.grid_size < 2) throw InputError("CV grid needs at least two points");
    const double min_ratio = opts.grid_min_ratio.value_or(n >= X.cols() ? 1e-4 : 1e-2);
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw InputError("grid_min_ratio must lie in (0, 1)");

    Eigen::VectorXd yc = y.values();
    Eigen::MatrixXd Xc = X.values();
    if (opts.include_intercept) {
        yc.array() -= yc.mean();
        Xc = Xc.rowwise() - Xc.colwise().mean();
    }
    const double top = (Xc.transpose() * yc).lpNorm<Eigen::Infinity>() / static_cast<double>(n);
    if (!(top > 0.0)) throw InputError("response is orthogonal to every column; CV grid is degenerate");

    CvResult out;
    out.lambdas.resize(static_cast<size_t>(opts.grid_size));
    const double step = std::log(min_ratio) / (opts.grid_size - 1);
    for (int g = 0; g < opts.grid_size; ++g) out.lambdas[static_cast<size_t>(g)] = top * std::exp(step * g);
    out.cv_error.assign(out.lambdas.size(), 0.0);

    std::vector<int> assign(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) assign[static_cast<size_t>(i)] = static_cast<int>(i % opts.folds);
    Rng rng(derive_seed(opts.seed, 0, 0xcf));
    std::shuffle(assign.begin(), assign.end(), rng);

    size_t usable = out.lambdas.size();
    for (int k = 0; k < opts.folds; ++k) {
        const Fold f = make_fold(X, y, assign, k);
        const double n_train = static_cast<double>(f.y_train.size());
        LassoOptions lo = opts.lasso;
        lo.include_intercept = opts.include_intercept;
        lo.convergence_tol = std::max(lo.convergence_tol, opts.relative_tol * top * n_train);
        lo.max_iterations = std::min(lo.max_iterations, opts.max_iterations);
        LassoFit warm;
        warm.coefficients = Eigen::VectorXd::Zero(X.cols());
        Eigen::VectorXd ytr = f.y_train.values();
        if (opts.include_intercept) ytr.array() -= ytr.mean();
        const double tss = ytr.squaredNorm();
        for (size_t g = 0; g < usable; ++g) {
            lo.penalty = out.lambdas[g] * n_train;
            try {
                warm = fit_lasso_warm(f.X_train, f.y_train, lo, warm);
            } catch (const ConvergenceError&) {
                usable = g;
                break;
            }
            Eigen::VectorXd pred = f.X_test * warm.coefficients;
            if (warm.intercept) pred.array() += *warm.intercept;
            out.cv_error[g] += (f.y_test - pred).squaredNorm();
            // Saturated fit: smaller penalties only interpolate the training data.
            Eigen::VectorXd fitted = f.X_train.values() * warm.coefficients;
            if (warm.intercept) fitted.array() += *warm.intercept;
            const double rss = (f.y_train.values() - fitted).squaredNorm();
            if (rss <= (1.0 - opts.max_deviance_ratio) * tss ||
                static_cast<double>(warm.active_set.size()) >= n_train - 1.0) {
                usable = g + 1;
                break;
            }
        }
    }
    if (usable == 0) throw ConvergenceError("lasso failed to converge at every CV grid penalty", 0.0);
    out.lambdas.resize(usable);
    out.cv_error.resize(usable);
    for (double& e : out.cv_error) e /= static_cast<double>(n);
    out.best = static_cast<size_t>(std::min_element(out.cv_error.begin(), out.cv_error.end()) - out.cv_error.begin());
    out.lambda_min = out.lambdas[out.best];
    return out;
}

} // namespace tzinf
