#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace tzinf {

using IndexList = std::vector<int>;
using SignList = std::vector<int>;

// n x p feature matrix. Entries are finite and no column is identically zero.
class DesignMatrix {
public:
    explicit DesignMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names = {});

    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::vector<std::string>& column_names() const noexcept { return names_; }
    const Eigen::VectorXd& column_sq_norms() const noexcept { return sq_norms_; }

    Eigen::Index rows() const noexcept { return values_.rows(); }
    Eigen::Index cols() const noexcept { return values_.cols(); }
    auto col(Eigen::Index j) const { return values_.col(j); }

    // Label for column j, falling back to "x<j+1>".
    std::string name(int j) const;

    // Columns listed in idx, in that order.
    Eigen::MatrixXd columns(const IndexList& idx) const;

    // Copy with every column mean-subtracted.
    DesignMatrix centered() const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
    Eigen::VectorXd sq_norms_;
};

class ResponseVector {
public:
    explicit ResponseVector(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::Index size() const noexcept { return values_.size(); }

private:
    Eigen::VectorXd values_;
};

struct LassoOptions {
    double penalty = 0.0;  // sum-scale lambda
    bool include_intercept = false;
    double convergence_tol = 1e-8;
    int max_iterations = 100000;
    double active_tol = 1e-9;

    void validate() const;
};

struct LassoFit {
    Eigen::VectorXd coefficients;
    std::optional<double> intercept;
    IndexList active_set;
    SignList signs;
    double kkt_violation = 0.0;
    double penalty = 0.0;
    int iterations = 0;
    // An inactive score sits within active_tol of the penalty (selection-boundary point).
    bool degenerate = false;
};

// Minimizes 0.5 * ||y - b0 - X b||^2 + lambda * ||b||_1 by cyclic coordinate descent.
// The intercept (when requested) is handled exactly by centering.
// Throws ConvergenceError when the KKT violation is still above tolerance after
// max_iterations passes, InputError on dimension mismatch.
LassoFit fit_lasso(const DesignMatrix& X, const ResponseVector& y, const LassoOptions& opts);

// Same fixed point as fit_lasso, started from warm_start's coefficients.
LassoFit fit_lasso_warm(const DesignMatrix& X, const ResponseVector& y, const LassoOptions& opts,
                        const LassoFit& warm_start);

// Raw-coefficient variant used by the line sweeps.
LassoFit fit_lasso_from(const DesignMatrix& X, const ResponseVector& y, const LassoOptions& opts,
                        const Eigen::VectorXd& beta0);

struct KktReport {
    Eigen::VectorXd gradient;  // x_j' (X beta - y)
    Eigen::VectorXd gap;       // active: |g_j + lambda sign(beta_j)|; inactive: |g_j| - lambda
    double max_violation = 0.0;
};

// Stationarity residuals of the lasso program at beta (no intercept; center first if needed).
KktReport kkt_report(const DesignMatrix& X, const ResponseVector& y, const Eigen::VectorXd& beta,
                     double lambda);

// 0.5 * ||y - X beta||^2 + lambda * ||beta||_1
double lasso_objective(const DesignMatrix& X, const ResponseVector& y, const Eigen::VectorXd& beta,
                       double lambda);

// Largest lambda with a nonzero solution: ||X' y||_inf.
double lambda_max(const DesignMatrix& X, const ResponseVector& y);

} // namespace tzinf
