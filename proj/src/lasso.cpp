#include "tzinf/lasso.hpp"

#include "tzinf/errors.hpp"

#include <cmath>
#include <sstream>

namespace tzinf {

DesignMatrix::DesignMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names)
    : values_(std::move(values)), names_(std::move(column_names)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw InputError("design matrix must have at least one row and one column");
    }
    if (!values_.allFinite()) {
        throw InputError("design matrix contains non-finite entries");
    }
    if (!names_.empty() && static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
        throw InputError("column_names length does not match the number of columns");
    }
    sq_norms_ = values_.colwise().squaredNorm().transpose();
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        if (sq_norms_(j) == 0.0) {
            std::ostringstream msg;
            msg << "column " << name(static_cast<int>(j)) << " is identically zero";
            throw InputError(msg.str());
        }
    }
}

std::string DesignMatrix::name(int j) const {
    if (!names_.empty()) return names_[static_cast<size_t>(j)];
    return "x" + std::to_string(j + 1);
}

Eigen::MatrixXd DesignMatrix::columns(const IndexList& idx) const {
    Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = values_.col(idx[k]);
    return out;
}

DesignMatrix DesignMatrix::centered() const {
    Eigen::MatrixXd c = values_.rowwise() - values_.colwise().mean();
    return DesignMatrix(std::move(c), names_);
}

ResponseVector::ResponseVector(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 1) throw InputError("response vector is empty");
    if (!values_.allFinite()) throw InputError("response vector contains non-finite entries");
}

void LassoOptions::validate() const {
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw InputError("lasso penalty must be finite and >= 0");
    if (!(convergence_tol > 0.0)) throw InputError("convergence_tol must be positive");
    if (!(active_tol > 0.0)) throw InputError("active_tol must be positive");
    if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
}

namespace {

void check_dims(const DesignMatrix& X, const ResponseVector& y) {
    if (X.rows() != y.size()) {
        std::ostringstream msg;
        msg << "dimension mismatch: X has " << X.rows() << " rows but y has " << y.size() << " entries";
        throw InputError(msg.str());
    }
}

inline double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

double kkt_violation(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, double lambda) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        double v;
        if (beta(j) != 0.0) {
            v = std::abs(grad(j) + lambda * (beta(j) > 0 ? 1.0 : -1.0));
        } else {
            v = std::max(0.0, std::abs(grad(j)) - lambda);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

// Coordinate descent on centered (or intercept-free) data.
LassoFit solve_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& sq, const Eigen::VectorXd& y,
                  const LassoOptions& opts, Eigen::VectorXd beta) {
    const Eigen::Index p = X.cols();
    const double lambda = opts.penalty;
    const double inner_tol = 0.1 * opts.convergence_tol;

    Eigen::VectorXd r = y - X * beta;
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<size_t>(p));

    auto update = [&](Eigen::Index j) {
        const double old = beta(j);
        const double rho = X.col(j).dot(r) + sq(j) * old;
        const double fresh = soft_threshold(rho, lambda) / sq(j);
        const double delta = fresh - old;
        if (delta != 0.0) {
            r.noalias() -= delta * X.col(j);
            beta(j) = fresh;
        }
        return sq(j) * std::abs(delta);
    };

    int iter = 0;
    double violation = 0.0;
    Eigen::VectorXd grad(p);
    while (true) {
        double full_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) full_change = std::max(full_change, update(j));
        ++iter;

        while (iter < opts.max_iterations) {
            active.clear();
            for (Eigen::Index j = 0; j < p; ++j)
                if (beta(j) != 0.0) active.push_back(j);
            double change = 0.0;
            for (Eigen::Index j : active) change = std::max(change, update(j));
            ++iter;
            if (change < inner_tol) break;
        }

        r = y - X * beta;
        grad.noalias() = -X.transpose() * r;
        violation = kkt_violation(grad, beta, lambda);
        if (violation <= opts.convergence_tol) break;
        if (iter >= opts.max_iterations) {
            std::ostringstream msg;
            msg << "lasso did not converge in " << opts.max_iterations
                << " iterations (max KKT violation " << violation << ")";
            throw ConvergenceError(msg.str(), violation);
        }
    }

    LassoFit fit;
    fit.penalty = lambda;
    fit.iterations = iter;

    bool zeroed = false;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (beta(j) != 0.0 && std::abs(beta(j)) <= opts.active_tol) {
            beta(j) = 0.0;
            zeroed = true;
        }
    }
    if (zeroed) {
        r = y - X * beta;
        grad.noalias() = -X.transpose() * r;
        violation = kkt_violation(grad, beta, lambda);
    }

    for (Eigen::Index j = 0; j < p; ++j) {
        if (beta(j) != 0.0) {
            fit.active_set.push_back(static_cast<int>(j));
            fit.signs.push_back(beta(j) > 0 ? 1 : -1);
        } else if (std::abs(lambda - std::abs(grad(j))) <= opts.active_tol * (1.0 + lambda)) {
            fit.degenerate = true;
        }
    }
    if (violation > opts.convergence_tol) fit.degenerate = true;
    fit.kkt_violation = violation;
    fit.coefficients = std::move(beta);
    return fit;
}

LassoFit fit_impl(const DesignMatrix& X, const ResponseVector& y, const LassoOptions& opts,
                  Eigen::VectorXd beta0) {
    opts.validate();
    check_dims(X, y);
    if (beta0.size() != X.cols()) throw InputError("warm start has the wrong number of coefficients");
    if (!opts.include_intercept) {
        return solve_cd(X.values(), X.column_sq_norms(), y.values(), opts, std::move(beta0));
    }
    const Eigen::RowVectorXd xbar = X.values().colwise().mean();
    const double ybar = y.values().mean();
    const Eigen::MatrixXd Xc = X.values().rowwise() - xbar;
    Eigen::VectorXd sq = Xc.colwise().squaredNorm().transpose();
    for (Eigen::Index j = 0; j < sq.size(); ++j) {
        if (sq(j) == 0.0) {
            throw InputError("column " + X.name(static_cast<int>(j)) + " is constant; cannot fit with intercept");
        }
    }
    const Eigen::VectorXd yc = y.values().array() - ybar;
    LassoFit fit = solve_cd(Xc, sq, yc, opts, std::move(beta0));
    fit.intercept = ybar - xbar.dot(fit.coefficients);
    return fit;
}

} // namespace

LassoFit fit_lasso(const DesignMatrix& X, const ResponseVector& y, const LassoOptions& opts) {
    return fit_impl(X, y, opts, Eigen::VectorXd::Zero(X.cols()));
}

LassoFit fit_lasso_warm(const DesignMatrix& X, const ResponseVector& y, const LassoOptions& opts,
                        const LassoFit& warm_start) {
    if (warm_start.coefficients.size() != X.cols()) {
        throw InputError("warm start has the wrong number of coefficients");
    }
    return fit_impl(X, y, opts, warm_start.coefficients);
}

LassoFit fit_lasso_from(const DesignMatrix& X, const ResponseVector& y, const LassoOptions& opts,
                        const Eigen::VectorXd& beta0) {
    return fit_impl(X, y, opts, beta0);
}

KktReport kkt_report(const DesignMatrix& X, const ResponseVector& y, const Eigen::VectorXd& beta,
                     double lambda) {
    check_dims(X, y);
    if (beta.size() != X.cols()) throw InputError("coefficient vector has the wrong length");
    KktReport rep;
    rep.gradient = X.values().transpose() * (X.values() * beta - y.values());
    rep.gap.resize(beta.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) {
            rep.gap(j) = std::abs(rep.gradient(j) + lambda * (beta(j) > 0 ? 1.0 : -1.0));
        } else {
            rep.gap(j) = std::abs(rep.gradient(j)) - lambda;
        }
    }
    rep.max_violation = kkt_violation(rep.gradient, beta, lambda);
    return rep;
}

double lasso_objective(const DesignMatrix& X, const ResponseVector& y, const Eigen::VectorXd& beta,
                       double lambda) {
    return 0.5 * (y.values() - X.values() * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

double lambda_max(const DesignMatrix& X, const ResponseVector& y) {
    check_dims(X, y);
    return (X.values().transpose() * y.values()).lpNorm<Eigen::Infinity>();
}

} // namespace tzinf
