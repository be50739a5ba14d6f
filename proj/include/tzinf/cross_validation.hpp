#pragma once

#include "tzinf/lasso.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tzinf {

struct CvOptions {
    int folds = 10;
    int grid_size = 50;
    // Smallest grid value relative to ||X'y||_inf / n; default 1e-4 when n >= p, else 1e-2.
    std::optional<double> grid_min_ratio;
    bool include_intercept = false;
    std::uint64_t seed = 0;
    // Path fits only need prediction accuracy: KKT tolerance relative to the
    // top of the grid, and a smaller iteration cap.
    double relative_tol = 1e-4;
    int max_iterations = 5000;
    // The path stops once a training fit explains this share of the deviance
    // or its active set reaches n_train - 1.
    double max_deviance_ratio = 0.999;
    LassoOptions lasso;
};

struct CvResult {
    std::vector<double> lambdas;   // per-observation scale, decreasing
    std::vector<double> cv_error;  // mean squared prediction error
    std::size_t best = 0;
    double lambda_min = 0.0;       // per-observation scale
};

// K-fold cross-validation over a log-spaced penalty grid. Fold assignment is a
// seeded shuffle; each training fit uses penalty lambda * n_train. The grid is
// cut where any fold saturates or fails to converge.
CvResult cv_select_lambda(const DesignMatrix& X, const ResponseVector& y, const CvOptions& opts);

} // namespace tzinf
