#pragma once

#include "tzinf/lasso.hpp"
#include "tzinf/truncation_set.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace tzinf {

// {y : A y <= b}
struct Polyhedron {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;

    bool contains(const Eigen::VectorXd& y, double tol = 0.0) const;
};

// y = nu + c * z with c = eta / ||eta||^2, z = eta' y and eta' nu = 0.
struct LineDecomposition {
    Eigen::VectorXd eta;
    Eigen::VectorXd c;
    Eigen::VectorXd nu;
    double z_obs = 0.0;

    double eta_norm() const { return eta.norm(); }
    Eigen::VectorXd point(double z) const { return nu + c * z; }
};

LineDecomposition decompose_line(const Eigen::VectorXd& eta, const Eigen::VectorXd& y);

// X_S (X_S' X_S)^{-1} e_j: the contrast whose inner product with mu is the
// coefficient of variable j in the regression on the columns S (j must be in S).
// Throws RankError if X_S is (numerically) rank deficient.
Eigen::VectorXd coefficient_contrast(const DesignMatrix& X, const IndexList& S, int j);

// (X_S' X_S)^{-1}; RankError when singular.
Eigen::MatrixXd gram_inverse(const DesignMatrix& X, const IndexList& S);

// Region {M_hat = M, s_hat = s} obtained from the lasso KKT system.
Polyhedron polyhedron_for_model_signs(const DesignMatrix& X, const IndexList& M, const SignList& s,
                                      double lambda);

struct SliceBounds {
    double v_minus;
    double v_plus;
    double v_zero;  // +inf when no row is parallel to the line
};

// Range of z keeping nu + c z inside the polyhedron. Rows whose |(Ac)_j| is below
// ray_tol (relative to ||A_j|| ||c||) are treated as parallel to the line.
// Throws EmptyEventError if the line misses the polyhedron.
SliceBounds truncation_interval(const Polyhedron& P, const LineDecomposition& line, double ray_tol = 1e-12);

// Two-ray truncation [-inf, a_j] U [b_j, inf] of the full-target statistic for
// variable j given j in M_hat (requires n > p and X'X invertible).
TruncationSet full_target_truncation(const DesignMatrix& X, const ResponseVector& y, int j, double lambda);

struct Segment {
    double z_lo;
    double z_hi;
    IndexList active;
    SignList signs;
};

// Maximal constant-(M, s) pieces of the line over [z_min, z_max].
struct LinePartition {
    std::vector<Segment> segments;
    double z_min = 0.0;
    double z_max = 0.0;
    double lambda = 0.0;
    // Exact outer ends of the first and last segments' (M, s) regions, which
    // may lie beyond the working range (possibly infinite).
    double left_extent = 0.0;
    double right_extent = 0.0;
    double merge_tol = 0.0;
    int nudges = 0;  // boundaries resolved by the epsilon-step fallback
};

struct PartitionOptions {
    int max_segments = 10000;
    int max_nudges = 3;
    double merge_tol = 0.0;
    LassoOptions lasso;  // penalty is overridden by the lambda argument
};

// Sweeps the line outward from the observed point, stepping across each
// (M, s) boundary. start_fit, when given, is the lasso fit at line.z_obs.
LinePartition line_partition(const DesignMatrix& X, const LineDecomposition& line, double lambda,
                             double z_min, double z_max, const PartitionOptions& opts = {},
                             const LassoFit* start_fit = nullptr);

// Terminal segments are extended to left_extent / right_extent.
TruncationSet model_truncation(const LinePartition& part, const IndexList& M);
TruncationSet model_sign_truncation(const LinePartition& part, const IndexList& M, const SignList& s);
TruncationSet variable_truncation(const LinePartition& part, int j);

// {j in M_hat(z)} and {H_hat(M_hat(z), z) = H} where H_hat collects active
// variables whose OLS t-statistic exceeds cutoff.
TruncationSet stable_t_truncation(const LinePartition& part, const DesignMatrix& X, const LineDecomposition& line,
                                  int j, const IndexList& H, double cutoff, double sigma);

// {j in M_hat at lambda} and {active set at lambda_high equals H}, signs unioned out.
TruncationSet stable_l1_truncation(const LinePartition& at_lambda, const LinePartition& at_lambda_high, int j,
                                   const IndexList& H);
TruncationSet stable_l1_truncation(const DesignMatrix& X, const LineDecomposition& line, int j, double lambda,
                                   double lambda_high, const IndexList& H, double z_min, double z_max,
                                   const PartitionOptions& opts = {});

using Selector = std::function<bool(const Eigen::VectorXd&)>;

// Approximate truncation set for a black-box selector evaluated on a z-grid;
// event boundaries are refined by bisection to refine_tol. Features narrower
// than the grid spacing can be missed.
TruncationSet grid_truncation(const Selector& selector, const LineDecomposition& line,
                              const std::vector<double>& grid, double refine_tol);

// Evenly spaced grid over [lo, hi] with the given step (both ends included).
std::vector<double> make_grid(double lo, double hi, double step);

} // namespace tzinf
