#ifndef AREALRISK_CAR_HPP
#define AREALRISK_CAR_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "arealrisk/graph.hpp"

namespace arealrisk {

struct CarOptions {
    // Fix the spatial-dependence parameter instead of estimating it
    // (a degenerate single-point bracket).
    std::optional<double> fix_phi;
    int grid_points = 200;          // bracketing grid over the admissible interval
    double search_tol = 1e-8;       // golden-section |delta phi| stop
    // Optional per-unit conditional-variance multipliers (e.g. the SRS
    // variance approximation); empty means homoskedastic.
    Eigen::VectorXd variance_weights;
    bool parallel = true;
};

struct CarFit {
    double phi = 0.0;
    Eigen::VectorXd beta;
    double sigma2 = 0.0;  // ML conditional variance scale
    double loglik = 0.0;
    double aic = 0.0;                 // -2 loglik + 2 (dim(beta) + 2)
    double residual_variance = 0.0;   // sample variance of y - smoothed
    Eigen::VectorXd fitted_nonspatial;  // X beta
    Eigen::VectorXd smoothed;           // fitted + phi * W (y - fitted)
    std::pair<double, double> phi_bounds{0.0, 0.0};
    std::vector<std::string> warnings;
};

// Admissible open interval for phi: (1/lambda_min, 1/lambda_max) of the
// symmetric binary weight matrix.
std::pair<double, double> phi_bounds(const WeightMatrix& w);

// Maximum likelihood fit of Y ~ N(X beta, sigma2 (I - phi W)^-1) by profile
// likelihood: closed-form GLS for beta and sigma2 at each candidate phi, a
// bracketing grid over the admissible interval, then golden-section
// refinement. Grid evaluations are independent and run in parallel.
CarFit fit_car(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const WeightMatrix& w,
               const CarOptions& options = {});

// Conditional-mean smoothing at the fitted parameters:
//   smoothed_i = (X beta)_i + phi * sum_j w_ij (y_j - (X beta)_j)
Eigen::VectorXd smooth(const CarFit& fit, const Eigen::VectorXd& y, const WeightMatrix& w);

struct CandidateRow {
    std::string name;
    double aic = 0.0;
    double residual_variance = 0.0;
    double phi = 0.0;
};

struct SelectionResult {
    std::string best;
    std::vector<CandidateRow> table;
    std::vector<std::string> warnings;
};

// Lowest AIC wins; ties within 1e-6 broken by the smaller residual variance.
SelectionResult select_response(const std::vector<std::pair<std::string, CarFit>>& candidates);

}  // namespace arealrisk

#endif
