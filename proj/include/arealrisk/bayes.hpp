#ifndef AREALRISK_BAYES_HPP
#define AREALRISK_BAYES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace arealrisk {

struct GibbsConfig {
    int n_chains = 4;
    long n_burn = 1000;    // discarded per chain
    long n_keep = 10000;   // kept in total across chains
    int thin = 1;
    std::uint64_t seed = 0;
    double prior_sd_beta = 100.0;  // N(0, prior_sd^2) on every coefficient
    bool parallel = true;

    long kept_per_chain() const { return n_keep / n_chains; }
    void validate() const;
};

struct StandardizationRecord {
    std::vector<std::string> names;  // response first, then predictors
    Eigen::VectorXd means;
    Eigen::VectorXd sds;
};

struct StandardizedData {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;  // predictors only, no intercept column
    StandardizationRecord record;
};

struct Posterior {
    Eigen::MatrixXd beta_draws;    // kept draws x coefficients
    Eigen::VectorXd sigma2_draws;  // kept draws
    std::vector<int> chain_ids;    // chain index per kept draw
    std::vector<std::string> coef_names;
    Eigen::VectorXd means;
    Eigen::VectorXd rhat;  // split-chain diagnostic per coefficient (+ sigma2 last)
    GibbsConfig config;
    std::vector<std::string> warnings;

    long n_draws() const { return beta_draws.rows(); }
    long n_coefficients() const { return beta_draws.cols(); }
};

struct CoefficientSummary {
    std::string name;
    double mean = 0.0;
    double lower95 = 0.0;
    double upper95 = 0.0;
    bool significant = false;  // 95% credible set excludes zero
    double rhat = 0.0;
};

struct Diagnostics {
    double bayes_p = 0.0;
    double dic = 0.0;
    double p_d = 0.0;
    std::vector<std::string> warnings;
};

// Center and scale the response and every predictor to mean 0, sd 1 (n-1
// denominator); the record allows exact back-transformation.
StandardizedData standardize(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                             const std::vector<std::string>& names);
Eigen::VectorXd unstandardize(const Eigen::VectorXd& v, double mean, double sd);

// Gibbs sampler for the linear model with N(0, prior_sd^2) coefficient priors
// and the scale-invariant 1/sigma2 prior on the error variance. Chains are
// independent streams of (seed, chain index) and may run in parallel; draws
// are identical for any worker count.
Posterior gibbs_lm(const Eigen::VectorXd& y, const Eigen::MatrixXd& x_with_intercept,
                   const std::vector<std::string>& coef_names, const GibbsConfig& config);

// Posterior predictive check on the residual sum of squares: for each kept
// draw simulate y_rep ~ N(X beta, sigma2 I) and count how often
// RSS(y_rep; beta) >= RSS(y; beta).
double bayes_p(const Posterior& posterior, const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

// Deviance information criterion on the (standardized) likelihood scale:
// DIC = mean deviance + p_D, p_D = mean deviance - deviance at the posterior
// means.
Diagnostics dic(const Posterior& posterior, const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

// Posterior means with 2.5/97.5% credible sets and the exclude-zero flag.
std::vector<CoefficientSummary> summarize(const Posterior& posterior);

// Closed-form OLS, kept as the flat-prior oracle the sampler is checked
// against.
Eigen::VectorXd ols_reference(const Eigen::VectorXd& y, const Eigen::MatrixXd& x_with_intercept);

}  // namespace arealrisk

#endif
