#include "arealrisk/bayes.hpp"

#include <algorithm>
#include <cmath>

#include "arealrisk/aggregate.hpp"
#include "arealrisk/errors.hpp"
#include "arealrisk/rng.hpp"

namespace arealrisk {

void GibbsConfig::validate() const {
    if (n_chains < 1) throw InputError("need at least one chain");
    if (n_keep < 1 || n_burn < 0 || thin < 1) throw InputError("invalid draw counts");
    if (n_keep % n_chains != 0)
        throw InputError("n_keep must be divisible by the chain count");
    if (kept_per_chain() < 100) throw InputError("need at least 100 kept draws per chain");
    if (prior_sd_beta <= 0.0) throw InputError("prior sd must be positive");
}

StandardizedData standardize(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                             const std::vector<std::string>& names) {
    const long n = y.size();
    const long p = x.cols();
    if (x.rows() != n) throw InputError("response and predictors have different lengths");
    if (static_cast<long>(names.size()) != p + 1)
        throw InputError("expected one name for the response plus each predictor");
    if (!y.allFinite() || !x.allFinite()) throw InputError("missing values in regression inputs");

    StandardizedData out;
    out.record.names = names;
    out.record.means.resize(p + 1);
    out.record.sds.resize(p + 1);
    out.x.resize(n, p);

    auto standardize_col = [&](const Eigen::VectorXd& col, long idx) {
        double mean = col.mean();
        double var = (col.array() - mean).square().sum() / static_cast<double>(n - 1);
        if (var <= 0.0) throw InputError("zero-variance column: " + names[static_cast<std::size_t>(idx)]);
        out.record.means(idx) = mean;
        out.record.sds(idx) = std::sqrt(var);
        return (col.array() - mean) / out.record.sds(idx);
    };

    out.y = standardize_col(y, 0);
    for (long j = 0; j < p; ++j) out.x.col(j) = standardize_col(x.col(j), j + 1);
    return out;
}

Eigen::VectorXd unstandardize(const Eigen::VectorXd& v, double mean, double sd) {
    return (v.array() * sd + mean).matrix();
}

Posterior gibbs_lm(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                   const std::vector<std::string>& coef_names, const GibbsConfig& config) {
    config.validate();
    const long n = y.size();
    const long q = x.cols();
    if (x.rows() != n) throw InputError("design matrix rows do not match the response");
    if (n <= q) throw InputError("need more observations than coefficients");
    if (static_cast<long>(coef_names.size()) != q)
        throw InputError("coefficient name count does not match the design matrix");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < q) throw InputError("design matrix is rank deficient");

    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::VectorXd xty = x.transpose() * y;
    const double prior_precision = 1.0 / (config.prior_sd_beta * config.prior_sd_beta);

    const long kept_per_chain = config.kept_per_chain();
    Posterior post;
    post.config = config;
    post.coef_names = coef_names;
    post.beta_draws.resize(config.n_chains * kept_per_chain, q);
    post.sigma2_draws.resize(config.n_chains * kept_per_chain);
    post.chain_ids.resize(static_cast<std::size_t>(config.n_chains) * static_cast<std::size_t>(kept_per_chain));

    bool chol_failed = false;  // exceptions cannot cross the parallel region
#pragma omp parallel for schedule(static) if (config.parallel)
    for (int chain = 0; chain < config.n_chains; ++chain) {
        Rng rng(config.seed, streams::kGibbsChain + static_cast<std::uint64_t>(chain));
        double sigma2 = 1.0;
        Eigen::VectorXd beta(q), z(q);
        const long total = config.n_burn + kept_per_chain * config.thin;
        long kept = 0;
        for (long it = 0; it < total; ++it) {
            // beta | sigma2: Gaussian with precision XtX/sigma2 + I/prior_sd^2
            Eigen::MatrixXd precision = xtx / sigma2;
            precision.diagonal().array() += prior_precision;
            Eigen::LLT<Eigen::MatrixXd> llt(precision);
            if (llt.info() != Eigen::Success) {
                chol_failed = true;
                break;
            }
            Eigen::VectorXd mean = llt.solve(xty / sigma2);
            for (long j = 0; j < q; ++j) z(j) = rng.normal();
            beta = mean + llt.matrixU().solve(z);

            // sigma2 | beta: inverse-gamma(n/2, RSS/2) from the 1/sigma2 prior
            double rss = (y - x * beta).squaredNorm();
            double g = rng.gamma(0.5 * static_cast<double>(n));
            sigma2 = std::max(0.5 * rss / g, 1e-300);

            if (it >= config.n_burn && (it - config.n_burn) % config.thin == 0) {
                long row = static_cast<long>(chain) * kept_per_chain + kept;
                post.beta_draws.row(row) = beta.transpose();
                post.sigma2_draws(row) = sigma2;
                post.chain_ids[static_cast<std::size_t>(row)] = chain;
                ++kept;
            }
        }
    }

    post.means = post.beta_draws.colwise().mean();

    // Split-chain rhat per coefficient, with sigma2 appended.
    const long half = kept_per_chain / 2;
    const int m = config.n_chains * 2;
    post.rhat.resize(q + 1);
    auto rhat_of = [&](auto value_at) {
        std::vector<double> means(static_cast<std::size_t>(m)), vars(static_cast<std::size_t>(m));
        for (int c = 0; c < config.n_chains; ++c)
            for (int h = 0; h < 2; ++h) {
                long start = static_cast<long>(c) * kept_per_chain + h * half;
                double mu = 0.0;
                for (long i = 0; i < half; ++i) mu += value_at(start + i);
                mu /= static_cast<double>(half);
                double ss = 0.0;
                for (long i = 0; i < half; ++i) {
                    double d = value_at(start + i) - mu;
                    ss += d * d;
                }
                means[static_cast<std::size_t>(c * 2 + h)] = mu;
                vars[static_cast<std::size_t>(c * 2 + h)] = ss / static_cast<double>(half - 1);
            }
        double grand = 0.0;
        for (double mu : means) grand += mu;
        grand /= m;
        double b = 0.0;
        for (double mu : means) b += (mu - grand) * (mu - grand);
        b *= static_cast<double>(half) / static_cast<double>(m - 1);
        double wv = 0.0;
        for (double v : vars) wv += v;
        wv /= m;
        if (wv <= 0.0) return 1.0;
        double var_plus = (static_cast<double>(half - 1) / static_cast<double>(half)) * wv +
                          b / static_cast<double>(half);
        return std::sqrt(var_plus / wv);
    };
    for (long j = 0; j < q; ++j)
        post.rhat(j) = rhat_of([&](long i) { return post.beta_draws(i, j); });
    post.rhat(q) = rhat_of([&](long i) { return post.sigma2_draws(i); });

    for (long j = 0; j < q + 1; ++j)
        if (post.rhat(j) > 1.1) {
            post.warnings.push_back("rhat above 1.1 for " +
                                    (j < q ? coef_names[static_cast<std::size_t>(j)] : std::string("sigma2")) +
                                    "; chains may not have converged");
        }
    return post;
}

double bayes_p(const Posterior& posterior, const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const long draws = posterior.n_draws();
    if (draws == 0) throw InputError("empty posterior");
    if (x.rows() != y.size() || x.cols() != posterior.n_coefficients())
        throw InputError("data dimensions do not match the posterior");

    const long n = y.size();
    std::vector<long> extreme(static_cast<std::size_t>(draws), 0);
#pragma omp parallel for schedule(static) if (posterior.config.parallel)
    for (long s = 0; s < draws; ++s) {
        Rng rng(posterior.config.seed, streams::kPosteriorRep + static_cast<std::uint64_t>(s));
        Eigen::VectorXd mu = x * posterior.beta_draws.row(s).transpose();
        const double sd = std::sqrt(posterior.sigma2_draws(s));
        double rss_rep = 0.0;
        for (long i = 0; i < n; ++i) {
            double e = sd * rng.normal();
            rss_rep += e * e;
        }
        double rss_obs = (y - mu).squaredNorm();
        extreme[static_cast<std::size_t>(s)] = rss_rep >= rss_obs ? 1 : 0;
    }
    long count = 0;
    for (long e : extreme) count += e;
    return static_cast<double>(count) / static_cast<double>(draws);
}

namespace {

double deviance(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Eigen::VectorXd& beta,
                double sigma2) {
    const double n = static_cast<double>(y.size());
    double rss = (y - x * beta).squaredNorm();
    return n * std::log(2.0 * M_PI * sigma2) + rss / sigma2;
}

}  // namespace

Diagnostics dic(const Posterior& posterior, const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const long draws = posterior.n_draws();
    if (draws == 0) throw InputError("empty posterior");
    Diagnostics out;
    double dbar = 0.0;
    for (long s = 0; s < draws; ++s)
        dbar += deviance(y, x, posterior.beta_draws.row(s).transpose(), posterior.sigma2_draws(s));
    dbar /= static_cast<double>(draws);
    double dhat = deviance(y, x, posterior.means, posterior.sigma2_draws.mean());
    out.p_d = dbar - dhat;
    out.dic = dbar + out.p_d;
    if (out.p_d <= 0.0)
        out.warnings.push_back("effective parameter count p_D <= 0; posterior may be far from normal");
    return out;
}

std::vector<CoefficientSummary> summarize(const Posterior& posterior) {
    if (posterior.n_draws() == 0) throw InputError("empty posterior");
    std::vector<CoefficientSummary> table;
    for (long j = 0; j < posterior.n_coefficients(); ++j) {
        std::vector<double> draws(posterior.beta_draws.col(j).data(),
                                  posterior.beta_draws.col(j).data() + posterior.n_draws());
        std::sort(draws.begin(), draws.end());
        CoefficientSummary row;
        row.name = posterior.coef_names[static_cast<std::size_t>(j)];
        row.mean = posterior.means(j);
        row.lower95 = quantile_type7(draws, 0.025);
        row.upper95 = quantile_type7(draws, 0.975);
        row.significant = row.lower95 > 0.0 || row.upper95 < 0.0;
        row.rhat = posterior.rhat(j);
        table.push_back(std::move(row));
    }
    return table;
}

Eigen::VectorXd ols_reference(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    return (x.transpose() * x).ldlt().solve(x.transpose() * y);
}

}  // namespace arealrisk
