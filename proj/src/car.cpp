#include "arealrisk/car.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arealrisk/aggregate.hpp"
#include "arealrisk/csv.hpp"
#include "arealrisk/errors.hpp"

namespace arealrisk {

std::pair<double, double> phi_bounds(const WeightMatrix& w) {
    if (w.scheme != WeightScheme::binary)
        throw InputError("phi bounds are defined for the symmetric binary weight matrix");
    Eigen::MatrixXd dense = w.dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on the weight matrix");
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo >= 0.0 || hi <= 0.0)
        throw NumericError("weight matrix eigenvalues do not straddle zero; graph is degenerate");
    return {1.0 / lo, 1.0 / hi};
}

namespace {

struct ProfilePoint {
    double loglik = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd beta;
    double sigma2 = 0.0;
    bool valid = false;
};

// Precomputed pieces shared by every phi evaluation. With variance weights v,
// the precision used is D^-1/2 (I - phi W) D^-1/2 / sigma2 with D = diag(v),
// which keeps the covariance symmetric while giving unit i conditional
// variance sigma2 * v_i.
struct Workspace {
    Eigen::MatrixXd w_dense;   // possibly scaled by sqrt(v_i v_j)^-1
    Eigen::VectorXd d_inv;     // 1/v_i (ones when homoskedastic)
    double logdet_d = 0.0;     // sum log v_i
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

ProfilePoint evaluate(double phi, const Workspace& ws) {
    const long n = ws.y.size();
    ProfilePoint pt;
    Eigen::MatrixXd m = -phi * ws.w_dense;
    m.diagonal().array() += ws.d_inv.array();
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return pt;  // outside the PD region

    double logdet = 0.0;
    for (long i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));

    Eigen::MatrixXd mx = m * ws.x;
    Eigen::MatrixXd xtmx = ws.x.transpose() * mx;
    Eigen::VectorXd xtmy = mx.transpose() * ws.y;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtmx);
    if (ldlt.info() != Eigen::Success) return pt;
    pt.beta = ldlt.solve(xtmy);

    Eigen::VectorXd r = ws.y - ws.x * pt.beta;
    double quad = r.dot(m * r);
    if (quad <= 0.0) return pt;
    pt.sigma2 = quad / static_cast<double>(n);
    pt.loglik = -0.5 * static_cast<double>(n) * std::log(2.0 * M_PI) + 0.5 * logdet -
                0.5 * static_cast<double>(n) * std::log(pt.sigma2) -
                0.5 * static_cast<double>(n);
    pt.valid = true;
    return pt;
}

}  // namespace

CarFit fit_car(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const WeightMatrix& w,
               const CarOptions& options) {
    const long n = y.size();
    if (w.scheme != WeightScheme::binary)
        throw InputError("the CAR fit requires the symmetric binary weight matrix");
    if (n != w.n_units()) throw InputError("response length does not match the weight matrix");
    if (n < 5) throw InputError("CAR fit needs at least 5 units");
    if (x.rows() != n) throw InputError("design matrix rows do not match the response");
    if (!y.allFinite())
        throw InputError("missing response value; drop or impute the unit upstream before fitting");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < x.cols()) throw InputError("design matrix is rank deficient");

    const bool weighted = options.variance_weights.size() > 0;
    if (weighted && options.variance_weights.size() != n)
        throw InputError("variance weights length does not match the response");
    if (weighted && options.variance_weights.minCoeff() <= 0.0)
        throw InputError("variance weights must be strictly positive");

    CarFit fit;
    fit.phi_bounds = phi_bounds(w);

    Workspace ws;
    ws.x = x;
    ws.y = y;
    ws.w_dense = w.dense();
    ws.d_inv = Eigen::VectorXd::Ones(n);
    if (weighted) {
        // Scale so m = D^-1/2 (I - phi W) D^-1/2 can be assembled as
        // diag(1/v) - phi * W_scaled.
        ws.d_inv = options.variance_weights.cwiseInverse();
        Eigen::VectorXd s = options.variance_weights.cwiseSqrt().cwiseInverse();
        ws.w_dense = s.asDiagonal() * ws.w_dense * s.asDiagonal();
    }

    const auto [lo, hi] = fit.phi_bounds;
    double phi_hat;
    ProfilePoint best;

    if (options.fix_phi) {
        phi_hat = *options.fix_phi;
        if (phi_hat <= lo || phi_hat >= hi)
            throw InputError("fixed phi " + format_double(phi_hat) + " is outside the admissible interval (" +
                             format_double(lo) + ", " + format_double(hi) + ")");
        best = evaluate(phi_hat, ws);
        if (!best.valid) throw EstimationError("likelihood evaluation failed at the fixed phi");
    } else {
        const int g = std::max(options.grid_points, 8);
        std::vector<ProfilePoint> pts(static_cast<std::size_t>(g));
        std::vector<double> grid(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i)
            grid[static_cast<std::size_t>(i)] =
                lo + (static_cast<double>(i) + 0.5) / static_cast<double>(g) * (hi - lo);

#pragma omp parallel for schedule(dynamic) if (options.parallel)
        for (int i = 0; i < g; ++i)
            pts[static_cast<std::size_t>(i)] = evaluate(grid[static_cast<std::size_t>(i)], ws);

        int best_idx = -1;
        for (int i = 0; i < g; ++i)
            if (pts[static_cast<std::size_t>(i)].valid &&
                (best_idx < 0 || pts[static_cast<std::size_t>(i)].loglik >
                                     pts[static_cast<std::size_t>(best_idx)].loglik))
                best_idx = i;
        if (best_idx < 0) throw EstimationError("profile likelihood failed at every grid point");

        // Golden-section refinement on the bracket around the best grid point.
        double a = grid[static_cast<std::size_t>(std::max(best_idx - 1, 0))];
        double b = grid[static_cast<std::size_t>(std::min(best_idx + 1, g - 1))];
        const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - ratio * (b - a);
        double d = a + ratio * (b - a);
        double fc = evaluate(c, ws).loglik;
        double fd = evaluate(d, ws).loglik;
        while (b - a > options.search_tol) {
            if (fc >= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = evaluate(c, ws).loglik;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = evaluate(d, ws).loglik;
            }
        }
        phi_hat = 0.5 * (a + b);
        best = evaluate(phi_hat, ws);
        if (!best.valid || best.loglik < pts[static_cast<std::size_t>(best_idx)].loglik) {
            phi_hat = grid[static_cast<std::size_t>(best_idx)];
            best = pts[static_cast<std::size_t>(best_idx)];
        }
        if (phi_hat - lo < 1e-6 || hi - phi_hat < 1e-6)
            fit.warnings.push_back("phi estimate within 1e-6 of an admissible-interval endpoint");
    }

    fit.phi = phi_hat;
    fit.beta = best.beta;
    fit.sigma2 = best.sigma2;
    fit.loglik = best.loglik;
    fit.aic = -2.0 * best.loglik + 2.0 * (static_cast<double>(x.cols()) + 2.0);
    fit.fitted_nonspatial = x * best.beta;

    fit.smoothed = smooth(fit, y, w);
    std::vector<double> resid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) resid[static_cast<std::size_t>(i)] = y(i) - fit.smoothed(i);
    fit.residual_variance = sample_variance(resid);
    return fit;
}

Eigen::VectorXd smooth(const CarFit& fit, const Eigen::VectorXd& y, const WeightMatrix& w) {
    if (y.size() != fit.fitted_nonspatial.size())
        throw InputError("response length does not match the fit");
    if (y.size() != w.n_units()) throw InputError("weight matrix does not match the fit");
    Eigen::VectorXd resid = y - fit.fitted_nonspatial;
    Eigen::VectorXd smoothed = fit.fitted_nonspatial;
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        double lag = 0.0;
        for (const auto& [j, v] : w.rows[i]) lag += v * resid(j);
        smoothed(static_cast<long>(i)) += fit.phi * lag;
    }
    return smoothed;
}

SelectionResult select_response(const std::vector<std::pair<std::string, CarFit>>& candidates) {
    if (candidates.empty()) throw InputError("no candidate fits to select from");
    SelectionResult result;
    for (const auto& [name, fit] : candidates)
        result.table.push_back({name, fit.aic, fit.residual_variance, fit.phi});

    if (candidates.size() == 1)
        result.warnings.push_back("selection over a single candidate is vacuous");

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i) {
        const auto& cur = result.table[i];
        const auto& inc = result.table[best];
        if (cur.aic < inc.aic - 1e-6) {
            best = i;
        } else if (std::abs(cur.aic - inc.aic) <= 1e-6 &&
                   cur.residual_variance < inc.residual_variance) {
            best = i;
        }
    }
    result.best = result.table[best].name;
    return result;
}

}  // namespace arealrisk
