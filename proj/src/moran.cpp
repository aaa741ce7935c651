#include "arealrisk/moran.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "arealrisk/errors.hpp"
#include "arealrisk/rng.hpp"

namespace arealrisk {

namespace {

struct Deviations {
    Eigen::VectorXd d;
    double denom = 0.0;
};

Deviations center(const Eigen::VectorXd& values) {
    Deviations out;
    out.d = values.array() - values.mean();
    out.denom = out.d.squaredNorm();
    return out;
}

void check_inputs(const Eigen::VectorXd& values, const WeightMatrix& w, double denom) {
    if (values.size() != w.n_units()) throw InputError("value vector does not match weight matrix size");
    if (values.size() < 3) throw InputError("Moran's I needs at least 3 units");
    if (denom <= 0.0)
        throw InputError("spatial pattern is undefined for a constant field (zero variance)");
}

// Cross product sum over the sparse structure for a permuted indexing of the
// deviations; perm == nullptr means the identity arrangement.
double cross_sum(const WeightMatrix& w, const Eigen::VectorXd& d, const int* perm) {
    double total = 0.0;
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        const double di = perm ? d(perm[i]) : d(static_cast<long>(i));
        double lag = 0.0;
        for (const auto& [j, v] : w.rows[i]) lag += v * (perm ? d(perm[j]) : d(j));
        total += di * lag;
    }
    return total;
}

double statistic(const WeightMatrix& w, const Deviations& dev, const int* perm) {
    const double n = static_cast<double>(dev.d.size());
    return (n / w.s0) * cross_sum(w, dev.d, perm) / dev.denom;
}

MoranResult mc_impl(const Eigen::VectorXd& values, const WeightMatrix& w, long n_permutations,
                    std::uint64_t seed, bool parallel) {
    if (n_permutations < 99) throw InputError("need at least 99 permutations");
    MoranResult result = morans_i(values, w);
    result.n_permutations = n_permutations;

    Deviations dev = center(values);
    const int n = static_cast<int>(values.size());
    std::vector<double> perm_stats(static_cast<std::size_t>(n_permutations));

#pragma omp parallel for schedule(static) if (parallel)
    for (long k = 0; k < n_permutations; ++k) {
        Rng rng(seed, streams::kMoranPermutation + static_cast<std::uint64_t>(k));
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[i], perm[j]);
        }
        perm_stats[static_cast<std::size_t>(k)] = statistic(w, dev, perm.data());
    }

    long count_ge = 0;
    double sum = 0.0, sum_sq = 0.0;
    for (double s : perm_stats) {
        if (s >= result.i_statistic) ++count_ge;
        sum += s;
        sum_sq += s * s;
    }
    result.p_value = static_cast<double>(1 + count_ge) / static_cast<double>(n_permutations + 1);
    result.perm_mean = sum / static_cast<double>(n_permutations);
    double var = sum_sq / static_cast<double>(n_permutations) - result.perm_mean * result.perm_mean;
    result.perm_sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return result;
}

}  // namespace

MoranResult morans_i(const Eigen::VectorXd& values, const WeightMatrix& w) {
    Deviations dev = center(values);
    check_inputs(values, w, dev.denom);

    MoranResult result;
    result.i_statistic = statistic(w, dev, nullptr);
    result.expected_i = -1.0 / static_cast<double>(values.size() - 1);
    result.lagged_values.resize(values.size());
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        double lag = 0.0;
        for (const auto& [j, v] : w.rows[i]) lag += v * values(j);
        result.lagged_values(static_cast<long>(i)) = lag;
    }
    return result;
}

double morans_i_dense_reference(const Eigen::VectorXd& values, const Eigen::MatrixXd& w_dense) {
    const long n = values.size();
    double mean = values.mean();
    double s0 = 0.0, num = 0.0, denom = 0.0;
    for (long i = 0; i < n; ++i) {
        denom += (values(i) - mean) * (values(i) - mean);
        for (long j = 0; j < n; ++j) {
            s0 += w_dense(i, j);
            num += w_dense(i, j) * (values(i) - mean) * (values(j) - mean);
        }
    }
    return (static_cast<double>(n) / s0) * num / denom;
}

MoranResult moran_mc(const Eigen::VectorXd& values, const WeightMatrix& w, long n_permutations,
                     std::uint64_t seed) {
    return mc_impl(values, w, n_permutations, seed, true);
}

MoranResult moran_mc_serial(const Eigen::VectorXd& values, const WeightMatrix& w,
                            long n_permutations, std::uint64_t seed) {
    return mc_impl(values, w, n_permutations, seed, false);
}

}  // namespace arealrisk
