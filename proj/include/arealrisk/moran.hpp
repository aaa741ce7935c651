#ifndef AREALRISK_MORAN_HPP
#define AREALRISK_MORAN_HPP

#include <cstdint>

#include <Eigen/Dense>

#include "arealrisk/graph.hpp"

namespace arealrisk {

struct MoranResult {
    double i_statistic = 0.0;
    double expected_i = 0.0;  // -1/(n-1)
    double p_value = 0.0;     // one-sided (greater); 0 means "not computed"
    long n_permutations = 0;
    Eigen::VectorXd lagged_values;  // spatial lag of each unit, Moran-plot ordinate
    double perm_mean = 0.0;         // mean/sd of the permutation distribution
    double perm_sd = 0.0;
};

// Exact global Moran's I over the sparse weight rows, plus per-unit lags.
// Requires n >= 3 and a non-constant field.
MoranResult morans_i(const Eigen::VectorXd& values, const WeightMatrix& w);

// Naive dense double-loop evaluation, kept as the serial reference the sparse
// kernel is tested (and benchmarked) against.
double morans_i_dense_reference(const Eigen::VectorXd& values, const Eigen::MatrixXd& w_dense);

// Monte Carlo permutation test: values are permuted uniformly at random
// n_permutations times; p = (1 + #{I_perm >= I_obs}) / (n_permutations + 1).
// Permutation k draws from its own counter-based stream (seed, k), so the
// result is identical for any thread count.
MoranResult moran_mc(const Eigen::VectorXd& values, const WeightMatrix& w, long n_permutations,
                     std::uint64_t seed);

// Same computation without the OpenMP loop; unit tests assert bitwise
// agreement with moran_mc.
MoranResult moran_mc_serial(const Eigen::VectorXd& values, const WeightMatrix& w,
                            long n_permutations, std::uint64_t seed);

}  // namespace arealrisk

#endif
