#ifndef AREALRISK_AGGREGATE_HPP
#define AREALRISK_AGGREGATE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "arealrisk/factor.hpp"

namespace arealrisk {

struct CountyAggregate {
    std::string unit_label;
    long n = 0;
    double mean = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double srs_variance = 0.0;  // pooled s^2 / n
};

// Linear-interpolation quantile between order statistics at 1 + (n-1)p
// ("type 7"). Input must be sorted ascending.
double quantile_type7(const std::vector<double>& sorted_values, double p);

// Sample variance with the n-1 denominator.
double sample_variance(const std::vector<double>& values);

// Per-unit mean/Q1/Q3 of normalized scores plus the simple-random-sample
// variance approximation: one pooled variance over every respondent in the
// study area, divided by each unit's respondent count. Units are emitted in
// order of first appearance.
std::vector<CountyAggregate> aggregate_scores(const ScoreVector& scores);

void write_aggregates_csv(const std::filesystem::path& path,
                          const std::vector<CountyAggregate>& aggregates);
std::vector<CountyAggregate> read_aggregates_csv(const std::filesystem::path& path);

}  // namespace arealrisk

#endif
