#include "arealrisk/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "arealrisk/csv.hpp"
#include "arealrisk/errors.hpp"

namespace arealrisk {

double quantile_type7(const std::vector<double>& sorted_values, double p) {
    if (sorted_values.empty()) throw InputError("quantile of empty sample");
    if (p < 0.0 || p > 1.0) throw InputError("quantile probability outside [0, 1]");
    const std::size_t n = sorted_values.size();
    if (n == 1) return sorted_values[0];
    double h = static_cast<double>(n - 1) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= n - 1) return sorted_values[n - 1];
    double frac = h - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

double sample_variance(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(n - 1);
}

std::vector<CountyAggregate> aggregate_scores(const ScoreVector& scores) {
    const long n_total = scores.normalized_scores.size();
    if (n_total == 0) throw InputError("empty score vector");
    if (static_cast<long>(scores.unit_labels.size()) != n_total)
        throw InputError("score vector missing unit labels");

    // Group scores per unit, preserving first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> groups;
    for (long i = 0; i < n_total; ++i) {
        const std::string& u = scores.unit_labels[i];
        auto [it, inserted] = groups.try_emplace(u);
        if (inserted) order.push_back(u);
        it->second.push_back(scores.normalized_scores(i));
    }

    std::vector<double> all(scores.normalized_scores.data(), scores.normalized_scores.data() + n_total);
    const double pooled = sample_variance(all);

    std::vector<CountyAggregate> out;
    out.reserve(order.size());
    for (const auto& u : order) {
        auto& vals = groups[u];
        std::sort(vals.begin(), vals.end());
        CountyAggregate agg;
        agg.unit_label = u;
        agg.n = static_cast<long>(vals.size());
        double sum = 0.0;
        for (double v : vals) sum += v;
        agg.mean = sum / static_cast<double>(vals.size());
        agg.q1 = quantile_type7(vals, 0.25);
        agg.q3 = quantile_type7(vals, 0.75);
        agg.srs_variance = pooled / static_cast<double>(agg.n);
        out.push_back(agg);
    }
    return out;
}

void write_aggregates_csv(const std::filesystem::path& path,
                          const std::vector<CountyAggregate>& aggregates) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& a : aggregates)
        rows.push_back({a.unit_label, std::to_string(a.n), format_double(a.mean),
                        format_double(a.q1), format_double(a.q3), format_double(a.srs_variance)});
    write_csv(path, {"county_fips", "n", "mean", "q1", "q3", "srs_variance"}, rows);
}

std::vector<CountyAggregate> read_aggregates_csv(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    std::size_t fips = t.column("county_fips"), n = t.column("n"), mean = t.column("mean");
    std::size_t q1 = t.column("q1"), q3 = t.column("q3"), srs = t.column("srs_variance");
    std::vector<CountyAggregate> out;
    for (const auto& r : t.rows) {
        CountyAggregate a;
        a.unit_label = r[fips];
        a.n = parse_long(r[n], "n");
        a.mean = parse_double(r[mean], "mean");
        a.q1 = parse_double(r[q1], "q1");
        a.q3 = parse_double(r[q3], "q3");
        a.srs_variance = parse_double(r[srs], "srs_variance");
        out.push_back(std::move(a));
    }
    if (out.empty()) throw InputError("no aggregate rows in " + path.string());
    return out;
}

}  // namespace arealrisk
