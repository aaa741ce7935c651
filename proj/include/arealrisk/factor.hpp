#ifndef AREALRISK_FACTOR_HPP
#define AREALRISK_FACTOR_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace arealrisk {

// One raw survey row: answers are category labels, one per item.
struct RawSurveyRow {
    std::string respondent_id;
    std::string unit_label;
    std::vector<std::string> answers;
};

// Respondents x items matrix of ordinal codes with a missing mask.
// Coding: decreased = -1, unchanged = 0, increased = +1, na = missing.
struct CodedResponseMatrix {
    std::vector<std::string> respondent_ids;
    std::vector<std::string> unit_labels;
    std::vector<std::string> item_labels;
    Eigen::MatrixXd values;                          // missing cells hold 0
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing;

    long n_respondents() const { return values.rows(); }
    long n_items() const { return values.cols(); }
    void validate() const;
};

struct FactorModel {
    Eigen::MatrixXd loadings;             // items x k
    Eigen::VectorXd communalities;        // h^2 per item
    Eigen::VectorXd uniquenesses;         // 1 - h^2
    Eigen::VectorXd eigenvalues;          // per factor, sum of squared loadings
    Eigen::VectorXd proportion_variance;  // eigenvalue / n_items
    Eigen::MatrixXd score_weights;        // items x k, regression method
    Eigen::VectorXd item_means;
    Eigen::VectorXd item_sds;
    std::vector<std::string> item_labels;
    long n_used = 0;  // complete-case respondents behind the fit
    std::vector<std::string> warnings;

    long n_factors() const { return loadings.cols(); }
};

struct ScoreVector {
    std::vector<std::string> respondent_ids;
    std::vector<std::string> unit_labels;
    Eigen::VectorXd raw_scores;
    Eigen::VectorXd normalized_scores;  // min-max mapped to [0, 1]
    double min_raw = 0.0;
    double max_raw = 0.0;
};

// Maps category labels (case-insensitive: decreased/unchanged/increased/na)
// to codes; unrecognized labels raise InputError naming row and item.
CodedResponseMatrix code_responses(const std::vector<RawSurveyRow>& raw_rows,
                                   std::vector<std::string> item_labels = {});

// Principal-axis factoring of a correlation matrix: squared multiple
// correlations as initial communalities, iterated eigendecomposition until
// the largest communality change drops below 1e-6 (cap 200 iterations),
// varimax rotation with Kaiser normalization for k >= 2 (identity at k = 1),
// factor signs fixed so each column of loadings sums positive.
FactorModel fit_paf_from_correlation(const Eigen::MatrixXd& correlation, int k, long n_used = 0);

// Complete-case correlation matrix from coded survey data, then the above.
FactorModel fit_paf(const CodedResponseMatrix& data, int k);

// Regression-method factor scores: z-score each complete-case row with the
// model's item means/sds, multiply by the score weights (first factor), then
// min-max normalize over the scored sample.
ScoreVector score(const FactorModel& model, const CodedResponseMatrix& data);

// Survey CSV: respondent_id, county_fips, then one column per item.
std::vector<RawSurveyRow> load_survey_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* item_labels_out = nullptr);

std::string factor_model_to_json(const FactorModel& model);
FactorModel factor_model_from_json(const std::string& text);

void write_scores_csv(const std::filesystem::path& path, const ScoreVector& scores);
ScoreVector read_scores_csv(const std::filesystem::path& path);

}  // namespace arealrisk

#endif
