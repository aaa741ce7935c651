#include "arealrisk/factor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "arealrisk/csv.hpp"
#include "arealrisk/errors.hpp"

namespace arealrisk {

void CodedResponseMatrix::validate() const {
    if (values.rows() != missing.rows() || values.cols() != missing.cols())
        throw InputError("coded matrix and missing mask dimensions disagree");
    if (static_cast<long>(respondent_ids.size()) != values.rows() ||
        static_cast<long>(unit_labels.size()) != values.rows())
        throw InputError("respondent ids / unit labels do not match row count");
    for (long i = 0; i < values.rows(); ++i)
        for (long j = 0; j < values.cols(); ++j) {
            if (missing(i, j)) continue;
            double v = values(i, j);
            if (v != -1.0 && v != 0.0 && v != 1.0)
                throw InputError("coded value outside {-1, 0, +1} at row " + respondent_ids[i]);
        }
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

CodedResponseMatrix code_responses(const std::vector<RawSurveyRow>& raw_rows,
                                   std::vector<std::string> item_labels) {
    if (raw_rows.empty()) throw InputError("no survey rows to code");
    const std::size_t n_items = raw_rows.front().answers.size();
    if (n_items == 0) throw InputError("survey rows carry no items");

    CodedResponseMatrix out;
    out.values = Eigen::MatrixXd::Zero(static_cast<long>(raw_rows.size()), static_cast<long>(n_items));
    out.missing = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
        static_cast<long>(raw_rows.size()), static_cast<long>(n_items), false);
    if (item_labels.empty())
        for (std::size_t j = 0; j < n_items; ++j) item_labels.push_back("item" + std::to_string(j + 1));
    out.item_labels = std::move(item_labels);

    for (std::size_t i = 0; i < raw_rows.size(); ++i) {
        const auto& row = raw_rows[i];
        if (row.answers.size() != n_items)
            throw InputError("row " + row.respondent_id + " has " + std::to_string(row.answers.size()) +
                             " answers, expected " + std::to_string(n_items));
        out.respondent_ids.push_back(row.respondent_id);
        out.unit_labels.push_back(row.unit_label);
        for (std::size_t j = 0; j < n_items; ++j) {
            std::string a = lower(row.answers[j]);
            long r = static_cast<long>(i), c = static_cast<long>(j);
            if (a == "decreased")
                out.values(r, c) = -1.0;
            else if (a == "unchanged")
                out.values(r, c) = 0.0;
            else if (a == "increased")
                out.values(r, c) = 1.0;
            else if (a == "na")
                out.missing(r, c) = true;
            else
                throw InputError("unrecognized category label '" + row.answers[j] + "' at row " +
                                 row.respondent_id + ", item " + std::to_string(j + 1));
        }
    }
    return out;
}

namespace {

// Complete cases only: rows with any missing item are dropped.
std::vector<long> complete_case_rows(const CodedResponseMatrix& data) {
    std::vector<long> rows;
    for (long i = 0; i < data.n_respondents(); ++i)
        if (!data.missing.row(i).any()) rows.push_back(i);
    return rows;
}

// Varimax with Kaiser row normalization, pairwise planar rotations.
Eigen::MatrixXd varimax_rotate(const Eigen::MatrixXd& loadings) {
    const long p = loadings.rows();
    const long k = loadings.cols();

    Eigen::VectorXd norms(p);
    for (long j = 0; j < p; ++j) {
        double h = loadings.row(j).norm();
        norms(j) = h > 0.0 ? h : 1.0;
    }
    Eigen::MatrixXd A = norms.cwiseInverse().asDiagonal() * loadings;

    const int max_sweeps = 100;
    const double tol = 1e-12;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double total_rotation = 0.0;
        for (long f = 0; f + 1 < k; ++f)
            for (long g = f + 1; g < k; ++g) {
                Eigen::VectorXd x = A.col(f), y = A.col(g);
                Eigen::VectorXd u = x.array().square() - y.array().square();
                Eigen::VectorXd v = 2.0 * x.array() * y.array();
                double su = u.sum(), sv = v.sum();
                double num = 2.0 * (u.dot(v) - su * sv / static_cast<double>(p));
                double den = u.squaredNorm() - v.squaredNorm() - (su * su - sv * sv) / static_cast<double>(p);
                double theta = 0.25 * std::atan2(num, den);
                if (std::abs(theta) < 1e-14) continue;
                double c = std::cos(theta), s = std::sin(theta);
                A.col(f) = c * x + s * y;
                A.col(g) = -s * x + c * y;
                total_rotation += std::abs(theta);
            }
        if (total_rotation < tol) break;
    }
    return norms.asDiagonal() * A;
}

// Moore-Penrose inverse of a symmetric matrix via its eigendecomposition.
Eigen::MatrixXd symmetric_pinv(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, double tol) {
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(vals.size());
    for (long i = 0; i < vals.size(); ++i)
        if (vals(i) > tol) inv(i) = 1.0 / vals(i);
    return vecs * inv.asDiagonal() * vecs.transpose();
}

}  // namespace

FactorModel fit_paf_from_correlation(const Eigen::MatrixXd& correlation, int k, long n_used) {
    const long p = correlation.rows();
    if (k < 1) throw InputError("factor count must be >= 1");
    if (p < k) throw InputError("fewer items than factors");
    if (correlation.cols() != p) throw InputError("correlation matrix is not square");
    if (!correlation.allFinite()) throw EstimationError("correlation matrix has non-finite entries");

    FactorModel model;
    model.n_used = n_used;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_r(correlation);
    if (es_r.info() != Eigen::Success) throw NumericError("eigendecomposition of correlation matrix failed");
    const double rank_tol = 1e-10 * static_cast<double>(p);
    const bool rank_deficient = es_r.eigenvalues().minCoeff() < rank_tol;

    // Initial communalities: squared multiple correlations, or the largest
    // absolute off-diagonal correlation per item when R is rank deficient.
    Eigen::VectorXd h2(p);
    if (!rank_deficient) {
        Eigen::MatrixXd r_inv = correlation.inverse();
        for (long j = 0; j < p; ++j) h2(j) = 1.0 - 1.0 / r_inv(j, j);
    } else {
        model.warnings.push_back(
            "correlation matrix is rank deficient; initial communalities from max "
            "absolute correlation, score weights from pseudo-inverse");
        for (long j = 0; j < p; ++j) {
            double m = 0.0;
            for (long i = 0; i < p; ++i)
                if (i != j) m = std::max(m, std::abs(correlation(i, j)));
            h2(j) = m;
        }
    }

    const double conv_tol = 1e-6;
    const int max_iter = 200;
    bool heywood = false;
    Eigen::MatrixXd loadings(p, k);
    double delta = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::MatrixXd reduced = correlation;
        reduced.diagonal() = h2;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
        if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed during factoring");
        // Eigen returns ascending order; the top k live at the tail.
        for (int f = 0; f < k; ++f) {
            double lambda = es.eigenvalues()(p - 1 - f);
            if (lambda <= 0.0)
                throw EstimationError("factor " + std::to_string(f + 1) +
                                      " has non-positive eigenvalue; too many factors requested");
            loadings.col(f) = es.eigenvectors().col(p - 1 - f) * std::sqrt(lambda);
        }
        Eigen::VectorXd h2_new = loadings.array().square().rowwise().sum();
        for (long j = 0; j < p; ++j)
            if (h2_new(j) > 1.0) {
                h2_new(j) = 0.9995;
                heywood = true;
            }
        delta = (h2_new - h2).cwiseAbs().maxCoeff();
        h2 = h2_new;
        if (delta < conv_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw EstimationError("principal-axis factoring did not converge in 200 iterations (last communality change " +
                              format_double(delta) + ")");
    if (heywood)
        model.warnings.push_back("Heywood case: communality exceeded 1 and was clamped to 0.9995");

    // Rotation is the identity for a single factor; the loadings pass through
    // bit for bit.
    if (k >= 2) loadings = varimax_rotate(loadings);

    // Fix the sign of each factor so its loading sum is positive.
    for (int f = 0; f < k; ++f)
        if (loadings.col(f).sum() < 0.0) loadings.col(f) = -loadings.col(f);

    // Order factors by explained variance, descending (stable for k = 1).
    if (k >= 2) {
        std::vector<int> order(k);
        for (int f = 0; f < k; ++f) order[f] = f;
        Eigen::VectorXd ssq = loadings.array().square().colwise().sum();
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ssq(a) > ssq(b); });
        Eigen::MatrixXd tmp(p, k);
        for (int f = 0; f < k; ++f) tmp.col(f) = loadings.col(order[f]);
        loadings = tmp;
    }

    model.loadings = loadings;
    model.communalities = loadings.array().square().rowwise().sum();
    model.uniquenesses = Eigen::VectorXd::Ones(p) - model.communalities;
    model.eigenvalues = loadings.array().square().colwise().sum();
    model.proportion_variance = model.eigenvalues / static_cast<double>(p);

    if (!rank_deficient) {
        model.score_weights = correlation.inverse() * loadings;
    } else {
        model.score_weights = symmetric_pinv(es_r, rank_tol) * loadings;
    }
    return model;
}

FactorModel fit_paf(const CodedResponseMatrix& data, int k) {
    if (k < 1) throw InputError("factor count must be >= 1");
    data.validate();
    const long p = data.n_items();
    if (p < k) throw InputError("fewer items than factors");

    std::vector<long> rows = complete_case_rows(data);
    const long n = static_cast<long>(rows.size());
    if (n < k + 2)
        throw InputError("only " + std::to_string(n) + " complete-case respondents; need at least " +
                         std::to_string(k + 2));

    Eigen::MatrixXd x(n, p);
    for (long i = 0; i < n; ++i) x.row(i) = data.values.row(rows[i]);

    Eigen::VectorXd means = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - means.transpose();
    Eigen::VectorXd sds(p);
    for (long j = 0; j < p; ++j) {
        double var = centered.col(j).squaredNorm() / static_cast<double>(n - 1);
        if (var <= 0.0)
            throw InputError("item '" + data.item_labels[j] + "' has zero variance among complete cases");
        sds(j) = std::sqrt(var);
    }

    Eigen::MatrixXd z = centered * sds.cwiseInverse().asDiagonal();
    Eigen::MatrixXd correlation = (z.transpose() * z) / static_cast<double>(n - 1);
    correlation.diagonal().setOnes();

    FactorModel model = fit_paf_from_correlation(correlation, k, n);
    model.item_means = means;
    model.item_sds = sds;
    model.item_labels = data.item_labels;
    return model;
}

ScoreVector score(const FactorModel& model, const CodedResponseMatrix& data) {
    data.validate();
    if (data.n_items() != model.loadings.rows())
        throw InputError("data items do not match the factor model");
    if (model.item_means.size() != model.loadings.rows())
        throw InputError("factor model carries no item means/sds; fit it from data first");

    std::vector<long> rows = complete_case_rows(data);
    if (rows.empty()) throw InputError("no complete-case respondents to score");

    ScoreVector out;
    out.raw_scores.resize(static_cast<long>(rows.size()));
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        long i = rows[idx];
        out.respondent_ids.push_back(data.respondent_ids[i]);
        out.unit_labels.push_back(data.unit_labels[i]);
        Eigen::VectorXd z =
            (data.values.row(i).transpose() - model.item_means).cwiseQuotient(model.item_sds);
        // ScoreVector is a single indicator; the first factor carries it.
        out.raw_scores(static_cast<long>(idx)) = z.dot(model.score_weights.col(0));
    }

    out.min_raw = out.raw_scores.minCoeff();
    out.max_raw = out.raw_scores.maxCoeff();
    if (out.max_raw == out.min_raw)
        throw EstimationError("normalization undefined: all factor scores identical (degenerate sample)");
    out.normalized_scores =
        (out.raw_scores.array() - out.min_raw) / (out.max_raw - out.min_raw);
    return out;
}

std::vector<RawSurveyRow> load_survey_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* item_labels_out) {
    CsvTable table = read_csv(path);
    std::size_t id_col = table.column("respondent_id");
    std::size_t fips_col = table.column("county_fips");
    std::vector<std::size_t> item_cols;
    std::vector<std::string> item_labels;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j == id_col || j == fips_col) continue;
        item_cols.push_back(j);
        item_labels.push_back(table.header[j]);
    }
    if (item_cols.empty()) throw InputError("survey CSV has no item columns: " + path.string());

    std::vector<RawSurveyRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        RawSurveyRow row;
        row.respondent_id = r[id_col];
        row.unit_label = r[fips_col];
        for (std::size_t j : item_cols) row.answers.push_back(r[j]);
        rows.push_back(std::move(row));
    }
    if (item_labels_out) *item_labels_out = item_labels;
    return rows;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json vector_to_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (long i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json arr = ordered_json::array();
    for (long i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        arr.push_back(row);
    }
    return arr;
}

Eigen::VectorXd vector_from_json(const ordered_json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<long>(i)) = arr[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& arr) {
    if (arr.empty()) return {};
    Eigen::MatrixXd m(arr.size(), arr[0].size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        for (std::size_t j = 0; j < arr[i].size(); ++j)
            m(static_cast<long>(i), static_cast<long>(j)) = arr[i][j].get<double>();
    return m;
}

}  // namespace

std::string factor_model_to_json(const FactorModel& model) {
    ordered_json j;
    j["items"] = model.item_labels;
    j["n_used"] = model.n_used;
    j["loadings"] = matrix_to_json(model.loadings);
    j["communalities"] = vector_to_json(model.communalities);
    j["uniquenesses"] = vector_to_json(model.uniquenesses);
    j["eigenvalues"] = vector_to_json(model.eigenvalues);
    j["proportion_variance"] = vector_to_json(model.proportion_variance);
    j["score_weights"] = matrix_to_json(model.score_weights);
    j["item_means"] = vector_to_json(model.item_means);
    j["item_sds"] = vector_to_json(model.item_sds);
    j["warnings"] = model.warnings;
    return j.dump(2) + "\n";
}

FactorModel factor_model_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    FactorModel m;
    m.item_labels = j.at("items").get<std::vector<std::string>>();
    m.n_used = j.at("n_used").get<long>();
    m.loadings = matrix_from_json(j.at("loadings"));
    m.communalities = vector_from_json(j.at("communalities"));
    m.uniquenesses = vector_from_json(j.at("uniquenesses"));
    m.eigenvalues = vector_from_json(j.at("eigenvalues"));
    m.proportion_variance = vector_from_json(j.at("proportion_variance"));
    m.score_weights = matrix_from_json(j.at("score_weights"));
    m.item_means = vector_from_json(j.at("item_means"));
    m.item_sds = vector_from_json(j.at("item_sds"));
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

void write_scores_csv(const std::filesystem::path& path, const ScoreVector& scores) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < scores.respondent_ids.size(); ++i)
        rows.push_back({scores.respondent_ids[i], scores.unit_labels[i],
                        format_double(scores.raw_scores(static_cast<long>(i))),
                        format_double(scores.normalized_scores(static_cast<long>(i)))});
    write_csv(path, {"respondent_id", "county_fips", "raw_score", "normalized_score"}, rows);
}

ScoreVector read_scores_csv(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    std::size_t id = t.column("respondent_id"), fips = t.column("county_fips");
    std::size_t raw = t.column("raw_score"), norm = t.column("normalized_score");
    ScoreVector s;
    s.raw_scores.resize(static_cast<long>(t.rows.size()));
    s.normalized_scores.resize(static_cast<long>(t.rows.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        s.respondent_ids.push_back(t.rows[i][id]);
        s.unit_labels.push_back(t.rows[i][fips]);
        s.raw_scores(static_cast<long>(i)) = parse_double(t.rows[i][raw], "raw_score");
        s.normalized_scores(static_cast<long>(i)) = parse_double(t.rows[i][norm], "normalized_score");
    }
    if (s.respondent_ids.empty()) throw InputError("no score rows in " + path.string());
    s.min_raw = s.raw_scores.minCoeff();
    s.max_raw = s.raw_scores.maxCoeff();
    return s;
}

}  // namespace arealrisk
