#include "te/evaluate.hpp"

#include "te/errors.hpp"
#include "te/rng.hpp"
#include "te/simd/distance.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

namespace te {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (std::int64_t v : counts) sum += v;
    return sum;
}

ConfusionMatrix build_confusion(const std::vector<int>& truth,
                                const std::vector<int>& predicted) {
    if (truth.size() != predicted.size())
        throw ShapeError("truth and prediction lengths differ");
    if (truth.empty()) throw ParameterError("cannot build a confusion matrix from no samples");

    std::map<int, std::size_t> index;
    for (int t : truth) index.emplace(t, 0);
    for (int p : predicted) index.emplace(p, 0);
    ConfusionMatrix c;
    c.ids.reserve(index.size());
    for (auto& [id, slot] : index) {
        slot = c.ids.size();
        c.ids.push_back(id);
    }
    c.counts.assign(c.ids.size() * c.ids.size(), 0);
    for (std::size_t s = 0; s < truth.size(); ++s)
        ++c.at(index[truth[s]], index[predicted[s]]);
    return c;
}

namespace {

using int128 = __int128;

int128 choose2(int128 x) { return x * (x - 1) / 2; }

void check_square(const ConfusionMatrix& c) {
    if (c.counts.size() != c.ids.size() * c.ids.size())
        throw ShapeError("confusion matrix storage does not match a square id set");
    for (std::int64_t v : c.counts)
        if (v < 0) throw ParameterError("confusion counts must be nonnegative");
}

/// Identical set partitions show up as a matrix with exactly one nonzero per
/// row and column that equals both of its marginals.
bool identical_partitions(const ConfusionMatrix& c) {
    const std::size_t r = c.classes();
    for (std::size_t i = 0; i < r; ++i) {
        std::int64_t row_sum = 0, row_max = 0;
        for (std::size_t j = 0; j < r; ++j) {
            row_sum += c.at(i, j);
            row_max = std::max(row_max, c.at(i, j));
        }
        if (row_sum != row_max) return false;
    }
    for (std::size_t j = 0; j < r; ++j) {
        std::int64_t col_sum = 0, col_max = 0;
        for (std::size_t i = 0; i < r; ++i) {
            col_sum += c.at(i, j);
            col_max = std::max(col_max, c.at(i, j));
        }
        if (col_sum != col_max) return false;
    }
    return true;
}

} // namespace

double ari(const ConfusionMatrix& c) {
    check_square(c);
    const std::int64_t n = c.total();
    if (n < 2) throw ParameterError("ARI requires at least 2 samples");
    const std::size_t r = c.classes();

    int128 sum_cells = 0, sum_rows = 0, sum_cols = 0;
    for (std::size_t i = 0; i < r; ++i) {
        std::int64_t row = 0;
        for (std::size_t j = 0; j < r; ++j) {
            sum_cells += choose2(c.at(i, j));
            row += c.at(i, j);
        }
        sum_rows += choose2(row);
    }
    for (std::size_t j = 0; j < r; ++j) {
        std::int64_t col = 0;
        for (std::size_t i = 0; i < r; ++i) col += c.at(i, j);
        sum_cols += choose2(col);
    }

    const int128 pairs = choose2(n);
    // ARI = (pairs*sum_cells - sum_rows*sum_cols)
    //     / (pairs*(sum_rows+sum_cols)/2 - sum_rows*sum_cols); scaled by 2.
    const int128 numerator = 2 * (pairs * sum_cells - sum_rows * sum_cols);
    const int128 denominator = pairs * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols;
    if (denominator == 0) return identical_partitions(c) ? 1.0 : 0.0;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::pair<double, double> oa_aa(const ConfusionMatrix& c) {
    check_square(c);
    const std::size_t r = c.classes();
    const std::int64_t n = c.total();
    if (n == 0) throw ParameterError("empty confusion matrix");

    std::int64_t diag = 0;
    double recall_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < r; ++i) {
        std::int64_t row = 0;
        for (std::size_t j = 0; j < r; ++j) row += c.at(i, j);
        diag += c.at(i, i);
        if (row == 0) {
            std::cerr << "warning: class " << c.ids[i]
                      << " has no ground-truth samples; excluded from AA\n";
            continue;
        }
        recall_sum += static_cast<double>(c.at(i, i)) / static_cast<double>(row);
        ++counted;
    }
    const double oa = static_cast<double>(diag) / static_cast<double>(n);
    const double aa = counted ? recall_sum / static_cast<double>(counted) : 0.0;
    return {oa, aa};
}

std::pair<double, double> fscore_kappa(const ConfusionMatrix& c) {
    check_square(c);
    const std::size_t r = c.classes();
    const std::int64_t n = c.total();
    if (n == 0) throw ParameterError("all-zero confusion matrix; metrics undefined");

    double fs_sum = 0.0;
    std::size_t fs_counted = 0;
    std::int64_t diag = 0;
    int128 marginal = 0;
    for (std::size_t i = 0; i < r; ++i) {
        std::int64_t row = 0, col = 0;
        for (std::size_t j = 0; j < r; ++j) {
            row += c.at(i, j);
            col += c.at(j, i);
        }
        diag += c.at(i, i);
        marginal += static_cast<int128>(row) * col;
        const std::int64_t denom = row + col;  // 2*C_ii + off-diagonal row+col
        if (denom == 0) {
            std::cerr << "warning: class " << c.ids[i]
                      << " absent from truth and prediction; excluded from FS\n";
            continue;
        }
        fs_sum += 2.0 * static_cast<double>(c.at(i, i)) / static_cast<double>(denom);
        ++fs_counted;
    }
    const double fs = fs_counted ? fs_sum / static_cast<double>(fs_counted) : 0.0;

    const int128 kappa_num = static_cast<int128>(n) * diag - marginal;
    const int128 kappa_den = static_cast<int128>(n) * n - marginal;
    const double kappa = kappa_den == 0
                             ? 1.0
                             : static_cast<double>(kappa_num) / static_cast<double>(kappa_den);
    return {fs, kappa};
}

namespace {

std::map<int, std::vector<std::size_t>> class_members(const std::vector<int>& labels) {
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    return members;
}

} // namespace

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>
stratified_split(const PointCloud& pc, double train_fraction, std::uint64_t seed) {
    if (!pc.has_labels()) throw ProtocolError("stratified split needs labels");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ParameterError("train fraction must lie in (0, 1)");

    const auto members = class_members(pc.labels);
    std::vector<std::uint8_t> train(pc.labels.size(), 0), test(pc.labels.size(), 0);
    for (const auto& [cls, idx] : members) {
        if (idx.empty()) throw ProtocolError("class " + std::to_string(cls) + " is empty");
        const auto count = static_cast<std::size_t>(
            std::ceil(train_fraction * static_cast<double>(idx.size())));
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
        const auto chosen = rng.sample_without_replacement(idx.size(), count);
        std::vector<std::uint8_t> is_train(idx.size(), 0);
        for (std::size_t c : chosen) is_train[c] = 1;
        for (std::size_t t = 0; t < idx.size(); ++t)
            (is_train[t] ? train : test)[idx[t]] = 1;
    }
    return {train, test};
}

std::vector<int> knn1_classify(const RowMatrixXd& train, const std::vector<int>& train_labels,
                               const RowMatrixXd& test) {
    if (train.rows() == 0) throw ParameterError("training set is empty");
    if (static_cast<Eigen::Index>(train_labels.size()) != train.rows())
        throw ShapeError("training labels do not match training rows");
    if (train.cols() != test.cols())
        throw ShapeError("train and test dimensionalities differ");

    const auto d = static_cast<std::size_t>(train.cols());
    std::vector<int> out(static_cast<std::size_t>(test.rows()));
    for (Eigen::Index q = 0; q < test.rows(); ++q) {
        const double* qrow = test.row(q).data();
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_idx = 0;
        for (Eigen::Index t = 0; t < train.rows(); ++t) {
            const double dist = simd::squared_distance(qrow, train.row(t).data(), d);
            if (dist < best) {
                best = dist;
                best_idx = t;
            }
        }
        out[static_cast<std::size_t>(q)] = train_labels[static_cast<std::size_t>(best_idx)];
    }
    return out;
}

namespace {

RunMetrics metrics_from(const ConfusionMatrix& c) {
    RunMetrics m;
    m.ari = ari(c);
    std::tie(m.oa, m.aa) = oa_aa(c);
    std::tie(m.fs, m.kappa) = fscore_kappa(c);
    return m;
}

} // namespace

std::vector<std::vector<std::uint8_t>> protocol_train_masks(const std::vector<int>& labels,
                                                            int runs, double train_fraction,
                                                            std::uint64_t seed) {
    if (runs < 1) throw ParameterError("runs must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ParameterError("train fraction must lie in (0, 1)");
    const bool disjoint = runs > 1 && runs * train_fraction <= 1.0 + 1e-12;

    std::vector<std::vector<std::uint8_t>> masks(
        static_cast<std::size_t>(runs), std::vector<std::uint8_t>(labels.size(), 0));
    if (!disjoint) {
        PointCloud carrier;
        carrier.points = RowMatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), 1);
        carrier.labels = labels;
        for (int r = 0; r < runs; ++r)
            masks[static_cast<std::size_t>(r)] =
                stratified_split(carrier, train_fraction,
                                 derive_seed(seed, static_cast<std::uint64_t>(r)))
                    .first;
        return masks;
    }

    // Disjoint mode: each class is shuffled once and cut into consecutive
    // train blocks; block r trains run r. When the rounded block size does
    // not fit `runs` times, the class is instead cut into `runs` near-equal
    // folds (the 10-percent / 10-run configuration on uneven class sizes).
    std::size_t class_idx = 0;
    for (const auto& [cls, idx] : class_members(labels)) {
        if (idx.size() < static_cast<std::size_t>(runs))
            throw ProtocolError("class " + std::to_string(cls) + " has " +
                                std::to_string(idx.size()) + " members but " +
                                std::to_string(runs) +
                                " disjoint training folds were requested; reduce runs");
        std::vector<std::size_t> order = idx;
        Rng rng(derive_seed(seed, 0xf01d + class_idx));
        rng.shuffle(order);
        const auto block = static_cast<std::size_t>(
            std::ceil(train_fraction * static_cast<double>(idx.size())));
        for (int r = 0; r < runs; ++r) {
            std::size_t begin, end;
            if (block * static_cast<std::size_t>(runs) <= idx.size()) {
                begin = block * static_cast<std::size_t>(r);
                end = begin + block;
            } else {
                begin = idx.size() * static_cast<std::size_t>(r) / static_cast<std::size_t>(runs);
                end = idx.size() * static_cast<std::size_t>(r + 1) / static_cast<std::size_t>(runs);
            }
            for (std::size_t t = begin; t < end; ++t)
                masks[static_cast<std::size_t>(r)][order[t]] = 1;
        }
        ++class_idx;
    }
    return masks;
}

EvaluationReport run_protocol(const RowMatrixXd& coords, const std::vector<int>& labels,
                              int runs, double train_fraction, std::uint64_t seed) {
    if (static_cast<Eigen::Index>(labels.size()) != coords.rows())
        throw ShapeError("labels do not match embedding rows");

    EvaluationReport report;
    report.train_fraction = train_fraction;
    report.disjoint_folds = runs > 1 && runs * train_fraction <= 1.0 + 1e-12;

    const auto masks = protocol_train_masks(labels, runs, train_fraction, seed);
    for (int r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        report.run_seeds.push_back(run_seed);
        const std::vector<std::uint8_t>& train_mask = masks[static_cast<std::size_t>(r)];

        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            (train_mask[i] ? train_rows : test_rows).push_back(i);
        if (train_rows.empty() || test_rows.empty())
            throw ProtocolError("degenerate split: empty train or test set");

        RowMatrixXd train(static_cast<Eigen::Index>(train_rows.size()), coords.cols());
        RowMatrixXd test(static_cast<Eigen::Index>(test_rows.size()), coords.cols());
        std::vector<int> train_labels(train_rows.size()), truth(test_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            train.row(static_cast<Eigen::Index>(i)) =
                coords.row(static_cast<Eigen::Index>(train_rows[i]));
            train_labels[i] = labels[train_rows[i]];
        }
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            test.row(static_cast<Eigen::Index>(i)) =
                coords.row(static_cast<Eigen::Index>(test_rows[i]));
            truth[i] = labels[test_rows[i]];
        }

        const std::vector<int> predicted = knn1_classify(train, train_labels, test);
        report.runs.push_back(metrics_from(build_confusion(truth, predicted)));
    }

    RunMetrics mean;
    for (const RunMetrics& m : report.runs) {
        mean.ari += m.ari;
        mean.oa += m.oa;
        mean.aa += m.aa;
        mean.fs += m.fs;
        mean.kappa += m.kappa;
    }
    const auto count = static_cast<double>(report.runs.size());
    mean.ari /= count;
    mean.oa /= count;
    mean.aa /= count;
    mean.fs /= count;
    mean.kappa /= count;
    report.mean = mean;
    return report;
}

namespace {

const std::array<const char*, 5> kMetricNames = {"ARI", "OA", "AA", "FS", "kappa"};

double metric_value(const RunMetrics& m, std::size_t row) {
    switch (row) {
        case 0: return m.ari;
        case 1: return m.oa;
        case 2: return m.aa;
        case 3: return m.fs;
        default: return m.kappa;
    }
}

} // namespace

std::string report_to_text(const EvaluationReport& report) {
    std::ostringstream out;
    out << "runs: " << report.runs.size() << '\n';
    out << "train_fraction: " << report.train_fraction << '\n';
    out << "disjoint_folds: " << (report.disjoint_folds ? "true" : "false") << '\n';
    out << '\n';
    out << "metric";
    for (std::size_t r = 0; r < report.runs.size(); ++r) out << "\trun" << r;
    out << "\tmean\n";
    out.setf(std::ios::fixed);
    out.precision(4);
    for (std::size_t row = 0; row < kMetricNames.size(); ++row) {
        out << kMetricNames[row];
        for (const RunMetrics& m : report.runs) out << '\t' << metric_value(m, row);
        out << '\t' << metric_value(report.mean, row) << '\n';
    }
    return out.str();
}

std::string report_to_json(const EvaluationReport& report) {
    nlohmann::json j;
    j["runs"] = report.runs.size();
    j["train_fraction"] = report.train_fraction;
    j["disjoint_folds"] = report.disjoint_folds;
    j["run_seeds"] = report.run_seeds;
    auto metric_obj = [](const RunMetrics& m) {
        return nlohmann::json{{"ari", m.ari}, {"oa", m.oa}, {"aa", m.aa},
                              {"fs", m.fs}, {"kappa", m.kappa}};
    };
    j["per_run"] = nlohmann::json::array();
    for (const RunMetrics& m : report.runs) j["per_run"].push_back(metric_obj(m));
    j["mean"] = metric_obj(report.mean);
    return j.dump(2);
}

} // namespace te
