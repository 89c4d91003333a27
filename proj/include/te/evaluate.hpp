#pragma once

#include "te/point_cloud.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace te {

/// Square confusion matrix over the union of observed class ids.
/// Rows index the ground truth partition, columns the predicted one, so
/// row-normalized diagonals are per-class recalls.
struct ConfusionMatrix {
    std::vector<int> ids;
    std::vector<std::int64_t> counts;   // row-major, ids.size() x ids.size()

    std::size_t classes() const { return ids.size(); }
    std::int64_t at(std::size_t row, std::size_t col) const {
        return counts[row * ids.size() + col];
    }
    std::int64_t& at(std::size_t row, std::size_t col) {
        return counts[row * ids.size() + col];
    }
    std::int64_t total() const;
};

ConfusionMatrix build_confusion(const std::vector<int>& truth,
                                const std::vector<int>& predicted);

/// Adjusted Rand index from binomial pair counts, exact integer arithmetic
/// up to the final division. A vanishing denominator returns 1 for identical
/// partitions and 0 otherwise.
double ari(const ConfusionMatrix& c);

/// Overall accuracy and average (per-class recall) accuracy. Classes with an
/// empty truth row are excluded from AA with a warning on stderr.
std::pair<double, double> oa_aa(const ConfusionMatrix& c);

/// Mean per-class F-score and Cohen's kappa.
std::pair<double, double> fscore_kappa(const ConfusionMatrix& c);

/// Per class, ceil(fraction * count) members train and the rest test;
/// uniform without replacement, deterministic per seed. Unlabeled point
/// clouds are rejected. Returns (train mask, test mask) over all points.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>
stratified_split(const PointCloud& pc, double train_fraction, std::uint64_t seed);

/// 1-nearest-neighbor labels for the test rows, Euclidean metric, distance
/// ties broken by the lower training index.
std::vector<int> knn1_classify(const RowMatrixXd& train, const std::vector<int>& train_labels,
                               const RowMatrixXd& test);

struct RunMetrics {
    double ari = 0.0;
    double oa = 0.0;
    double aa = 0.0;
    double fs = 0.0;
    double kappa = 0.0;
};

struct EvaluationReport {
    std::vector<RunMetrics> runs;
    RunMetrics mean;
    std::vector<std::uint64_t> run_seeds;
    double train_fraction = 0.0;
    bool disjoint_folds = false;
};

/// The per-run training masks the protocol uses; exposed so disjointness is
/// directly checkable. In disjoint mode (runs > 1 and runs*fraction <= 1)
/// each class is shuffled once and cut into consecutive blocks, one per run.
std::vector<std::vector<std::uint8_t>> protocol_train_masks(const std::vector<int>& labels,
                                                            int runs, double train_fraction,
                                                            std::uint64_t seed);

/// The classification protocol: split -> 1-NN -> metrics, averaged over
/// `runs` repetitions. When runs * train_fraction <= 1 the training sets are
/// sampled pairwise disjoint (each class shuffled once and cut into
/// consecutive folds); otherwise each run draws an independent split.
EvaluationReport run_protocol(const RowMatrixXd& coords, const std::vector<int>& labels,
                              int runs, double train_fraction, std::uint64_t seed);

/// Table layout mirrors the results tables: one row per metric
/// (ARI, OA, AA, FS, kappa), one column per run plus the mean.
std::string report_to_text(const EvaluationReport& report);
std::string report_to_json(const EvaluationReport& report);

} // namespace te
