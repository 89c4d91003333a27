#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace te {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n points in d dimensions with optional integer class labels.
/// Label 0 is reserved for "unlabeled / empty space" in the dataset tables.
struct PointCloud {
    RowMatrixXd points;               // n x d, row per point
    std::vector<int> labels;          // empty or length n, values >= 0
    std::map<int, std::string> class_names;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
    bool has_labels() const { return !labels.empty(); }

    /// Enforces the type invariants; throws on violation.
    void validate() const;
};

/// Hyperspectral cube: height x width pixels, `bands` spectral bands.
/// Values are stored pixel-interleaved (all bands of pixel 0, then pixel 1, ...)
/// as on disk. band_mask tracks which of the *original* bands survive; its
/// length never changes under remove_bands.
struct HyperCube {
    int height = 0;
    int width = 0;
    int bands = 0;
    std::vector<float> values;        // height*width*bands
    std::vector<bool> band_mask;      // length = original band count

    float at(int row, int col, int band) const {
        return values[(static_cast<std::size_t>(row) * width + col) * bands + band];
    }
    void validate() const;
};

/// Surjective relabeling map original-label -> grouped-label.
struct ClassGrouping {
    std::map<int, int> mapping;
};

/// Integer label image, height x width, raster order.
struct LabelImage {
    int height = 0;
    int width = 0;
    std::vector<int> labels;          // height*width

    int at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * width + col];
    }
};

} // namespace te
