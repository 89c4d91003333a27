#pragma once

#include "te/point_cloud.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace te {

/// Parse a point CSV. Separator (comma or semicolon) is autodetected from the
/// first line; decimal point only. If label_column is given, that column is
/// extracted as the integer label vector.
PointCloud load_point_csv(const std::string& path,
                          std::optional<int> label_column = std::nullopt);

/// Write a point cloud back out (embedding export shares this writer).
void save_point_csv(const std::string& path, const RowMatrixXd& points,
                    const std::vector<int>* labels = nullptr);

/// Raw cube reader: float32 little-endian, band-interleaved-by-pixel, with a
/// plain-text sidecar of key=value lines giving height, width, bands.
HyperCube load_cube(const std::string& data_path, const std::string& meta_path);

/// Label image as an integer CSV, height rows by width columns.
LabelImage load_label_image(const std::string& path);

/// Flatten a cube into one point per retained pixel, raster order. Pixels
/// whose ground-truth label is 0 are dropped when drop_label_zero is set.
PointCloud cube_to_points(const HyperCube& cube, const LabelImage& ground_truth,
                          bool drop_label_zero = true);

/// Remove the given band indices (indices into the *current* bands).
HyperCube remove_bands(const HyperCube& cube, const std::vector<int>& band_indices);

/// Remap labels through a grouping; points untouched.
PointCloud group_classes(const PointCloud& pc, const ClassGrouping& grouping);

/// Isotropic Gaussian blobs around the given 2-D centers; labels are the
/// cluster indices. Deterministic per seed.
PointCloud make_toy_clusters(std::uint64_t seed, int n_per_cluster,
                             const std::vector<Eigen::Vector2d>& centers,
                             double spread);

/// The built-in toy configuration: 5 centers on a circle of radius 4 at
/// angles 90 + k*72 degrees. The generator itself is fully parameterized.
std::vector<Eigen::Vector2d> toy_default_centers();

/// Perturb every coordinate by an independent N(0, sigma^2) draw.
PointCloud add_gaussian_noise(const PointCloud& pc, std::uint64_t seed, double sigma);

/// Select floor(fraction * |class|) members of the class uniformly without
/// replacement. Returns a length-n node mask.
std::vector<std::uint8_t> supervision_subset(const PointCloud& pc, int class_id,
                                             double fraction, std::uint64_t seed);

} // namespace te
