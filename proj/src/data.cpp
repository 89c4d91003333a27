#include "te/data.hpp"

#include "te/errors.hpp"
#include "te/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace te {

void PointCloud::validate() const {
    if (points.rows() < 1) throw ParameterError("point cloud must contain at least one point");
    if (points.cols() < 1) throw ParameterError("point cloud must have dimension >= 1");
    if (!points.allFinite()) throw ParameterError("point cloud contains non-finite coordinates");
    if (!labels.empty()) {
        if (static_cast<Eigen::Index>(labels.size()) != points.rows())
            throw ShapeError("labels length does not match point count");
        for (int l : labels)
            if (l < 0) throw ParameterError("labels must be >= 0");
    }
}

void HyperCube::validate() const {
    const std::size_t expect =
        static_cast<std::size_t>(height) * width * bands;
    if (values.size() != expect)
        throw ShapeError("cube value count does not match height*width*bands");
    const int retained = static_cast<int>(std::count(band_mask.begin(), band_mask.end(), true));
    if (retained != bands)
        throw ShapeError("band_mask retained count does not match bands");
}

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string cell = trim(raw);
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ParseError("cannot parse cell '" + cell + "' at row " + std::to_string(row + 1) +
                         ", column " + std::to_string(col + 1));
    }
    return value;
}

int parse_label_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const double v = parse_cell(raw, row, col);
    const double rounded = std::nearbyint(v);
    if (std::abs(v - rounded) > 0.0 || rounded < 0.0) {
        throw ParseError("label at row " + std::to_string(row + 1) + ", column " +
                         std::to_string(col + 1) + " is not a nonnegative integer");
    }
    return static_cast<int>(rounded);
}

} // namespace

PointCloud load_point_csv(const std::string& path, std::optional<int> label_column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) lines.push_back(line);
    }
    if (lines.empty()) throw FormatError("'" + path + "' is empty");

    const char sep = lines.front().find(';') != std::string::npos ? ';' : ',';
    const std::size_t n = lines.size();
    const std::size_t cols = split_line(lines.front(), sep).size();
    if (label_column && (*label_column < 0 || static_cast<std::size_t>(*label_column) >= cols))
        throw BoundsError("label column " + std::to_string(*label_column) + " out of range");
    const std::size_t d = cols - (label_column ? 1 : 0);
    if (d < 1) throw FormatError("'" + path + "' has no coordinate columns");

    PointCloud pc;
    pc.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    if (label_column) pc.labels.resize(n);

    for (std::size_t r = 0; r < n; ++r) {
        const auto cells = split_line(lines[r], sep);
        if (cells.size() != cols) {
            throw FormatError("row " + std::to_string(r + 1) + " has " +
                              std::to_string(cells.size()) + " columns, expected " +
                              std::to_string(cols));
        }
        std::size_t out_col = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            if (label_column && c == static_cast<std::size_t>(*label_column)) {
                pc.labels[r] = parse_label_cell(cells[c], r, c);
            } else {
                pc.points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out_col++)) =
                    parse_cell(cells[c], r, c);
            }
        }
    }
    pc.validate();
    return pc;
}

void save_point_csv(const std::string& path, const RowMatrixXd& points,
                    const std::vector<int>* labels) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.precision(17);
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            if (c) out << ',';
            out << points(r, c);
        }
        if (labels) out << ',' << (*labels)[static_cast<std::size_t>(r)];
        out << '\n';
    }
    if (!out) throw IoError("failed while writing '" + path + "'");
}

HyperCube load_cube(const std::string& data_path, const std::string& meta_path) {
    std::ifstream meta(meta_path);
    if (!meta) throw IoError("cannot open sidecar '" + meta_path + "'");
    int height = -1, width = -1, bands = -1;
    std::string line;
    while (std::getline(meta, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError("sidecar line without '=': " + t);
        const std::string key = trim(t.substr(0, eq));
        const int value = static_cast<int>(parse_cell(t.substr(eq + 1), 0, 0));
        if (key == "height") height = value;
        else if (key == "width") width = value;
        else if (key == "bands") bands = value;
        else throw FormatError("unknown sidecar key '" + key + "'");
    }
    if (height <= 0 || width <= 0 || bands <= 0)
        throw FormatError("sidecar must define positive height, width, bands");

    std::ifstream data(data_path, std::ios::binary);
    if (!data) throw IoError("cannot open '" + data_path + "'");
    HyperCube cube;
    cube.height = height;
    cube.width = width;
    cube.bands = bands;
    cube.values.resize(static_cast<std::size_t>(height) * width * bands);
    data.read(reinterpret_cast<char*>(cube.values.data()),
              static_cast<std::streamsize>(cube.values.size() * sizeof(float)));
    if (data.gcount() != static_cast<std::streamsize>(cube.values.size() * sizeof(float)))
        throw FormatError("'" + data_path + "' is shorter than height*width*bands floats");
    char extra;
    if (data.read(&extra, 1))
        throw FormatError("'" + data_path + "' is longer than height*width*bands floats");
    cube.band_mask.assign(static_cast<std::size_t>(bands), true);
    return cube;
}

LabelImage load_label_image(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    LabelImage img;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const char sep = line.find(';') != std::string::npos ? ';' : ',';
        const auto cells = split_line(line, sep);
        if (img.width == 0) img.width = static_cast<int>(cells.size());
        if (static_cast<int>(cells.size()) != img.width)
            throw FormatError("label image row " + std::to_string(row + 1) + " is ragged");
        for (std::size_t c = 0; c < cells.size(); ++c)
            img.labels.push_back(parse_label_cell(cells[c], row, c));
        ++row;
    }
    if (row == 0) throw FormatError("'" + path + "' is empty");
    img.height = static_cast<int>(row);
    return img;
}

PointCloud cube_to_points(const HyperCube& cube, const LabelImage& ground_truth,
                          bool drop_label_zero) {
    if (ground_truth.height != cube.height || ground_truth.width != cube.width) {
        throw ShapeError("ground truth is " + std::to_string(ground_truth.height) + "x" +
                         std::to_string(ground_truth.width) + " but cube is " +
                         std::to_string(cube.height) + "x" + std::to_string(cube.width));
    }
    std::vector<std::pair<int, int>> kept;
    for (int r = 0; r < cube.height; ++r)
        for (int c = 0; c < cube.width; ++c)
            if (!drop_label_zero || ground_truth.at(r, c) != 0) kept.emplace_back(r, c);
    if (kept.empty()) throw ParameterError("no pixels retained from cube");

    PointCloud pc;
    pc.points.resize(static_cast<Eigen::Index>(kept.size()), cube.bands);
    pc.labels.resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto [r, c] = kept[i];
        for (int b = 0; b < cube.bands; ++b)
            pc.points(static_cast<Eigen::Index>(i), b) = static_cast<double>(cube.at(r, c, b));
        pc.labels[i] = ground_truth.at(r, c);
    }
    return pc;
}

HyperCube remove_bands(const HyperCube& cube, const std::vector<int>& band_indices) {
    std::set<int> drop;
    for (int idx : band_indices) {
        if (idx < 0 || idx >= cube.bands)
            throw BoundsError("band index " + std::to_string(idx) + " out of range [0, " +
                              std::to_string(cube.bands) + ")");
        if (!drop.insert(idx).second)
            throw ParameterError("band index " + std::to_string(idx) + " listed twice");
    }
    if (drop.empty()) return cube;

    // Current band c corresponds to the c-th surviving original band.
    std::vector<int> current_to_original;
    for (std::size_t orig = 0; orig < cube.band_mask.size(); ++orig)
        if (cube.band_mask[orig]) current_to_original.push_back(static_cast<int>(orig));

    HyperCube out;
    out.height = cube.height;
    out.width = cube.width;
    out.bands = cube.bands - static_cast<int>(drop.size());
    out.band_mask = cube.band_mask;
    for (int idx : drop) out.band_mask[static_cast<std::size_t>(current_to_original[idx])] = false;

    std::vector<int> keep;
    for (int b = 0; b < cube.bands; ++b)
        if (!drop.count(b)) keep.push_back(b);

    out.values.resize(static_cast<std::size_t>(out.height) * out.width * out.bands);
    const std::size_t pixels = static_cast<std::size_t>(cube.height) * cube.width;
    for (std::size_t p = 0; p < pixels; ++p) {
        const float* src = cube.values.data() + p * cube.bands;
        float* dst = out.values.data() + p * out.bands;
        for (std::size_t b = 0; b < keep.size(); ++b) dst[b] = src[keep[b]];
    }
    return out;
}

PointCloud group_classes(const PointCloud& pc, const ClassGrouping& grouping) {
    if (!pc.has_labels()) throw MappingError("point cloud carries no labels to group");
    PointCloud out = pc;
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        const auto it = grouping.mapping.find(out.labels[i]);
        if (it == grouping.mapping.end())
            throw MappingError("label " + std::to_string(out.labels[i]) +
                               " has no entry in the class grouping");
        out.labels[i] = it->second;
    }
    return out;
}

std::vector<Eigen::Vector2d> toy_default_centers() {
    std::vector<Eigen::Vector2d> centers;
    for (int k = 0; k < 5; ++k) {
        const double angle = (90.0 + 72.0 * k) * M_PI / 180.0;
        centers.emplace_back(4.0 * std::cos(angle), 4.0 * std::sin(angle));
    }
    return centers;
}

PointCloud make_toy_clusters(std::uint64_t seed, int n_per_cluster,
                             const std::vector<Eigen::Vector2d>& centers, double spread) {
    if (n_per_cluster < 1) throw ParameterError("n_per_cluster must be >= 1");
    if (centers.empty()) throw ParameterError("centers must be nonempty");
    if (spread <= 0.0) throw ParameterError("spread must be positive");

    const std::size_t n = centers.size() * static_cast<std::size_t>(n_per_cluster);
    PointCloud pc;
    pc.points.resize(static_cast<Eigen::Index>(n), 2);
    pc.labels.resize(n);
    Rng rng(seed);
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (int i = 0; i < n_per_cluster; ++i, ++row) {
            pc.points(row, 0) = centers[c].x() + spread * rng.normal();
            pc.points(row, 1) = centers[c].y() + spread * rng.normal();
            pc.labels[static_cast<std::size_t>(row)] = static_cast<int>(c);
        }
    }
    return pc;
}

PointCloud add_gaussian_noise(const PointCloud& pc, std::uint64_t seed, double sigma) {
    if (sigma < 0.0) throw ParameterError("noise sigma must be >= 0");
    PointCloud out = pc;
    if (sigma == 0.0) return out;
    Rng rng(seed);
    for (Eigen::Index r = 0; r < out.points.rows(); ++r)
        for (Eigen::Index c = 0; c < out.points.cols(); ++c)
            out.points(r, c) += sigma * rng.normal();
    return out;
}

std::vector<std::uint8_t> supervision_subset(const PointCloud& pc, int class_id,
                                             double fraction, std::uint64_t seed) {
    if (!pc.has_labels()) throw MappingError("point cloud carries no labels");
    if (fraction < 0.0 || fraction > 1.0)
        throw ParameterError("fraction must lie in [0, 1]");
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < pc.labels.size(); ++i)
        if (pc.labels[i] == class_id) members.push_back(i);
    if (members.empty())
        throw MappingError("class " + std::to_string(class_id) + " not present in labels");

    const std::size_t count =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size())));
    Rng rng(seed);
    const auto chosen = rng.sample_without_replacement(members.size(), count);
    std::vector<std::uint8_t> mask(pc.labels.size(), 0);
    for (std::size_t idx : chosen) mask[members[idx]] = 1;
    return mask;
}

} // namespace te
