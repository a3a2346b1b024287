#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dqn {

/// Labelled samples with features stored row-major in one buffer.
/// `ids` carries each sample's identity in the source file so subsets stay traceable.
struct Dataset {
    std::string name;
    std::size_t input_dim = 0;
    std::size_t n_classes = 0;
    std::vector<std::string> class_names;
    std::vector<double> features;
    std::vector<std::size_t> labels;
    std::vector<std::size_t> ids;

    std::size_t size() const { return labels.size(); }
    bool empty() const { return labels.empty(); }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features).subspan(i * input_dim, input_dim);
    }
    std::span<double> row(std::size_t i) { return std::span<double>(features).subspan(i * input_dim, input_dim); }

    void add(std::span<const double> x, std::size_t label, std::size_t id);

    /// Copy holding the given samples, in the given order.
    Dataset subset(std::span<const std::size_t> indices) const;

    std::vector<std::size_t> class_counts() const;

    /// Throws DataError if any invariant (row length, label range, id count) is broken.
    void validate() const;
};

// --- CSV ---------------------------------------------------------------------

enum class ColumnRole { feature, label, ignore };

struct CsvColumn {
    std::string name;
    ColumnRole role = ColumnRole::feature;
    /// Non-empty for categorical feature columns: text value -> numeric code.
    std::map<std::string, double, std::less<>> categories;
};

struct CsvSchema {
    std::string dataset_name;
    std::vector<CsvColumn> columns;
    /// Label text in class order. If empty, the label column is an integer mapped by `integer_label`.
    std::vector<std::string> class_names;
    /// Integer label -> class index (used when `class_names` is empty).
    std::size_t (*integer_label)(long) = nullptr;
    std::size_t n_classes = 0;
};

CsvSchema iris_schema();
CsvSchema wbc_schema();
CsvSchema abalone_schema();
/// Schema by dataset name ("iris", "wbc", "abalone"); throws ConfigError otherwise.
CsvSchema schema_for(std::string_view dataset);

/// Loads a comma separated file. A header line is detected when the first row
/// does not parse under the schema. Errors cite the 1-based line number.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

// --- IDX (MNIST) -------------------------------------------------------------

/// Reads an IDX3 image file and IDX1 label file (raw or gzip-compressed).
/// Images are flattened row-major and scaled to [0, 1].
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 std::string name = "mnist");

// --- Abalone -----------------------------------------------------------------

/// Rings 1-5 -> 0, 6-10 -> 1, ..., 26-29 -> 5. Throws DataError outside 1..29.
std::size_t bin_abalone_rings(long rings);

inline constexpr std::size_t kAbaloneClasses = 6;

// --- Splitting and balancing -------------------------------------------------

struct SplitSpec {
    enum class Strategy { per_class_counts, fraction_random };

    Strategy strategy = Strategy::fraction_random;
    /// per_class_counts: one entry applies to every class.
    std::vector<std::size_t> train_per_class;
    /// per_class_counts: empty means "all remaining samples of the class".
    std::vector<std::size_t> test_per_class;
    /// fraction_random: train size is floor(fraction * n) unless `train_count` is set.
    double train_fraction = 0.67;
    std::optional<std::size_t> train_count;
    std::uint64_t seed = 0;
};

/// Deterministic in spec.seed; train and test are disjoint. Throws DataError when infeasible.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Digit-vs-rest subset with equal class sizes. Class 0 is `digit`, class 1 is "other".
/// The other half is spread as evenly as possible over the nine remaining digits.
/// `per_class` caps each half (default: every available image of `digit`).
Dataset balance_binary_mnist(const Dataset& mnist, std::size_t digit, std::uint64_t seed,
                             std::optional<std::size_t> per_class = std::nullopt);

// --- Normalization -------------------------------------------------------------

enum class Normalization { none, minmax, zscore };

std::string to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

/// Per-feature affine transform x' = (x - offset) / scale fitted on training data.
/// Constant features get offset 0, scale 1 and pass through unchanged.
struct FeatureScaler {
    Normalization method = Normalization::none;
    std::vector<double> offset;
    std::vector<double> scale;

    static FeatureScaler fit(const Dataset& train, Normalization method);
    static FeatureScaler identity(std::size_t input_dim);

    void apply(Dataset& data) const;
    void apply(std::span<double> x) const;

    friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;
};

/// Fits on `train` only and transforms both sets.
std::pair<Dataset, Dataset> normalize(Dataset train, Dataset test, Normalization method);

}  // namespace dqn
