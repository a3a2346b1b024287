#include "dqn/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "dqn/error.hpp"

namespace dqn {

// --- Dataset -----------------------------------------------------------------

void Dataset::add(std::span<const double> x, std::size_t label, std::size_t id) {
    if (x.size() != input_dim) {
        throw DataError("sample has " + std::to_string(x.size()) + " features, dataset expects " +
                        std::to_string(input_dim));
    }
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
    ids.push_back(id);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out{name, input_dim, n_classes, class_names, {}, {}, {}};
    out.features.reserve(indices.size() * input_dim);
    out.labels.reserve(indices.size());
    out.ids.reserve(indices.size());
    for (std::size_t i : indices) out.add(row(i), labels[i], ids[i]);
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t l : labels) ++counts.at(l);
    return counts;
}

void Dataset::validate() const {
    if (features.size() != labels.size() * input_dim) throw DataError(name + ": feature buffer does not match d");
    if (ids.size() != labels.size()) throw DataError(name + ": id count does not match sample count");
    for (std::size_t l : labels) {
        if (l >= n_classes) throw DataError(name + ": label " + std::to_string(l) + " out of range");
    }
    for (double v : features) {
        if (!std::isfinite(v)) throw DataError(name + ": non-finite feature value");
    }
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long> parse_long(std::string_view s) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::size_t abalone_label(long rings) { return bin_abalone_rings(rings); }

/// Parses one data row; returns an error message instead of throwing so the
/// caller can treat a failing first line as a header.
std::optional<std::string> parse_row(const std::vector<std::string_view>& fields, const CsvSchema& schema,
                                     std::vector<double>& x, std::size_t& label) {
    if (fields.size() != schema.columns.size()) {
        return "expected " + std::to_string(schema.columns.size()) + " columns, found " +
               std::to_string(fields.size());
    }
    x.clear();
    bool have_label = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
        const CsvColumn& col = schema.columns[c];
        const std::string_view f = fields[c];
        switch (col.role) {
            case ColumnRole::ignore:
                break;
            case ColumnRole::feature:
                if (!col.categories.empty()) {
                    const auto it = col.categories.find(f);
                    if (it == col.categories.end()) {
                        return "unknown category '" + std::string(f) + "' in column " + col.name;
                    }
                    x.push_back(it->second);
                } else if (auto v = parse_double(f)) {
                    x.push_back(*v);
                } else {
                    return "column " + col.name + ": '" + std::string(f) + "' is not a finite number";
                }
                break;
            case ColumnRole::label:
                if (!schema.class_names.empty()) {
                    const auto it = std::find(schema.class_names.begin(), schema.class_names.end(), f);
                    if (it == schema.class_names.end()) return "unknown label '" + std::string(f) + "'";
                    label = static_cast<std::size_t>(it - schema.class_names.begin());
                } else {
                    const auto v = parse_long(f);
                    if (!v) return "label '" + std::string(f) + "' is not an integer";
                    try {
                        label = schema.integer_label(*v);
                    } catch (const DataError& e) {
                        return e.what();
                    }
                }
                have_label = true;
                break;
        }
    }
    if (!have_label) return "schema has no label column";
    return std::nullopt;
}

}  // namespace

CsvSchema iris_schema() {
    CsvSchema s;
    s.dataset_name = "iris";
    for (const char* n : {"sepal_length", "sepal_width", "petal_length", "petal_width"}) {
        s.columns.push_back({n, ColumnRole::feature, {}});
    }
    s.columns.push_back({"species", ColumnRole::label, {}});
    s.class_names = {"setosa", "versicolor", "virginica"};
    s.n_classes = 3;
    return s;
}

CsvSchema wbc_schema() {
    CsvSchema s;
    s.dataset_name = "wbc";
    s.columns.push_back({"id", ColumnRole::ignore, {}});
    s.columns.push_back({"diagnosis", ColumnRole::label, {}});
    for (const char* stat : {"mean", "se", "worst"}) {
        for (const char* f : {"radius", "texture", "perimeter", "area", "smoothness", "compactness", "concavity",
                              "concave_points", "symmetry", "fractal_dimension"}) {
            s.columns.push_back({std::string(f) + "_" + stat, ColumnRole::feature, {}});
        }
    }
    s.class_names = {"M", "B"};
    s.n_classes = 2;
    return s;
}

CsvSchema abalone_schema() {
    CsvSchema s;
    s.dataset_name = "abalone";
    s.columns.push_back({"sex", ColumnRole::feature, {{"F", 0.0}, {"I", 0.5}, {"M", 1.0}}});
    for (const char* n : {"length", "diameter", "height", "whole_weight", "shucked_weight", "viscera_weight",
                          "shell_weight"}) {
        s.columns.push_back({n, ColumnRole::feature, {}});
    }
    s.columns.push_back({"rings", ColumnRole::label, {}});
    s.integer_label = &abalone_label;
    s.n_classes = kAbaloneClasses;
    return s;
}

CsvSchema schema_for(std::string_view dataset) {
    if (dataset == "iris") return iris_schema();
    if (dataset == "wbc") return wbc_schema();
    if (dataset == "abalone") return abalone_schema();
    throw ConfigError("no CSV schema for dataset '" + std::string(dataset) + "'");
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    Dataset data;
    data.name = schema.dataset_name;
    data.n_classes = schema.n_classes;
    data.class_names = schema.class_names;
    if (data.class_names.empty()) {
        for (std::size_t c = 0; c < schema.n_classes; ++c) data.class_names.push_back("class" + std::to_string(c));
    }
    data.input_dim = static_cast<std::size_t>(std::count_if(
        schema.columns.begin(), schema.columns.end(), [](const CsvColumn& c) { return c.role == ColumnRole::feature; }));

    std::string line;
    std::size_t line_no = 0;
    std::vector<double> x;
    std::size_t label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (auto err = parse_row(fields, schema, x, label)) {
            if (data.empty() && line_no == 1 && fields.size() == schema.columns.size()) continue;  // header
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + *err);
        }
        data.add(x, label, data.size());
    }
    if (data.empty()) throw DataError(path.string() + ": no samples");
    return data;
}

// --- IDX ---------------------------------------------------------------------

namespace {

struct GzCloser {
    void operator()(gzFile f) const { gzclose(f); }
};

/// Whole-file read through zlib, which passes uncompressed input through unchanged.
std::vector<unsigned char> read_maybe_gzip(const std::filesystem::path& path) {
    std::unique_ptr<gzFile_s, GzCloser> f(gzopen(path.string().c_str(), "rb"));
    if (!f) throw DataError("cannot open " + path.string());
    std::vector<unsigned char> out;
    std::array<unsigned char, 1 << 16> buf{};
    while (true) {
        const int n = gzread(f.get(), buf.data(), static_cast<unsigned>(buf.size()));
        if (n < 0) throw DataError(path.string() + ": read error after byte " + std::to_string(out.size()));
        if (n == 0) break;
        out.insert(out.end(), buf.begin(), buf.begin() + n);
    }
    return out;
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset, const std::filesystem::path& path) {
    if (offset + 4 > bytes.size()) {
        throw DataError(path.string() + ": truncated header at byte offset " + std::to_string(offset));
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 std::string name) {
    const auto img = read_maybe_gzip(images_path);
    const auto lab = read_maybe_gzip(labels_path);

    const std::uint32_t img_magic = read_be32(img, 0, images_path);
    if (img_magic != kIdxImagesMagic) {
        std::ostringstream msg;
        msg << images_path.string() << ": bad magic 0x" << std::hex << img_magic << " at byte offset 0 (expected 0x803)";
        throw DataError(msg.str());
    }
    const std::uint32_t lab_magic = read_be32(lab, 0, labels_path);
    if (lab_magic != kIdxLabelsMagic) {
        std::ostringstream msg;
        msg << labels_path.string() << ": bad magic 0x" << std::hex << lab_magic << " at byte offset 0 (expected 0x801)";
        throw DataError(msg.str());
    }
    const std::size_t count = read_be32(img, 4, images_path);
    const std::size_t rows = read_be32(img, 8, images_path);
    const std::size_t cols = read_be32(img, 12, images_path);
    const std::size_t label_count = read_be32(lab, 4, labels_path);
    if (count != label_count) {
        throw DataError("image count " + std::to_string(count) + " (byte offset 4 of " + images_path.string() +
                        ") does not match label count " + std::to_string(label_count));
    }
    const std::size_t pixels = rows * cols;
    const std::size_t need_img = 16 + count * pixels;
    if (img.size() < need_img) {
        throw DataError(images_path.string() + ": truncated at byte offset " + std::to_string(img.size()) +
                        ", expected " + std::to_string(need_img) + " bytes");
    }
    if (lab.size() < 8 + count) {
        throw DataError(labels_path.string() + ": truncated at byte offset " + std::to_string(lab.size()) +
                        ", expected " + std::to_string(8 + count) + " bytes");
    }

    Dataset data;
    data.name = std::move(name);
    data.input_dim = pixels;
    data.n_classes = 10;
    for (int d = 0; d < 10; ++d) data.class_names.push_back(std::to_string(d));
    data.features.resize(count * pixels);
    data.labels.resize(count);
    data.ids.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned char* src = img.data() + 16 + i * pixels;
        double* dst = data.features.data() + i * pixels;
        for (std::size_t p = 0; p < pixels; ++p) dst[p] = src[p] / 255.0;
        const unsigned char l = lab[8 + i];
        if (l > 9) {
            throw DataError(labels_path.string() + ": label " + std::to_string(l) + " at byte offset " +
                            std::to_string(8 + i) + " is not a digit");
        }
        data.labels[i] = l;
        data.ids[i] = i;
    }
    return data;
}

// --- Abalone -----------------------------------------------------------------

std::size_t bin_abalone_rings(long rings) {
    if (rings < 1 || rings > 29) throw DataError("ring count " + std::to_string(rings) + " outside 1..29");
    return static_cast<std::size_t>((rings - 1) / 5);
}

// --- Splitting -----------------------------------------------------------------

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& data) {
    std::vector<std::vector<std::size_t>> by_class(data.n_classes);
    for (std::size_t i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);
    return by_class;
}

std::size_t per_class_entry(const std::vector<std::size_t>& v, std::size_t cls) {
    return v.size() == 1 ? v.front() : v.at(cls);
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;

    if (spec.strategy == SplitSpec::Strategy::per_class_counts) {
        if (spec.train_per_class.empty() ||
            (spec.train_per_class.size() != 1 && spec.train_per_class.size() != data.n_classes) ||
            (spec.test_per_class.size() > 1 && spec.test_per_class.size() != data.n_classes)) {
            throw DataError("per-class split needs one count or one count per class");
        }
        auto by_class = indices_by_class(data);
        for (std::size_t c = 0; c < data.n_classes; ++c) {
            auto& idx = by_class[c];
            const std::size_t n_train = per_class_entry(spec.train_per_class, c);
            const std::size_t n_test =
                spec.test_per_class.empty() ? idx.size() - std::min(idx.size(), n_train) : per_class_entry(spec.test_per_class, c);
            if (n_train + n_test > idx.size()) {
                throw DataError("class " + data.class_names.at(c) + " has " + std::to_string(idx.size()) +
                                " samples, split asks for " + std::to_string(n_train) + "+" + std::to_string(n_test));
            }
            std::shuffle(idx.begin(), idx.end(), rng);
            train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
            test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                            idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
        }
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        std::shuffle(test_idx.begin(), test_idx.end(), rng);
    } else {
        std::size_t n_train = 0;
        if (spec.train_count) {
            n_train = *spec.train_count;
        } else {
            if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
                throw DataError("train fraction must lie in (0, 1)");
            }
            n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(data.size())));
        }
        if (n_train == 0 || n_train >= data.size()) {
            throw DataError("train size " + std::to_string(n_train) + " infeasible for " + std::to_string(data.size()) +
                            " samples");
        }
        std::vector<std::size_t> idx(data.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::shuffle(idx.begin(), idx.end(), rng);
        train_idx.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_idx.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    return {data.subset(train_idx), data.subset(test_idx)};
}

Dataset balance_binary_mnist(const Dataset& mnist, std::size_t digit, std::uint64_t seed,
                             std::optional<std::size_t> per_class) {
    if (digit > 9 || mnist.n_classes != 10) throw DataError("balance_binary_mnist needs a 10-class set and digit 0..9");
    std::mt19937_64 rng(seed);
    auto by_digit = indices_by_class(mnist);
    for (auto& v : by_digit) std::shuffle(v.begin(), v.end(), rng);

    const std::size_t half = std::min(per_class.value_or(by_digit[digit].size()), by_digit[digit].size());

    // Near-equal quotas over the nine other digits; a digit that runs short
    // hands its remainder to the others.
    std::vector<std::size_t> others;
    for (std::size_t d = 0; d < 10; ++d) {
        if (d != digit) others.push_back(d);
    }
    std::vector<std::size_t> quota(10, 0);
    std::size_t remaining = half;
    std::vector<std::size_t> open = others;
    while (remaining > 0 && !open.empty()) {
        const std::size_t base = remaining / open.size();
        std::size_t extra = remaining % open.size();
        std::vector<std::size_t> still_open;
        std::size_t assigned = 0;
        for (std::size_t d : open) {
            const std::size_t want = base + (extra > 0 ? 1 : 0);
            if (extra > 0) --extra;
            const std::size_t room = by_digit[d].size() - quota[d];
            const std::size_t take = std::min(want, room);
            quota[d] += take;
            assigned += take;
            if (quota[d] < by_digit[d].size()) still_open.push_back(d);
        }
        if (assigned == 0) break;
        remaining -= assigned;
        open = std::move(still_open);
    }
    if (remaining > 0) throw DataError("not enough non-" + std::to_string(digit) + " images to balance");

    Dataset out{mnist.name + "-" + std::to_string(digit) + "-vs-rest", mnist.input_dim, 2,
                {std::to_string(digit), "other"}, {}, {}, {}};
    std::vector<std::pair<std::size_t, std::size_t>> picks;  // (source index, new label)
    for (std::size_t k = 0; k < half; ++k) picks.emplace_back(by_digit[digit][k], 0);
    for (std::size_t d : others) {
        for (std::size_t k = 0; k < quota[d]; ++k) picks.emplace_back(by_digit[d][k], 1);
    }
    std::shuffle(picks.begin(), picks.end(), rng);
    out.features.reserve(picks.size() * mnist.input_dim);
    for (const auto& [src, label] : picks) out.add(mnist.row(src), label, mnist.ids[src]);
    return out;
}

// --- Normalization -------------------------------------------------------------

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::none: return "none";
        case Normalization::minmax: return "minmax";
        case Normalization::zscore: return "zscore";
    }
    return "none";
}

Normalization parse_normalization(std::string_view s) {
    if (s == "none") return Normalization::none;
    if (s == "minmax") return Normalization::minmax;
    if (s == "zscore") return Normalization::zscore;
    throw ConfigError("unknown normalization '" + std::string(s) + "' (expected none, minmax or zscore)");
}

FeatureScaler FeatureScaler::identity(std::size_t input_dim) {
    return {Normalization::none, std::vector<double>(input_dim, 0.0), std::vector<double>(input_dim, 1.0)};
}

FeatureScaler FeatureScaler::fit(const Dataset& train, Normalization method) {
    FeatureScaler s = identity(train.input_dim);
    s.method = method;
    if (method == Normalization::none || train.empty()) return s;
    const std::size_t d = train.input_dim;
    for (std::size_t f = 0; f < d; ++f) {
        double lo = train.features[f];
        double hi = lo;
        double sum = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const double v = train.features[i * d + f];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        if (method == Normalization::minmax) {
            if (hi > lo) {
                s.offset[f] = lo;
                s.scale[f] = hi - lo;
            }
        } else {
            const double mean = sum / static_cast<double>(train.size());
            double var = 0.0;
            for (std::size_t i = 0; i < train.size(); ++i) {
                const double dv = train.features[i * d + f] - mean;
                var += dv * dv;
            }
            const double sd = std::sqrt(var / static_cast<double>(train.size()));
            if (sd > 0.0) {
                s.offset[f] = mean;
                s.scale[f] = sd;
            }
        }
    }
    return s;
}

void FeatureScaler::apply(std::span<double> x) const {
    if (x.size() != offset.size()) {
        throw DataError("scaler fitted for d=" + std::to_string(offset.size()) + ", got d=" + std::to_string(x.size()));
    }
    for (std::size_t f = 0; f < x.size(); ++f) x[f] = (x[f] - offset[f]) / scale[f];
}

void FeatureScaler::apply(Dataset& data) const {
    if (method == Normalization::none) return;
    for (std::size_t i = 0; i < data.size(); ++i) apply(data.row(i));
}

std::pair<Dataset, Dataset> normalize(Dataset train, Dataset test, Normalization method) {
    const FeatureScaler s = FeatureScaler::fit(train, method);
    s.apply(train);
    s.apply(test);
    return {std::move(train), std::move(test)};
}

}  // namespace dqn
