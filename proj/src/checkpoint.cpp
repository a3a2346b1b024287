#include "dqn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "dqn/error.hpp"

namespace dqn {

namespace {

constexpr std::string_view kMagic = "DQNCKPT";

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void f64s(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void text(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
    std::vector<unsigned char>& bytes() { return out_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    std::vector<unsigned char> out_;
};

class Reader {
public:
    Reader(const std::vector<unsigned char>& b, std::size_t pos, std::string origin)
        : b_(b), pos_(pos), origin_(std::move(origin)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    double f64() { return std::bit_cast<double>(le(8)); }
    std::vector<double> f64s() {
        const std::uint64_t n = u64();
        if (n > (b_.size() - pos_) / 8) fail("checkpoint truncated");
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    std::string text(std::size_t n) {
        need(n);
        std::string s(b_.begin() + static_cast<std::ptrdiff_t>(pos_), b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(origin_ + ": " + what + " at byte " + std::to_string(pos_));
    }

private:
    void need(std::uint64_t n) const {
        if (n > b_.size() - pos_) fail("checkpoint truncated");
    }
    std::uint64_t le(int n) {
        need(static_cast<std::uint64_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
        return v;
    }
    const std::vector<unsigned char>& b_;
    std::size_t pos_;
    std::string origin_;
};

}  // namespace

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& c) {
    c.model.validate();
    const std::size_t n = c.model.n_qubits();
    const std::size_t d = c.model.input_dim();

    Writer w;
    w.text(std::string(kMagic) + " " + std::to_string(kCheckpointVersion) + "\n");
    w.text("# dataset=" + c.dataset + " n_qubits=" + std::to_string(n) + " input_dim=" + std::to_string(d) +
           " epoch=" + std::to_string(c.epoch) + " optimizer=" + to_string(c.optimizer.kind) + "\n");
    const std::size_t payload_start = w.bytes().size();

    w.u32(static_cast<std::uint32_t>(n));
    w.u32(static_cast<std::uint32_t>(d));
    for (double x : c.model.encoder.weights()) w.f64(x);
    for (const auto& p : c.model.su2) {
        w.f64(p.alpha1);
        w.f64(p.alpha2);
        w.f64(p.alpha3);
    }
    w.u64(c.epoch);

    const OptimizerState& o = c.optimizer;
    w.u8(o.kind == OptimizerKind::adam ? 0 : 1);
    w.f64(o.hyper.learning_rate);
    w.f64(o.hyper.beta1);
    w.f64(o.hyper.beta2);
    w.f64(o.hyper.rho);
    w.f64(o.hyper.epsilon);
    w.u64(o.step);
    w.f64s(o.m);
    w.f64s(o.v);

    w.u8(static_cast<std::uint8_t>(c.scaler.method));
    w.f64s(c.scaler.offset);
    w.f64s(c.scaler.scale);

    w.u32(static_cast<std::uint32_t>(c.dataset.size()));
    w.text(c.dataset);

    auto& bytes = w.bytes();
    w.u64(fnv1a(bytes.data() + payload_start, bytes.size() - payload_start));
    return std::move(bytes);
}

Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes, const std::string& origin) {
    // Text header: "DQNCKPT <version>\n" then one informational "# ..." line.
    const auto line_end = [&](std::size_t from) -> std::size_t {
        for (std::size_t i = from; i < bytes.size() && i < from + 4096; ++i) {
            if (bytes[i] == '\n') return i;
        }
        throw DataError(origin + ": not a checkpoint (missing header line)");
    };
    const std::size_t first = line_end(0);
    const std::string magic_line(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(first));
    if (magic_line.rfind(std::string(kMagic) + " ", 0) != 0) throw DataError(origin + ": not a checkpoint file");
    const std::string version = magic_line.substr(kMagic.size() + 1);
    if (version != std::to_string(kCheckpointVersion)) {
        throw DataError(origin + ": unsupported checkpoint version " + version + " (this build reads version " +
                        std::to_string(kCheckpointVersion) + ")");
    }
    if (first + 1 >= bytes.size() || bytes[first + 1] != '#') throw DataError(origin + ": malformed checkpoint header");
    const std::size_t payload_start = line_end(first + 1) + 1;

    if (bytes.size() < payload_start + 8) throw DataError(origin + ": checkpoint truncated");
    const std::size_t payload_end = bytes.size() - 8;
    Reader tail(bytes, payload_end, origin);
    if (tail.u64() != fnv1a(bytes.data() + payload_start, payload_end - payload_start)) {
        throw DataError(origin + ": checkpoint checksum mismatch (file corrupted or truncated)");
    }

    Reader r(bytes, payload_start, origin);
    const std::size_t n = r.u32();
    const std::size_t d = r.u32();
    if (n == 0 || d == 0) r.fail("empty model shape");
    if ((n * d + 3 * n) * 8 > payload_end - r.pos()) r.fail("model shape exceeds file size");
    std::vector<double> weights(n * d);
    for (auto& x : weights) x = r.f64();
    std::vector<Su2Params> su2(n);
    for (auto& p : su2) {
        p.alpha1 = r.f64();
        p.alpha2 = r.f64();
        p.alpha3 = r.f64();
    }
    std::optional<EncodingLayer> encoder;
    try {
        encoder.emplace(n, d, std::move(weights));
    } catch (const std::invalid_argument& e) {
        r.fail(std::string("invalid encoder weights: ") + e.what());
    }
    Checkpoint c{{std::move(*encoder), std::move(su2)}, {}, 0, {}, {}};
    c.epoch = r.u64();

    const std::uint8_t kind = r.u8();
    if (kind > 1) r.fail("unknown optimizer tag " + std::to_string(kind));
    c.optimizer.kind = kind == 0 ? OptimizerKind::adam : OptimizerKind::rmsprop;
    c.optimizer.hyper.learning_rate = r.f64();
    c.optimizer.hyper.beta1 = r.f64();
    c.optimizer.hyper.beta2 = r.f64();
    c.optimizer.hyper.rho = r.f64();
    c.optimizer.hyper.epsilon = r.f64();
    c.optimizer.step = r.u64();
    c.optimizer.m = r.f64s();
    c.optimizer.v = r.f64s();

    const std::uint8_t norm = r.u8();
    if (norm > 2) r.fail("unknown normalization tag " + std::to_string(norm));
    c.scaler.method = static_cast<Normalization>(norm);
    c.scaler.offset = r.f64s();
    c.scaler.scale = r.f64s();

    const std::uint32_t name_len = r.u32();
    c.dataset = r.text(name_len);
    if (r.pos() != payload_end) r.fail("unexpected trailing data");
    return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    const auto bytes = serialize_checkpoint(c);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeAbort("cannot write checkpoint " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw RuntimeAbort("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes, path.string());
}

}  // namespace dqn
