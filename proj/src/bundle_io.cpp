#include "ywlab/bundle_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "ywlab/errors.hpp"

namespace ywlab {

namespace {

constexpr std::uint8_t kMagic[4] = {'Y', 'W', 'N', 'B'};

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64s(const std::vector<double>& vs) {
        for (double v : vs) f64(v);
    }
    void bytes(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void need(std::uint64_t n) const {
        if (n > in_.size() - pos_) throw DecodeError("bundle stream truncated");
    }
    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    /// Reads a count of items each at least `item_bytes` long, rejecting
    /// counts the remaining stream cannot hold before anything is allocated.
    std::uint64_t count(std::uint64_t item_bytes) {
        const std::uint64_t n = u64();
        if (item_bytes > 0 && n > (in_.size() - pos_) / item_bytes) throw DecodeError("bundle length field corrupt");
        return n;
    }
    std::vector<double> f64s(std::uint64_t n) {
        need(n * 8);
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    std::string text(std::uint64_t n) {
        need(n);
        std::string s(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                      in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const NoiseBundle& b) {
    Writer w;
    for (auto c : kMagic) w.u8(c);
    w.u32(kBundleFormatVersion);
    w.u8(1);
    w.u64(b.master_seed);
    w.u64(b.streams.family);
    w.u64(b.streams.path);
    w.u64(b.config_digest);

    w.u64(b.wiener.grid.size());
    w.f64s(b.wiener.grid);
    w.u64(b.wiener.modes);
    w.f64s(b.wiener.increments);

    const auto& p = b.prm;
    w.f64(p.horizon);
    w.u64(p.intensity_id.size());
    w.bytes(p.intensity_id);
    w.u64(p.dimension);
    w.u64(p.layers_simulated);
    w.f64(p.discarded_tail_bound);
    w.u64(p.atoms.size());
    for (std::size_t i = 0; i < p.atoms.size(); ++i) {
        w.f64(p.atoms[i].time);
        w.u64(p.atoms[i].layer);
        w.u64(p.atoms[i].seq);
        for (double z : p.mark(i)) w.f64(z);
    }

    w.u64(b.initial.size());
    w.f64s(b.initial);
    return w.take();
}

NoiseBundle deserialize(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    for (auto c : kMagic)
        if (r.u8() != c) throw DecodeError("not a bundle stream (bad magic)");
    const auto version = r.u32();
    if (version != kBundleFormatVersion)
        throw DecodeError("bundle format version " + std::to_string(version) + " is not supported");
    if (r.u8() != 1) throw DecodeError("unsupported endianness flag");

    NoiseBundle b;
    b.master_seed = r.u64();
    b.streams.family = r.u64();
    b.streams.path = r.u64();
    b.config_digest = r.u64();

    const auto grid_points = r.count(8);
    b.wiener.grid = r.f64s(grid_points);
    b.wiener.modes = r.u64();
    const std::uint64_t cells = grid_points == 0 ? 0 : grid_points - 1;
    if (b.wiener.modes != 0 && cells > (bytes.size() / 8) / b.wiener.modes)
        throw DecodeError("bundle length field corrupt");
    b.wiener.increments = r.f64s(cells * b.wiener.modes);

    auto& p = b.prm;
    p.horizon = r.f64();
    p.intensity_id = r.text(r.count(1));
    p.dimension = r.u64();
    if (p.dimension == 0 || p.dimension > 64) throw DecodeError("bundle mark dimension corrupt");
    p.layers_simulated = r.u64();
    p.discarded_tail_bound = r.f64();
    const auto atoms = r.count(24 + 8 * p.dimension);
    p.atoms.resize(atoms);
    p.marks.resize(atoms * p.dimension);
    for (std::uint64_t i = 0; i < atoms; ++i) {
        p.atoms[i].time = r.f64();
        p.atoms[i].layer = r.u64();
        p.atoms[i].seq = r.u64();
        for (std::uint64_t d = 0; d < p.dimension; ++d) p.marks[i * p.dimension + d] = r.f64();
    }

    b.initial = r.f64s(r.count(8));
    if (!r.done()) throw DecodeError("trailing bytes after bundle");
    return b;
}

void write_bundle_file(const std::string& path, const NoiseBundle& bundle) {
    const auto bytes = serialize(bundle);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InfrastructureError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InfrastructureError("write to '" + path + "' failed");
}

NoiseBundle read_bundle_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InfrastructureError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace ywlab
