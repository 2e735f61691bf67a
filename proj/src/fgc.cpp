#include "flexgs/fgc.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "flexgs/ply_io.hpp"

namespace flexgs {

namespace {

constexpr uint64_t kHeaderBytes = 16;
constexpr uint64_t kPlanBytes = 4 + 4 + 4 + 4 + kChannelCount;  // 75

uint64_t table_bytes(std::size_t n_full, std::size_t n_shp, uint32_t group_count) {
    return 8ULL * (kChannelCount * quant_group_count(n_full, group_count) +
                   kNonShAdvCount * quant_group_count(n_shp, group_count));
}

uint64_t payload_bits(std::size_t n_full, std::size_t n_shp, const QuantizationPlan& q) {
    uint64_t bits = 0;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        bits += uint64_t(n_full) * q.bitwidths[c];
        if (!is_sh_adv_channel(c)) bits += uint64_t(n_shp) * q.bitwidths[c];
    }
    return bits;
}

class ByteWriter {
public:
    explicit ByteWriter(std::vector<uint8_t>& buf) : buf_(buf) {}
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void f32(float v) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void u8(uint8_t v) { buf_.push_back(v); }

private:
    std::vector<uint8_t>& buf_;
};

class ByteReader {
public:
    ByteReader(const uint8_t* data, std::size_t size) : data_(data), size_(size) {}
    uint32_t u32() {
        require(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(data_[pos_ + std::size_t(i)]) << (8 * i);
        pos_ += 4;
        return v;
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    uint8_t u8() {
        require(1);
        return data_[pos_++];
    }
    std::size_t pos() const { return pos_; }

private:
    void require(std::size_t n) {
        if (pos_ + n > size_)
            throw FormatError("fgc: truncated payload (need " + std::to_string(pos_ + n) +
                              " bytes, have " + std::to_string(size_) + ")");
    }
    const uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

class BitWriter {
public:
    explicit BitWriter(std::vector<uint8_t>& buf) : buf_(buf) {}
    void put(uint32_t value, int bits) {
        for (int i = 0; i < bits; ++i) {
            if (cursor_ == 0) buf_.push_back(0);
            if (value & (1u << i)) buf_.back() |= uint8_t(1u << cursor_);
            cursor_ = (cursor_ + 1) & 7;
        }
    }

private:
    std::vector<uint8_t>& buf_;
    int cursor_ = 0;
};

class BitReader {
public:
    BitReader(const uint8_t* data, std::size_t size_bytes) : data_(data), bits_(size_bytes * 8) {}
    uint32_t get(int bits) {
        uint32_t v = 0;
        for (int i = 0; i < bits; ++i) {
            if (pos_ >= bits_) throw FormatError("fgc: bitstream overrun");
            if (data_[pos_ >> 3] & (1u << (pos_ & 7))) v |= 1u << i;
            ++pos_;
        }
        return v;
    }

private:
    const uint8_t* data_;
    std::size_t bits_;
    std::size_t pos_ = 0;
};

void write_segment_tables(ByteWriter& w, const QuantizedSegment& seg, bool sh_pruned,
                          uint32_t group_count) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (sh_pruned && is_sh_adv_channel(c)) continue;
        const auto& qc = seg.channels[c];
        if (qc.groups.size() != quant_group_count(seg.rows, group_count))
            throw FormatError("fgc: group table shape mismatch");
        for (const GroupRange& g : qc.groups) {
            w.f32(g.min);
            w.f32(g.max);
        }
    }
}

void write_segment_codes(BitWriter& w, const QuantizedSegment& seg, bool sh_pruned,
                         const QuantizationPlan& plan) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (sh_pruned && is_sh_adv_channel(c)) continue;
        const auto& qc = seg.channels[c];
        if (qc.codes.size() != seg.rows) throw FormatError("fgc: code count mismatch");
        for (uint8_t code : qc.codes) w.put(code, plan.bitwidths[c]);
    }
}

void read_segment_tables(ByteReader& r, QuantizedSegment& seg, bool sh_pruned,
                         uint32_t group_count) {
    std::size_t groups = quant_group_count(seg.rows, group_count);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (sh_pruned && is_sh_adv_channel(c)) continue;
        auto& qc = seg.channels[c];
        qc.groups.resize(groups);
        for (auto& g : qc.groups) {
            g.min = r.f32();
            g.max = r.f32();
        }
    }
}

void read_segment_codes(BitReader& r, QuantizedSegment& seg, bool sh_pruned,
                        const QuantizationPlan& plan) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (sh_pruned && is_sh_adv_channel(c)) continue;
        auto& qc = seg.channels[c];
        qc.codes.resize(seg.rows);
        for (std::size_t i = 0; i < seg.rows; ++i)
            qc.codes[i] = uint8_t(r.get(plan.bitwidths[c]));
    }
}

}  // namespace

uint64_t estimate_compressed_size(std::size_t n_full, std::size_t n_shpruned,
                                  const CompressionPlan& plan) {
    uint64_t bits = payload_bits(n_full, n_shpruned, plan.quant);
    return kHeaderBytes + kPlanBytes + table_bytes(n_full, n_shpruned, plan.quant.group_count) +
           (bits + 7) / 8;
}

uint64_t write_fgc(const QuantizedModel& qm, const std::filesystem::path& path) {
    std::vector<uint8_t> buf;
    buf.reserve(estimate_compressed_size(qm.full.rows, qm.sh_pruned.rows, qm.plan));
    ByteWriter w(buf);
    for (char c : kFgcMagic) buf.push_back(uint8_t(c));
    w.u32(kFgcVersion);
    w.u32(uint32_t(qm.full.rows));
    w.u32(uint32_t(qm.sh_pruned.rows));
    w.f32(float(qm.plan.prune.alpha));
    w.f32(float(qm.plan.prune.beta));
    w.u32(qm.plan.quant.group_count);
    w.f32(qm.plan.quant.int4_threshold_db);
    for (uint8_t b : qm.plan.quant.bitwidths) w.u8(b);

    write_segment_tables(w, qm.full, false, qm.plan.quant.group_count);
    write_segment_tables(w, qm.sh_pruned, true, qm.plan.quant.group_count);

    BitWriter bits(buf);
    write_segment_codes(bits, qm.full, false, qm.plan.quant);
    write_segment_codes(bits, qm.sh_pruned, true, qm.plan.quant);

    const uint64_t expected = estimate_compressed_size(qm.full.rows, qm.sh_pruned.rows, qm.plan);
    if (buf.size() != expected)
        throw FormatError("fgc: serialized size diverged from the analytic formula");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw FormatError("short write to " + path.string());
    return buf.size();
}

QuantizedModel read_fgc(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());

    if (buf.size() < kHeaderBytes + kPlanBytes)
        throw FormatError(path.string() + ": truncated container header");
    if (std::memcmp(buf.data(), kFgcMagic, 4) != 0)
        throw FormatError(path.string() + ": bad magic (not an FGC container)");

    ByteReader r(buf.data() + 4, buf.size() - 4);
    uint32_t version = r.u32();
    if (version != kFgcVersion)
        throw FormatError(path.string() + ": unsupported container version " +
                          std::to_string(version));

    QuantizedModel qm;
    qm.full.rows = r.u32();
    qm.sh_pruned.rows = r.u32();
    qm.plan.prune.alpha = r.f32();
    qm.plan.prune.beta = r.f32();
    qm.plan.quant.group_count = r.u32();
    if (qm.plan.quant.group_count == 0)
        throw FormatError(path.string() + ": group_count must be >= 1");
    qm.plan.quant.int4_threshold_db = r.f32();
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        uint8_t b = r.u8();
        if (b != 4 && b != 8)
            throw FormatError(path.string() + ": unsupported bit-width " + std::to_string(b));
        qm.plan.quant.bitwidths[c] = b;
    }

    const uint64_t expected = estimate_compressed_size(qm.full.rows, qm.sh_pruned.rows, qm.plan);
    if (buf.size() != expected)
        throw FormatError(path.string() + ": container size mismatch (expected " +
                          std::to_string(expected) + " bytes, have " +
                          std::to_string(buf.size()) + ")");

    read_segment_tables(r, qm.full, false, qm.plan.quant.group_count);
    read_segment_tables(r, qm.sh_pruned, true, qm.plan.quant.group_count);

    BitReader bits(buf.data() + 4 + r.pos(), buf.size() - 4 - r.pos());
    read_segment_codes(bits, qm.full, false, qm.plan.quant);
    read_segment_codes(bits, qm.sh_pruned, true, qm.plan.quant);
    return qm;
}

}  // namespace flexgs
