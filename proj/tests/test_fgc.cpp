#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "flexgs/adp.hpp"
#include "flexgs/fgc.hpp"
#include "flexgs/ply_io.hpp"
#include "test_helpers.hpp"

using namespace flexgs;
namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<unsigned char>& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

QuantizedModel quantize_fixture(uint64_t seed, std::size_t rows, std::size_t masked,
                                QuantizationPlan plan) {
    GaussianModel m = test::make_random_model(seed, rows, masked);
    return apply_quantization(m, plan);
}

}  // namespace

TEST_CASE("size formula, frozen values") {
    QuantizationPlan u8 = uniform_quantization_plan(8);
    u8.group_count = 1;
    // 91 fixed bytes + 59 (min,max) pairs + 10*59 one-byte codes.
    CHECK(estimate_compressed_size(10, 0, {{1.0, 0.0}, u8}) == 1153);
    // SH-pruned rows carry 14 channels.
    CHECK(estimate_compressed_size(0, 10, {{0.0, 0.0}, u8}) == 343);

    // Mixed widths (pos/op/scl/rot 8, SH 4), two groups per segment:
    // tables 8*(59+14)*2 = 1168, payload ceil((10*280 + 5*100)/8) = 413.
    QuantizationPlan mixed = default_quantization_plan();
    mixed.group_count = 2;
    CHECK(estimate_compressed_size(10, 5, {{2.0 / 3.0, 0.0}, mixed}) == 91 + 1168 + 413);

    // Empty segments contribute no tables and no payload.
    CHECK(estimate_compressed_size(0, 0, {{1.0, 0.0}, u8}) == 91);
}

TEST_CASE("write returns the estimate and the file matches it") {
    QuantizationPlan plan = default_quantization_plan();
    plan.group_count = 5;
    QuantizedModel qm = quantize_fixture(101, 40, 10, plan);
    qm.plan.prune = {0.75, 0.0};

    fs::path path = test::temp_path("basic.fgc");
    uint64_t written = write_fgc(qm, path);
    CHECK(written == estimate_compressed_size(30, 10, qm.plan));
    CHECK(fs::file_size(path) == written);

    auto bytes = slurp(path);
    CHECK(bytes[0] == 'F');
    CHECK(bytes[1] == 'G');
    CHECK(bytes[2] == 'C');
    CHECK(bytes[3] == '1');
    fs::remove(path);
}

TEST_CASE("round trip reproduces the quantized model exactly") {
    QuantizationPlan plan = default_quantization_plan();
    plan.group_count = 7;
    plan.int4_threshold_db = 0.375f;
    QuantizedModel qm = quantize_fixture(102, 33, 9, plan);
    qm.plan.prune = {0.5, 0.25};

    fs::path path = test::temp_path("roundtrip.fgc");
    write_fgc(qm, path);
    QuantizedModel back = read_fgc(path);
    fs::remove(path);

    CHECK(back.plan.prune.alpha == doctest::Approx(0.5));
    CHECK(back.plan.prune.beta == doctest::Approx(0.25));
    CHECK(back.plan.quant.group_count == 7);
    CHECK(back.plan.quant.int4_threshold_db == 0.375f);
    CHECK(back.plan.quant.bitwidths == plan.bitwidths);
    REQUIRE(back.full.rows == qm.full.rows);
    REQUIRE(back.sh_pruned.rows == qm.sh_pruned.rows);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        CHECK(back.full.channels[c].codes == qm.full.channels[c].codes);
        REQUIRE(back.full.channels[c].groups.size() == qm.full.channels[c].groups.size());
        for (std::size_t g = 0; g < qm.full.channels[c].groups.size(); ++g) {
            CHECK(back.full.channels[c].groups[g].min == qm.full.channels[c].groups[g].min);
            CHECK(back.full.channels[c].groups[g].max == qm.full.channels[c].groups[g].max);
        }
        CHECK(back.sh_pruned.channels[c].codes == qm.sh_pruned.channels[c].codes);
    }

    // And therefore the reconstructions agree bit for bit.
    GaussianModel a = dequantize_model(qm);
    GaussianModel b = dequantize_model(back);
    CHECK(a.data == b.data);
    CHECK(a.sh_mask == b.sh_mask);
}

TEST_CASE("4-bit codes pack two per byte, LSB first") {
    // One full row pair with known codes: build a tiny channel by hand.
    GaussianModel m = test::make_random_model(103, 2);
    QuantizationPlan plan = uniform_quantization_plan(4);
    plan.group_count = 1;
    QuantizedModel qm = apply_quantization(m, plan);

    fs::path path = test::temp_path("packing.fgc");
    uint64_t total = write_fgc(qm, path);
    auto bytes = slurp(path);
    fs::remove(path);
    REQUIRE(bytes.size() == total);

    // Payload starts right after the 91-byte prefix and the group tables
    // (59 channels x 1 group x 8 bytes).
    std::size_t payload = 91 + 59 * 8;
    // Channel 0 ("x") codes for rows 0 and 1 occupy the first payload byte.
    uint8_t c0 = qm.full.channels[0].codes[0];
    uint8_t c1 = qm.full.channels[0].codes[1];
    CHECK(bytes[payload] == uint8_t(c0 | (c1 << 4)));
}

TEST_CASE("reader rejects corrupted containers") {
    QuantizationPlan plan = default_quantization_plan();
    plan.group_count = 3;
    QuantizedModel qm = quantize_fixture(104, 12, 4, plan);
    fs::path path = test::temp_path("corrupt.fgc");
    write_fgc(qm, path);
    auto good = slurp(path);

    SUBCASE("bad magic") {
        auto bad = good;
        bad[0] = 'X';
        spit(path, bad);
        CHECK_THROWS_AS(read_fgc(path), FormatError);
    }
    SUBCASE("unsupported version") {
        auto bad = good;
        bad[4] = 9;
        spit(path, bad);
        CHECK_THROWS_AS(read_fgc(path), FormatError);
    }
    SUBCASE("zero group count") {
        auto bad = good;
        bad[24] = bad[25] = bad[26] = bad[27] = 0;
        spit(path, bad);
        CHECK_THROWS_AS(read_fgc(path), FormatError);
    }
    SUBCASE("illegal bitwidth") {
        auto bad = good;
        bad[32] = 5;
        spit(path, bad);
        CHECK_THROWS_AS(read_fgc(path), FormatError);
    }
    SUBCASE("truncated payload") {
        auto bad = good;
        bad.pop_back();
        spit(path, bad);
        CHECK_THROWS_AS(read_fgc(path), FormatError);
    }
    SUBCASE("trailing garbage") {
        auto bad = good;
        bad.push_back(0);
        spit(path, bad);
        try {
            read_fgc(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            // The message states expected vs actual size.
            CHECK(std::string(e.what()).find(std::to_string(good.size())) != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_fgc("/nonexistent/nope.fgc"), FormatError);
    }
    fs::remove(path);
}

TEST_CASE("random models and plans round trip bit-exactly") {
    CounterRng rng(105);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t rows = 1 + rng.next_below(120);
        std::size_t masked = rng.next_below(rows + 1);
        QuantizationPlan plan;
        for (auto& b : plan.bitwidths) b = rng.next_below(2) ? 8 : 4;
        plan.group_count = uint32_t(1 + rng.next_below(40));

        GaussianModel m = test::make_random_model(1000 + uint64_t(trial), rows, masked);
        QuantizedModel qm = apply_quantization(m, plan);
        qm.plan.prune = {rng.next(0.0, 0.6), rng.next(0.0, 0.4)};

        fs::path path = test::temp_path("fuzz.fgc");
        uint64_t written = write_fgc(qm, path);
        CHECK(written == estimate_compressed_size(qm.full.rows, qm.sh_pruned.rows, qm.plan));

        GaussianModel direct = dequantize_model(qm);
        GaussianModel via_file = dequantize_model(read_fgc(path));
        fs::remove(path);
        CHECK(direct.data == via_file.data);
        CHECK(direct.sh_mask == via_file.sh_mask);
    }
}
