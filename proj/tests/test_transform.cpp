#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ambra/encode.hpp"
#include "ambra/rotation.hpp"
#include "ambra/transform.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ambra;

namespace {

RotationSpec random_rotation(std::mt19937& gen) {
    std::uniform_real_distribution<double> full(-kPi, kPi);
    std::uniform_real_distribution<double> half(-kPi / 2.0, kPi / 2.0);
    return {full(gen), half(gen), full(gen)};
}

Direction rotated_direction(const Mat3& r, const Direction& d) {
    return Direction::from_unit_vector(rotate_vector(r, d.unit_vector()));
}

double per_order_energy(const AmbisonicBuffer& buffer, int n) {
    double acc = 0.0;
    for (int k = n * n; k < (n + 1) * (n + 1); ++k)
        for (const double v : buffer.channel(static_cast<std::size_t>(k))) acc += v * v;
    return acc;
}

}  // namespace

TEST_CASE("identity rotation is bit identical") {
    auto gen = oracles::rng(41);
    const AmbisonicBuffer buffer =
        encode_source(oracles::random_signal(gen, 64), 48000.0, Direction(0.4, -0.2), 5);
    const AmbisonicBuffer out = rotate(buffer, RotationSpec{});
    CHECK(out.samples() == buffer.samples());
}

TEST_CASE("rotation blocks match the quadrature-projection oracle") {
    auto gen = oracles::rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat3 r = random_rotation(gen).matrix();
        const auto blocks = sh_rotation_blocks(r, 7);
        for (int n = 0; n <= 7; ++n) {
            const auto expected = oracles::rotation_block_by_projection(r, n);
            REQUIRE(blocks[static_cast<std::size_t>(n)].size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i)
                CHECK(blocks[static_cast<std::size_t>(n)][i] ==
                      doctest::Approx(expected[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("yaw moves a front source to the left") {
    auto gen = oracles::rng(43);
    const auto signal = oracles::random_signal(gen, 64);
    const AmbisonicBuffer front = encode_source(signal, 48000.0, Direction(0.0, 0.0), 3);
    const AmbisonicBuffer turned = rotate(front, RotationSpec{kPi / 2.0, 0.0, 0.0});
    const AmbisonicBuffer left = encode_source(signal, 48000.0, Direction(kPi / 2.0, 0.0), 3);
    CHECK(testutil::max_abs_diff(turned.samples(), left.samples()) < 1e-10);
}

TEST_CASE("rotating there and back returns the input") {
    auto gen = oracles::rng(44);
    std::uniform_real_distribution<double> angles(-kPi, kPi);
    for (int order = 1; order <= 7; ++order) {
        const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 32),
                                                     48000.0, oracles::random_direction(gen),
                                                     order);
        for (int trial = 0; trial < 3; ++trial) {
            const double theta = angles(gen);
            const AmbisonicBuffer back = rotate(rotate(buffer, RotationSpec{theta, 0, 0}),
                                                RotationSpec{-theta, 0, 0});
            CHECK(testutil::max_abs_diff(back.samples(), buffer.samples()) < 1e-10);
        }
    }
}

TEST_CASE("rotation commutes with encoding") {
    auto gen = oracles::rng(45);
    const auto signal = oracles::random_signal(gen, 16);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int order = 1 + static_cast<int>(gen() % 7u);
        const Direction d = oracles::random_direction(gen);
        const Mat3 r = random_rotation(gen).matrix();
        const AmbisonicBuffer rotated =
            rotate(encode_source(signal, 48000.0, d, order), r);
        const AmbisonicBuffer direct =
            encode_source(signal, 48000.0, rotated_direction(r, d), order);
        worst = std::max(worst, testutil::max_abs_diff(rotated.samples(), direct.samples()));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("rotation preserves per-order energy") {
    auto gen = oracles::rng(46);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 64), 48000.0,
                                                 oracles::random_direction(gen), 6);
    const AmbisonicBuffer out = rotate(buffer, random_rotation(gen));
    for (int n = 0; n <= 6; ++n) {
        const double before = per_order_energy(buffer, n);
        const double after = per_order_energy(out, n);
        CHECK(after == doctest::Approx(before).epsilon(1e-10));
    }
}

TEST_CASE("rotation composition matches composed matrices") {
    auto gen = oracles::rng(47);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 32), 48000.0,
                                                 oracles::random_direction(gen), 7);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat3 r1 = random_rotation(gen).matrix();
        const Mat3 r2 = random_rotation(gen).matrix();
        Mat3 composed{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                composed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0.0;
                for (int k = 0; k < 3; ++k)
                    composed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                        r2[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                        r1[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            }
        const AmbisonicBuffer two_steps = rotate(rotate(buffer, r1), r2);
        const AmbisonicBuffer one_step = rotate(buffer, composed);
        CHECK(testutil::max_abs_diff(two_steps.samples(), one_step.samples()) < 1e-9);
    }
}

TEST_CASE("mirroring twice is the identity") {
    auto gen = oracles::rng(48);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 48), 48000.0,
                                                 oracles::random_direction(gen), 4);
    for (const MirrorPlane plane :
         {MirrorPlane::LeftRight, MirrorPlane::FrontBack, MirrorPlane::TopBottom}) {
        const AmbisonicBuffer twice = mirror(mirror(buffer, plane), plane);
        CHECK(twice.samples() == buffer.samples());
    }
}

TEST_CASE("mirrors equal re-encoding from the mirrored direction") {
    auto gen = oracles::rng(49);
    const auto signal = oracles::random_signal(gen, 16);
    auto mirrored_direction = [](MirrorPlane plane, const Direction& d) {
        auto v = d.unit_vector();
        switch (plane) {
            case MirrorPlane::LeftRight: v[1] = -v[1]; break;
            case MirrorPlane::FrontBack: v[0] = -v[0]; break;
            case MirrorPlane::TopBottom: v[2] = -v[2]; break;
        }
        return Direction::from_unit_vector(v);
    };
    for (const MirrorPlane plane :
         {MirrorPlane::LeftRight, MirrorPlane::FrontBack, MirrorPlane::TopBottom}) {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const Direction d = oracles::random_direction(gen);
            const AmbisonicBuffer flipped =
                mirror(encode_source(signal, 48000.0, d, 5), plane);
            const AmbisonicBuffer direct =
                encode_source(signal, 48000.0, mirrored_direction(plane, d), 5);
            worst =
                std::max(worst, testutil::max_abs_diff(flipped.samples(), direct.samples()));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("a left-right mirror swaps the 45-degree source") {
    auto gen = oracles::rng(50);
    const auto signal = oracles::random_signal(gen, 32);
    const AmbisonicBuffer flipped =
        mirror(encode_source(signal, 48000.0, Direction(kPi / 4.0, 0.0), 3),
               MirrorPlane::LeftRight);
    const AmbisonicBuffer direct =
        encode_source(signal, 48000.0, Direction(-kPi / 4.0, 0.0), 3);
    CHECK(testutil::max_abs_diff(flipped.samples(), direct.samples()) <= 1e-12);
}

TEST_CASE("a top-bottom mirror fixes horizontal scenes") {
    auto gen = oracles::rng(51);
    const AmbisonicBuffer buffer =
        encode_source(oracles::random_signal(gen, 32), 48000.0, Direction(1.1, 0.0), 4);
    const AmbisonicBuffer flipped = mirror(buffer, MirrorPlane::TopBottom);
    CHECK(flipped.samples() == buffer.samples());
}

TEST_CASE("mirror planes commute with rotations about their normal") {
    auto gen = oracles::rng(52);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 32), 48000.0,
                                                 oracles::random_direction(gen), 5);
    struct Pair {
        MirrorPlane plane;
        RotationSpec spec;  // a rotation about the plane's normal
    };
    const Pair pairs[] = {
        {MirrorPlane::TopBottom, {0.9, 0.0, 0.0}},   // z normal: yaw
        {MirrorPlane::LeftRight, {0.0, 0.77, 0.0}},  // y normal: pitch
        {MirrorPlane::FrontBack, {0.0, 0.0, 1.3}},   // x normal: roll
    };
    for (const Pair& pair : pairs) {
        const AmbisonicBuffer a = mirror(rotate(buffer, pair.spec), pair.plane);
        const AmbisonicBuffer b = rotate(mirror(buffer, pair.plane), pair.spec);
        CHECK(testutil::max_abs_diff(a.samples(), b.samples()) < 1e-10);
    }
}

TEST_CASE("unit directional gain is the identity") {
    auto gen = oracles::rng(53);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 64), 48000.0,
                                                 oracles::random_direction(gen), 3);
    const AmbisonicBuffer same =
        directional_gain(buffer, [](const Direction&) { return 1.0; });
    CHECK(testutil::max_abs_diff(same.samples(), buffer.samples()) < 1e-10);

    const AmbisonicBuffer silent =
        directional_gain(buffer, [](const Direction&) { return 0.0; });
    for (std::size_t ch = 0; ch < silent.channels(); ++ch)
        for (const double v : silent.channel(ch)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("a coarse grid is rejected") {
    auto gen = oracles::rng(54);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 8), 48000.0,
                                                 Direction(0, 0), 4);
    const QuadratureGrid grid = quadrature_grid(6);
    const std::vector<double> unit(grid.size(), 1.0);
    CHECK_THROWS_AS(directional_gain(buffer, grid, unit), InvalidArgument);
}

TEST_CASE("front-hemisphere window separates antipodal sources") {
    auto gen = oracles::rng(55);
    const auto signal = oracles::random_signal(gen, 32);
    const AmbisonicBuffer front = encode_source(signal, 48000.0, Direction(0.0, 0.0), 3);
    const AmbisonicBuffer rear = encode_source(signal, 48000.0, Direction(kPi, 0.0), 3);
    const SpatialWindow window(Direction(0.0, 0.0), kPi / 3.0, 2.0 * kPi / 3.0);
    const auto weight = [&window](const Direction& d) { return window.weight(d); };

    const AmbisonicBuffer front_out = directional_gain(front, weight);
    const AmbisonicBuffer rear_out = directional_gain(rear, weight);
    const double front_db =
        20.0 * std::log10(testutil::rms(front_out.channel(0)) /
                          testutil::rms(front.channel(0)));
    const double rear_db = 20.0 * std::log10(testutil::rms(rear_out.channel(0)) /
                                             testutil::rms(rear.channel(0)));
    CHECK(std::abs(front_db) < 1.0);  // the kept source barely moves
    CHECK(rear_db < -6.0);            // the suppressed source drops hard
}

TEST_CASE("identity warp is the identity") {
    auto gen = oracles::rng(56);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 48), 48000.0,
                                                 oracles::random_direction(gen), 4);
    const AmbisonicBuffer same = directional_warp(buffer, [](double el) { return el; });
    CHECK(testutil::max_abs_diff(same.samples(), buffer.samples()) < 1e-10);
}

TEST_CASE("a squashing warp halves the source elevation") {
    auto gen = oracles::rng(57);
    const auto signal = oracles::random_signal(gen, 16);
    const AmbisonicBuffer buffer =
        encode_source(signal, 48000.0, Direction(0.3, kPi / 3.0), 5);
    // Content moves el -> el/2.
    const AmbisonicBuffer warped =
        directional_warp(buffer, [](double el) { return el / 2.0; });
    std::vector<double> coeffs(warped.channels());
    for (std::size_t ch = 0; ch < warped.channels(); ++ch)
        coeffs[ch] = warped.channel(ch)[0] / signal[0];
    const Direction dominant = oracles::dominant_direction(coeffs);
    // Order-5 truncation of the squashed beam biases rE a few degrees
    // upward; the oracle run put it at 34.2 degrees for the 30-degree image.
    CHECK(std::abs(dominant.elevation - kPi / 6.0) < 6.0 * kPi / 180.0);
    CHECK(std::abs(dominant.azimuth - 0.3) < 1.0 * kPi / 180.0);
}

TEST_CASE("horizontal sources survive elevation warps that fix the plane") {
    auto gen = oracles::rng(58);
    const auto signal = oracles::random_signal(gen, 16);
    const AmbisonicBuffer buffer =
        encode_source(signal, 48000.0, Direction(-0.9, 0.0), 5);
    const AmbisonicBuffer warped =
        directional_warp(buffer, [](double el) { return el / 1.8; });
    std::vector<double> coeffs(warped.channels());
    for (std::size_t ch = 0; ch < warped.channels(); ++ch)
        coeffs[ch] = warped.channel(ch)[0] / signal[0];
    const Direction dominant = oracles::dominant_direction(coeffs);
    CHECK(std::abs(dominant.elevation) < 1.0 * kPi / 180.0);
    CHECK(std::abs(dominant.azimuth - (-0.9)) < 1.0 * kPi / 180.0);
}

TEST_CASE("direction reversals in the warp map are rejected") {
    auto gen = oracles::rng(59);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 8), 48000.0,
                                                 Direction(0, 0), 2);
    CHECK_THROWS_AS(directional_warp(buffer, [](double el) { return -std::sin(3.0 * el); }),
                    InvalidArgument);
}

TEST_CASE("unit envelope is bit identical") {
    auto gen = oracles::rng(60);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 64), 48000.0,
                                                 oracles::random_direction(gen), 3);
    const std::vector<double> unit = {1.0};
    CHECK(apply_gain_envelope(buffer, unit).samples() == buffer.samples());
}

TEST_CASE("uniform processing commutes with encoding") {
    auto gen = oracles::rng(61);
    const auto signal = oracles::random_signal(gen, 64);
    const Direction d = oracles::random_direction(gen);
    std::vector<double> envelope(64);
    for (std::size_t i = 0; i < 64; ++i) envelope[i] = 1.0 - static_cast<double>(i) / 64.0;

    const AmbisonicBuffer faded =
        apply_gain_envelope(encode_source(signal, 48000.0, d, 3), envelope);
    std::vector<double> faded_signal(64);
    for (std::size_t i = 0; i < 64; ++i) faded_signal[i] = signal[i] * envelope[i];
    const AmbisonicBuffer direct = encode_source(faded_signal, 48000.0, d, 3);
    CHECK(testutil::max_abs_diff(faded.samples(), direct.samples()) <= 1e-12);
}

TEST_CASE("FIR filtering commutes with rotation") {
    auto gen = oracles::rng(62);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 128), 48000.0,
                                                 oracles::random_direction(gen), 4);
    const auto taps = oracles::random_signal(gen, 9);
    const RotationSpec spec = random_rotation(gen);
    const AmbisonicBuffer a = rotate(apply_fir(buffer, taps), spec);
    const AmbisonicBuffer b = apply_fir(rotate(buffer, spec), taps);
    CHECK(testutil::max_abs_diff(a.samples(), b.samples()) < 1e-10);
    CHECK(a.frames() == buffer.frames());
}

TEST_CASE("ratio-1 compression is bit identical") {
    auto gen = oracles::rng(63);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 256), 48000.0,
                                                 oracles::random_direction(gen), 2);
    CompressorParams params;
    params.ratio = 1.0;
    CHECK(compress(buffer, params).samples() == buffer.samples());
}

TEST_CASE("the static curve lands a -8 dBFS sine at -17 dBFS") {
    const double rate = 48000.0;
    const std::size_t frames = static_cast<std::size_t>(rate);  // 1 s
    const double amplitude = std::pow(10.0, -8.0 / 20.0);
    const auto signal = testutil::sine(100.0, rate, frames, amplitude);
    const AmbisonicBuffer buffer = encode_source(signal, rate, Direction(0.0, 0.0), 1);

    CompressorParams params;
    params.threshold_db = -20.0;
    params.ratio = 4.0;
    params.attack_ms = 0.1;  // track the crest of the slow carrier
    params.release_ms = 400.0;
    params.detector = DetectorType::Peak;
    const AmbisonicBuffer out = compress(buffer, params);

    // Steady state: peak level over the last quarter second.
    const auto ch0 = out.channel(0);
    const double peak =
        testutil::max_abs(ch0.subspan(frames - static_cast<std::size_t>(rate / 4.0)));
    const double peak_db = 20.0 * std::log10(peak);
    CHECK(std::abs(peak_db - (-17.0)) < 0.1);
}

TEST_CASE("compression preserves inter-channel sample ratios") {
    auto gen = oracles::rng(64);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 512), 48000.0,
                                                 Direction(0.7, 0.3), 2);
    CompressorParams params;
    params.threshold_db = -12.0;
    params.ratio = 3.0;
    const AmbisonicBuffer out = compress(buffer, params);
    for (std::size_t i = 0; i < out.frames(); ++i) {
        const double in0 = buffer.channel(0)[i];
        if (in0 == 0.0) continue;
        const double g = out.channel(0)[i] / in0;  // rounded view of the shared gain
        for (std::size_t ch = 1; ch < out.channels(); ++ch)
            CHECK(out.channel(ch)[i] ==
                  doctest::Approx(g * buffer.channel(ch)[i]).epsilon(1e-14));
    }
}

TEST_CASE("segment plus residual reproduces the scene") {
    auto gen = oracles::rng(65);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 64), 48000.0,
                                                 oracles::random_direction(gen), 3);
    const SpatialWindow window(Direction(0.5, 0.2), kPi / 6.0, kPi / 2.0);
    const auto [segment, residual] = extract_segment(buffer, window);
    const AmbisonicBuffer rebuilt = mix(segment, residual);
    CHECK(testutil::max_abs_diff(rebuilt.samples(), buffer.samples()) <= 1e-12);
}

TEST_CASE("a window centered on a lone source keeps its omni energy") {
    auto gen = oracles::rng(66);
    const Direction d(0.4, -0.3);
    const AmbisonicBuffer buffer =
        encode_source(oracles::random_signal(gen, 64), 48000.0, d, 3);
    const SpatialWindow window(d, kPi / 4.0, kPi / 2.0);
    const auto [segment, residual] = extract_segment(buffer, window);
    const double kept = testutil::rms(segment.channel(0));
    const double original = testutil::rms(buffer.channel(0));
    CHECK(kept * kept >= 0.9 * original * original);
}

TEST_CASE("an all-pass window extracts everything") {
    auto gen = oracles::rng(67);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 64), 48000.0,
                                                 oracles::random_direction(gen), 3);
    const SpatialWindow window(Direction(0, 0), kPi, kPi);
    const auto [segment, residual] = extract_segment(buffer, window);
    CHECK(testutil::max_abs_diff(segment.samples(), buffer.samples()) < 1e-10);
    for (std::size_t ch = 0; ch < residual.channels(); ++ch)
        for (const double v : residual.channel(ch)) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("horizontal subsets keep the sectoral channels") {
    CHECK(horizontal_acn_indices(2) == std::vector<int>{0, 1, 3, 4, 8});
    CHECK(horizontal_acn_indices(0) == std::vector<int>{0});
    CHECK(horizontal_acn_indices(7).size() == 15);

    auto gen = oracles::rng(68);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 32), 48000.0,
                                                 Direction(0.25, 0.0), 2);
    const HorizontalBuffer sub = horizontal_subset(buffer);
    CHECK(sub.order == 2);
    REQUIRE(sub.samples.channels() == 5);
    const std::vector<int> keep = horizontal_acn_indices(2);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto a = sub.samples.channel(i);
        const auto b = buffer.channel(static_cast<std::size_t>(keep[i]));
        for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t] == b[t]);
    }
}

TEST_CASE("transforms keep order, frames, and sample rate") {
    auto gen = oracles::rng(69);
    const AmbisonicBuffer buffer = encode_source(oracles::random_signal(gen, 96), 48000.0,
                                                 oracles::random_direction(gen), 4);
    CompressorParams params;
    params.ratio = 2.0;
    for (const AmbisonicBuffer& out :
         {rotate(buffer, random_rotation(gen)), mirror(buffer, MirrorPlane::FrontBack),
          apply_fir(buffer, std::vector<double>{0.5, 0.25}), compress(buffer, params)}) {
        CHECK(out.order() == 4);
        CHECK(out.frames() == 96);
        CHECK(out.sample_rate() == 48000.0);
    }
}
