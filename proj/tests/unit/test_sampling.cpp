#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "gdd/error.hpp"
#include "gdd/sampling.hpp"

using namespace gdd;

namespace {

std::size_t expected_windows(double duration, double len, double interval) {
    return static_cast<std::size_t>(std::floor((duration - len) / interval)) + 1;
}

}  // namespace

TEST_CASE("schedule_clips on default policy") {
    SamplingPolicy policy;
    const auto s = schedule_clips(1800.0, policy);
    REQUIRE(s.windows.size() == 60);
    CHECK(s.windows.front() == ClipWindow{0.0, 10.0});
    CHECK(s.windows.back() == ClipWindow{1770.0, 1780.0});

    const auto one = schedule_clips(10.0, policy);
    REQUIRE(one.windows.size() == 1);
    CHECK(one.windows[0] == ClipWindow{0.0, 10.0});

    try {
        schedule_clips(9.0, policy);
        FAIL("expected VideoTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VideoTooShort);
    }
}

TEST_CASE("schedule density and window invariants over random policies") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        SamplingPolicy p;
        p.clip_len_s = rng.uniform(0.5, 20.0);
        p.clip_interval_s = p.clip_len_s + rng.uniform(0.0, 40.0);
        const double duration = p.clip_len_s + rng.uniform(0.0, 4000.0);
        const auto s = schedule_clips(duration, p);
        CHECK(s.windows.size() == expected_windows(duration, p.clip_len_s, p.clip_interval_s));
        for (std::size_t i = 0; i < s.windows.size(); ++i) {
            CHECK(s.windows[i].end_s - s.windows[i].start_s == doctest::Approx(p.clip_len_s));
            CHECK(s.windows[i].end_s <= duration + 1e-9);
            if (i > 0) {
                CHECK(s.windows[i].start_s - s.windows[i - 1].start_s == doctest::Approx(p.clip_interval_s));
                CHECK(s.windows[i].start_s >= s.windows[i - 1].end_s);
            }
        }
    }
}

TEST_CASE("sampling policy validation") {
    SamplingPolicy p;
    p.clip_interval_s = 5.0;
    CHECK_THROWS_AS(p.validate(), Error);
    SamplingPolicy q;
    q.frames_per_clip["fau"] = 0;
    CHECK_THROWS_AS(q.validate(), Error);
    SamplingPolicy d;
    CHECK(d.frames_for(test::frame_channel("eye_head", 4, 30)) == 300);
    CHECK(d.frames_for(test::frame_channel("fau", 4, 30)) == 20);
}

TEST_CASE("sample_frames take-all, stride and shortfall") {
    const auto ch = test::frame_channel("fau", 1, 30.0);
    const auto series = test::make_series("p", ch, 600, [](auto i, auto) { return double(i); });
    const ClipWindow w{0.0, 10.0};

    const auto all = sample_frame_indices(series, w, 300, 0);
    REQUIRE(all.size() == 300);
    for (std::size_t i = 0; i < 300; ++i) CHECK(all[i] == i);

    const auto twenty = sample_frame_indices(series, w, 20, 0);
    REQUIRE(twenty.size() == 20);
    CHECK(twenty.front() == 0);
    CHECK(twenty.back() == 299);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(twenty[i] == static_cast<std::size_t>(std::lround(double(i) * 299.0 / 19.0)));
    }

    const auto few = test::make_series("p", test::frame_channel("eye_head", 1, 0.5), 10, [](auto i, auto) { return double(i); });
    const auto rows = sample_frames(few, w, 20, 0);
    CHECK(rows.rows() == 5);
    CHECK(pool_clip(rows).frames_used == 5);

    CHECK_THROWS_AS(sample_frame_indices(series, ClipWindow{100.0, 110.0}, 20, 0), Error);
}

TEST_CASE("sample_frames is deterministic") {
    Rng rng(3);
    const auto ch = test::frame_channel("fau", 3, 30.0);
    const auto s = test::make_series("p", ch, 900, [&](auto, auto) { return rng.normal(); });
    for (std::size_t m : {1u, 7u, 20u, 299u}) {
        CHECK(sample_frames(s, ClipWindow{5.0, 15.0}, m, 1) == sample_frames(s, ClipWindow{5.0, 15.0}, m, 1));
    }
}

TEST_CASE("pool_clip averages frames") {
    RowMatrix f(2, 2);
    f << 1, 2, 3, 4;
    const auto c = pool_clip(f);
    CHECK(c.vector(0) == 2.0);
    CHECK(c.vector(1) == 3.0);
    CHECK(c.frames_used == 2);

    RowMatrix single(1, 1);
    single << 7.5;
    CHECK(pool_clip(single).vector(0) == 7.5);

    CHECK_THROWS_AS(pool_clip(RowMatrix(0, 3)), Error);
}

TEST_CASE("pool_clip matches a naive summation and is affine-equivariant") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        RowMatrix f(100, 4);
        for (Eigen::Index r = 0; r < f.rows(); ++r) {
            for (Eigen::Index c = 0; c < f.cols(); ++c) f(r, c) = rng.normal(3.0, 5.0);
        }
        const auto pooled = pool_clip(f).vector;
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            long double sum = 0;
            for (Eigen::Index r = 0; r < f.rows(); ++r) sum += f(r, c);
            const double naive = static_cast<double>(sum / f.rows());
            CHECK(std::abs(pooled(c) - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
        }
        const double a = rng.uniform(-3, 3);
        const double b = rng.uniform(-10, 10);
        RowMatrix g = (a * f.array() + b).matrix();
        const auto shifted = pool_clip(g).vector;
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            CHECK(shifted(c) == doctest::Approx(a * pooled(c) + b).epsilon(1e-12).scale(10));
        }
    }
}

TEST_CASE("clips_from_series for a 46-minute player") {
    const auto face = test::frame_channel("face_embedding", 2, 30.0);
    const auto fau = test::frame_channel("fau", 3, 30.0);
    const auto eye = test::frame_channel("eye_head", 2, 30.0);
    const auto mfcc = test::subsecond_channel("mfcc", 2, 0.01);
    const std::size_t frames = 46 * 60 * 30;
    std::vector<FrameFeatureSeries> series{
        test::make_series("p", face, frames, [](auto i, auto d) { return double(i + d); }),
        test::make_series("p", fau, frames, [](auto i, auto) { return double(i % 13); }),
        test::make_series("p", eye, frames, [](auto i, auto) { return double(i % 5); }),
        test::make_series("p", mfcc, 46 * 60 * 100, [](auto i, auto) { return double(i % 3); }),
    };
    const auto clips = clips_from_series(series, SamplingPolicy{});
    const std::size_t expected = expected_windows(2760.0, 10.0, 30.0);
    CHECK(expected == 92);
    for (const auto& [name, cc] : clips.channels) {
        CAPTURE(name);
        CHECK(cc.clips.size() == expected);
    }
    CHECK(clips.channels.at("eye_head").clips[0].frames_used == 300);
    CHECK(clips.channels.at("fau").clips[0].frames_used == 20);
    CHECK(clips.channels.at("mfcc").clips[0].frames_used == 1000);
    CHECK(clips.channels.at("fau").frames.rows() == static_cast<Eigen::Index>(20 * expected));
    // face value at frame i is i: the clip mean of 20 stride frames over [0, 299] is 149.5.
    CHECK(clips.channels.at("face_embedding").clips[0].vector(0) == doctest::Approx(149.5).epsilon(0.01));
}

TEST_CASE("clips empty in one channel are dropped from all") {
    const auto face = test::frame_channel("face_embedding", 1, 1.0);
    const auto fau = test::frame_channel("fau", 1, 1.0);
    auto full = test::make_series("p", fau, 1800, [](auto i, auto) { return double(i); });
    // face has no frames inside clip 7, i.e. [210, 220).
    FrameFeatureSeries gappy;
    gappy.player_id = "p";
    gappy.channel = face;
    std::vector<double> vals;
    for (std::size_t i = 0; i < 1800; ++i) {
        if (i >= 210 && i < 220) continue;
        gappy.timestamps_s.push_back(double(i));
        vals.push_back(double(i));
    }
    gappy.values = Eigen::Map<RowMatrix>(vals.data(), static_cast<Eigen::Index>(vals.size()), 1);

    const auto clips = clips_from_series({gappy, full}, SamplingPolicy{});
    for (const auto& [name, cc] : clips.channels) {
        CHECK(cc.clips.size() == 59);
        for (const auto& c : cc.clips) CHECK(c.clip_index != 7);
    }
}

TEST_CASE("a 30-minute player yields at least 59 clips; short players fail") {
    const auto fau = test::frame_channel("fau", 1, 30.0);
    const auto s = test::make_series("p", fau, 1800 * 30, [](auto i, auto) { return double(i); });
    CHECK(clips_from_series({s}, SamplingPolicy{}).channels.at("fau").clips.size() >= 59);

    const auto short_s = test::make_series("p", fau, 9 * 30, [](auto i, auto) { return double(i); });
    try {
        clips_from_series({short_s}, SamplingPolicy{});
        FAIL("expected VideoTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VideoTooShort);
    }
}

TEST_CASE("clip extraction is deterministic") {
    Rng rng(8);
    const auto fau = test::frame_channel("fau", 2, 30.0);
    const auto s = test::make_series("p", fau, 120 * 30, [&](auto, auto) { return rng.normal(); });
    SamplingPolicy p;
    p.rng_seed = 77;
    const auto a = clips_from_series({s}, p);
    const auto b = clips_from_series({s}, p);
    CHECK(a.channels.at("fau").frames == b.channels.at("fau").frames);
    CHECK(a.channels.at("fau").clip_matrix() == b.channels.at("fau").clip_matrix());
}
