#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "../support.hpp"
#include "gdd/dataset.hpp"
#include "gdd/error.hpp"

using namespace gdd;
using gdd::test::TempDir;
using gdd::test::write_file;

namespace {

std::string player_json(const std::string& id, const std::string& role, const std::string& file) {
    return R"({"player_id": ")" + id + R"(", "role": ")" + role + R"(", "files": {"fau": ")" + file + R"("}})";
}

// 2 games x 5 players, one fau file each, all present.
void write_small_dataset(const TempDir& dir) {
    std::string games;
    for (int g = 1; g <= 2; ++g) {
        std::string players;
        for (int p = 1; p <= 5; ++p) {
            const std::string id = "g" + std::to_string(g) + "p" + std::to_string(p);
            const std::string file = "g" + std::to_string(g) + "/" + id + "_fau.csv";
            write_file(dir / file, "0.0,1,2\n1.0,3,4\n");
            players += (p > 1 ? "," : "") + player_json(id, p <= 2 ? "spy" : "resistance", file);
        }
        games += (g > 1 ? "," : "") + std::string(R"({"game_id": "g)") + std::to_string(g) +
                 R"(", "duration_s": 2.0, "players": [)" + players + "]}";
    }
    write_file(dir / "manifest.json", R"({"version": 1, "channels": [{"name": "fau", "dim": 2, "level": "frame", "fps": 1.0}], "games": [)" +
                                          games + "]}");
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected gdd::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("load_manifest reads games, players and channels") {
    TempDir dir("manifest");
    write_small_dataset(dir);
    const auto ds = load_manifest(dir / "manifest.json");
    CHECK(ds.games.size() == 2);
    CHECK(ds.player_count() == 10);
    REQUIRE(ds.channels.size() == 1);
    CHECK(ds.channels[0].dim == 2);
    CHECK(ds.channels[0].level == ChannelLevel::Frame);
    CHECK(ds.games[0].players[0].is_spy());
    CHECK_FALSE(ds.games[0].players[4].is_spy());
    CHECK(ds.source_dir == dir.path());
}

TEST_CASE("load_manifest rejects a player listed in two games") {
    TempDir dir("dup");
    write_file(dir / "a.csv", "0,1\n");
    const std::string p3 = player_json("p3", "spy", "a.csv");
    write_file(dir / "manifest.json",
               R"({"version": 1, "channels": [{"name": "fau", "dim": 1, "level": "frame", "fps": 30}], "games": [)"
               R"({"game_id": "g1", "duration_s": 10, "players": [)" + p3 + R"(]},)"
               R"({"game_id": "g2", "duration_s": 10, "players": [)" + p3 + "]}]}");
    try {
        load_manifest(dir / "manifest.json");
        FAIL("expected DuplicatePlayerId");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicatePlayerId);
        CHECK(std::string(e.what()).find("p3") != std::string::npos);
    }
}

TEST_CASE("load_manifest names an absent feature file") {
    TempDir dir("missing");
    write_file(dir / "manifest.json",
               R"({"version": 1, "channels": [{"name": "fau", "dim": 1, "level": "frame", "fps": 30}], "games": [)"
               R"({"game_id": "g1", "duration_s": 10, "players": [)" + player_json("p2", "spy", "g1/p2/fau.csv") + "]}]}");
    try {
        load_manifest(dir / "manifest.json");
        FAIL("expected MissingFile");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingFile);
        CHECK(std::string(e.what()).find("g1/p2/fau.csv") != std::string::npos);
    }
    CHECK(code_of([&] { load_manifest(dir / "nope.json"); }) == ErrorCode::MissingFile);
}

TEST_CASE("load_manifest schema errors") {
    TempDir dir("schema");
    write_file(dir / "m1.json", R"({"version": 1, "games": []})");
    CHECK(code_of([&] { load_manifest(dir / "m1.json"); }) == ErrorCode::SchemaViolation);
    write_file(dir / "m2.json", R"({"version": 1, "channels": [{"name": "fau", "dim": 0, "level": "frame", "fps": 30}], "games": []})");
    CHECK(code_of([&] { load_manifest(dir / "m2.json"); }) == ErrorCode::SchemaViolation);
    write_file(dir / "m3.json", "{not json");
    CHECK(code_of([&] { load_manifest(dir / "m3.json"); }) == ErrorCode::SchemaViolation);
    write_file(dir / "a.csv", "0,1\n");
    write_file(dir / "m4.json",
               R"({"version": 1, "channels": [{"name": "fau", "dim": 1, "level": "frame", "fps": 30}], "games": [)"
               R"({"game_id": "g1", "duration_s": 10, "players": [)" + player_json("p1", "traitor", "a.csv") + "]}]}");
    CHECK(code_of([&] { load_manifest(dir / "m4.json"); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("read_series_file parses rows, comments and drops non-finite rows") {
    TempDir dir("series");
    const auto ch = test::frame_channel("fau", 2, 30.0);

    write_file(dir / "three.csv", "# t,a,b\n0.0,1,2\n0.033,3,4\n0.066,5,6\n");
    const auto s = read_series_file(dir / "three.csv", "p1", ch);
    CHECK(s.size() == 3);
    CHECK(s.values.rows() == 3);
    CHECK(s.values.cols() == 2);
    CHECK(s.values(2, 1) == 6.0);
    CHECK(s.dropped_rows == 0);

    std::string text;
    for (int i = 0; i < 100; ++i) {
        text += std::to_string(i * 0.1) + "," + (i == 41 ? "nan" : std::to_string(i)) + ",0\n";
    }
    write_file(dir / "nan.csv", text);
    const auto n = read_series_file(dir / "nan.csv", "p1", ch);
    CHECK(n.size() == 99);
    CHECK(n.dropped_rows == 1);
}

TEST_CASE("read_series_file errors") {
    TempDir dir("series_err");
    const auto ch = test::frame_channel("fau", 2, 30.0);
    write_file(dir / "order.csv", "0.0,1,2\n0.2,1,2\n0.1,1,2\n");
    try {
        read_series_file(dir / "order.csv", "p1", ch);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("order.csv:3:") != std::string::npos);
    }
    write_file(dir / "width.csv", "0.0,1\n");
    CHECK(code_of([&] { read_series_file(dir / "width.csv", "p1", ch); }) == ErrorCode::ParseError);
    write_file(dir / "empty.csv", "0.0,nan,1\n# nothing\n");
    CHECK(code_of([&] { read_series_file(dir / "empty.csv", "p1", ch); }) == ErrorCode::EmptySeries);
    write_file(dir / "junk.csv", "0.0,1,abc\n");
    CHECK(code_of([&] { read_series_file(dir / "junk.csv", "p1", ch); }) == ErrorCode::ParseError);
}

TEST_CASE("manifest and series round-trip") {
    TempDir dir("roundtrip");
    GameDataset ds;
    ds.source_dir = dir.path();
    ds.channels = {test::frame_channel("fau", 2, 2.0), test::subsecond_channel("mfcc", 3, 0.5)};
    Rng rng(5);
    for (const auto& game : test::make_games(2, 5)) {
        Game g = game;
        g.duration_s = 10.0;
        for (auto& p : g.players) {
            for (const auto& ch : ds.channels) {
                const std::string rel = g.game_id + "/" + p.player_id + "_" + ch.name + ".csv";
                p.channel_files[ch.name] = rel;
                const auto s = test::make_series(p.player_id, ch, 20, [&](auto, auto) { return rng.normal(); });
                write_series(dir / rel, s);
                const auto back = read_series_file(dir / rel, p.player_id, ch);
                CHECK(back.timestamps_s == s.timestamps_s);
                CHECK(back.values == s.values);
            }
        }
        ds.games.push_back(std::move(g));
    }
    write_manifest(ds, dir / "manifest.json");
    const auto loaded = load_manifest(dir / "manifest.json");
    CHECK(loaded == ds);
}

TEST_CASE("validate_dataset warnings") {
    TempDir dir("validate");
    GameDataset ds;
    ds.source_dir = dir.path();
    ds.channels = {test::frame_channel("fau", 1, 1.0)};
    auto games = test::make_games(2, 5);
    games[1].players[1].role = Role::Resistance;  // 1 spy among 5
    for (auto& g : games) {
        g.duration_s = 2400.0;
        for (auto& p : g.players) {
            const std::string rel = p.player_id + ".csv";
            p.channel_files["fau"] = rel;
            // g0_p0's series ends at 10 min of a 40 min game.
            const std::size_t n = p.player_id == "g0_p0" ? 601 : 2401;
            write_series(dir / rel, test::make_series(p.player_id, ds.channels[0], n, [](auto i, auto) { return double(i % 7); }));
        }
    }
    ds.games = games;
    const auto before = ds;
    const auto report = validate_dataset(ds);
    CHECK(ds == before);
    CHECK(report.ok());
    CHECK(report.coverage.size() == 10);
    REQUIRE(report.warnings.size() == 2);
    CHECK(report.warnings[0].find("g0_p0") != std::string::npos);
    CHECK(report.warnings[0].find("duration mismatch") != std::string::npos);
    CHECK(report.warnings[1].find("spy count out of range") != std::string::npos);
}

TEST_CASE("validate_dataset on a consistent dataset is clean") {
    TempDir dir("clean");
    GameDataset ds;
    ds.source_dir = dir.path();
    ds.channels = {test::frame_channel("fau", 1, 1.0)};
    ds.games = test::make_games(1, 6, 3);
    ds.games[0].duration_s = 100.0;
    for (auto& p : ds.games[0].players) {
        p.channel_files["fau"] = p.player_id + ".csv";
        write_series(dir / (p.player_id + ".csv"), test::make_series(p.player_id, ds.channels[0], 101, [](auto i, auto) { return double(i); }));
    }
    const auto report = validate_dataset(ds);
    CHECK(report.ok());
    CHECK(report.warnings.empty());
    // A broken file is an error in the report, not an exception.
    write_file(dir / (ds.games[0].players[2].player_id + ".csv"), "bad\n");
    const auto broken = validate_dataset(ds);
    CHECK_FALSE(broken.ok());
    CHECK(broken.errors.size() == 1);
}
