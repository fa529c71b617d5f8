#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gdd/dataset.hpp"
#include "gdd/rng.hpp"
#include "gdd/types.hpp"

namespace gdd::test {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("gdd_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Frame series with `n` rows at `fps` and values from `value(row, dim)`.
template <class F>
FrameFeatureSeries make_series(std::string player, const ChannelSpec& ch, std::size_t n, F value) {
    FrameFeatureSeries s;
    s.player_id = std::move(player);
    s.channel = ch;
    s.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ch.dim));
    for (std::size_t i = 0; i < n; ++i) {
        s.timestamps_s.push_back(static_cast<double>(i) * ch.sample_period());
        for (std::size_t d = 0; d < ch.dim; ++d) {
            s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = value(i, d);
        }
    }
    return s;
}

inline ChannelSpec frame_channel(std::string name, std::size_t dim, double fps) {
    return ChannelSpec{std::move(name), dim, ChannelLevel::Frame, fps};
}

inline ChannelSpec subsecond_channel(std::string name, std::size_t dim, double hop_s) {
    return ChannelSpec{std::move(name), dim, ChannelLevel::SubSecond, hop_s};
}

// Games named g0.. with players g<i>_p<j>; the first `spies` of each game are spies.
inline std::vector<Game> make_games(std::size_t games, std::size_t players, std::size_t spies = 2) {
    std::vector<Game> out;
    for (std::size_t g = 0; g < games; ++g) {
        Game game;
        game.game_id = "g" + std::to_string(g);
        game.duration_s = 1800.0;
        for (std::size_t p = 0; p < players; ++p) {
            PlayerRecord rec;
            rec.player_id = game.game_id + "_p" + std::to_string(p);
            rec.role = p < spies ? Role::Spy : Role::Resistance;
            game.players.push_back(std::move(rec));
        }
        out.push_back(std::move(game));
    }
    return out;
}

}  // namespace gdd::test
