#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gdd/types.hpp"

namespace gdd {

enum class Role { Spy, Resistance };

enum class ChannelLevel { Frame, SubSecond };

std::string_view to_string(Role role) noexcept;
std::string_view to_string(ChannelLevel level) noexcept;

// A feature channel produced by an upstream extractor (face embedding, FAUs,
// eye/head pose, emotions, MFCC). `rate` is frames per second for Frame
// channels and the hop length in seconds for SubSecond channels.
struct ChannelSpec {
    std::string name;
    std::size_t dim = 1;
    ChannelLevel level = ChannelLevel::Frame;
    double rate = 30.0;

    double sample_period() const { return level == ChannelLevel::Frame ? 1.0 / rate : rate; }

    bool operator==(const ChannelSpec&) const = default;
};

struct PlayerRecord {
    std::string player_id;
    Role role = Role::Resistance;
    std::map<std::string, std::filesystem::path> channel_files;  // channel name -> relative path

    bool is_spy() const { return role == Role::Spy; }

    bool operator==(const PlayerRecord&) const = default;
};

struct Game {
    std::string game_id;
    double duration_s = 0.0;
    std::vector<PlayerRecord> players;

    bool operator==(const Game&) const = default;
};

struct GameDataset {
    std::vector<Game> games;
    std::vector<ChannelSpec> channels;
    std::filesystem::path source_dir;

    const ChannelSpec& channel(std::string_view name) const;
    const Game& game(std::string_view game_id) const;
    std::size_t player_count() const;

    bool operator==(const GameDataset&) const = default;
};

// Frame-level values of one channel for one player. Rows are time-ordered.
struct FrameFeatureSeries {
    std::string player_id;
    ChannelSpec channel;
    std::vector<double> timestamps_s;
    RowMatrix values;
    std::size_t dropped_rows = 0;

    std::size_t size() const { return timestamps_s.size(); }
    double last_timestamp() const { return timestamps_s.empty() ? 0.0 : timestamps_s.back(); }
    // End of the covered span: last sample plus one sample period.
    double span_end() const { return last_timestamp() + channel.sample_period(); }
};

struct ValidationReport {
    struct Coverage {
        std::string player_id;
        std::string channel;
        std::size_t rows = 0;
        std::size_t dropped_rows = 0;
        double last_timestamp_s = 0.0;
    };

    std::vector<Coverage> coverage;
    std::vector<std::string> warnings;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

// Reads a manifest and stat-checks every referenced feature file.
GameDataset load_manifest(const std::filesystem::path& manifest_path);

// Writes `ds` as a manifest at `manifest_path`; feature file paths are kept
// relative, so the manifest should sit in `ds.source_dir`.
void write_manifest(const GameDataset& ds, const std::filesystem::path& manifest_path);

FrameFeatureSeries read_series(const GameDataset& ds, const PlayerRecord& player,
                               const ChannelSpec& channel);
FrameFeatureSeries read_series_file(const std::filesystem::path& file, std::string player_id,
                                    const ChannelSpec& channel);
void write_series(const std::filesystem::path& file, const FrameFeatureSeries& series);

// Relative tolerance between a game's declared duration and the end of each
// player's series before a mismatch warning is emitted.
inline constexpr double kDurationMismatchTolerance = 0.05;

ValidationReport validate_dataset(const GameDataset& ds);

}  // namespace gdd
