#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gdd/dataset.hpp"
#include "gdd/types.hpp"

namespace gdd {

struct SamplingPolicy {
    double clip_len_s = 10.0;
    double clip_interval_s = 30.0;
    // Per-channel cap on frames sampled from one clip. Channels absent from
    // the map use `default_frames_per_clip`; SubSecond channels always pool
    // every sample in the window.
    std::map<std::string, std::size_t> frames_per_clip{{"eye_head", 300}};
    std::size_t default_frames_per_clip = 20;
    std::uint64_t rng_seed = 0;

    std::size_t frames_for(const ChannelSpec& channel) const;
    void validate() const;
};

struct ClipWindow {
    double start_s = 0.0;
    double end_s = 0.0;

    bool operator==(const ClipWindow&) const = default;
};

struct ClipSchedule {
    std::string player_id;
    std::vector<ClipWindow> windows;
};

struct ClipFeature {
    std::size_t clip_index = 0;
    std::string channel;
    Vector vector;
    std::size_t frames_used = 0;
};

// Everything the encoders need for one player and one channel: the pooled
// clip vectors plus the sampled frames each clip was pooled from.
struct ChannelClips {
    std::vector<ClipFeature> clips;
    RowMatrix frames;  // all sampled frames, stacked clip after clip

    // Clip vectors stacked as rows.
    RowMatrix clip_matrix() const;
};

struct PlayerClips {
    std::string player_id;
    std::map<std::string, ChannelClips> channels;
};

ClipSchedule schedule_clips(double duration_s, const SamplingPolicy& policy);

// Row indices of the frames picked from `series` for `window`.
std::vector<std::size_t> sample_frame_indices(const FrameFeatureSeries& series, const ClipWindow& window,
                                              std::size_t count, std::uint64_t seed);

RowMatrix sample_frames(const FrameFeatureSeries& series, const ClipWindow& window, std::size_t count,
                        std::uint64_t seed);

ClipFeature pool_clip(const RowMatrix& frames);

// Builds aligned clips for every channel of `series_by_channel` (one series
// per channel of the same player). Clips empty in any channel are dropped
// from all channels.
PlayerClips clips_from_series(const std::vector<FrameFeatureSeries>& series_by_channel, const SamplingPolicy& policy);

PlayerClips clips_for_player(const GameDataset& ds, const PlayerRecord& player,
                             const std::vector<ChannelSpec>& channels, const SamplingPolicy& policy);

}  // namespace gdd
