#include "gdd/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdd/error.hpp"

namespace gdd {

namespace {

// Slack for window arithmetic on accumulated floating-point timestamps.
constexpr double kTimeEps = 1e-9;

}  // namespace

std::size_t SamplingPolicy::frames_for(const ChannelSpec& channel) const {
    if (channel.level == ChannelLevel::SubSecond) return std::numeric_limits<std::size_t>::max();
    const auto it = frames_per_clip.find(channel.name);
    return it != frames_per_clip.end() ? it->second : default_frames_per_clip;
}

void SamplingPolicy::validate() const {
    if (!(clip_len_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "clip length must be > 0");
    if (!(clip_interval_s >= clip_len_s)) {
        throw Error(ErrorCode::InvalidArgument, "clip interval must be >= clip length");
    }
    if (default_frames_per_clip < 1) throw Error(ErrorCode::InvalidArgument, "frames per clip must be >= 1");
    for (const auto& [name, count] : frames_per_clip) {
        if (count < 1) throw Error(ErrorCode::InvalidArgument, "frames per clip for '" + name + "' must be >= 1");
    }
}

RowMatrix ChannelClips::clip_matrix() const {
    if (clips.empty()) return {};
    RowMatrix m(static_cast<Eigen::Index>(clips.size()), clips.front().vector.size());
    for (std::size_t i = 0; i < clips.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = clips[i].vector.transpose();
    return m;
}

ClipSchedule schedule_clips(double duration_s, const SamplingPolicy& policy) {
    policy.validate();
    if (duration_s + kTimeEps < policy.clip_len_s) {
        throw Error(ErrorCode::VideoTooShort, "duration " + std::to_string(duration_s) + " s is shorter than one clip");
    }
    const auto count =
        static_cast<std::size_t>(std::floor((duration_s - policy.clip_len_s) / policy.clip_interval_s + kTimeEps)) + 1;
    ClipSchedule schedule;
    schedule.windows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double start = static_cast<double>(i) * policy.clip_interval_s;
        schedule.windows.push_back({start, start + policy.clip_len_s});
    }
    return schedule;
}

// `seed` is accepted for interface stability; timestamps are strictly
// increasing after loading, so uniform-stride selection has no ties to break.
std::vector<std::size_t> sample_frame_indices(const FrameFeatureSeries& series, const ClipWindow& window,
                                              std::size_t count, std::uint64_t /*seed*/) {
    const auto& ts = series.timestamps_s;
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(ts.begin(), ts.end(), window.start_s - kTimeEps) - ts.begin());
    const auto hi = static_cast<std::size_t>(
        std::lower_bound(ts.begin(), ts.end(), window.end_s - kTimeEps) - ts.begin());
    if (hi <= lo) {
        throw Error(ErrorCode::EmptyWindow, "player '" + series.player_id + "' channel '" + series.channel.name +
                                                "' has no frames in [" + std::to_string(window.start_s) + ", " +
                                                std::to_string(window.end_s) + ")");
    }
    const std::size_t n = hi - lo;
    std::vector<std::size_t> idx;
    if (count >= n) {
        idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = lo + i;
        return idx;
    }
    idx.reserve(count);
    if (count == 1) {
        idx.push_back(lo + (n - 1) / 2);
        return idx;
    }
    // round(i * (n-1) / (count-1)) in exact integer arithmetic, halves rounded up.
    const std::size_t denom = count - 1;
    for (std::size_t i = 0; i < count; ++i) {
        idx.push_back(lo + (2 * i * (n - 1) + denom) / (2 * denom));
    }
    return idx;
}

RowMatrix sample_frames(const FrameFeatureSeries& series, const ClipWindow& window, std::size_t count,
                        std::uint64_t seed) {
    const auto idx = sample_frame_indices(series, window, count, seed);
    RowMatrix out(static_cast<Eigen::Index>(idx.size()), series.values.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = series.values.row(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
}

ClipFeature pool_clip(const RowMatrix& frames) {
    if (frames.rows() == 0) throw Error(ErrorCode::EmptyWindow, "cannot pool an empty clip");
    ClipFeature clip;
    clip.frames_used = static_cast<std::size_t>(frames.rows());
    clip.vector = Vector::Zero(frames.cols());
    for (Eigen::Index r = 0; r < frames.rows(); ++r) clip.vector += frames.row(r).transpose();
    clip.vector /= static_cast<double>(frames.rows());
    return clip;
}

PlayerClips clips_from_series(const std::vector<FrameFeatureSeries>& series_by_channel, const SamplingPolicy& policy) {
    policy.validate();
    if (series_by_channel.empty()) throw Error(ErrorCode::InvalidArgument, "no channels to sample");

    PlayerClips out;
    out.player_id = series_by_channel.front().player_id;

    double span = std::numeric_limits<double>::infinity();
    for (const auto& s : series_by_channel) span = std::min(span, s.span_end());
    const ClipSchedule schedule = schedule_clips(span, policy);

    // keep[c] is false once clip c is empty in any channel.
    std::vector<bool> keep(schedule.windows.size(), true);
    std::vector<std::vector<std::vector<std::size_t>>> picked(series_by_channel.size());
    for (std::size_t ch = 0; ch < series_by_channel.size(); ++ch) {
        const auto& s = series_by_channel[ch];
        const std::size_t m = policy.frames_for(s.channel);
        picked[ch].resize(schedule.windows.size());
        for (std::size_t c = 0; c < schedule.windows.size(); ++c) {
            if (!keep[c]) continue;
            try {
                picked[ch][c] = sample_frame_indices(s, schedule.windows[c], m, policy.rng_seed);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptyWindow) throw;
                keep[c] = false;
            }
        }
    }
    const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
    if (kept == 0) throw Error(ErrorCode::NoValidClips, "player '" + out.player_id + "' has no clip covered by every channel");

    for (std::size_t ch = 0; ch < series_by_channel.size(); ++ch) {
        const auto& s = series_by_channel[ch];
        ChannelClips cc;
        std::size_t total = 0;
        for (std::size_t c = 0; c < keep.size(); ++c) {
            if (keep[c]) total += picked[ch][c].size();
        }
        cc.frames.resize(static_cast<Eigen::Index>(total), s.values.cols());
        Eigen::Index row = 0;
        for (std::size_t c = 0; c < keep.size(); ++c) {
            if (!keep[c]) continue;
            const auto& idx = picked[ch][c];
            RowMatrix frames(static_cast<Eigen::Index>(idx.size()), s.values.cols());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                frames.row(static_cast<Eigen::Index>(i)) = s.values.row(static_cast<Eigen::Index>(idx[i]));
            }
            cc.frames.middleRows(row, frames.rows()) = frames;
            row += frames.rows();
            ClipFeature clip = pool_clip(frames);
            clip.clip_index = c;
            clip.channel = s.channel.name;
            cc.clips.push_back(std::move(clip));
        }
        out.channels.emplace(s.channel.name, std::move(cc));
    }
    return out;
}

PlayerClips clips_for_player(const GameDataset& ds, const PlayerRecord& player,
                             const std::vector<ChannelSpec>& channels, const SamplingPolicy& policy) {
    std::vector<FrameFeatureSeries> series;
    series.reserve(channels.size());
    for (const auto& ch : channels) series.push_back(read_series(ds, player, ch));
    return clips_from_series(series, policy);
}

}  // namespace gdd
