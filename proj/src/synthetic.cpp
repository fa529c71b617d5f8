#include "gdd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "gdd/error.hpp"
#include "gdd/rng.hpp"

namespace gdd {

namespace fs = std::filesystem;

namespace {

std::string numbered(const char* prefix, std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, i);
    return buf;
}

const ChannelSpec* find_channel(const std::vector<ChannelSpec>& channels, const std::string& name) {
    for (const auto& c : channels) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

// Splits "name[3]" into ("name", 3); plain names give npos.
std::pair<std::string, std::size_t> parse_effect_key(const std::string& key) {
    const auto open = key.find('[');
    if (open == std::string::npos) return {key, std::string::npos};
    if (key.back() != ']' || open + 2 > key.size() - 1) {
        throw Error(ErrorCode::InvalidArgument, "bad effect key '" + key + "'");
    }
    const std::string digits = key.substr(open + 1, key.size() - open - 2);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(ErrorCode::InvalidArgument, "bad effect key '" + key + "'");
    }
    return {key.substr(0, open), static_cast<std::size_t>(std::stoul(digits))};
}

}  // namespace

std::vector<ChannelSpec> default_synthetic_channels() {
    return {
        {"face_embedding", 8, ChannelLevel::Frame, 1.0},
        {"fau", 4, ChannelLevel::Frame, 1.0},
        {"eye_head", 4, ChannelLevel::Frame, 1.0},
        {"emotion", 4, ChannelLevel::Frame, 1.0},
        {"mfcc", 4, ChannelLevel::SubSecond, 0.5},
    };
}

void SyntheticSpec::validate() const {
    if (n_games < 1) throw Error(ErrorCode::InvalidArgument, "n_games must be >= 1");
    if (players_min < 2 || players_max < players_min) {
        throw Error(ErrorCode::InvalidArgument, "player range must satisfy 2 <= min <= max");
    }
    if (spies_min < 1 || spies_max < spies_min || spies_min >= players_min) {
        throw Error(ErrorCode::InvalidArgument, "spy range must satisfy 1 <= min <= max and min < players_min");
    }
    if (!(duration_min_s > 0.0) || duration_max_s < duration_min_s) {
        throw Error(ErrorCode::InvalidArgument, "duration range must satisfy 0 < min <= max");
    }
    if (channels.empty()) throw Error(ErrorCode::InvalidArgument, "no channels");
    for (const auto& c : channels) {
        if (c.name.empty() || c.dim < 1 || !(c.rate > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "channel '" + c.name + "' needs a name, dim >= 1 and rate > 0");
        }
        if (c.sample_period() > duration_min_s) {
            throw Error(ErrorCode::InvalidArgument, "channel '" + c.name + "' samples slower than the shortest game");
        }
    }
    for (const auto& [key, effect] : effects) {
        if (!(effect >= 0.0) || !std::isfinite(effect)) {
            throw Error(ErrorCode::InvalidArgument, "effect for '" + key + "' must be finite and >= 0");
        }
        const auto [name, dim] = parse_effect_key(key);
        const ChannelSpec* c = find_channel(channels, name);
        if (!c) throw Error(ErrorCode::InvalidArgument, "effect names unknown channel '" + name + "'");
        if (dim != std::string::npos && dim >= c->dim) {
            throw Error(ErrorCode::InvalidArgument, "effect key '" + key + "' is out of range");
        }
    }
    if (!(drift_sd >= 0.0) || !(noise_sd >= 0.0) || !(drift_tau_s > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "drift/noise parameters must be non-negative, tau positive");
    }
}

double SyntheticSpec::effect_for(const std::string& channel, std::size_t dim) const {
    double e = 0.0;
    if (const auto it = effects.find(channel); it != effects.end()) e += it->second;
    if (const auto it = effects.find(channel + "[" + std::to_string(dim) + "]"); it != effects.end()) e += it->second;
    return e;
}

SyntheticData synthesize(const SyntheticSpec& spec) {
    spec.validate();
    SyntheticData out;
    out.dataset.channels = spec.channels;
    Rng layout(Rng::derive(spec.seed, 0));
    for (std::size_t g = 0; g < spec.n_games; ++g) {
        Game game;
        game.game_id = numbered("g", g + 1, 3);
        game.duration_s = std::round(layout.uniform(spec.duration_min_s, spec.duration_max_s));
        const auto n_players = static_cast<std::size_t>(
            layout.between(static_cast<std::int64_t>(spec.players_min), static_cast<std::int64_t>(spec.players_max)));
        const auto max_spies = std::min(spec.spies_max, n_players - 1);
        const auto n_spies = static_cast<std::size_t>(
            layout.between(static_cast<std::int64_t>(spec.spies_min), static_cast<std::int64_t>(max_spies)));
        std::vector<std::size_t> seats(n_players);
        std::iota(seats.begin(), seats.end(), 0);
        layout.shuffle(std::span<std::size_t>(seats));
        std::vector<bool> spy(n_players, false);
        for (std::size_t i = 0; i < n_spies; ++i) spy[seats[i]] = true;

        for (std::size_t p = 0; p < n_players; ++p) {
            PlayerRecord rec;
            rec.player_id = game.game_id + numbered("_p", p + 1, 1);
            rec.role = spy[p] ? Role::Spy : Role::Resistance;
            for (const auto& ch : spec.channels) {
                rec.channel_files[ch.name] = fs::path(game.game_id) / (rec.player_id + "_" + ch.name + ".csv");
            }

            std::vector<FrameFeatureSeries> series;
            for (std::size_t c = 0; c < spec.channels.size(); ++c) {
                const auto& ch = spec.channels[c];
                // One stream per player and channel keeps channels independent
                // of each other's sizes.
                Rng rng(Rng::derive(spec.seed, 1 + (g * 64 + p) * 64 + c));
                const double period = ch.sample_period();
                const auto n = static_cast<std::size_t>(std::floor(game.duration_s / period + 1e-9));
                FrameFeatureSeries s;
                s.player_id = rec.player_id;
                s.channel = ch;
                s.timestamps_s.resize(n);
                for (std::size_t i = 0; i < n; ++i) s.timestamps_s[i] = static_cast<double>(i) * period;
                s.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ch.dim));
                const double a = std::exp(-period / spec.drift_tau_s);
                const double innov = spec.drift_sd * std::sqrt(1.0 - a * a);
                for (std::size_t d = 0; d < ch.dim; ++d) {
                    const double mean = rng.normal() + (spy[p] ? spec.effect_for(ch.name, d) : 0.0);
                    double drift = spec.drift_sd * rng.normal();
                    for (std::size_t i = 0; i < n; ++i) {
                        if (i > 0) drift = a * drift + innov * rng.normal();
                        s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
                            mean + drift + spec.noise_sd * rng.normal();
                    }
                }
                series.push_back(std::move(s));
            }
            out.series.emplace(rec.player_id, std::move(series));
            game.players.push_back(std::move(rec));
        }
        out.dataset.games.push_back(std::move(game));
    }
    return out;
}

GameDataset generate_synthetic(const SyntheticSpec& spec, const fs::path& out_dir) {
    SyntheticData data = synthesize(spec);
    fs::create_directories(out_dir);
    data.dataset.source_dir = out_dir;
    for (const auto& game : data.dataset.games) {
        for (const auto& p : game.players) {
            const auto& series = data.series.at(p.player_id);
            for (std::size_t c = 0; c < spec.channels.size(); ++c) {
                write_series(out_dir / p.channel_files.at(spec.channels[c].name), series[c]);
            }
        }
    }
    const fs::path manifest = out_dir / "manifest.json";
    write_manifest(data.dataset, manifest);
    return load_manifest(manifest);
}

}  // namespace gdd
