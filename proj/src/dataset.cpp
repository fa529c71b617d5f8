#include "gdd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gdd/error.hpp"

namespace gdd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

Role parse_role(const std::string& s, const std::string& player_id) {
    if (s == "spy") return Role::Spy;
    if (s == "resistance") return Role::Resistance;
    throw Error(ErrorCode::SchemaViolation,
                "player '" + player_id + "' has unknown role '" + s + "'");
}

ChannelLevel parse_level(const std::string& s, const std::string& channel) {
    if (s == "frame") return ChannelLevel::Frame;
    if (s == "subsecond") return ChannelLevel::SubSecond;
    throw Error(ErrorCode::SchemaViolation,
                "channel '" + channel + "' has unknown level '" + s + "'");
}

template <typename T>
T required(const json& node, const char* key, const std::string& where) {
    if (!node.is_object() || !node.contains(key)) {
        throw Error(ErrorCode::SchemaViolation, where + " is missing field '" + key + "'");
    }
    try {
        return node.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::SchemaViolation, where + " has a malformed field '" + key + "'");
    }
}

ChannelSpec parse_channel(const json& node) {
    ChannelSpec ch;
    ch.name = required<std::string>(node, "name", "channel");
    const std::string where = "channel '" + ch.name + "'";
    const auto dim = required<long long>(node, "dim", where);
    if (dim < 1) throw Error(ErrorCode::SchemaViolation, where + " must have dim >= 1");
    ch.dim = static_cast<std::size_t>(dim);
    ch.level = parse_level(required<std::string>(node, "level", where), ch.name);
    const char* rate_key = ch.level == ChannelLevel::Frame ? "fps" : "hop_s";
    ch.rate = required<double>(node, rate_key, where);
    if (!(ch.rate > 0.0) || !std::isfinite(ch.rate)) {
        throw Error(ErrorCode::SchemaViolation, where + " must have " + rate_key + " > 0");
    }
    return ch;
}

// Splits on ',' without allocating per field.
bool parse_row(std::string_view line, std::vector<double>& out) {
    out.clear();
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        std::string_view field = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
            field.remove_suffix(1);
        }
        if (!field.empty() && field.front() == '+') field.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) return false;
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return true;
}

}  // namespace

std::string_view to_string(Role role) noexcept {
    return role == Role::Spy ? "spy" : "resistance";
}

std::string_view to_string(ChannelLevel level) noexcept {
    return level == ChannelLevel::Frame ? "frame" : "subsecond";
}

const ChannelSpec& GameDataset::channel(std::string_view name) const {
    for (const auto& ch : channels) {
        if (ch.name == name) return ch;
    }
    throw Error(ErrorCode::SchemaViolation, "unknown channel '" + std::string(name) + "'");
}

const Game& GameDataset::game(std::string_view game_id) const {
    for (const auto& g : games) {
        if (g.game_id == game_id) return g;
    }
    throw Error(ErrorCode::UnknownGame, "unknown game '" + std::string(game_id) + "'");
}

std::size_t GameDataset::player_count() const {
    std::size_t n = 0;
    for (const auto& g : games) n += g.players.size();
    return n;
}

GameDataset load_manifest(const fs::path& manifest_path) {
    if (!fs::exists(manifest_path)) {
        throw Error(ErrorCode::MissingFile, "manifest '" + manifest_path.string() + "' does not exist");
    }
    std::ifstream in(manifest_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation,
                    "manifest '" + manifest_path.string() + "' is not valid JSON: " + e.what());
    }
    if (required<int>(doc, "version", "manifest") != kManifestVersion) {
        throw Error(ErrorCode::SchemaViolation, "unsupported manifest version");
    }

    GameDataset ds;
    ds.source_dir = manifest_path.parent_path();

    std::set<std::string> channel_names;
    for (const auto& node : required<json>(doc, "channels", "manifest")) {
        ChannelSpec ch = parse_channel(node);
        if (!channel_names.insert(ch.name).second) {
            throw Error(ErrorCode::SchemaViolation, "channel '" + ch.name + "' declared twice");
        }
        ds.channels.push_back(std::move(ch));
    }
    if (ds.channels.empty()) throw Error(ErrorCode::SchemaViolation, "manifest declares no channels");

    std::set<std::string> game_ids;
    std::set<std::string> player_ids;
    for (const auto& gnode : required<json>(doc, "games", "manifest")) {
        Game game;
        game.game_id = required<std::string>(gnode, "game_id", "game");
        const std::string gwhere = "game '" + game.game_id + "'";
        if (!game_ids.insert(game.game_id).second) {
            throw Error(ErrorCode::SchemaViolation, gwhere + " declared twice");
        }
        game.duration_s = required<double>(gnode, "duration_s", gwhere);
        if (!(game.duration_s > 0.0)) throw Error(ErrorCode::SchemaViolation, gwhere + " must have duration_s > 0");

        for (const auto& pnode : required<json>(gnode, "players", gwhere)) {
            PlayerRecord p;
            p.player_id = required<std::string>(pnode, "player_id", gwhere + " player");
            const std::string pwhere = "player '" + p.player_id + "'";
            if (!player_ids.insert(p.player_id).second) {
                throw Error(ErrorCode::DuplicatePlayerId, p.player_id);
            }
            p.role = parse_role(required<std::string>(pnode, "role", pwhere), p.player_id);
            const auto files = required<std::map<std::string, std::string>>(pnode, "files", pwhere);
            for (const auto& ch : ds.channels) {
                const auto it = files.find(ch.name);
                if (it == files.end()) {
                    throw Error(ErrorCode::SchemaViolation, pwhere + " has no file for channel '" + ch.name + "'");
                }
                const fs::path rel(it->second);
                if (!fs::exists(ds.source_dir / rel)) {
                    throw Error(ErrorCode::MissingFile, rel.generic_string());
                }
                p.channel_files.emplace(ch.name, rel);
            }
            for (const auto& [name, _] : files) {
                if (!channel_names.count(name)) {
                    throw Error(ErrorCode::SchemaViolation, pwhere + " references undeclared channel '" + name + "'");
                }
            }
            game.players.push_back(std::move(p));
        }
        if (game.players.empty()) throw Error(ErrorCode::SchemaViolation, gwhere + " has no players");
        ds.games.push_back(std::move(game));
    }
    if (ds.games.empty()) throw Error(ErrorCode::SchemaViolation, "manifest declares no games");
    return ds;
}

void write_manifest(const GameDataset& ds, const fs::path& manifest_path) {
    json doc;
    doc["version"] = kManifestVersion;
    doc["channels"] = json::array();
    for (const auto& ch : ds.channels) {
        json c{{"name", ch.name}, {"dim", ch.dim}, {"level", to_string(ch.level)}};
        c[ch.level == ChannelLevel::Frame ? "fps" : "hop_s"] = ch.rate;
        doc["channels"].push_back(std::move(c));
    }
    doc["games"] = json::array();
    for (const auto& g : ds.games) {
        json gj{{"game_id", g.game_id}, {"duration_s", g.duration_s}, {"players", json::array()}};
        for (const auto& p : g.players) {
            json files = json::object();
            for (const auto& [name, rel] : p.channel_files) files[name] = rel.generic_string();
            gj["players"].push_back({{"player_id", p.player_id}, {"role", to_string(p.role)}, {"files", files}});
        }
        doc["games"].push_back(std::move(gj));
    }
    if (manifest_path.has_parent_path()) fs::create_directories(manifest_path.parent_path());
    std::ofstream out(manifest_path);
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write manifest '" + manifest_path.string() + "'");
}

FrameFeatureSeries read_series(const GameDataset& ds, const PlayerRecord& player, const ChannelSpec& channel) {
    const auto it = player.channel_files.find(channel.name);
    if (it == player.channel_files.end()) {
        throw Error(ErrorCode::MissingFile,
                    "player '" + player.player_id + "' has no file for channel '" + channel.name + "'");
    }
    return read_series_file(ds.source_dir / it->second, player.player_id, channel);
}

FrameFeatureSeries read_series_file(const fs::path& file, std::string player_id, const ChannelSpec& channel) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, file.string());

    FrameFeatureSeries s;
    s.player_id = std::move(player_id);
    s.channel = channel;

    const std::size_t width = channel.dim + 1;
    std::vector<double> flat;
    std::vector<double> row;
    row.reserve(width);
    std::string line;
    std::size_t line_no = 0;
    double prev_t = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        const auto first = view.find_first_not_of(" \t");
        if (first == std::string_view::npos || view[first] == '#') continue;

        if (!parse_row(view, row) || row.size() != width) {
            throw Error(ErrorCode::ParseError, file.string() + ":" + std::to_string(line_no) + ": expected " +
                                                   std::to_string(width) + " numeric fields");
        }
        const bool finite = std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); });
        if (!finite) {
            ++s.dropped_rows;
            continue;
        }
        if (!(row[0] > prev_t)) {
            throw Error(ErrorCode::ParseError,
                        file.string() + ":" + std::to_string(line_no) + ": timestamps not strictly increasing");
        }
        prev_t = row[0];
        s.timestamps_s.push_back(row[0]);
        flat.insert(flat.end(), row.begin() + 1, row.end());
    }
    if (s.timestamps_s.empty()) throw Error(ErrorCode::EmptySeries, file.string());

    s.values = Eigen::Map<const RowMatrix>(flat.data(), static_cast<Eigen::Index>(s.timestamps_s.size()),
                                           static_cast<Eigen::Index>(channel.dim));
    return s;
}

void write_series(const fs::path& file, const FrameFeatureSeries& series) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    char buf[64];
    std::string line;
    for (std::size_t i = 0; i < series.size(); ++i) {
        line.clear();
        auto append = [&](double v) {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            line.append(buf, ptr);
        };
        append(series.timestamps_s[i]);
        for (Eigen::Index d = 0; d < series.values.cols(); ++d) {
            line.push_back(',');
            append(series.values(static_cast<Eigen::Index>(i), d));
        }
        line.push_back('\n');
        out << line;
    }
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + file.string() + "'");
}

ValidationReport validate_dataset(const GameDataset& ds) {
    ValidationReport report;
    for (const auto& g : ds.games) {
        const auto spies = std::count_if(g.players.begin(), g.players.end(),
                                         [](const PlayerRecord& p) { return p.is_spy(); });
        if (spies < 2 || spies > 3) {
            report.warnings.push_back("game '" + g.game_id + "': spy count out of range (" +
                                      std::to_string(spies) + ", expected 2-3)");
        }
        if (g.players.size() < 5 || g.players.size() > 8) {
            report.warnings.push_back("game '" + g.game_id + "': player count out of range (" +
                                      std::to_string(g.players.size()) + ", expected 5-8)");
        }
        for (const auto& p : g.players) {
            for (const auto& ch : ds.channels) {
                ValidationReport::Coverage cov{p.player_id, ch.name};
                try {
                    const FrameFeatureSeries s = read_series(ds, p, ch);
                    cov.rows = s.size();
                    cov.dropped_rows = s.dropped_rows;
                    cov.last_timestamp_s = s.last_timestamp();
                    const double gap = std::abs(g.duration_s - s.last_timestamp()) / g.duration_s;
                    if (gap > kDurationMismatchTolerance) {
                        std::ostringstream msg;
                        msg << "player '" << p.player_id << "' channel '" << ch.name << "': duration mismatch (series ends at "
                            << s.last_timestamp() << " s, game declares " << g.duration_s << " s)";
                        report.warnings.push_back(msg.str());
                    }
                    if (s.dropped_rows > 0) {
                        report.warnings.push_back("player '" + p.player_id + "' channel '" + ch.name + "': dropped " +
                                                  std::to_string(s.dropped_rows) + " non-finite rows");
                    }
                } catch (const Error& e) {
                    report.errors.push_back("player '" + p.player_id + "' channel '" + ch.name + "': " + e.what());
                }
                report.coverage.push_back(std::move(cov));
            }
        }
    }
    return report;
}

}  // namespace gdd
