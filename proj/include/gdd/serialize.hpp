#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gdd/bundle.hpp"
#include "gdd/evaluation.hpp"
#include "gdd/synthetic.hpp"

namespace gdd {

// JSON text forms. Parsers reject unknown keys and wrong types with
// SchemaViolation and malformed text with ParseError; missing keys keep
// their defaults.
std::string to_json_text(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view text);

std::string to_json_text(const ExperimentReport& report);
ExperimentReport report_from_json(std::string_view text);

std::string to_json_text(const ModelBundle& bundle);
ModelBundle bundle_from_json(std::string_view text);

std::string to_json_text(const FittedEncoder& encoder);
FittedEncoder encoder_from_json(std::string_view text);

SyntheticSpec synthetic_spec_from_json(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gdd
