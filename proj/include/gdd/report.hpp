#pragma once

#include <cstddef>
#include <string>

#include "gdd/evaluation.hpp"

namespace gdd {

// Aligned text tables: ensemble Top-N, per-family results and, when
// present, the leave-one-out ablation.
std::string render_report(const ExperimentReport& report, std::size_t top);

// Classifier names joined by '+', in family order; inactive families are
// shown as '-'.
std::string ensemble_label(const EnsembleRow& row);

// One line per fold and per aggregate, tab-separated, for diffing.
std::string metrics_tsv(const ExperimentReport& report);

}  // namespace gdd
