#include "gdd/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace gdd {

namespace {

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::vector<std::string> metric_cells(const MetricReport& m) {
    return {fixed(m.auc), fixed(m.f1), fixed(m.fnr), fixed(m.fpr), fixed(m.precision), fixed(m.recall)};
}

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string str() const {
        std::vector<std::size_t> width(header_.size());
        for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
        for (const auto& r : rows_) {
            for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
        }
        std::string out = line(header_, width);
        for (std::size_t c = 0; c < width.size(); ++c) {
            out += std::string(width[c] + (c == 0 ? 1 : 2), '-');
            out += c + 1 < width.size() ? "+" : "\n";
        }
        for (const auto& r : rows_) out += line(r, width);
        return out;
    }

private:
    static std::string line(const std::vector<std::string>& cells, const std::vector<std::size_t>& width) {
        std::string out;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out += " | ";
            out += cells[c];
            if (c + 1 < cells.size()) out += std::string(width[c] - cells[c].size(), ' ');
        }
        return out + "\n";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

const std::vector<std::string> kMetricHeader{"AUC", "F1", "FNR", "FPR", "Precision", "Recall"};

std::vector<std::string> with_metrics(std::string first, const std::vector<std::string>& rest) {
    std::vector<std::string> out{std::move(first)};
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

}  // namespace

std::string ensemble_label(const EnsembleRow& row) {
    std::string out;
    for (std::size_t i = 0; i < row.kinds.size(); ++i) {
        if (i > 0) out += "+";
        const bool active = i >= row.active.size() || row.active[i];
        out += active ? std::string(to_string(row.kinds[i])) : "-";
    }
    return out;
}

std::string render_report(const ExperimentReport& report, std::size_t top) {
    std::ostringstream out;
    out << "Mean ensemble AUC over " << report.folds.size() << " folds: " << fixed(report.mean.auc) << "\n\n";

    std::string order;
    for (const auto& f : report.config.families) order += (order.empty() ? "" : ", ") + f.name;

    const std::size_t shown = std::min(top, report.top.size());
    out << "Top " << shown << " ensembles by mean test AUC (classifier per family: " << order << ")\n";
    Table ens(with_metrics("Classifiers", kMetricHeader));
    for (std::size_t i = 0; i < shown; ++i) {
        ens.add(with_metrics(ensemble_label(report.top[i]), metric_cells(report.top[i].mean)));
    }
    out << ens.str() << "\n";

    out << "Per-family results (best validation classifier per fold)\n";
    Table fam(with_metrics("Feature family", kMetricHeader));
    for (const auto& f : report.families) fam.add(with_metrics(f.family, metric_cells(f.mean)));
    out << fam.str();

    if (!report.ablation.empty()) {
        out << "\nLeave-one-out ablation (full ensemble AUC " << fixed(report.mean.auc) << ")\n";
        std::vector<std::size_t> idx(report.ablation.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return report.ablation[a].mean.auc > report.ablation[b].mean.auc;
        });
        Table abl(with_metrics("Removed feature", kMetricHeader));
        for (auto i : idx) abl.add(with_metrics(report.ablation[i].removed, metric_cells(report.ablation[i].mean)));
        out << abl.str();
    }
    return out.str();
}

std::string metrics_tsv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "scope\tfold\tauc\tf1\tfnr\tfpr\tprecision\trecall\n";
    auto row = [&](const std::string& scope, const std::string& fold, const MetricReport& m) {
        out << scope << '\t' << fold;
        for (double v : {m.auc, m.f1, m.fnr, m.fpr, m.precision, m.recall}) out << '\t' << fixed(v, 6);
        out << '\n';
    };
    for (const auto& f : report.folds) row("ensemble", std::to_string(f.fold), f.test);
    row("ensemble", "mean", report.mean);
    for (std::size_t i = 0; i < report.families.size(); ++i) {
        for (const auto& f : report.folds) row("family:" + report.families[i].family, std::to_string(f.fold), f.families[i].test);
        row("family:" + report.families[i].family, "mean", report.families[i].mean);
    }
    for (const auto& a : report.ablation) row("ablate:" + a.removed, "mean", a.mean);
    return out.str();
}

}  // namespace gdd
