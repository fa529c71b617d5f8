#include "gdd/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gdd/error.hpp"
#include "gdd/rng.hpp"

namespace gdd {

namespace {

std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins) {
    std::vector<double> e(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + width * static_cast<double>(i);
    e.back() = hi;
    return e;
}

bool strictly_increasing(const std::vector<double>& e) {
    return std::adjacent_find(e.begin(), e.end(), [](double a, double b) { return !(a < b); }) == e.end();
}

// k-means++ seeding followed by one hard assignment to obtain initial
// weights, means and variances.
GmmModel kmeanspp_init(const RowMatrix& x, const GmmOptions& opt) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const auto k = static_cast<Eigen::Index>(opt.components);
    Rng rng(opt.seed);

    RowMatrix centers(k, d);
    centers.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    std::vector<double> dist2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (Eigen::Index c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d2 = (x.row(i) - centers.row(c - 1)).squaredNorm();
            auto& best = dist2[static_cast<std::size_t>(i)];
            best = std::min(best, d2);
            total += best;
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (pick = 0; pick < n - 1; ++pick) {
                target -= dist2[static_cast<std::size_t>(pick)];
                if (target < 0.0) break;
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        }
        centers.row(c) = x.row(pick);
    }

    std::vector<Eigen::Index> assign(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
        assign[static_cast<std::size_t>(i)] = best;
    }

    const Eigen::RowVectorXd global_mean = x.colwise().mean();
    Eigen::RowVectorXd global_var = (x.rowwise() - global_mean).array().square().colwise().mean();
    global_var = global_var.cwiseMax(opt.variance_floor);

    GmmModel g;
    g.weights = Vector::Zero(k);
    g.means = RowMatrix::Zero(k, d);
    g.variances = RowMatrix::Zero(k, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto c = assign[static_cast<std::size_t>(i)];
        g.weights(c) += 1.0;
        g.means.row(c) += x.row(i);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        if (g.weights(c) > 0.0) {
            g.means.row(c) /= g.weights(c);
        } else {
            g.means.row(c) = centers.row(c);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto c = assign[static_cast<std::size_t>(i)];
        g.variances.row(c) += (x.row(i) - g.means.row(c)).array().square().matrix();
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        if (g.weights(c) > 1.0) {
            g.variances.row(c) = (g.variances.row(c) / g.weights(c)).cwiseMax(opt.variance_floor);
        } else {
            g.variances.row(c) = global_var;
        }
    }
    // Every component keeps some mass so that the first E-step is well defined.
    g.weights = (g.weights.array() + 1.0) / static_cast<double>(n + k);
    return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

std::size_t BinEdges::bin_of(std::size_t dim, double value) const {
    const auto& e = edges.at(dim);
    const auto inner_begin = e.begin() + 1;
    const auto inner_end = e.end() - 1;
    return static_cast<std::size_t>(std::upper_bound(inner_begin, inner_end, value) - inner_begin);
}

BinEdges fit_bins(std::span<const std::vector<double>> training_values, std::size_t bins) {
    if (bins < 2) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 2");
    if (training_values.empty()) throw Error(ErrorCode::EmptyInput, "no dimensions to bin");
    BinEdges out;
    out.edges.reserve(training_values.size());
    for (std::size_t d = 0; d < training_values.size(); ++d) {
        const auto& v = training_values[d];
        if (v.empty()) throw Error(ErrorCode::EmptyInput, "dimension " + std::to_string(d) + " has no values");
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        if (!std::isfinite(*mn) || !std::isfinite(*mx)) {
            throw Error(ErrorCode::NonFiniteInput, "dimension " + std::to_string(d) + " has non-finite values");
        }
        auto e = equal_width_edges(*mn, *mx, bins);
        if (!strictly_increasing(e)) e = equal_width_edges(*mn - 0.5, *mn + 0.5, bins);
        out.edges.push_back(std::move(e));
    }
    return out;
}

BinEdges fit_bins(const RowMatrix& values, std::size_t bins) {
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(values.cols()));
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        auto& col = cols[static_cast<std::size_t>(c)];
        col.reserve(static_cast<std::size_t>(values.rows()));
        for (Eigen::Index r = 0; r < values.rows(); ++r) col.push_back(values(r, c));
    }
    return fit_bins(std::span<const std::vector<double>>(cols), bins);
}

std::string_view to_string(HistogramMode mode) noexcept {
    switch (mode) {
        case HistogramMode::FrameLevel: return "frame";
        case HistogramMode::ClipLevel: return "clip";
        case HistogramMode::Combined: return "combined";
    }
    return "combined";
}

HistogramMode histogram_mode_from_string(std::string_view s) {
    if (s == "frame") return HistogramMode::FrameLevel;
    if (s == "clip") return HistogramMode::ClipLevel;
    if (s == "combined") return HistogramMode::Combined;
    throw Error(ErrorCode::InvalidArgument, "unknown histogram mode '" + std::string(s) + "'");
}

std::size_t HistogramEncoding::bins() const {
    return mode == HistogramMode::ClipLevel ? clip_edges.bins() : frame_edges.bins();
}

std::size_t HistogramEncoding::output_length() const {
    const std::size_t per_dim = mode == HistogramMode::Combined ? 2 * bins() : bins();
    return per_dim * selected_dims.size();
}

HistogramEncoding fit_histogram_encoding(std::span<const ChannelClips* const> training, std::string channel,
                                         std::vector<std::size_t> selected_dims, HistogramMode mode,
                                         std::size_t bins, HistogramNorm normalize) {
    if (training.empty()) throw Error(ErrorCode::EmptyInput, "no training players for channel '" + channel + "'");
    if (selected_dims.empty()) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one dimension");

    HistogramEncoding enc;
    enc.mode = mode;
    enc.channel = channel;
    enc.normalize = normalize;

    const bool want_frames = mode != HistogramMode::ClipLevel;
    const bool want_clips = mode != HistogramMode::FrameLevel;
    std::vector<std::vector<double>> frame_vals(selected_dims.size());
    std::vector<std::vector<double>> clip_vals(selected_dims.size());
    for (const ChannelClips* p : training) {
        for (std::size_t j = 0; j < selected_dims.size(); ++j) {
            const auto d = static_cast<Eigen::Index>(selected_dims[j]);
            if (d >= p->frames.cols()) {
                throw Error(ErrorCode::DimMismatch, "dimension " + std::to_string(d) + " out of range for '" + channel + "'");
            }
            if (want_frames) {
                for (Eigen::Index r = 0; r < p->frames.rows(); ++r) frame_vals[j].push_back(p->frames(r, d));
            }
            if (want_clips) {
                for (const auto& c : p->clips) clip_vals[j].push_back(c.vector(d));
            }
        }
    }
    if (want_frames) {
        enc.frame_edges = fit_bins(std::span<const std::vector<double>>(frame_vals), bins);
        enc.frame_edges.channel = channel;
    }
    if (want_clips) {
        enc.clip_edges = fit_bins(std::span<const std::vector<double>>(clip_vals), bins);
        enc.clip_edges.channel = channel;
    }
    enc.selected_dims = std::move(selected_dims);
    return enc;
}

Vector histogram(std::span<const double> values, const BinEdges& edges, std::size_t dim, HistogramNorm normalize) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values to histogram");
    Vector h = Vector::Zero(static_cast<Eigen::Index>(edges.bins()));
    for (double v : values) h(static_cast<Eigen::Index>(edges.bin_of(dim, v))) += 1.0;
    if (normalize == HistogramNorm::Frequencies) h /= static_cast<double>(values.size());
    return h;
}

Vector encode_histogram(const ChannelClips& player, const HistogramEncoding& enc) {
    const bool want_frames = enc.mode != HistogramMode::ClipLevel;
    const bool want_clips = enc.mode != HistogramMode::FrameLevel;
    if ((want_frames && enc.frame_edges.dims() != enc.selected_dims.size()) ||
        (want_clips && enc.clip_edges.dims() != enc.selected_dims.size())) {
        throw Error(ErrorCode::EdgesMissing, "histogram edges for '" + enc.channel + "' are not fitted");
    }
    if ((want_frames && player.frames.rows() == 0) || (want_clips && player.clips.empty())) {
        throw Error(ErrorCode::EmptyInput, "player has no data for '" + enc.channel + "'");
    }

    Vector out(static_cast<Eigen::Index>(enc.output_length()));
    Eigen::Index pos = 0;
    std::vector<double> buf;
    for (std::size_t j = 0; j < enc.selected_dims.size(); ++j) {
        const auto d = static_cast<Eigen::Index>(enc.selected_dims[j]);
        if (d >= player.frames.cols()) throw Error(ErrorCode::DimMismatch, "dimension out of range for '" + enc.channel + "'");
        if (want_frames) {
            buf.assign(static_cast<std::size_t>(player.frames.rows()), 0.0);
            for (Eigen::Index r = 0; r < player.frames.rows(); ++r) buf[static_cast<std::size_t>(r)] = player.frames(r, d);
            const Vector h = histogram(buf, enc.frame_edges, j, enc.normalize);
            out.segment(pos, h.size()) = h;
            pos += h.size();
        }
        if (want_clips) {
            buf.clear();
            for (const auto& c : player.clips) buf.push_back(c.vector(d));
            const Vector h = histogram(buf, enc.clip_edges, j, enc.normalize);
            out.segment(pos, h.size()) = h;
            pos += h.size();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian mixture
// ---------------------------------------------------------------------------

RowMatrix GmmModel::log_joint(const RowMatrix& x) const {
    const Eigen::Index k = weights.size();
    const Eigen::Index d = means.cols();
    RowMatrix out(x.rows(), k);
    constexpr double log2pi = 1.8378770664093453;  // log(2*pi)
    for (Eigen::Index c = 0; c < k; ++c) {
        const double lw = weights(c) > 0.0 ? std::log(weights(c)) : -std::numeric_limits<double>::infinity();
        const Vector inv_var = variances.row(c).cwiseInverse().transpose();
        const double log_norm = -0.5 * (static_cast<double>(d) * log2pi + variances.row(c).array().log().sum());
        const Vector maha = (x.rowwise() - means.row(c)).array().square().matrix() * inv_var;
        out.col(c) = (lw + log_norm) - 0.5 * maha.array();
    }
    return out;
}

RowMatrix GmmModel::posteriors(const RowMatrix& x) const {
    RowMatrix lj = log_joint(x);
    const Vector row_max = lj.rowwise().maxCoeff();
    lj = (lj.colwise() - row_max).array().exp();
    const Vector row_sum = lj.rowwise().sum();
    lj = lj.array().colwise() / row_sum.array();
    return lj;
}

double GmmModel::mean_log_likelihood(const RowMatrix& x) const {
    RowMatrix lj = log_joint(x);
    const Vector row_max = lj.rowwise().maxCoeff();
    lj = (lj.colwise() - row_max).array().exp();
    return (row_max.array() + lj.rowwise().sum().array().log()).sum() / static_cast<double>(x.rows());
}

RowMatrix GmmModel::sample(std::size_t n, std::uint64_t seed) const {
    Rng rng(seed);
    RowMatrix out(static_cast<Eigen::Index>(n), means.cols());
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        Eigen::Index c = 0;
        for (; c < weights.size() - 1; ++c) {
            u -= weights(c);
            if (u < 0.0) break;
        }
        for (Eigen::Index d = 0; d < means.cols(); ++d) {
            out(static_cast<Eigen::Index>(i), d) = rng.normal(means(c, d), std::sqrt(variances(c, d)));
        }
    }
    return out;
}

GmmModel fit_gmm(const RowMatrix& data, const GmmOptions& opt) {
    if (opt.components < 1) throw Error(ErrorCode::InvalidArgument, "GMM needs at least one component");
    if (data.rows() < static_cast<Eigen::Index>(opt.components)) {
        throw Error(ErrorCode::TooFewPoints, std::to_string(data.rows()) + " rows for " +
                                                 std::to_string(opt.components) + " components");
    }
    if (!data.allFinite()) throw Error(ErrorCode::NonFiniteInput, "GMM training data has non-finite values");

    const Eigen::Index n = data.rows();
    const Eigen::Index k = static_cast<Eigen::Index>(opt.components);
    GmmModel g = kmeanspp_init(data, opt);

    RowMatrix resp(n, k);
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 0;; ++it) {
        // E-step.
        resp = g.log_joint(data);
        const Vector row_max = resp.rowwise().maxCoeff();
        resp = (resp.colwise() - row_max).array().exp();
        const Vector row_sum = resp.rowwise().sum();
        resp = resp.array().colwise() / row_sum.array();
        const double ll = (row_max.array() + row_sum.array().log()).sum() / static_cast<double>(n);
        g.log_likelihood_trace.push_back(ll);
        if (it > 0 && std::abs(ll - prev) < opt.tol) {
            g.converged = true;
            break;
        }
        if (it == opt.max_iters) break;
        prev = ll;

        // M-step; the floored variance is the constrained maximiser.
        const Vector nk = resp.colwise().sum().transpose();
        for (Eigen::Index c = 0; c < k; ++c) {
            g.weights(c) = nk(c) / static_cast<double>(n);
            if (nk(c) <= std::numeric_limits<double>::min()) continue;
            const Eigen::RowVectorXd mu = (resp.col(c).transpose() * data) / nk(c);
            const Eigen::RowVectorXd var = resp.col(c).transpose() * (data.rowwise() - mu).array().square().matrix();
            g.means.row(c) = mu;
            g.variances.row(c) = (var / nk(c)).cwiseMax(opt.variance_floor);
        }
        g.iterations = it + 1;
    }
    return g;
}

Vector encode_fisher_vector(const RowMatrix& clips, const GmmModel& gmm, bool normalize) {
    if (clips.rows() == 0) throw Error(ErrorCode::EmptyInput, "no clips to encode");
    if (static_cast<std::size_t>(clips.cols()) != gmm.dim()) {
        throw Error(ErrorCode::DimMismatch, "clip dimension " + std::to_string(clips.cols()) + " vs GMM dimension " +
                                                std::to_string(gmm.dim()));
    }
    const Eigen::Index k = static_cast<Eigen::Index>(gmm.components());
    const Eigen::Index d = static_cast<Eigen::Index>(gmm.dim());
    const RowMatrix post = gmm.posteriors(clips);
    const double inv_n = 1.0 / static_cast<double>(clips.rows());

    Vector fv = Vector::Zero(2 * k * d);
    for (Eigen::Index c = 0; c < k; ++c) {
        const double w = gmm.weights(c);
        if (!(w > 0.0)) continue;
        const Eigen::RowVectorXd inv_sd = gmm.variances.row(c).cwiseSqrt().cwiseInverse();
        Eigen::RowVectorXd g_mu = Eigen::RowVectorXd::Zero(d);
        Eigen::RowVectorXd g_sd = Eigen::RowVectorXd::Zero(d);
        for (Eigen::Index i = 0; i < clips.rows(); ++i) {
            const double r = post(i, c);
            if (r == 0.0) continue;
            const Eigen::RowVectorXd z = (clips.row(i) - gmm.means.row(c)).cwiseProduct(inv_sd);
            g_mu += r * z;
            g_sd += r * (z.array().square() - 1.0).matrix();
        }
        fv.segment(c * d, d) = (g_mu * (inv_n / std::sqrt(w))).transpose();
        fv.segment(k * d + c * d, d) = (g_sd * (inv_n / std::sqrt(2.0 * w))).transpose();
    }
    if (normalize) {
        fv = fv.unaryExpr([](double v) { return std::copysign(std::sqrt(std::abs(v)), v); });
        const double norm = fv.norm();
        if (norm > 0.0) fv /= norm;
    }
    return fv;
}

}  // namespace gdd
