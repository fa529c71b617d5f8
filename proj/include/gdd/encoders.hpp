#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdd/sampling.hpp"
#include "gdd/types.hpp"

namespace gdd {

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

// Per-dimension bin edges. Bins are left-closed except the last, which is
// closed on both sides; values outside [front, back] fall into the outermost
// bins.
struct BinEdges {
    std::string channel;
    std::vector<std::vector<double>> edges;  // one list of b+1 ascending edges per dimension

    std::size_t dims() const { return edges.size(); }
    std::size_t bins() const { return edges.empty() ? 0 : edges.front().size() - 1; }
    std::size_t bin_of(std::size_t dim, double value) const;
};

// Equal-width edges over [min, max] of each dimension's training values. A
// constant dimension gets edges spread evenly over [v - 0.5, v + 0.5].
BinEdges fit_bins(std::span<const std::vector<double>> training_values, std::size_t bins);

// Same, with one column of `values` per dimension.
BinEdges fit_bins(const RowMatrix& values, std::size_t bins);

enum class HistogramMode { FrameLevel, ClipLevel, Combined };
enum class HistogramNorm { Counts, Frequencies };

std::string_view to_string(HistogramMode mode) noexcept;
HistogramMode histogram_mode_from_string(std::string_view s);

struct HistogramEncoding {
    HistogramMode mode = HistogramMode::Combined;
    std::string channel;
    std::vector<std::size_t> selected_dims;  // indices into the channel's dimensions
    BinEdges frame_edges;                    // indexed like selected_dims
    BinEdges clip_edges;                     // indexed like selected_dims
    HistogramNorm normalize = HistogramNorm::Frequencies;

    std::size_t bins() const;
    std::size_t output_length() const;
};

// Fits frame- and clip-level edges on the training players' data for one
// channel. Only the edges the mode needs are fitted.
HistogramEncoding fit_histogram_encoding(std::span<const ChannelClips* const> training, std::string channel,
                                         std::vector<std::size_t> selected_dims, HistogramMode mode,
                                         std::size_t bins, HistogramNorm normalize);

// Histogram of one set of values against one dimension's edges.
Vector histogram(std::span<const double> values, const BinEdges& edges, std::size_t dim, HistogramNorm normalize);

// Player-level vector: per selected dimension, the frame histogram, the clip
// histogram, or both interleaved (frame_h1, clip_h1, frame_h2, ...).
Vector encode_histogram(const ChannelClips& player, const HistogramEncoding& enc);

// ---------------------------------------------------------------------------
// Gaussian mixture + Fisher Vectors
// ---------------------------------------------------------------------------

struct GmmOptions {
    std::size_t components = 32;
    std::uint64_t seed = 0;
    std::size_t max_iters = 100;
    double tol = 1e-6;  // on the change of mean per-sample log-likelihood
    double variance_floor = 1e-6;
};

// Diagonal-covariance Gaussian mixture.
struct GmmModel {
    Vector weights;       // K
    RowMatrix means;      // K x D
    RowMatrix variances;  // K x D
    // Mean per-sample training log-likelihood, one entry per EM evaluation.
    std::vector<double> log_likelihood_trace;
    std::size_t iterations = 0;
    bool converged = false;

    std::size_t components() const { return static_cast<std::size_t>(weights.size()); }
    std::size_t dim() const { return static_cast<std::size_t>(means.cols()); }

    // Per-row log of each component's weighted density (N x K).
    RowMatrix log_joint(const RowMatrix& x) const;
    // Posterior responsibilities (N x K).
    RowMatrix posteriors(const RowMatrix& x) const;
    double mean_log_likelihood(const RowMatrix& x) const;
    RowMatrix sample(std::size_t n, std::uint64_t seed) const;
};

// EM from a k-means++ initialisation.
GmmModel fit_gmm(const RowMatrix& data, const GmmOptions& options);

// Standard Fisher Vector: gradients with respect to the means and the
// standard deviations, averaged over rows and scaled by 1/sqrt(w_k) and
// 1/sqrt(2 w_k). Layout is [mean block K*D | variance block K*D]. With
// `normalize`, a signed square root and L2 normalisation follow.
Vector encode_fisher_vector(const RowMatrix& clips, const GmmModel& gmm, bool normalize);

}  // namespace gdd
