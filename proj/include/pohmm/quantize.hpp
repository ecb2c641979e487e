#ifndef POHMM_QUANTIZE_HPP
#define POHMM_QUANTIZE_HPP

#include <string>
#include <vector>

#include "pohmm/rng.hpp"
#include "pohmm/sequence.hpp"

namespace pohmm {

/// Assignment of source frame columns to named groups; each group is
/// quantized independently and becomes one output dimension.
struct GroupSpec {
  std::vector<std::pair<std::string, std::vector<int>>> groups;

  int num_groups() const { return static_cast<int>(groups.size()); }
};

/// Throws InvalidInputError on empty groups, duplicate columns, or names
/// containing whitespace.
void check_group_spec(const GroupSpec& spec);

/// Per-group centroid matrices, K rows of group-width values each.
struct Codebook {
  std::vector<std::vector<std::vector<double>>> centroids;

  int num_groups() const { return static_cast<int>(centroids.size()); }
  int k() const { return static_cast<int>(centroids.front().size()); }
};

/// Throws InvalidInputError if any group holds duplicate centroids
/// (max coordinate difference <= 1e-12).
void check_codebook(const Codebook& codebook);

struct KmeansOptions {
  int max_iters = 100;
  int restarts = 10;
};

struct KmeansResult {
  std::vector<std::vector<double>> centroids;
  double distortion = 0.0;
  /// Distortion after each assignment step; non-increasing.
  std::vector<double> distortion_trace;
};

/// Lloyd's algorithm, best of `restarts` random-subset initializations by
/// final distortion.  Ties in assignment break to the lowest centroid
/// index; empty clusters are reseeded to the point farthest from its
/// current centroid.  Deterministic given the rng.
KmeansResult kmeans_fit(const std::vector<std::vector<double>>& vectors, int k,
                        const KmeansOptions& options, Rng& rng);

/// kmeans_fit per group over all frames, pooled across frame sequences.
Codebook fit_codebook(const std::vector<std::vector<std::vector<double>>>& frame_seqs,
                      const GroupSpec& spec, int k, const KmeansOptions& options,
                      Rng& rng);

/// Index of the nearest centroid by squared Euclidean distance, ties to
/// the lowest index.
int nearest_centroid(const std::vector<std::vector<double>>& centroids,
                     const std::vector<double>& point);

/// One frame sequence to one discrete sequence: per frame, per group, the
/// nearest-centroid index.
Sequence encode_sequence(const std::vector<std::vector<double>>& frames,
                         const GroupSpec& spec, const Codebook& codebook);

/// encode_sequence over every frame sequence; the alphabet has one
/// dimension per group with cardinality K.
SequenceDataset encode(const std::vector<std::vector<std::vector<double>>>& frame_seqs,
                       const GroupSpec& spec, const Codebook& codebook);

/// Column-wise z-scoring helper for the optional pre-clustering
/// normalization; returns the transformed copies.
std::vector<std::vector<std::vector<double>>> standardize_columns(
    const std::vector<std::vector<std::vector<double>>>& frame_seqs);

} // namespace pohmm

#endif
