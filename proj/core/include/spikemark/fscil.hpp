#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spikemark {

// ---------------------------------------------------------------------------
// Prototypical few-shot class-incremental learning over precomputed
// embeddings. The classifier is linear, g(e) = W·e + b, with rows derived
// from class prototypes so that argmax score = nearest prototype in squared
// Euclidean distance.
// ---------------------------------------------------------------------------

/// One embedding sample: a class label and either a single embedding vector
/// (timesteps = 1) or a per-timestep sequence laid out row-major T×dim.
struct embedding_sample {
    int class_id = 0;
    std::size_t timesteps = 1;
    std::vector<double> values;  ///< timesteps × dim, row-major
};

struct embedding_dataset {
    std::size_t dim = 0;
    std::vector<embedding_sample> samples;
};

/// CSV with header `class_id, t, e_0..e_{D-1}`; rows of one sample are
/// consecutive, a new sample starts whenever t == 0. Throws data_error on
/// malformed input.
embedding_dataset load_embedding_csv(const std::string& path);
void save_embedding_csv(const std::string& path, const embedding_dataset& ds);

/// Seeded synthetic dataset: `classes` Gaussian clusters in `dim` dimensions
/// with centroids drawn uniformly in [-separation, separation]^dim, redrawn
/// until pairwise centroid distance >= min_centroid_distance, and per-sample
/// noise of the given sigma. samples_per_class rows per class, class ids
/// 0..classes-1, dataset order grouped by class.
embedding_dataset synthetic_clusters(int classes, std::size_t dim,
                                     int samples_per_class, double separation,
                                     double min_centroid_distance, double noise_sigma,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Prototype classifier.
// ---------------------------------------------------------------------------

struct prototype_classifier {
    std::size_t dim = 0;
    bool temporal = false;
    std::size_t t = 1;             ///< timestep count used for bias normalization
    std::vector<int> class_ids;    ///< ordered, unique
    std::vector<double> weights;   ///< rows per class, row-major classes×dim
    std::vector<double> biases;    ///< one per class
};

/// Elementwise mean of embeddings; the temporal variant first sums each
/// sample's per-timestep embeddings into one vector. Throws data_error on
/// an empty list or mismatched dimensions.
std::vector<double> compute_prototype(const std::vector<const embedding_sample*>& members,
                                      std::size_t dim, bool temporal);

/// w = 2c, b = -‖c‖² (divided by T for the temporal variant; T must be > 0).
struct prototype_row {
    std::vector<double> w;
    double b = 0;
};
prototype_row prototype_weights(const std::vector<double>& c, bool temporal,
                                std::size_t t);

/// Build a classifier holding exactly the given base-class prototypes,
/// ordered by class id. Throws data_error on duplicates or an empty set.
prototype_classifier replace_readout(const std::vector<std::pair<int, std::vector<double>>>& prototypes,
                                     bool temporal, std::size_t t);

/// Append new class rows; existing rows are untouched. Throws data_error on
/// a class-id collision.
prototype_classifier extend_classifier(prototype_classifier classifier,
                                       const std::vector<std::pair<int, std::vector<double>>>& prototypes);

/// Argmax class of W·e + b. For temporal samples the score is
/// Σ_t (w·e_t) + T·b, keeping the per-timestep bias convention. Ties break
/// toward the lowest class id. Throws data_error on dimension mismatch.
int classify(const prototype_classifier& classifier, const embedding_sample& e);

// ---------------------------------------------------------------------------
// Session protocol.
// ---------------------------------------------------------------------------

struct session_classes {
    std::vector<int> class_ids;
};

struct session_plan {
    std::vector<int> base_classes;
    std::vector<session_classes> incremental;  ///< M sessions of N classes each
    int shots = 0;                             ///< K training samples per incremental class
    int eval_per_class = 0;
};

/// Split a dataset per class in dataset order: the last eval_per_class
/// samples of each class are evaluation, the rest train (incremental classes
/// keep only the first K of the rest). Classes are assigned to base /
/// sessions in ascending class-id order. Throws data_error when a class has
/// too few samples.
session_plan make_session_plan(const embedding_dataset& ds, int base_classes,
                               int sessions, int ways, int shots, int eval_per_class);

enum class fscil_mode { prototypical, frozen };

struct session_result {
    int session = 0;               ///< 0 = base, then 1..M
    double accuracy_all = 0;       ///< over eval samples of every class seen so far
    double accuracy_new = 0;       ///< over eval samples of this session's classes (session 0: base)
    std::size_t classifier_rows = 0;
};

struct fscil_result {
    fscil_mode mode = fscil_mode::prototypical;
    std::vector<session_result> sessions;  ///< size M+1
    double mean_accuracy_all = 0;
};

/// Run the incremental protocol. Prototypical mode replaces the readout with
/// base prototypes and extends it each session; frozen mode keeps the
/// base-prototype classifier untouched, so unseen classes score 0 by
/// construction. The extractor maps raw samples to embeddings; pass
/// identity_extractor for precomputed-embedding datasets.
using feature_extractor = std::function<embedding_sample(const embedding_sample&)>;
feature_extractor identity_extractor();

fscil_result run_fscil(const embedding_dataset& ds, const session_plan& plan,
                       fscil_mode mode, const feature_extractor& extractor,
                       bool temporal = false);

}  // namespace spikemark
