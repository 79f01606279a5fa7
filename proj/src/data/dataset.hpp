#ifndef BHO_DATA_DATASET_HPP
#define BHO_DATA_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bho::data {

enum class Task { Regression, Classification };

/**
 * A dataset with its split bookkeeping. Regression sets carry ordered
 * train/validation/test index ranges; classification sets keep labels in
 * {-1, +1} and split into a cross-validation part plus a held-out test part.
 */
struct Dataset {
    Task task = Task::Regression;
    Eigen::MatrixXd features;
    Eigen::VectorXd targets;
    std::vector<int> train_idx, val_idx, test_idx;
    std::vector<std::vector<int>> groups;  // sparse-group-lasso coordinate groups
    std::string kind;                      // generator name or "libsvm"
    std::uint64_t seed = 0;

    int num_samples() const { return static_cast<int>(features.rows()); }
    int num_features() const { return static_cast<int>(features.cols()); }

    Eigen::MatrixXd rows(const std::vector<int>& idx) const;
    Eigen::VectorXd target_rows(const std::vector<int>& idx) const;
};

/**
 * Elastic-net generator: rows are Gaussian with the stationary first-order
 * autoregressive correlation cor(a_j, a_k) = 0.5^|j-k| (sampled through the
 * banded Cholesky recursion a_j = 0.5 a_{j-1} + sqrt(0.75) eta_j), a signal
 * with 15 unit entries at uniformly drawn positions, and targets
 * b = A beta + 2 eta. Deterministic in the seed. Requires p >= 15.
 */
Dataset gen_elastic_net(std::uint64_t seed, int n_tr, int n_val, int n_te, int p);

/**
 * Sparse-group-lasso generator: standard normal features, p split into m
 * equal groups; the signal is (1,2,3,4,5,0,...) in each of the first three
 * groups and zero elsewhere; targets b = A beta + 2 eta. Splits are n train,
 * n/3 validation, 100 test.
 */
Dataset gen_sgl(std::uint64_t seed, int n, int p, int m);

/**
 * Synthetic linearly-separable-with-noise classification set: a planted unit
 * normal w*, margins flipped by Gaussian noise, labels in {-1, +1}. Used as
 * the bundled small SVM benchmark.
 */
Dataset gen_svm(std::uint64_t seed, int n, int p, double noise = 0.4);

/// Parse the standard sparse text format, one sample per line:
///   label idx:val idx:val ...
/// with 1-based strictly increasing indices. Labels 0/1 are remapped to -1/+1;
/// anything else not already in {-1, +1} is rejected. Errors carry the 1-based
/// line number.
Dataset parse_libsvm(const std::string& text);

/// Inverse of parse_libsvm (zero entries omitted).
std::string serialize_libsvm(const Dataset& dataset);

/// Deterministic K-fold assignment of n samples: a seeded shuffle dealt
/// round-robin, so fold sizes differ by at most one.
std::vector<int> kfold_split(int n, int k, std::uint64_t seed);

/// On-disk form: <stem>.csv (or .libsvm for classification) plus a
/// <stem>.json sidecar holding splits and generator metadata.
void save_dataset(const Dataset& dataset, const std::string& stem);
Dataset load_dataset(const std::string& stem);

/// Human-readable one-line-per-fact manifest used by the CLI.
std::string manifest(const Dataset& dataset, const std::string& stem);

}  // namespace bho::data

#endif
