#ifndef BHO_BASELINES_SEARCH_HPP
#define BHO_BASELINES_SEARCH_HPP

#include <cstdint>

#include "models/model.hpp"

namespace bho::baselines {

/// Per-hyperparameter-direction log10 search box. The defaults reproduce the
/// shared [1e-5, 1e2] box used by every gradient-free competitor.
struct GridSpec {
    double log10_lo = -5.0;
    double log10_hi = 2.0;
    int points = 10;

    void validate() const;
};

struct SearchResult {
    Eigen::VectorXd best_hyper;   // full hyperparameter vector
    double best_val_error = 0.0;
    double test_error = 0.0;
    Eigen::VectorXd best_x;
    int evaluations = 0;
    int failures = 0;  // points whose training solve failed (scored +inf)
};

/**
 * Uniformly log-spaced grid over the searched directions (both penalties for
 * the regression models; lambda only for the SVM, whose weight cap stays at
 * its upper bound). Ties break toward the lexicographically smallest
 * hyperparameters.
 */
SearchResult grid_search(const models::Model& model, const GridSpec& spec,
                         const solver::Settings& settings = {});

/// n log-uniform samples from the same box; deterministic in the seed.
SearchResult random_search(const models::Model& model, int n, const GridSpec& spec,
                           std::uint64_t seed, const solver::Settings& settings = {});

}  // namespace bho::baselines

#endif
