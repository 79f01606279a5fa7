#ifndef BHO_TESTS_HELPERS_HPP
#define BHO_TESTS_HELPERS_HPP

#include "bench/experiment.hpp"
#include "data/dataset.hpp"
#include "models/model.hpp"

namespace bho::testing {

inline models::Model small_elastic_net(std::uint64_t seed, int n_tr = 12, int n_val = 6,
                                       int n_te = 8, int p = 16)
{
    return bench::model_from_dataset(data::gen_elastic_net(seed, n_tr, n_val, n_te, p), 3,
                                     seed);
}

inline models::Model small_sgl(std::uint64_t seed, int n = 18, int p = 30, int m = 6)
{
    return bench::model_from_dataset(data::gen_sgl(seed, n, p, m), 3, seed);
}

inline models::Model small_svm(std::uint64_t seed, int n = 40, int p = 4, int folds = 3)
{
    return bench::model_from_dataset(data::gen_svm(seed, n, p), folds, seed);
}

/// Elastic net with identity training features, zero validation targets.
inline models::Model toy_elastic_net(const Eigen::VectorXd& b_tr,
                                     const Eigen::VectorXd& b_val)
{
    const int p = static_cast<int>(b_tr.size());
    models::RegressionSplits splits;
    splits.a_tr = Eigen::MatrixXd::Identity(p, p);
    splits.b_tr = b_tr;
    splits.a_val = Eigen::MatrixXd::Identity(b_val.size(), p);
    splits.b_val = b_val;
    splits.a_te = Eigen::MatrixXd::Identity(p, p);
    splits.b_te = Eigen::VectorXd::Zero(p);
    return models::Model::elastic_net(std::move(splits));
}

}  // namespace bho::testing

#endif
