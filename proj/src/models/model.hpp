#ifndef BHO_MODELS_MODEL_HPP
#define BHO_MODELS_MODEL_HPP

#include <string>
#include <vector>

#include "atoms/atom.hpp"
#include "conic/builder.hpp"
#include "reform/iterate.hpp"
#include "reform/majorize.hpp"
#include "solver/socp.hpp"

namespace bho::models {

enum class Variant { ElasticNet, SparseGroupLasso, SvmCv };

const char* variant_name(Variant v);

/// Train/validation/test splits for the regression models.
struct RegressionSplits {
    Eigen::MatrixXd a_tr, a_val, a_te;
    Eigen::VectorXd b_tr, b_val, b_te;
};

/// Cross-validated SVM data: a CV set with a fold assignment, box bounds on
/// the weight cap, and a held-out test set.
struct SvmProblem {
    Eigen::MatrixXd a;
    Eigen::VectorXd labels;  // in {-1, +1}
    std::vector<int> fold_of;
    int folds = 0;
    Eigen::VectorXd w_lb, w_ub;
    Eigen::MatrixXd a_te;
    Eigen::VectorXd labels_te;
};

/**
 * A bilevel hyperparameter selection problem: upper level scores validation
 * error, lower level trains at fixed hyperparameters. Owns the data and the
 * conic builders of its variant.
 *
 * Hyperparameter layout: elastic net (lambda1, lambda2); sparse group lasso
 * (lambda_1..lambda_M, lambda_{M+1} for the l1 part); SVM (lambda, wbar_1..p)
 * with radii (r1, r2_1..p).
 */
class Model {
  public:
    static Model elastic_net(RegressionSplits data);
    static Model sparse_group_lasso(RegressionSplits data,
                                    std::vector<std::vector<int>> groups);
    static Model svm_cv(SvmProblem data);

    Variant variant() const { return variant_; }
    int tau() const;    // hyperparameter count
    int x_dim() const;  // lower-level variable count

    const RegressionSplits& reg() const { return reg_; }
    const SvmProblem& svm() const { return svm_; }
    const std::vector<atoms::Atom>& regularizers() const { return regs_; }
    const atoms::Atom& loss() const { return loss_.front(); }
    const std::vector<std::vector<int>>& groups() const { return groups_; }

    /// Number of genuine P_i(x) <= r_i constraints (the SVM's r2 block pairs
    /// with box multipliers instead of a regularizer value).
    int p_count() const;
    double p_value(int i, const Eigen::VectorXd& x) const;

    double ul_objective(const Eigen::VectorXd& x) const;
    /// Per-sample-normalized validation error.
    double val_error(const Eigen::VectorXd& x) const;
    /// Per-sample-normalized test error. The SVM refits on the full CV set at
    /// the tuned hyperparameters before scoring.
    double test_error(const Eigen::VectorXd& x, const Eigen::VectorXd& hyper,
                      const solver::Settings& settings = {}) const;

    // SVM helpers
    int svm_fold_size(int k, bool train) const;
    std::vector<int> svm_fold_rows(int k, bool train) const;
    double svm_fold_weight(int k) const;  // 1 / (K * |train fold k|)
    Eigen::VectorXd svm_w(const Eigen::VectorXd& x, int k) const;
    double svm_c(const Eigen::VectorXd& x, int k) const;

  private:
    Variant variant_ = Variant::ElasticNet;
    RegressionSplits reg_;
    SvmProblem svm_;
    std::vector<atoms::Atom> regs_;
    std::vector<atoms::Atom> loss_;
    std::vector<std::vector<int>> groups_;
};

struct LowerLevelResult {
    solver::Status status = solver::Status::NumericalError;
    Eigen::VectorXd x;
    reform::IteratePoint point;  // duals filled so the duality gap vanishes
};

/// Train at fixed hyperparameters. With want_duals the conjugate certificates
/// (rho, w, s, and for the SVM v and the box multipliers) are recovered from
/// a second, dual-side conic solve.
LowerLevelResult ll_solve(const Model& model, const Eigen::VectorXd& hyper,
                          const solver::Settings& settings = {}, bool want_duals = true);

/// Variant-specialized conic subproblem around the anchor: the least-squares
/// models get the one-big-cone form, the SVM its cross-validated program.
conic::BuiltProgram build_subproblem(const Model& model, const reform::IteratePoint& anchor,
                                     double eps, double beta,
                                     reform::MajorizationPolicy policy);

/// Recover the structured iterate from a solution of either subproblem form.
reform::IteratePoint extract_point(const Model& model, const conic::BuiltProgram& built,
                                   const Eigen::VectorXd& z);

// Variant internals shared between the builders (defined per variant).
conic::BuiltProgram build_regression_subproblem(const Model& model,
                                                const reform::IteratePoint& anchor,
                                                double eps, double beta,
                                                reform::MajorizationPolicy policy);
conic::BuiltProgram build_svm_subproblem(const Model& model,
                                         const reform::IteratePoint& anchor, double eps,
                                         double beta, reform::MajorizationPolicy policy);
LowerLevelResult regression_ll_solve(const Model& model, const Eigen::VectorXd& hyper,
                                     const solver::Settings& settings, bool want_duals);
LowerLevelResult svm_ll_solve(const Model& model, const Eigen::VectorXd& hyper,
                              const solver::Settings& settings, bool want_duals);

/// Single SVM training problem (one fold, or the full CV set for refits).
struct SvmFit {
    solver::Status status;
    Eigen::VectorXd w;
    double c;
};
SvmFit svm_train(const Eigen::MatrixXd& a, const Eigen::VectorXd& labels, double lambda,
                 const Eigen::VectorXd& w_cap, const solver::Settings& settings);

double hinge_loss(const Eigen::MatrixXd& a, const Eigen::VectorXd& labels,
                  const Eigen::VectorXd& w, double c);

/// Accept a solve for certificate use: Optimal, or a stalled best iterate
/// whose recomputed residuals still meet the default 1e-8 level.
bool certificate_grade(const solver::Solution& sol);

}  // namespace bho::models

#endif
