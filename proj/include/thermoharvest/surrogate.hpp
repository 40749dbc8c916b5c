#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "thermoharvest/pipeline.hpp"

namespace thermoharvest {

inline constexpr int kGprFormatVersion = 1;

/// Zero-mean, unit-variance scaling of inputs and target. Input columns with
/// zero spread are dropped; `retained` lists the original indices kept.
struct Standardizer {
    std::vector<std::size_t> retained;
    Eigen::VectorXd x_mean;  // over retained columns
    Eigen::VectorXd x_std;
    double y_mean = 0.0;
    double y_std = 1.0;
    bool constant_target = false;
    std::size_t input_dim = 0;  // before dropping

    static Standardizer fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);
    [[nodiscard]] Eigen::MatrixXd transform(const Eigen::MatrixXd& inputs) const;
};

struct GprHyperparameters {
    Eigen::VectorXd length_scales;  // standardized units, one per retained column
    double signal_variance = 1.0;   // s^2, standardized target units
    double noise_variance = 1e-8;   // sigma_n^2
};

struct GprModel {
    Standardizer standardizer;
    GprHyperparameters hyper;
    Eigen::MatrixXd training_inputs;  // standardized, retained columns
    Eigen::MatrixXd cholesky_factor;  // lower triangular L, L L^T = K + (sigma_n^2 + jitter) I
    Eigen::VectorXd alpha;
    double jitter = 0.0;
    double log_marginal_likelihood = 0.0;

    [[nodiscard]] std::size_t input_dim() const noexcept { return standardizer.input_dim; }
};

struct GprPrediction {
    double mean = 0.0;
    double variance = 0.0;  // target units squared
};

/// RBF kernel s^2 exp(-1/2 sum_d (a_d - b_d)^2 / l_d^2) on standardized rows.
Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& length_scales,
                           double signal_variance);

/// `length_scales` has one entry per input column (entries of dropped
/// columns are ignored). Escalates jitter 1e-10 .. 1e-6 if the Cholesky
/// factorisation fails; throws ConditioningError past that.
GprModel gpr_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, double noise_variance,
                 const Eigen::VectorXd& length_scales, double signal_variance = 1.0);

GprPrediction gpr_predict(const GprModel& model, const Eigen::VectorXd& x);

/// Means (and optionally variances) for every row of `inputs`.
void gpr_predict_batch(const GprModel& model, const Eigen::MatrixXd& inputs, Eigen::VectorXd& mean,
                       Eigen::VectorXd* variance = nullptr);

struct TuneOptions {
    std::size_t restarts = 2;
    std::uint64_t seed = 0;
    double noise_variance = 1e-8;
    std::size_t max_evaluations = 500;  // per restart
    /// Hyperparameters are searched on at most this many rows (a seeded subset),
    /// then the final model is fitted on every row.
    std::size_t max_rows = 200;
};

/// Nelder-Mead on -log p(y | X) over log length scales and log signal
/// variance. An isotropic search seeds the start; restarts beyond the first
/// perturb it with seeded offsets.
GprModel tune_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                              const TuneOptions& options);

struct RegressionMetrics {
    double r_squared = 0.0;
    double rmse = 0.0;
};

/// Exact R^2 and RMSE. Throws DomainError (R^2 undefined) for constant
/// y_true; use `rmse` directly in that case.
RegressionMetrics regression_metrics(const std::vector<double>& y_true, const std::vector<double>& y_pred);
double rmse(const std::vector<double>& y_true, const std::vector<double>& y_pred);

struct CvOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    TuneOptions tune;
};

/// k-fold cross-validation with hyperparameters tuned inside every fold.
/// Rows are put in a canonical order before the seeded fold assignment, so
/// the result does not depend on the input row order.
RegressionMetrics cross_validate(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                 const CvOptions& options);

RegressionMetrics cross_validate(const Dataset& dataset, const std::string& target, const CvOptions& options);

/// Design matrix (rows = designs, columns in DesignPoint::to_vector order).
Eigen::MatrixXd design_matrix(const std::vector<DesignPoint>& designs);
Eigen::VectorXd target_vector(const Dataset& dataset, const std::string& target);

std::string gpr_to_json(const GprModel& model);
GprModel gpr_from_json(const std::string& text);

/// One independent model per target metric, plus the CV scores of each.
struct SurrogateBundle {
    std::map<std::string, GprModel> models;
    std::map<std::string, RegressionMetrics> cv;
    std::string ledger_version;
    std::uint64_t seed = 0;
};

SurrogateBundle train_surrogate(const Dataset& dataset, const std::vector<std::string>& targets,
                                const CvOptions& options, std::size_t workers = 1);

std::string surrogate_to_json(const SurrogateBundle& bundle);
SurrogateBundle surrogate_from_json(const std::string& text);

}  // namespace thermoharvest
