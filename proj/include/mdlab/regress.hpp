#pragma once

#include <string>
#include <vector>

#include "mdlab/common.hpp"
#include "mdlab/random.hpp"

namespace mdlab {

/// F x C energy signatures with direction labels in degrees.
struct RegressionDataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd targets_deg;
    std::string split_tag = "regr_train";

    Eigen::Index size() const { return features.rows(); }
    void validate() const;
    RegressionDataset subset(const std::vector<Eigen::Index>& rows) const;
};

/// Per-dimension affine map to zero mean and unit variance. Constant
/// dimensions keep scale 1 so they contribute nothing after centering.
struct FeatureScaling {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static FeatureScaling fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

/// How directions are represented as regression targets. `angle_pair`
/// regresses (cos, sin) and recovers the angle with atan2.
enum class TargetHead { degrees, angle_pair };

std::string to_string(TargetHead h);
TargetHead parse_target_head(const std::string& s);

// --- epsilon-SVR ------------------------------------------------------------

enum class KernelKind { rbf, linear };

struct SvrHyper {
    double box_c = 100.0;
    double tube_eps = 1.0;
    KernelKind kernel = KernelKind::rbf;
    double gamma = 0.5;  ///< RBF width, k(x, x') = exp(-gamma ||x - x'||^2)
    double tol = 1e-6;   ///< maximal-violating-pair KKT tolerance
    long max_iter = 10'000'000;
};

double kernel_value(const SvrHyper& h, const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b);

/// Solution of the epsilon-SVR dual over a precomputed kernel matrix:
/// f(x_i) = sum_j coef_j K_ij + bias, sum_j coef_j = 0, |coef_j| <= box_c.
struct SvrDualSolution {
    Eigen::VectorXd alpha;       ///< 2l variables (alpha, alpha*)
    Eigen::VectorXd coef;        ///< alpha - alpha*
    double bias = 0.0;
    double objective = 0.0;      ///< 0.5 a^T Q a + p^T a at the solution
    long iterations = 0;
};

/// Second-order working-set SMO on the 2l-variable dual.
SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& targets, double box_c,
                               double tube_eps, double tol = 1e-6, long max_iter = 10'000'000);

struct SvrModel {
    SvrHyper hyper;
    FeatureScaling scaling;
    Eigen::MatrixXd support_vectors;  ///< scaled features, one per row
    Eigen::VectorXd dual_coeffs;
    double bias = 0.0;
    double dual_objective = 0.0;

    double predict_raw(const Eigen::VectorXd& features) const;
};

/// Fits one SVR on raw targets. Throws TrainingError when every feature
/// dimension is constant.
SvrModel train_svr(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, const SvrHyper& hyper);

// --- MLP --------------------------------------------------------------------

struct MlpHyper {
    std::vector<int> hidden{32};
    double learning_rate = 0.05;
    double momentum = 0.9;
    int epochs = 2000;
};

/// tanh hidden layers, linear output; inputs and targets are standardized
/// with training statistics stored in the model.
struct MlpModel {
    std::vector<int> layer_sizes;
    std::vector<Eigen::MatrixXd> weights;  ///< weights[l] is sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;
    FeatureScaling input_scaling;
    FeatureScaling target_scaling;
    std::vector<double> loss_history;  ///< standardized training loss per epoch (first entry = epoch 0)

    /// Network output in standardized target units; columns are samples.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& scaled_inputs) const;
    Eigen::VectorXd predict_raw(const Eigen::VectorXd& features) const;

    Eigen::Index parameter_count() const;
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);
};

/// Random small weights for the given layer sizes (input first, output last).
MlpModel init_mlp(const std::vector<int>& layer_sizes, Rng& rng);

/// Loss 0.5/F sum ||net(x_f) - y_f||^2 on already-scaled inputs (columns are
/// samples) and its gradient in parameters() order.
double mlp_loss_gradient(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         Eigen::VectorXd* gradient);

/// Full-batch gradient descent with heavy-ball momentum. `targets` has one
/// row per sample. Throws TrainingError on a non-finite loss.
MlpModel train_mlp(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, const MlpHyper& hyper, Rng& rng);

// --- direction regressor ----------------------------------------------------

enum class RegressorKind { svr, mlp };

struct RegressorSpec {
    RegressorKind kind = RegressorKind::svr;
    TargetHead head = TargetHead::degrees;
    SvrHyper svr;
    MlpHyper mlp;

    /// Size used to break cross-validation ties (box_C or hidden units).
    double model_size() const;
};

std::string describe(const RegressorSpec& s);

/// Trained direction estimator. One SVR per target column, or one MLP.
struct Regressor {
    RegressorSpec spec;
    std::vector<SvrModel> svr;
    MlpModel mlp;
    Eigen::Index feature_dim = 0;

    /// Direction estimate in [0, 360).
    double predict(const Eigen::VectorXd& features) const;
};

Regressor train_regressor(const RegressionDataset& data, const RegressorSpec& spec, Rng& rng);

Eigen::VectorXd predict_all(const Regressor& model, const Eigen::MatrixXd& features);

struct CrossValResult {
    std::size_t best_index = 0;
    std::vector<double> mean_error_deg;  ///< per grid point
};

/// Two folds stratified by direction; returns the grid point with the lowest
/// mean circular error, ties going to the smaller model.
CrossValResult crossval_2fold(const RegressionDataset& data, const std::vector<RegressorSpec>& grid, Rng& rng);

// --- metrics ----------------------------------------------------------------

/// min(|a - b|, 360 - |a - b|) after wrapping both angles.
double circular_error(double true_deg, double pred_deg);

struct DirectionError {
    double direction_deg = 0.0;
    double mse = 0.0;
    double eps_deg = 0.0;  ///< sqrt(mse)
    std::size_t count = 0;
};

/// Per-direction mean squared circular error, directions in ascending order.
std::vector<DirectionError> mse_by_direction(const std::vector<double>& truths, const std::vector<double>& preds);

inline const std::vector<double> kDefaultErrorThresholds{5.0, 10.0, 15.0, 20.0};

/// Fraction of errors strictly below each threshold.
std::vector<double> prob_within(const std::vector<double>& errors,
                                const std::vector<double>& thresholds = kDefaultErrorThresholds);

}  // namespace mdlab
