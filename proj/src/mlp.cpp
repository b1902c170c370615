#include <cmath>
#include <string>

#include "mdlab/regress.hpp"

namespace mdlab {

Eigen::MatrixXd MlpModel::forward(const Eigen::MatrixXd& a0) const {
    Eigen::MatrixXd a = a0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        Eigen::MatrixXd z = weights[l] * a;
        z.colwise() += biases[l];
        a = l + 1 < weights.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
    return a;
}

Eigen::VectorXd MlpModel::predict_raw(const Eigen::VectorXd& features) const {
    if (features.size() != layer_sizes.front()) throw ParameterError("feature dimension does not match the network");
    const Eigen::VectorXd out = forward(input_scaling.apply(features));
    return out.cwiseProduct(target_scaling.scale) + target_scaling.mean;
}

Eigen::Index MlpModel::parameter_count() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

Eigen::VectorXd MlpModel::parameters() const {
    Eigen::VectorXd theta(parameter_count());
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        theta.segment(k, weights[l].size()) = weights[l].reshaped();
        k += weights[l].size();
        theta.segment(k, biases[l].size()) = biases[l];
        k += biases[l].size();
    }
    return theta;
}

void MlpModel::set_parameters(const Eigen::VectorXd& theta) {
    require(theta.size() == parameter_count(), "parameter vector has the wrong length");
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l].reshaped() = theta.segment(k, weights[l].size());
        k += weights[l].size();
        biases[l] = theta.segment(k, biases[l].size());
        k += biases[l].size();
    }
}

MlpModel init_mlp(const std::vector<int>& sizes, Rng& rng) {
    require(sizes.size() >= 2, "network needs an input and an output layer");
    for (int s : sizes) require(s >= 1, "layer sizes must be positive");
    MlpModel m;
    m.layer_sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(static_cast<double>(sizes[l])));
        Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = n(rng);
        m.weights.push_back(std::move(w));
        m.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
    }
    const auto in = static_cast<Eigen::Index>(sizes.front());
    const auto out = static_cast<Eigen::Index>(sizes.back());
    m.input_scaling = {Eigen::VectorXd::Zero(in), Eigen::VectorXd::Ones(in)};
    m.target_scaling = {Eigen::VectorXd::Zero(out), Eigen::VectorXd::Ones(out)};
    return m;
}

double mlp_loss_gradient(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                         Eigen::VectorXd* gradient) {
    const std::size_t L = m.weights.size();
    const double F = static_cast<double>(x.cols());
    std::vector<Eigen::MatrixXd> acts{x};
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::MatrixXd z = m.weights[l] * acts.back();
        z.colwise() += m.biases[l];
        acts.push_back(l + 1 < L ? Eigen::MatrixXd(z.array().tanh()) : z);
    }
    Eigen::MatrixXd delta = (acts.back() - y) / F;
    const double loss = 0.5 * (acts.back() - y).squaredNorm() / F;
    if (gradient == nullptr) return loss;

    gradient->resize(m.parameter_count());
    std::vector<Eigen::Index> offset(L);
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < L; ++l) {
        offset[l] = k;
        k += m.weights[l].size() + m.biases[l].size();
    }
    for (std::size_t l = L; l-- > 0;) {
        const Eigen::MatrixXd gw = delta * acts[l].transpose();
        gradient->segment(offset[l], gw.size()) = gw.reshaped();
        gradient->segment(offset[l] + gw.size(), m.biases[l].size()) = delta.rowwise().sum();
        if (l > 0) {
            delta = (m.weights[l].transpose() * delta).cwiseProduct(
                Eigen::MatrixXd((1.0 - acts[l].array().square()).matrix()));
        }
    }
    return loss;
}

MlpModel train_mlp(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, const MlpHyper& h, Rng& rng) {
    require(features.rows() >= 2, "MLP needs at least two samples");
    require(features.rows() == targets.rows(), "feature and target counts differ");
    require(h.epochs >= 0 && h.learning_rate > 0.0, "invalid MLP training schedule");

    std::vector<int> sizes{static_cast<int>(features.cols())};
    sizes.insert(sizes.end(), h.hidden.begin(), h.hidden.end());
    sizes.push_back(static_cast<int>(targets.cols()));
    MlpModel m = init_mlp(sizes, rng);
    m.input_scaling = FeatureScaling::fit(features);
    m.target_scaling = FeatureScaling::fit(targets);
    const Eigen::MatrixXd x = m.input_scaling.apply(features).transpose();
    const Eigen::MatrixXd y = m.target_scaling.apply(targets).transpose();

    Eigen::VectorXd theta = m.parameters();
    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd grad;
    for (int epoch = 0; epoch <= h.epochs; ++epoch) {
        const double loss = mlp_loss_gradient(m, x, y, &grad);
        if (!std::isfinite(loss) || !grad.allFinite())
            throw TrainingError("MLP training diverged at epoch " + std::to_string(epoch));
        m.loss_history.push_back(loss);
        if (epoch == h.epochs) break;
        velocity = h.momentum * velocity - h.learning_rate * grad;
        theta += velocity;
        m.set_parameters(theta);
    }
    return m;
}

}  // namespace mdlab
