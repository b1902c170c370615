#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mdlab/regress.hpp"

namespace mdlab {

void RegressionDataset::validate() const {
    require(features.rows() == targets_deg.size(), "feature and target counts differ");
    for (Eigen::Index i = 0; i < targets_deg.size(); ++i)
        require(targets_deg(i) >= 0.0 && targets_deg(i) < 360.0, "targets must lie in [0, 360)");
    require(features.allFinite(), "features must be finite");
}

RegressionDataset RegressionDataset::subset(const std::vector<Eigen::Index>& rows) const {
    RegressionDataset out;
    out.split_tag = split_tag;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.targets_deg.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.features.row(static_cast<Eigen::Index>(k)) = features.row(rows[k]);
        out.targets_deg(static_cast<Eigen::Index>(k)) = targets_deg(rows[k]);
    }
    return out;
}

FeatureScaling FeatureScaling::fit(const Eigen::MatrixXd& x) {
    require(x.rows() >= 1, "cannot fit scaling on an empty set");
    FeatureScaling s;
    s.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
    s.scale = (centered.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j)
        if (!(s.scale(j) > 1e-12 * std::max(1.0, std::abs(s.mean(j))))) s.scale(j) = 1.0;
    return s;
}

Eigen::MatrixXd FeatureScaling::apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size()) throw ParameterError("feature dimension does not match the scaling");
    Eigen::MatrixXd out = x.rowwise() - mean.transpose();
    for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) /= scale(j);
    return out;
}

Eigen::VectorXd FeatureScaling::apply(const Eigen::VectorXd& x) const {
    if (x.size() != mean.size()) throw ParameterError("feature dimension does not match the scaling");
    return (x - mean).cwiseQuotient(scale);
}

std::string to_string(TargetHead h) { return h == TargetHead::degrees ? "degrees" : "angle_pair"; }

TargetHead parse_target_head(const std::string& s) {
    if (s == "degrees") return TargetHead::degrees;
    if (s == "angle_pair") return TargetHead::angle_pair;
    throw ParameterError("unknown target head: " + s);
}

double RegressorSpec::model_size() const {
    if (kind == RegressorKind::svr) return svr.box_c;
    double units = 0.0;
    for (int h : mlp.hidden) units += h;
    return units;
}

std::string describe(const RegressorSpec& s) {
    std::ostringstream os;
    if (s.kind == RegressorKind::svr) {
        os << "svr(C=" << s.svr.box_c << ",eps=" << s.svr.tube_eps << ","
           << (s.svr.kernel == KernelKind::rbf ? "rbf,gamma=" + std::to_string(s.svr.gamma) : std::string("linear"))
           << ")";
    } else {
        os << "mlp(hidden=";
        for (std::size_t i = 0; i < s.mlp.hidden.size(); ++i) os << (i ? "x" : "") << s.mlp.hidden[i];
        os << ",lr=" << s.mlp.learning_rate << ",epochs=" << s.mlp.epochs << ")";
    }
    os << "/" << to_string(s.head);
    return os.str();
}

namespace {

Eigen::MatrixXd head_targets(const Eigen::VectorXd& deg, TargetHead head) {
    if (head == TargetHead::degrees) return deg;
    Eigen::MatrixXd t(deg.size(), 2);
    for (Eigen::Index i = 0; i < deg.size(); ++i) {
        const double r = deg2rad(deg(i));
        t(i, 0) = std::cos(r);
        t(i, 1) = std::sin(r);
    }
    return t;
}

double head_to_degrees(const Eigen::VectorXd& out, TargetHead head) {
    if (head == TargetHead::degrees) return wrap_degrees(out(0));
    return wrap_degrees(rad2deg(std::atan2(out(1), out(0))));
}

}  // namespace

double Regressor::predict(const Eigen::VectorXd& features) const {
    if (features.size() != feature_dim) throw ParameterError("feature dimension does not match the model");
    Eigen::VectorXd out;
    if (spec.kind == RegressorKind::svr) {
        out.resize(static_cast<Eigen::Index>(svr.size()));
        for (std::size_t k = 0; k < svr.size(); ++k) out(static_cast<Eigen::Index>(k)) = svr[k].predict_raw(features);
    } else {
        out = mlp.predict_raw(features);
    }
    return head_to_degrees(out, spec.head);
}

Regressor train_regressor(const RegressionDataset& data, const RegressorSpec& spec, Rng& rng) {
    data.validate();
    Regressor r;
    r.spec = spec;
    r.feature_dim = data.features.cols();
    const Eigen::MatrixXd t = head_targets(data.targets_deg, spec.head);
    if (spec.kind == RegressorKind::svr) {
        for (Eigen::Index k = 0; k < t.cols(); ++k) r.svr.push_back(train_svr(data.features, t.col(k), spec.svr));
    } else {
        r.mlp = train_mlp(data.features, t, spec.mlp, rng);
    }
    return r;
}

Eigen::VectorXd predict_all(const Regressor& model, const Eigen::MatrixXd& features) {
    Eigen::VectorXd out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) out(i) = model.predict(features.row(i).transpose());
    return out;
}

CrossValResult crossval_2fold(const RegressionDataset& data, const std::vector<RegressorSpec>& grid, Rng& rng) {
    if (grid.empty()) throw ParameterError("hyperparameter grid is empty");
    data.validate();

    std::map<double, std::vector<Eigen::Index>> by_dir;
    for (Eigen::Index i = 0; i < data.size(); ++i) by_dir[data.targets_deg(i)].push_back(i);
    std::vector<Eigen::Index> folds[2];
    for (auto& [dir, rows] : by_dir) {
        require(rows.size() >= 2, "cross-validation needs two samples per direction");
        std::shuffle(rows.begin(), rows.end(), rng);
        for (std::size_t k = 0; k < rows.size(); ++k) folds[k % 2].push_back(rows[k]);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    const RegressionDataset part[2] = {data.subset(folds[0]), data.subset(folds[1])};

    std::vector<std::uint64_t> seeds;
    for (std::size_t g = 0; g < grid.size() * 2; ++g) seeds.push_back(rng());

    CrossValResult res;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double total = 0.0;
        std::size_t count = 0;
        for (int f = 0; f < 2; ++f) {
            Rng sub(seeds[2 * g + static_cast<std::size_t>(f)]);
            const Regressor m = train_regressor(part[f], grid[g], sub);
            const RegressionDataset& held = part[1 - f];
            for (Eigen::Index i = 0; i < held.size(); ++i) {
                total += circular_error(held.targets_deg(i), m.predict(held.features.row(i).transpose()));
                ++count;
            }
        }
        res.mean_error_deg.push_back(total / static_cast<double>(std::max<std::size_t>(1, count)));
    }
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double a = res.mean_error_deg[g], b = res.mean_error_deg[res.best_index];
        const bool tie = std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
        if ((!tie && a < b) || (tie && grid[g].model_size() < grid[res.best_index].model_size())) res.best_index = g;
    }
    return res;
}

double circular_error(double true_deg, double pred_deg) {
    const double d = std::abs(wrap_degrees(true_deg) - wrap_degrees(pred_deg));
    return std::min(d, 360.0 - d);
}

std::vector<DirectionError> mse_by_direction(const std::vector<double>& truths, const std::vector<double>& preds) {
    require(!truths.empty(), "no predictions to score");
    require(truths.size() == preds.size(), "truth and prediction counts differ");
    std::map<double, DirectionError> acc;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        DirectionError& e = acc[truths[i]];
        e.direction_deg = truths[i];
        const double c = circular_error(truths[i], preds[i]);
        e.mse += c * c;
        ++e.count;
    }
    std::vector<DirectionError> out;
    for (auto& [dir, e] : acc) {
        e.mse /= static_cast<double>(e.count);
        e.eps_deg = std::sqrt(e.mse);
        out.push_back(e);
    }
    return out;
}

std::vector<double> prob_within(const std::vector<double>& errors, const std::vector<double>& thresholds) {
    require(!errors.empty(), "no errors to summarize");
    std::vector<double> out;
    for (double t : thresholds) {
        const auto n = std::count_if(errors.begin(), errors.end(), [t](double e) { return e < t; });
        out.push_back(static_cast<double>(n) / static_cast<double>(errors.size()));
    }
    return out;
}

}  // namespace mdlab
