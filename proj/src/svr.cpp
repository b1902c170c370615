#include <algorithm>
#include <cmath>
#include <limits>

#include "mdlab/regress.hpp"

namespace mdlab {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double kernel_value(const SvrHyper& h, const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b) {
    if (h.kernel == KernelKind::linear) return a.dot(b);
    return std::exp(-h.gamma * (a - b).squaredNorm());
}

SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, double box_c, double tube_eps,
                               double tol, long max_iter) {
    const Eigen::Index l = z.size();
    require(l >= 1, "SVR needs at least one sample");
    require(K.rows() == l && K.cols() == l, "kernel matrix must be l x l");
    require(box_c > 0.0, "box constraint must be positive");
    require(tube_eps >= 0.0, "tube width must be nonnegative");

    const Eigen::Index n = 2 * l;
    Eigen::VectorXd y(n), p(n), alpha = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < l; ++i) {
        y(i) = 1.0;
        y(i + l) = -1.0;
        p(i) = tube_eps - z(i);
        p(i + l) = tube_eps + z(i);
    }
    auto Q = [&](Eigen::Index i, Eigen::Index j) { return y(i) * y(j) * K(i % l, j % l); };
    Eigen::VectorXd G = p;
    const double C = box_c;
    auto upper = [&](Eigen::Index t) { return alpha(t) >= C; };
    auto lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };

    SvrDualSolution sol;
    long it = 0;
    for (; it < max_iter; ++it) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (y(t) > 0) {
                if (!upper(t) && -G(t) >= gmax) gmax = -G(t), i = t;
            } else {
                if (!lower(t) && G(t) >= gmax) gmax = G(t), i = t;
            }
        }
        Eigen::Index j = -1;
        double best = std::numeric_limits<double>::infinity();
        if (i >= 0) {
            const double qii = Q(i, i);
            for (Eigen::Index t = 0; t < n; ++t) {
                if (y(t) > 0) {
                    if (lower(t)) continue;
                    const double diff = gmax + G(t);
                    gmax2 = std::max(gmax2, G(t));
                    if (diff > 0) {
                        const double quad = qii + Q(t, t) - 2.0 * y(i) * Q(i, t);
                        const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
                        if (obj <= best) best = obj, j = t;
                    }
                } else {
                    if (upper(t)) continue;
                    const double diff = gmax - G(t);
                    gmax2 = std::max(gmax2, -G(t));
                    if (diff > 0) {
                        const double quad = qii + Q(t, t) + 2.0 * y(i) * Q(i, t);
                        const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
                        if (obj <= best) best = obj, j = t;
                    }
                }
            }
        }
        if (i < 0 || j < 0 || gmax + gmax2 < tol) break;

        const double ai_old = alpha(i), aj_old = alpha(j);
        if (y(i) != y(j)) {
            double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (-G(i) - G(j)) / quad;
            const double diff = alpha(i) - alpha(j);
            alpha(i) += delta;
            alpha(j) += delta;
            if (diff > 0) {
                if (alpha(j) < 0) alpha(j) = 0, alpha(i) = diff;
            } else {
                if (alpha(i) < 0) alpha(i) = 0, alpha(j) = -diff;
            }
            if (diff > 0) {
                if (alpha(i) > C) alpha(i) = C, alpha(j) = C - diff;
            } else {
                if (alpha(j) > C) alpha(j) = C, alpha(i) = C + diff;
            }
        } else {
            double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (G(i) - G(j)) / quad;
            const double sum = alpha(i) + alpha(j);
            alpha(i) -= delta;
            alpha(j) += delta;
            if (sum > C) {
                if (alpha(i) > C) alpha(i) = C, alpha(j) = sum - C;
            } else {
                if (alpha(j) < 0) alpha(j) = 0, alpha(i) = sum;
            }
            if (sum > C) {
                if (alpha(j) > C) alpha(j) = C, alpha(i) = sum - C;
            } else {
                if (alpha(i) < 0) alpha(i) = 0, alpha(j) = sum;
            }
        }
        const double di = alpha(i) - ai_old, dj = alpha(j) - aj_old;
        for (Eigen::Index t = 0; t < n; ++t) G(t) += Q(i, t) * di + Q(j, t) * dj;
    }
    sol.iterations = it;

    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    long free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = y(t) * G(t);
        if (upper(t)) {
            if (y(t) < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (lower(t)) {
            if (y(t) > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++free;
            sum_free += yg;
        }
    }
    const double rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);

    sol.alpha = alpha;
    sol.coef = alpha.head(l) - alpha.tail(l);
    sol.bias = -rho;
    sol.objective = 0.5 * alpha.dot(G + p);
    return sol;
}

double SvrModel::predict_raw(const Eigen::VectorXd& features) const {
    const Eigen::VectorXd x = scaling.apply(features);
    double f = bias;
    for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
        f += dual_coeffs(i) * kernel_value(hyper, support_vectors.row(i).transpose(), x);
    return f;
}

SvrModel train_svr(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, const SvrHyper& hyper) {
    require(features.rows() >= 2, "SVR needs at least two samples");
    require(features.rows() == targets.size(), "feature and target counts differ");
    SvrModel m;
    m.hyper = hyper;
    m.scaling = FeatureScaling::fit(features);
    const Eigen::MatrixXd x = m.scaling.apply(features);
    if (x.cwiseAbs().maxCoeff() == 0.0) throw TrainingError("all training features are identical");

    const Eigen::Index l = x.rows();
    Eigen::MatrixXd K(l, l);
    for (Eigen::Index i = 0; i < l; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = kernel_value(hyper, x.row(i).transpose(), x.row(j).transpose());

    const SvrDualSolution sol = solve_svr_dual(K, targets, hyper.box_c, hyper.tube_eps, hyper.tol, hyper.max_iter);
    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < l; ++i)
        if (sol.coef(i) != 0.0) sv.push_back(i);
    m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    m.dual_coeffs.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        m.support_vectors.row(static_cast<Eigen::Index>(k)) = x.row(sv[k]);
        m.dual_coeffs(static_cast<Eigen::Index>(k)) = sol.coef(sv[k]);
    }
    m.bias = sol.bias;
    m.dual_objective = sol.objective;
    return m;
}

}  // namespace mdlab
