#include <doctest.h>

#include <cmath>

#include "mdlab/regress.hpp"

using namespace mdlab;

namespace {

Eigen::MatrixXd oracle_x() {
    Eigen::MatrixXd x(10, 2);
    x << 0.12, 1.40, 0.85, -0.33, 1.92, 0.57, -0.44, 2.10, 2.71, -1.05, -1.30, 0.25, 0.55, 0.95, 3.05, 1.75, -0.75,
        -1.60, 1.10, 2.45;
    return x;
}

Eigen::VectorXd oracle_z() {
    Eigen::VectorXd z(10);
    z << 0.9, -0.4, 1.3, 0.2, -1.1, 0.7, 0.5, 2.0, -1.6, 1.8;
    return z;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& x, const SvrHyper& h) {
    Eigen::MatrixXd k(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.rows(); ++j) k(i, j) = kernel_value(h, x.row(i).transpose(), x.row(j).transpose());
    return k;
}

// Optimality conditions of the epsilon-insensitive problem in terms of the
// residual r_i = f(x_i) - z_i and the signed coefficient beta_i.
void check_kkt(const Eigen::MatrixXd& k, const Eigen::VectorXd& z, const SvrDualSolution& s, double c, double eps) {
    const double tol = 1e-5;
    CHECK(std::abs(s.coef.sum()) <= 1e-9);
    const Eigen::VectorXd r = k * s.coef + Eigen::VectorXd::Constant(z.size(), s.bias) - z;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double b = s.coef(i);
        CHECK(std::abs(b) <= c + 1e-12);
        if (eps > 0.0) CHECK(s.alpha(i) * s.alpha(i + z.size()) == 0.0);
        if (b == 0.0) {
            CHECK(std::abs(r(i)) <= eps + tol);
        } else if (b >= c) {
            CHECK(r(i) <= -eps + tol);
        } else if (b <= -c) {
            CHECK(r(i) >= eps - tol);
        } else if (b > 0.0) {
            CHECK(std::abs(r(i) + eps) <= tol);
        } else {
            CHECK(std::abs(r(i) - eps) <= tol);
        }
    }
}

}  // namespace

TEST_CASE("SVR dual with a single sample centers the bias on the target") {
    const Eigen::MatrixXd k = Eigen::MatrixXd::Ones(1, 1);
    const Eigen::VectorXd z = Eigen::VectorXd::Constant(1, 3.0);
    const SvrDualSolution s = solve_svr_dual(k, z, 10.0, 0.5);
    CHECK(s.coef(0) == 0.0);
    CHECK(s.bias == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("SVR dual rejects malformed problems") {
    const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(solve_svr_dual(k, z, 0.0, 0.1), ParameterError);
    CHECK_THROWS_AS(solve_svr_dual(k, z, 1.0, -0.1), ParameterError);
    CHECK_THROWS_AS(solve_svr_dual(Eigen::MatrixXd::Identity(2, 2), z, 1.0, 0.1), ParameterError);
}

TEST_CASE("SVR dual objective matches the interior-point QP reference") {
    struct Case {
        KernelKind kernel;
        double gamma, c, eps, objective;
    };
    const Case cases[] = {
        {KernelKind::rbf, 0.5, 10.0, 0.1, -7.130596957066},
        {KernelKind::rbf, 2.0, 1.0, 0.05, -5.164176385709},
        {KernelKind::linear, 0.0, 5.0, 0.2, -13.491411587683},
    };
    const Eigen::MatrixXd xs = FeatureScaling::fit(oracle_x()).apply(oracle_x());
    const Eigen::VectorXd z = oracle_z();
    for (const Case& cs : cases) {
        SvrHyper h;
        h.kernel = cs.kernel;
        h.gamma = cs.gamma;
        h.box_c = cs.c;
        h.tube_eps = cs.eps;
        h.tol = 1e-9;
        const Eigen::MatrixXd k = gram(xs, h);
        const SvrDualSolution s = solve_svr_dual(k, z, h.box_c, h.tube_eps, h.tol);
        CHECK(std::abs(s.objective - cs.objective) <= 1e-5);
        check_kkt(k, z, s, cs.c, cs.eps);

        const SvrModel m = train_svr(oracle_x(), z, h);
        CHECK(std::abs(m.dual_objective - cs.objective) <= 1e-5);
    }
}

TEST_CASE("SVR KKT conditions hold on random problems") {
    Rng rng(7);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index l = 5 + trial;
        Eigen::MatrixXd x(l, 3);
        Eigen::VectorXd z(l);
        for (Eigen::Index i = 0; i < l; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = n01(rng);
            z(i) = std::sin(x(i, 0)) + 0.3 * n01(rng);
        }
        SvrHyper h;
        h.kernel = trial % 3 == 0 ? KernelKind::linear : KernelKind::rbf;
        h.gamma = 0.3 + 0.1 * trial;
        h.box_c = trial % 2 == 0 ? 0.5 : 20.0;
        h.tube_eps = 0.05 * (trial % 4);
        h.tol = 1e-8;
        const Eigen::MatrixXd k = gram(x, h);
        const SvrDualSolution s = solve_svr_dual(k, z, h.box_c, h.tube_eps, h.tol);
        check_kkt(k, z, s, h.box_c, h.tube_eps);
    }
}

TEST_CASE("linear SVR recovers a noiseless line") {
    Eigen::MatrixXd x(9, 1);
    Eigen::VectorXd z(9);
    for (int i = 0; i < 9; ++i) {
        x(i, 0) = -2.0 + 0.5 * i;
        z(i) = 3.0 * x(i, 0);
    }
    SvrHyper h;
    h.kernel = KernelKind::linear;
    h.box_c = 1000.0;
    h.tube_eps = 0.01;
    const SvrModel m = train_svr(x, z, h);
    for (double q : {-1.7, 0.0, 0.3, 1.9})
        CHECK(std::abs(m.predict_raw(Eigen::VectorXd::Constant(1, q)) - 3.0 * q) <= 0.011);
}

TEST_CASE("constant feature columns do not change SVR predictions") {
    const Eigen::MatrixXd x = oracle_x();
    Eigen::MatrixXd wide(x.rows(), 3);
    wide << x, Eigen::VectorXd::Constant(x.rows(), 4.2);
    SvrHyper h;
    h.box_c = 10.0;
    h.tube_eps = 0.1;
    const SvrModel a = train_svr(x, oracle_z(), h);
    const SvrModel b = train_svr(wide, oracle_z(), h);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::VectorXd q(3);
        q << x.row(i).transpose(), 4.2;
        CHECK(a.predict_raw(x.row(i).transpose()) == doctest::Approx(b.predict_raw(q)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(train_svr(Eigen::MatrixXd::Constant(5, 2, 1.0), oracle_z().head(5), h), TrainingError);
    CHECK_THROWS_AS(train_svr(x.topRows(1), oracle_z().head(1), h), ParameterError);
}

TEST_CASE("MLP gradient agrees with central differences") {
    Rng rng(3);
    MlpModel m = init_mlp({4, 6, 5, 2}, rng);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd x(4, 7), y(2, 7);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = n01(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = n01(rng);

    Eigen::VectorXd grad;
    mlp_loss_gradient(m, x, y, &grad);
    const Eigen::VectorXd theta = m.parameters();
    REQUIRE(grad.size() == theta.size());
    const double h = 1e-6;
    Eigen::VectorXd fd(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        Eigen::VectorXd t = theta;
        t(k) += h;
        m.set_parameters(t);
        const double up = mlp_loss_gradient(m, x, y, nullptr);
        t(k) -= 2 * h;
        m.set_parameters(t);
        const double down = mlp_loss_gradient(m, x, y, nullptr);
        fd(k) = (up - down) / (2 * h);
    }
    m.set_parameters(theta);
    CHECK((grad - fd).norm() / fd.norm() < 1e-5);
}

TEST_CASE("MLP parameters round trip") {
    Rng rng(5);
    MlpModel m = init_mlp({3, 4, 1}, rng);
    CHECK(m.parameter_count() == 3 * 4 + 4 + 4 + 1);
    Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(m.parameter_count(), -1.0, 1.0);
    m.set_parameters(t);
    CHECK(m.parameters() == t);
}

TEST_CASE("MLP learns XOR and a constant target") {
    Eigen::MatrixXd x(4, 2), y(4, 1);
    x << 0, 0, 0, 1, 1, 0, 1, 1;
    y << 0, 1, 1, 0;
    MlpHyper h;
    h.hidden = {8};
    h.learning_rate = 0.05;
    h.epochs = 3000;
    Rng rng(11);
    const MlpModel m = train_mlp(x, y, h, rng);
    CHECK(m.loss_history.size() == 3001);
    CHECK(m.loss_history.back() < 1e-3 * m.loss_history.front());
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(m.predict_raw(x.row(i).transpose())(0) - y(i, 0)) < 0.1);

    const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(4, 1, 2.5);
    const MlpModel k = train_mlp(x, c, h, rng);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(k.predict_raw(x.row(i).transpose())(0) == doctest::Approx(2.5).epsilon(1e-3));
}

TEST_CASE("circular error wraps around 360 degrees") {
    CHECK(circular_error(350.0, 10.0) == doctest::Approx(20.0));
    CHECK(circular_error(10.0, 350.0) == doctest::Approx(20.0));
    CHECK(circular_error(0.0, 180.0) == doctest::Approx(180.0));
    CHECK(circular_error(-10.0, 10.0) == doctest::Approx(20.0));
    CHECK(circular_error(720.0, 1.0) == doctest::Approx(1.0));
    CHECK(circular_error(90.0, 90.0) == 0.0);
}

TEST_CASE("per-direction error and threshold probabilities") {
    const std::vector<double> truth{90, 0, 0, 90, 0};
    const std::vector<double> pred{96, 3, 356, 90, 0};
    const auto e = mse_by_direction(truth, pred);
    REQUIRE(e.size() == 2);
    CHECK(e[0].direction_deg == 0.0);
    CHECK(e[0].count == 3);
    CHECK(e[0].mse == doctest::Approx((9.0 + 16.0) / 3.0));
    CHECK(e[1].mse == doctest::Approx(18.0));
    CHECK(e[1].eps_deg == doctest::Approx(std::sqrt(18.0)));
    CHECK_THROWS_AS(mse_by_direction({1.0}, {}), ParameterError);

    const auto p = prob_within({5.0, 4.9, 12.0, 25.0});
    REQUIRE(p.size() == 4);
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.75));
    CHECK(p[3] == doctest::Approx(0.75));
    CHECK_THROWS_AS(prob_within({}), ParameterError);
}

namespace {

RegressionDataset ring_dataset(double noise, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> n01;
    RegressionDataset d;
    const int dirs = 12, per = 6;
    d.features.resize(dirs * per, 3);
    d.targets_deg.resize(dirs * per);
    for (int a = 0; a < dirs; ++a)
        for (int k = 0; k < per; ++k) {
            const Eigen::Index i = a * per + k;
            const double deg = 30.0 * a, r = deg2rad(deg);
            d.features.row(i) << std::cos(r) + noise * n01(rng), std::sin(r) + noise * n01(rng), n01(rng);
            d.targets_deg(i) = deg;
        }
    return d;
}

}  // namespace

TEST_CASE("angle-pair regressor predicts across the 0/360 seam") {
    const RegressionDataset d = ring_dataset(0.02, 1);
    RegressorSpec spec;
    spec.head = TargetHead::angle_pair;
    spec.svr.box_c = 10.0;
    spec.svr.tube_eps = 0.01;
    spec.svr.gamma = 0.5;
    Rng rng(2);
    const Regressor m = train_regressor(d, spec, rng);
    CHECK(m.svr.size() == 2);
    const Eigen::VectorXd pred = predict_all(m, d.features);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        CHECK(pred(i) >= 0.0);
        CHECK(pred(i) < 360.0);
        worst = std::max(worst, circular_error(d.targets_deg(i), pred(i)));
    }
    CHECK(worst < 10.0);
    CHECK_THROWS_AS(m.predict(Eigen::VectorXd::Zero(2)), ParameterError);
}

TEST_CASE("cross-validation picks the planted best grid point") {
    const RegressionDataset d = ring_dataset(0.05, 4);
    RegressorSpec good;
    good.head = TargetHead::angle_pair;
    good.svr.box_c = 10.0;
    good.svr.tube_eps = 0.01;
    RegressorSpec starved = good;
    starved.svr.box_c = 1e-4;
    Rng rng(9);
    const CrossValResult r = crossval_2fold(d, {starved, good}, rng);
    REQUIRE(r.mean_error_deg.size() == 2);
    CHECK(r.best_index == 1);
    CHECK(r.mean_error_deg[1] < r.mean_error_deg[0]);

    Rng one(9);
    CHECK(crossval_2fold(d, {good}, one).best_index == 0);

    Rng again(9);
    const CrossValResult r2 = crossval_2fold(d, {starved, good}, again);
    CHECK(r2.mean_error_deg == r.mean_error_deg);

    Rng empty(9);
    CHECK_THROWS_AS(crossval_2fold(d, {}, empty), ParameterError);
}
