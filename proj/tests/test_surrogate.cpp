#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mfbo/surrogate.hpp"

using namespace mfbo;

namespace {

KernelParams params_for(std::size_t d, double c = 1.0, double delta = 1.0, double sf2 = 1.0,
                        double noise = 1e-6) {
    auto p = KernelParams::defaults(d);
    p.fidelity_offset = c;
    p.fidelity_exponent = delta;
    p.signal_variance = sf2;
    p.noise_variance = noise;
    return p;
}

Matrix random_inputs(RngStream& rng, Eigen::Index n, Eigen::Index d) {
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.uniform();
    return X;
}

Vector random_levels(RngStream& rng, Eigen::Index n) {
    Vector l(n);
    for (Eigen::Index i = 0; i < n; ++i) l(i) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    if ((l.array() == 1.0).count() == 0) l(0) = 1.0;
    return l;
}

} // namespace

TEST_CASE("input kernel closed-form values and symmetry") {
    Vector x(2), xp(2), lambda(2);
    x << 0.0, 0.0;
    xp << 1.0, 0.0;
    lambda << 1.0, 1.0;
    CHECK(kernel_input(x, x, lambda) == doctest::Approx(1.0));
    CHECK(kernel_input(x, xp, lambda) == doctest::Approx(std::exp(-0.5)));
    CHECK(kernel_input(x, xp, lambda) == kernel_input(xp, x, lambda));
    Vector bad(3);
    CHECK_THROWS_AS(kernel_input(x, bad, lambda), Error);
}

TEST_CASE("fidelity kernel closed-form values") {
    CHECK(kernel_fidelity(1.0, 1.0, 0.7, 2.0) == doctest::Approx(0.7));
    CHECK(kernel_fidelity(0.0, 0.0, 0.5, 1.0) == doctest::Approx(1.5));
    CHECK(kernel_fidelity(0.0, 1.0, 0.3, 1.0) == doctest::Approx(0.3));
    CHECK(kernel_fidelity(0.3, 0.8, 0.1, 0.5) == kernel_fidelity(0.8, 0.3, 0.1, 0.5));
}

TEST_CASE("full kernel factorizes and stays PSD on random sets") {
    auto p = params_for(3, 1.0, 1.0, 1.0);
    Vector x(3);
    x << 0.2, 0.4, 0.9;
    CHECK(kernel_full(x, 1.0, x, 1.0, p) == doctest::Approx(1.0)); // sigma_f^2 * 1 * c

    RngStream rng(17);
    Matrix X = random_inputs(rng, 20, 3);
    Vector levels = random_levels(rng, 20);
    auto q = params_for(3, 0.8, 1.7, 2.3);
    Matrix K = kernel_matrix(X, levels, q);
    CHECK(K.isApprox(K.transpose(), 1e-12));
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("posterior of the empty state is the prior") {
    auto p = params_for(2, 0.6, 1.0, 1.3);
    auto state = SurrogateState::prior(2, p);
    Vector x(2);
    x << 0.5, 0.5;
    auto [mu, var] = state.posterior_at(x, 1.0);
    CHECK(mu == doctest::Approx(0.0));
    CHECK(var == doctest::Approx(1.3 * 0.6)); // sigma_f^2 * c
    auto [mu0, var0] = state.posterior_at(x, 0.0);
    CHECK(var0 == doctest::Approx(1.3 * 1.6));
    (void)mu0;
}

TEST_CASE("posterior interpolates noise-free training points") {
    RngStream rng(3);
    Matrix X = random_inputs(rng, 8, 2);
    Vector levels = Vector::Ones(8);
    Vector y(8);
    for (int i = 0; i < 8; ++i) y(i) = std::sin(3.0 * X(i, 0)) + X(i, 1);
    SurrogateState state(X, levels, y, params_for(2, 1.0, 1.0, 1.0, 1e-10));
    for (int i = 0; i < 8; ++i) {
        auto [mu, var] = state.posterior_at(X.row(i).transpose(), 1.0);
        CHECK(mu == doctest::Approx(y(i)).epsilon(1e-6));
        CHECK(var <= 1e-8);
    }
}

TEST_CASE("posterior matches the hand-solved 2x2 system") {
    Matrix X(2, 1);
    X << 0.2, 0.7;
    Vector levels(2);
    levels << 1.0, 1.0;
    Vector y(2);
    y << 1.0, -0.5;
    auto p = params_for(1, 1.0, 1.0, 1.0, 0.01);
    SurrogateState state(X, levels, y, p, /*standardize=*/false);

    Vector xq(1);
    xq << 0.4;
    auto [mu, var] = state.posterior_at(xq, 1.0);

    // direct 2x2 solve
    double k11 = kernel_full(X.row(0).transpose(), 1.0, X.row(0).transpose(), 1.0, p) + 0.01;
    double k12 = kernel_full(X.row(0).transpose(), 1.0, X.row(1).transpose(), 1.0, p);
    double k22 = kernel_full(X.row(1).transpose(), 1.0, X.row(1).transpose(), 1.0, p) + 0.01;
    double det = k11 * k22 - k12 * k12;
    double a0 = (k22 * y(0) - k12 * y(1)) / det;
    double a1 = (-k12 * y(0) + k11 * y(1)) / det;
    double ks0 = kernel_full(xq, 1.0, X.row(0).transpose(), 1.0, p);
    double ks1 = kernel_full(xq, 1.0, X.row(1).transpose(), 1.0, p);
    double mu_oracle = ks0 * a0 + ks1 * a1;
    double prior = kernel_full(xq, 1.0, xq, 1.0, p);
    // v = K^{-1} k_*
    double v0 = (k22 * ks0 - k12 * ks1) / det;
    double v1 = (-k12 * ks0 + k11 * ks1) / det;
    double var_oracle = prior - (ks0 * v0 + ks1 * v1);

    CHECK(mu == doctest::Approx(mu_oracle).epsilon(1e-10));
    CHECK(var == doctest::Approx(var_oracle).epsilon(1e-10));
}

TEST_CASE("log marginal likelihood closed form and dense oracle") {
    SUBCASE("single zero observation with unit total variance") {
        Matrix X(1, 1);
        X << 0.5;
        Vector levels(1);
        levels << 1.0;
        Vector y(1);
        y << 0.0;
        auto p = params_for(1, 1.0, 1.0, 0.5, 0.5); // k(x,x) + noise = 1
        SurrogateState state(X, levels, y, p, false);
        CHECK(state.log_marginal_likelihood() ==
              doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
    }

    SUBCASE("scaling outputs by 10 lowers the likelihood at fixed parameters") {
        RngStream rng(5);
        Matrix X = random_inputs(rng, 10, 2);
        Vector levels = random_levels(rng, 10);
        Vector y(10);
        for (int i = 0; i < 10; ++i) y(i) = std::sin(4.0 * X(i, 0));
        auto p = params_for(2, 1.0, 1.0, 1.0, 1e-2);
        SurrogateState a(X, levels, y, p, false);
        SurrogateState b(X, levels, 10.0 * y, p, false);
        CHECK(b.log_marginal_likelihood() < a.log_marginal_likelihood());
    }

    SUBCASE("agrees with the dense-inverse oracle on n <= 20") {
        RngStream rng(7);
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.uniform_index(16));
            Matrix X = random_inputs(rng, n, 3);
            Vector levels = random_levels(rng, n);
            Vector y(n);
            for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();
            auto p = params_for(3, 0.9, 1.2, 1.4, 0.05);
            SurrogateState state(X, levels, y, p, false);

            Matrix Ky = kernel_matrix(X, levels, p);
            Ky.diagonal().array() += p.noise_variance;
            Matrix Kinv = Ky.inverse();
            double lml = -0.5 * y.dot(Kinv * y) - 0.5 * std::log(Ky.determinant()) -
                         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
            CHECK(state.log_marginal_likelihood() == doctest::Approx(lml).epsilon(1e-8));
        }
    }
}

TEST_CASE("cached solve reproduces the outputs through the factorization") {
    RngStream rng(13);
    Matrix X = random_inputs(rng, 15, 2);
    Vector levels = random_levels(rng, 15);
    Vector y(15);
    for (int i = 0; i < 15; ++i) y(i) = rng.normal();
    auto p = params_for(2, 1.0, 1.0, 1.0, 1e-3);
    SurrogateState state(X, levels, y, p);

    Matrix Ky = kernel_matrix(X, levels, p);
    Ky.diagonal().array() += p.noise_variance + state.jitter();
    Vector alpha = Ky.ldlt().solve(state.standardized_outputs());
    Vector back = Ky * alpha;
    CHECK((back - state.standardized_outputs()).norm() <=
          1e-8 * std::max(1.0, state.standardized_outputs().norm()));
}

TEST_CASE("fit recovers a noiseless linear function at high fidelity") {
    RngStream rng(21);
    Matrix X = random_inputs(rng, 12, 2);
    Vector levels = Vector::Ones(12);
    Vector y(12);
    for (int i = 0; i < 12; ++i) y(i) = 2.0 * X(i, 0) - 0.7 * X(i, 1) + 0.3;
    FitOptions opts;
    opts.restarts = 4;
    opts.noise_floor = 1e-12; // noiseless data, so let the noise collapse
    auto state = fit(X, levels, y, opts, rng);
    for (int i = 0; i < 12; ++i) {
        auto [mu, var] = state.posterior_at(X.row(i).transpose(), 1.0);
        CHECK(mu == doctest::Approx(y(i)).epsilon(1e-6));
        (void)var;
    }
}

TEST_CASE("fit improves on the documented initialization") {
    RngStream rng(30);
    Matrix X = random_inputs(rng, 30, 2);
    Vector levels = Vector::Ones(30);
    Vector y(30);
    for (int i = 0; i < 30; ++i) {
        Vector raw(2);
        raw << -5.0 + 15.0 * X(i, 0), 15.0 * X(i, 1);
        double t = raw(1) - 0.1291845 * raw(0) * raw(0) + 1.5915494 * raw(0) - 6.0;
        y(i) = -(t * t + 9.6020393 * std::cos(raw(0)) + 10.0);
    }
    double shift = y.mean();
    double scale = std::sqrt((y.array() - shift).square().mean());
    Vector y_std = (y.array() - shift) / scale;

    double init_lml = log_marginal_likelihood_grad(X, levels, y_std,
                                                   KernelParams::defaults(2).to_log(), nullptr);
    FitOptions opts;
    opts.restarts = 4;
    auto state = fit(X, levels, y, opts, rng);
    CHECK(state.log_marginal_likelihood() >= init_lml - 1e-9);
}

TEST_CASE("fit survives duplicated observations via jitter") {
    RngStream rng(8);
    Matrix X(6, 1);
    X << 0.1, 0.1, 0.5, 0.5, 0.9, 0.9;
    Vector levels = Vector::Ones(6);
    Vector y(6);
    y << 1.0, 1.0, 2.0, 2.0, 0.5, 0.5;
    FitOptions opts;
    opts.restarts = 2;
    auto state = fit(X, levels, y, opts, rng);
    CHECK(state.size() == 6);
    CHECK(std::isfinite(state.log_marginal_likelihood()));
}

TEST_CASE("posterior variance never increases when data is added") {
    RngStream rng(40);
    for (int trial = 0; trial < 6; ++trial) {
        Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.uniform_index(10));
        Matrix X = random_inputs(rng, n + 1, 2);
        Vector levels = random_levels(rng, n + 1);
        Vector y(n + 1);
        for (Eigen::Index i = 0; i <= n; ++i) y(i) = rng.normal();
        auto p = params_for(2, 0.7, 1.0, 1.2, 1e-4);

        SurrogateState small(X.topRows(n), levels.head(n), y.head(n), p, false);
        SurrogateState big(X, levels, y, p, false);

        Matrix Q = random_inputs(rng, 20, 2);
        Vector ql = random_levels(rng, 20);
        Vector mu_s, var_s, mu_b, var_b;
        small.posterior(Q, ql, mu_s, var_s);
        big.posterior(Q, ql, mu_b, var_b);
        for (int j = 0; j < 20; ++j) CHECK(var_b(j) <= var_s(j) + 1e-10);
    }
}

TEST_CASE("all-high-fidelity data with c=1 matches a single-fidelity GP") {
    RngStream rng(50);
    Matrix X = random_inputs(rng, 12, 2);
    Vector levels = Vector::Ones(12);
    Vector y(12);
    for (int i = 0; i < 12; ++i) y(i) = rng.normal();
    auto p = params_for(2, 1.0, 1.7, 1.5, 1e-3);
    SurrogateState state(X, levels, y, p, false);

    // reference: dense single-fidelity GP with k = sigma_f^2 * k_I
    Matrix K(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            K(i, j) = p.signal_variance *
                      kernel_input(X.row(i).transpose(), X.row(j).transpose(), p.length_scales);
    K.diagonal().array() += p.noise_variance;
    Matrix Kinv = K.inverse();

    Matrix Q = random_inputs(rng, 10, 2);
    for (int j = 0; j < 10; ++j) {
        Vector ks(12);
        for (int i = 0; i < 12; ++i)
            ks(i) = p.signal_variance *
                    kernel_input(X.row(i).transpose(), Q.row(j).transpose(), p.length_scales);
        double mu_ref = ks.dot(Kinv * y);
        double var_ref = p.signal_variance - ks.dot(Kinv * ks);
        auto [mu, var] = state.posterior_at(Q.row(j).transpose(), 1.0);
        CHECK(mu == doctest::Approx(mu_ref).epsilon(1e-10));
        CHECK(var == doctest::Approx(var_ref).epsilon(1e-10));
    }
}

TEST_CASE("permuting observations leaves the posterior unchanged") {
    RngStream rng(60);
    Matrix X = random_inputs(rng, 10, 2);
    Vector levels = random_levels(rng, 10);
    Vector y(10);
    for (int i = 0; i < 10; ++i) y(i) = rng.normal();
    auto p = params_for(2, 0.9, 1.0, 1.1, 1e-3);

    auto perm = rng.permutation(10);
    Matrix Xp(10, 2);
    Vector lp(10), yp(10);
    for (int i = 0; i < 10; ++i) {
        Xp.row(i) = X.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
        lp(i) = levels(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
        yp(i) = y(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
    }
    SurrogateState a(X, levels, y, p);
    SurrogateState b(Xp, lp, yp, p);
    Matrix Q = random_inputs(rng, 15, 2);
    Vector ql = random_levels(rng, 15);
    Vector mu_a, var_a, mu_b, var_b;
    a.posterior(Q, ql, mu_a, var_a);
    b.posterior(Q, ql, mu_b, var_b);
    CHECK((mu_a - mu_b).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((var_a - var_b).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("analytic likelihood gradient matches central finite differences") {
    RngStream rng(70);
    for (int trial = 0; trial < 4; ++trial) {
        Eigen::Index n = 6 + static_cast<Eigen::Index>(rng.uniform_index(8));
        Matrix X = random_inputs(rng, n, 2);
        Vector levels = random_levels(rng, n);
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();

        Vector theta = KernelParams::defaults(2).to_log();
        for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += 0.3 * rng.normal();

        Vector grad;
        log_marginal_likelihood_grad(X, levels, y, theta, &grad);

        const double h = 1e-5;
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            Vector tp = theta, tm = theta;
            tp(k) += h;
            tm(k) -= h;
            double fp = log_marginal_likelihood_grad(X, levels, y, tp, nullptr);
            double fm = log_marginal_likelihood_grad(X, levels, y, tm, nullptr);
            double fd = (fp - fm) / (2.0 * h);
            double denom = std::max({std::abs(fd), std::abs(grad(k)), 1e-6});
            CHECK(std::abs(grad(k) - fd) / denom < 1e-4);
        }
    }
}
