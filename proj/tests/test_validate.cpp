#include "nic/validate.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nic;

namespace {

// f = u_t, order 1, identity scaling.
PolyModel pass_through() {
    PolyModel m;
    m.order = 1;
    m.degree = 1;
    m.scaler = AffineScaler::identity(2);
    m.terms.push_back(BasisTerm{{0, 1}});
    m.coefficients.push_back(1.0);
    return m;
}

// y_{t+1} = u_t
DataSet identity_data(std::size_t L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    DataSet ds;
    ds.u.resize(L);
    ds.y.assign(L, 0.0);
    for (auto& u : ds.u)
        u = d(rng);
    for (std::size_t i = 0; i + 1 < L; ++i)
        ds.y[i + 1] = ds.u[i];
    return ds;
}

GammaDataSet scalar_set(std::vector<double> w, std::vector<double> v, double eps) {
    Matrix W(static_cast<Eigen::Index>(w.size()), 1);
    Vector V(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
        W(static_cast<Eigen::Index>(i), 0) = w[i];
        V[static_cast<Eigen::Index>(i)] = v[i];
    }
    return make_gamma_data(W, V, eps);
}

GammaDataSet random_set(std::mt19937_64& rng, int P, int m) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::uniform_real_distribution<double> e(0.01, 0.2);
    Matrix W(P, m);
    Vector V(P);
    for (int i = 0; i < P; ++i) {
        for (int k = 0; k < m; ++k)
            W(i, k) = d(rng);
        V[i] = 2.0 * d(rng);
    }
    return make_gamma_data(W, V, e(rng));
}

}  // namespace

TEST(ClosedLoopData, PerfectInversion) {
    const auto data = identity_data(40, 1);
    const auto ds = closed_loop_prediction_data(pass_through(), {-1, 1, 0}, data, 4, 0.0, GainTarget::prediction);
    for (Eigen::Index p = 0; p < ds.size(); ++p) {
        EXPECT_NEAR(ds.prediction[p], ds.reference[p], 1e-12);
        EXPECT_NEAR(ds.values[p], ds.reference[p], 1e-12);
    }
    const auto dev = closed_loop_prediction_data(pass_through(), {-1, 1, 0}, data, 4, 0.0);
    EXPECT_LE(dev.values.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ClosedLoopData, WindowIndexing) {
    DataSet data;
    for (int i = 0; i < 12; ++i) {
        data.u.push_back(0.1 * i);
        data.y.push_back(static_cast<double>(i));
    }
    const int m = 3;
    const auto ds = closed_loop_prediction_data(pass_through(), {-5, 5, 0}, data, m, 0.0);
    ASSERT_EQ(ds.size(), 12 - m - 1);
    // first window: (y_{1-L+m}, ..., y_{2-L}) = data indices m..1
    EXPECT_EQ(ds.windows(0, 0), 3.0);
    EXPECT_EQ(ds.windows(0, 1), 2.0);
    EXPECT_EQ(ds.windows(0, 2), 1.0);
    EXPECT_EQ(ds.time.front(), 1 - 12 + m);
    EXPECT_EQ(ds.time.back(), -1);
    EXPECT_EQ(ds.reference[0], 4.0);
}

TEST(ClosedLoopData, PairCountLaw) {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        const int L = std::uniform_int_distribution<int>(6, 80)(rng);
        const int m = std::uniform_int_distribution<int>(2, L - 2)(rng);
        const auto ds = closed_loop_prediction_data(pass_through(), {-1, 1, 0}, identity_data(L, rep), m, 0.01);
        EXPECT_EQ(ds.size(), L - m - 1);
        EXPECT_EQ(ds.windows.cols(), m);
    }
}

TEST(ClosedLoopData, Preconditions) {
    const auto data = identity_data(10, 3);
    EXPECT_THROW(closed_loop_prediction_data(pass_through(), {-1, 1, 0}, data, 1, 0.0), Error);
    EXPECT_THROW(closed_loop_prediction_data(pass_through(), {-1, 1, 0}, data, 9, 0.0), DataError);
}

TEST(FBar, Examples) {
    const auto ds = scalar_set({0.0}, {1.0}, 0.1);
    Vector w(1);
    w << 0.5;
    EXPECT_DOUBLE_EQ(f_bar(2.0, w, ds), 2.1);

    const auto two = scalar_set({0.0, 1.0}, {0.3, -0.4}, 0.05);
    Vector w1(1);
    w1 << 1.0;
    EXPECT_LE(f_bar(123.0, w1, two), -0.4 + 0.05);
    EXPECT_THROW(f_bar(1.0, w1, GammaDataSet{}), DataError);
}

TEST(FBar, MatchesNaiveLoop) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto ds = random_set(rng, 30, 3);
        Vector w(3);
        for (auto& x : w)
            x = d(rng);
        const double G = 3.0 * std::abs(d(rng));
        double naive = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < ds.size(); ++k) {
            double dist = 0.0;
            for (int j = 0; j < 3; ++j)
                dist = std::max(dist, std::abs(w[j] - ds.windows(k, j)));
            naive = std::min(naive, ds.values[k] + ds.epsilon + G * dist);
        }
        EXPECT_DOUBLE_EQ(f_bar(G, w, ds), naive);
    }
}

TEST(CheckValidated, Examples) {
    const auto single = scalar_set({0.2}, {5.0}, 0.01);
    for (double G : {0.0, 1.0, 1e6})
        EXPECT_TRUE(check_validated(G, single));

    const auto ds = scalar_set({0.0, 1.0}, {0.0, 3.0}, 0.5);
    EXPECT_FALSE(check_validated(1.999, ds));
    EXPECT_TRUE(check_validated(2.001, ds));
    EXPECT_TRUE(check_validated(1e12, ds));
}

TEST(GammaMin, Examples) {
    auto g = gamma_min(scalar_set({0.0, 1.0}, {0.0, 3.0}, 0.5));
    EXPECT_DOUBLE_EQ(g.value, 2.0);
    EXPECT_TRUE(g.consistent);

    g = gamma_min(scalar_set({0.0, 0.3, 0.9}, {1.5, 1.5, 1.5}, 0.0));
    EXPECT_EQ(g.value, 0.0);

    g = gamma_min(scalar_set({0.4, 0.4}, {0.0, 1.0}, 0.1));
    EXPECT_TRUE(g.invalidated);
    EXPECT_TRUE(std::isinf(g.value));
    EXPECT_FALSE(check_validated(1e12, scalar_set({0.4, 0.4}, {0.0, 1.0}, 0.1)));
}

TEST(GammaMin, GridScanOracle) {
    const auto ds = scalar_set({0.0, 1.0}, {0.0, 3.0}, 0.5);
    double first = -1.0;
    for (int i = 0; i <= 4000; ++i) {
        const double G = 0.001 * i;
        if (check_validated(G, ds)) {
            first = G;
            break;
        }
    }
    EXPECT_NEAR(first, 2.0, 1.5e-3);
}

TEST(GammaMin, SineSamples) {
    const int P = 2001;
    Matrix W(P, 1);
    Vector V(P);
    for (int i = 0; i < P; ++i) {
        W(i, 0) = -1.0 + 1e-3 * i;
        V[i] = std::sin(W(i, 0));
    }
    const auto g = gamma_min(make_gamma_data(W, V, 0.0));
    EXPECT_LE(g.value, 1.0);
    EXPECT_GE(g.value, 0.95);
}

TEST(GammaMin, ConservativeOnKnownLipschitz) {
    // f(w) = 0.7 * |w1| - 0.3 * w2, l_inf Lipschitz constant 1.0
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix W(300, 2);
    Vector V(300);
    for (int i = 0; i < 300; ++i) {
        W(i, 0) = d(rng);
        W(i, 1) = d(rng);
        V[i] = 0.7 * std::abs(W(i, 0)) - 0.3 * W(i, 1);
    }
    EXPECT_LE(gamma_min(make_gamma_data(W, V, 0.0)).value, 1.0 * (1.0 + 1e-9));
}

TEST(GammaMin, ClosedFormMatchesBisection) {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 100; ++rep) {
        const auto ds = random_set(rng, 25, 2);
        const auto g = gamma_min(ds);
        ASSERT_FALSE(g.invalidated);
        EXPECT_TRUE(g.consistent);
        double lo = 0.0, hi = 1.0;
        while (!check_validated(hi, ds))
            hi *= 2.0;
        while (hi - lo > 1e-9 * hi) {
            const double mid = 0.5 * (lo + hi);
            (check_validated(mid, ds) ? hi : lo) = mid;
        }
        EXPECT_NEAR(hi, g.value, 1e-6 * std::max(g.value, 1e-12) + 1e-9);
    }
}

TEST(CheckValidated, MonotoneInGamma) {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        const auto ds = random_set(rng, 20, 2);
        bool seen = false;
        for (double G = 0.0; G < 60.0; G += 0.25) {
            const bool v = check_validated(G, ds);
            if (seen)
                EXPECT_TRUE(v);
            seen = seen || v;
        }
    }
}

TEST(SelectMu, PassThroughIsStable) {
    const auto data = identity_data(120, 4);
    ValidationConfig vc;
    vc.epsilon = 0.0;
    const auto rep = select_mu(pass_through(), data, 0.001, {-1, 1, 0}, vc);
    ASSERT_EQ(rep.grid.size(), 5u);
    EXPECT_EQ(rep.grid[0].gamma_min, 0.0);
    EXPECT_EQ(rep.grid[0].verdict, Verdict::validated_stable);
    EXPECT_EQ(rep.m, 4);
    EXPECT_GT(rep.margin, 0.0);
    EXPECT_EQ(rep.verdict, Verdict::validated_stable);
}

TEST(SelectMu, SingletonGridIsPlainCheck) {
    const auto data = identity_data(60, 5);
    ValidationConfig vc;
    vc.epsilon = 0.0;
    vc.mu_grid = {0.0};
    const auto rep = select_mu(pass_through(), data, 0.5, {-1, 1, 0}, vc);
    EXPECT_EQ(rep.grid.size(), 1u);
    EXPECT_EQ(rep.mu, 0.0);
}

TEST(SelectMu, SaturationBreaksValidation) {
    // Actuator box [0, 1]; a model with ten times the gain asks for inputs
    // below zero and saturates, so its cascade no longer cancels the reference.
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    DataSet data;
    data.u.resize(150);
    data.y.assign(150, 0.0);
    for (auto& u : data.u)
        u = d(rng);
    for (std::size_t i = 0; i + 1 < data.size(); ++i)
        data.y[i + 1] = 0.5 * data.y[i] + 0.3 * data.u[i];
    PolyModel m;
    m.order = 1;
    m.degree = 1;
    m.scaler = AffineScaler::identity(2);
    m.terms = {BasisTerm{{1, 0}}, BasisTerm{{0, 1}}};
    m.coefficients = {0.5, 0.3};
    ValidationConfig vc;
    vc.epsilon = 1e-9;
    const ControllerConfig box{0.0, 1.0, 0.0};
    EXPECT_EQ(select_mu(m, data, 0.001, box, vc).verdict, Verdict::validated_stable);
    for (auto& c : m.coefficients)
        c *= 10.0;
    const auto bad = select_mu(m, data, 0.001, box, vc);
    EXPECT_NE(bad.verdict, Verdict::validated_stable);
    EXPECT_GT(bad.grid[0].saturated_steps, 0u);
}

TEST(SelectMu, RejectsNoMargin) {
    ValidationConfig vc;
    vc.epsilon = 0.0;
    EXPECT_THROW(select_mu(pass_through(), identity_data(30, 1), 1.0, {-1, 1, 0}, vc), Error);
    vc.epsilon = std::nan("");
    EXPECT_THROW(select_mu(pass_through(), identity_data(30, 1), 0.1, {-1, 1, 0}, vc), Error);
}
