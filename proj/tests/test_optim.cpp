#include "nic/optim.hpp"

#include <gtest/gtest.h>

#include <random>

#include "lp_oracle.hpp"

using namespace nic;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinearProgram one_var(double c, std::vector<std::pair<double, double>> rows) {
    LinearProgram lp;
    lp.objective = Vector::Constant(1, c);
    lp.A.resize(static_cast<Eigen::Index>(rows.size()), 1);
    lp.b.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        lp.A(static_cast<Eigen::Index>(i), 0) = rows[i].first;
        lp.b[static_cast<Eigen::Index>(i)] = rows[i].second;
    }
    return lp;
}

}  // namespace

TEST(SolveLP, BoundedByTwoRows) {
    const auto sol = solve_lp(one_var(1.0, {{-1.0, -1.0}, {1.0, 3.0}}));
    ASSERT_EQ(sol.status, LPStatus::optimal);
    EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
    EXPECT_NEAR(sol.objective_value, 1.0, 1e-12);
}

TEST(SolveLP, ContradictoryRowsAreInfeasible) {
    const auto sol = solve_lp(one_var(0.0, {{1.0, -1.0}, {-1.0, -1.0}}));
    EXPECT_EQ(sol.status, LPStatus::infeasible);
    EXPECT_GT(sol.infeasibility, tol::feasibility);
}

TEST(SolveLP, UnboundedDirection) {
    auto lp = one_var(-1.0, {{-1.0, 0.0}});
    EXPECT_EQ(solve_lp(lp).status, LPStatus::unbounded);
}

TEST(SolveLP, BoundsOnly) {
    LinearProgram lp;
    lp.objective = Vector::Constant(2, 1.0);
    lp.objective[1] = -1.0;
    lp.A.resize(0, 2);
    lp.b.resize(0);
    lp.lower = Vector::Constant(2, -1.5);
    lp.upper = Vector::Constant(2, 4.0);
    const auto sol = solve_lp(lp);
    ASSERT_EQ(sol.status, LPStatus::optimal);
    EXPECT_NEAR(sol.x[0], -1.5, 1e-12);
    EXPECT_NEAR(sol.x[1], 4.0, 1e-12);
}

TEST(SolveLP, NonFiniteInputThrows) {
    auto lp = one_var(1.0, {{1.0, std::nan("")}});
    EXPECT_THROW(solve_lp(lp), NumericError);
}

TEST(SolveLP, DimensionMismatchThrows) {
    LinearProgram lp;
    lp.objective = Vector::Ones(2);
    lp.A = Matrix::Ones(1, 3);
    lp.b = Vector::Ones(1);
    EXPECT_THROW(solve_lp(lp), DimensionError);
}

TEST(SolveLP, IterationLimitIsReportedNotOptimal) {
    std::mt19937_64 rng(1);
    auto r = test::random_feasible_lp(rng, 5, 12);
    LPOptions opts;
    opts.max_iterations = 1;
    const auto sol = solve_lp(r.lp, opts);
    EXPECT_EQ(sol.status, LPStatus::iteration_limit);
}

TEST(SolveLP, MatchesVertexEnumerationOracle) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> nvar(1, 6), nrow(1, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = nvar(rng);
        auto r = test::random_feasible_lp(rng, n, nrow(rng));
        const auto oracle = test::enumerate_vertices(r.lp.objective, r.A_all, r.b_all);
        ASSERT_TRUE(oracle.feasible);
        const auto sol = solve_lp(r.lp);
        ASSERT_EQ(sol.status, LPStatus::optimal) << "trial " << trial;
        EXPECT_LE(std::abs(sol.objective_value - oracle.objective), 1e-7 * (1.0 + std::abs(oracle.objective)))
            << "trial " << trial;
        EXPECT_LE((r.lp.A * sol.x - r.lp.b).maxCoeff(), tol::feasibility);
    }
}

TEST(SolveLP, DetectsRandomInfeasibleSystems) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto r = test::random_feasible_lp(rng, 3, 4);
        // a x <= -1 and -a x <= -1 cannot both hold
        const Eigen::Index m = r.lp.A.rows();
        r.lp.A.conservativeResize(m + 2, 3);
        r.lp.b.conservativeResize(m + 2);
        r.lp.A.row(m) = r.lp.A.row(0);
        r.lp.A.row(m + 1) = -r.lp.A.row(0);
        r.lp.b[m] = r.lp.A.row(0).dot(Vector::Zero(3)) - 1.0;
        r.lp.b[m + 1] = -1.0;
        EXPECT_EQ(solve_lp(r.lp).status, LPStatus::infeasible);
    }
}

// ---------------------------------------------------------------------------
// min_linf
// ---------------------------------------------------------------------------

TEST(MinLinf, IdentityInterpolates) {
    Vector y(2);
    y << 1.0, -1.0;
    const auto fit = min_linf(Matrix::Identity(2, 2), y);
    EXPECT_NEAR(fit.eta, 0.0, 1e-12);
    EXPECT_NEAR(fit.beta[0], 1.0, 1e-12);
    EXPECT_NEAR(fit.beta[1], -1.0, 1e-12);
}

TEST(MinLinf, ChebyshevCenterOfTwoPoints) {
    Vector y(2);
    y << 0.0, 2.0;
    const auto fit = min_linf(Matrix::Ones(2, 1), y);
    EXPECT_NEAR(fit.eta, 1.0, 1e-12);
    EXPECT_NEAR(fit.beta[0], 1.0, 1e-12);
}

TEST(MinLinf, AllZeroDesignReturnsZeroCoefficients) {
    Vector y(3);
    y << 0.5, -2.0, 1.0;
    const auto fit = min_linf(Matrix::Zero(3, 2), y);
    EXPECT_EQ(fit.beta, Vector::Zero(2));
    EXPECT_EQ(fit.eta, 2.0);
}

TEST(MinLinf, PlantedExactFit) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix phi(60, 8);
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            phi.data()[i] = u(rng);
        Vector beta(8);
        for (Eigen::Index i = 0; i < 8; ++i)
            beta[i] = u(rng);
        const auto fit = min_linf(phi, phi * beta);
        EXPECT_LE(fit.eta, 1e-9);
        EXPECT_LE((fit.beta - beta).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(MinLinf, MatchesOracleAndEquioscillates) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 30; ++trial) {
        const int N = 1 + trial % 4, m = 8;
        Matrix phi(m, N);
        Vector y(m);
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            phi.data()[i] = u(rng);
        for (int i = 0; i < m; ++i)
            y[i] = u(rng);
        const auto fit = min_linf(phi, y);

        // (beta, t): min t s.t. +-(y - Phi beta) <= t
        Matrix A(2 * m, N + 1);
        Vector b(2 * m);
        A.topLeftCorner(m, N) = phi;
        A.bottomLeftCorner(m, N) = -phi;
        A.col(N).setConstant(-1.0);
        b.head(m) = y;
        b.tail(m) = -y;
        Vector c = Vector::Zero(N + 1);
        c[N] = 1.0;
        const auto oracle = test::enumerate_vertices(c, A, b);
        ASSERT_TRUE(oracle.feasible);
        EXPECT_NEAR(fit.eta, oracle.objective, 1e-7 * (1.0 + oracle.objective));

        const Vector res = (y - phi * fit.beta).cwiseAbs();
        int attained = 0;
        for (int i = 0; i < m; ++i)
            if (res[i] >= fit.eta - 1e-9)
                ++attained;
        if (fit.eta > 1e-9)
            EXPECT_GE(attained, 2);
    }
}

// ---------------------------------------------------------------------------
// min_l1_constrained
// ---------------------------------------------------------------------------

TEST(MinL1, ZeroIsOptimalWhenBandCoversData) {
    Matrix phi(3, 2);
    phi << 1, 0, 0, 1, 1, 1;
    Vector y(3);
    y << 0.2, -0.4, 0.1;
    const auto sol = min_l1_constrained(phi, y, {}, 0.4, 1.0);
    ASSERT_EQ(sol.status, LPStatus::optimal);
    EXPECT_LE(sol.x.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MinL1, IdentityWithZeroBand) {
    Vector y(2);
    y << 1.0, 0.0;
    const auto sol = min_l1_constrained(Matrix::Identity(2, 2), y, {}, 0.0, 1.0);
    ASSERT_EQ(sol.status, LPStatus::optimal);
    EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
    EXPECT_NEAR(sol.x[1], 0.0, 1e-12);
    EXPECT_NEAR(sol.objective_value, 1.0, 1e-12);
}

TEST(MinL1, SquareNonsingularWithZeroBandInterpolates) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    Matrix phi(4, 4);
    Vector y(4);
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        phi.data()[i] = u(rng);
    for (int i = 0; i < 4; ++i)
        y[i] = u(rng);
    const auto sol = min_l1_constrained(phi, y, {}, 0.0, 1.0);
    ASSERT_EQ(sol.status, LPStatus::optimal);
    const Vector exact = phi.fullPivLu().solve(y);
    EXPECT_LE((sol.x - exact).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MinL1, ConflictingConstraintsAreInfeasible) {
    LinearConstraints sc;
    sc.G = Matrix::Identity(1, 1);
    sc.h = Vector::Constant(1, -1.0);  // beta <= -1
    Vector y = Vector::Constant(2, 1.0);
    const auto sol = min_l1_constrained(Matrix::Ones(2, 1), y, sc, 0.1, 1.0);  // beta ~ 1
    EXPECT_EQ(sol.status, LPStatus::infeasible);
    EXPECT_EQ(l1_constraints_feasible(Matrix::Ones(2, 1), y, sc, 0.1, 1.0).status, LPStatus::infeasible);
}

TEST(MinL1, RejectsBadParameters) {
    Vector y = Vector::Ones(2);
    EXPECT_THROW(min_l1_constrained(Matrix::Ones(2, 1), y, {}, -0.1, 1.0), Error);
    EXPECT_THROW(min_l1_constrained(Matrix::Ones(2, 1), y, {}, 0.1, 0.5), Error);
}

TEST(MinL1, MatchesEnumerationOracle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 25; ++trial) {
        const int N = 1 + trial % 3, m = 4, p = 2;
        Matrix phi(m, N);
        Vector y(m);
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            phi.data()[i] = u(rng);
        for (int i = 0; i < m; ++i)
            y[i] = u(rng);
        const double eta = min_linf(phi, y).eta;
        const double rho = 1.2;
        LinearConstraints sc;
        sc.G.resize(p, N);
        for (Eigen::Index i = 0; i < sc.G.size(); ++i)
            sc.G.data()[i] = u(rng);
        sc.h = Vector::Constant(p, 1.5);

        // (beta, s): min sum s, beta <= s, -beta <= s, G beta <= h, band rows.
        const int rows = 2 * N + p + 2 * m;
        Matrix A = Matrix::Zero(rows, 2 * N);
        Vector b = Vector::Zero(rows);
        A.block(0, 0, N, N) = Matrix::Identity(N, N);
        A.block(0, N, N, N) = -Matrix::Identity(N, N);
        A.block(N, 0, N, N) = -Matrix::Identity(N, N);
        A.block(N, N, N, N) = -Matrix::Identity(N, N);
        A.block(2 * N, 0, p, N) = sc.G;
        b.segment(2 * N, p) = sc.h;
        A.block(2 * N + p, 0, m, N) = phi;
        b.segment(2 * N + p, m) = y.array() + eta * rho;
        A.block(2 * N + p + m, 0, m, N) = -phi;
        b.segment(2 * N + p + m, m) = -y.array() + eta * rho;
        Vector c = Vector::Zero(2 * N);
        c.tail(N).setOnes();
        const auto oracle = test::enumerate_vertices(c, A, b);

        const auto sol = min_l1_constrained(phi, y, sc, eta, rho);
        if (!oracle.feasible) {
            EXPECT_EQ(sol.status, LPStatus::infeasible);
            continue;
        }
        ASSERT_EQ(sol.status, LPStatus::optimal) << trial;
        EXPECT_NEAR(sol.objective_value, oracle.objective, 1e-7 * (1.0 + oracle.objective)) << trial;
        EXPECT_LE((y - phi * sol.x).cwiseAbs().maxCoeff(), eta * rho + tol::feasibility);
    }
}

TEST(MinL1, FeasibilityIsMonotoneInRho) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix phi(10, 3);
        Vector y(10);
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            phi.data()[i] = u(rng);
        for (int i = 0; i < 10; ++i)
            y[i] = u(rng);
        const double eta = min_linf(phi, y).eta;
        LinearConstraints sc;
        sc.G = Matrix::Identity(3, 3);
        sc.h = Vector::Constant(3, 0.1);
        bool was_feasible = false;
        for (double rho : {1.0, 1.05, 1.25, 1.5, 2.0, 4.0}) {
            const bool f = l1_constraints_feasible(phi, y, sc, eta, rho).status == LPStatus::optimal;
            if (was_feasible)
                EXPECT_TRUE(f);
            was_feasible = was_feasible || f;
        }
    }
}

// Tall, highly degenerate l_inf fits once stalled the dual simplex.
TEST(MinLinf, TallDegenerateFitConverges) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::Index m = 160, N = 35;
        Matrix phi(m, N);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < N; ++j)
                phi(i, j) = j == 0 ? 1.0 : d(rng);
        Vector y(m);
        for (auto& v : y)
            v = 0.01 * d(rng);
        const auto fit = min_linf(phi, y);
        ASSERT_EQ(fit.status, LPStatus::optimal);
        const Vector r = y - phi * fit.beta;
        EXPECT_NEAR(r.cwiseAbs().maxCoeff(), fit.eta, 1e-12);
        int extremal = 0;
        for (Eigen::Index i = 0; i < m; ++i)
            extremal += std::abs(std::abs(r[i]) - fit.eta) <= 1e-8;
        EXPECT_GE(extremal, 2);
        // A feasible point at the optimum stays feasible in the l1 program.
        const auto f = l1_constraints_feasible(phi, y, LinearConstraints{Matrix(0, N), Vector(0)}, fit.eta, 1.0);
        EXPECT_NE(f.status, LPStatus::infeasible);
    }
}
