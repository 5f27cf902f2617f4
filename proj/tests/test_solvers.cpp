#include <cmath>
#include <set>

#include "doctest.h"
#include "vpp/constellation.hpp"
#include "vpp/solvers.hpp"

using namespace vpp;

namespace {

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    ComplexMatrix A(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) A(i, j) = Complex(rng.normal(), rng.normal());
    return A;
}

ComplexVector random_qam_vector(const Constellation& c, std::size_t n, RngStream& rng) {
    ComplexVector u(n);
    for (auto& s : u) {
        Bits b(c.bits_per_symbol);
        for (auto& bit : b) bit = rng.bit();
        s = bits_to_symbol(c, b);
    }
    return u;
}

VppProblem random_zf_problem(std::size_t n_users, std::size_t n_tx, RngStream& rng) {
    const Constellation c = make_constellation(4);
    const ChannelInstance ch = sample_rayleigh(n_users, n_tx, rng);
    return make_vpp_problem(zf_precoder(ch), random_qam_vector(c, n_users, rng), c.tau);
}

ComplexVector residual_of(const VppProblem& p, const PerturbationVector& v) {
    ComplexVector r(p.n_tx);
    for (std::size_t i = 0; i < p.n_tx; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < p.u_hat.size(); ++j)
            acc += p.W_hat(i, j) * (p.u_hat[j] + p.tau * v[j]);
        r[i] = acc;
    }
    return r;
}

}  // namespace

TEST_CASE("local minimization closed form") {
    // residual 1, w = 1, tau = 1: full cancellation at x = -1
    {
        const PrecodingMatrix W{ComplexMatrix(1, 1, {Complex{1.0}}), PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, {Complex{1.0}}, 1.0);
        const PerturbationVector cur{0, 0};
        const LocalMinResult lm = local_min_dim(p, residual_of(p, cur), 0, 0, 0);
        CHECK(lm.x_star == -1);
        CHECK(lm.f_star == doctest::Approx(0.0).epsilon(1e-15));
    }
    // residual 0.3: rounds to zero, leftover 0.09
    {
        const PrecodingMatrix W{ComplexMatrix(1, 1, {Complex{1.0}}), PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, {Complex{0.3}}, 1.0);
        const LocalMinResult lm = local_min_dim(p, residual_of(p, {0, 0}), 0, 0, 0);
        CHECK(lm.x_star == 0);
        CHECK(lm.f_star == doctest::Approx(0.09).epsilon(1e-12));
    }
    // residual 2+i, entry i, tau 2: f(x) = 4x^2 + 4x + 5, vertex at -1/2,
    // tie between 0 and -1 resolved away from zero
    {
        const PrecodingMatrix W{ComplexMatrix(1, 1, {Complex{1.0}}), PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, {Complex{2.0, 1.0}}, 2.0);
        const ComplexVector r = residual_of(p, {0, 0});
        CHECK(r[0] == Complex{2.0, 1.0});
        CHECK(p.W_hat(0, 1) == Complex{0.0, 1.0});
        const LocalMinResult lm = local_min_dim(p, r, 0, 1, 0);
        CHECK(lm.x_star == -1);
        CHECK(lm.f_star == doctest::Approx(5.0).epsilon(1e-15));
        // brute force confirms the tie pair {0, -1} at value 5
        double best = 1e300;
        std::set<int> co_optima;
        for (int x = -5; x <= 5; ++x) {
            const double f = std::norm(Complex{2.0, 1.0} + 2.0 * Complex{0.0, 1.0} *
                                                               static_cast<double>(x));
            if (f < best - 1e-12) {
                best = f;
                co_optima = {x};
            } else if (f < best + 1e-12) {
                co_optima.insert(x);
            }
        }
        CHECK(best == doctest::Approx(5.0));
        CHECK(co_optima == std::set<int>{-1, 0});
    }
    // zero matrix entry: no-op minimization
    {
        const PrecodingMatrix W{ComplexMatrix(1, 2, {Complex{1.0}, Complex{}}),
                                PrecoderKind::ZF};
        const VppProblem p =
            make_vpp_problem(W, {Complex{1.0, 2.0}, Complex{0.5}}, 1.0);
        const PerturbationVector cur{0, 3, 0, 0};
        const ComplexVector r = residual_of(p, cur);
        const LocalMinResult lm = local_min_dim(p, r, 0, 1, 3);
        CHECK(lm.x_star == 3);
        CHECK(lm.f_star == doctest::Approx(std::norm(r[0])).epsilon(1e-12));
        CHECK(lm.p_value == doctest::Approx(linf_norm(r)).epsilon(1e-12));
    }
}

TEST_CASE("closed form matches brute force on random quadratics") {
    RngStream rng = RngStream::derive(51, {1});
    int tested = 0;
    while (tested < 1000) {
        const std::size_t n = 1 + rng.below(3);
        const std::size_t m = n + rng.below(3);
        VppProblem p;
        p.n_tx = m;
        p.n_users = n;
        p.tau = 1.0 + 2.0 * std::abs(rng.normal());
        p.W_hat = random_matrix(m, 2 * n, rng);
        p.u_hat.resize(2 * n);
        for (auto& x : p.u_hat) x = 2.0 * rng.normal();
        PerturbationVector cur(2 * n);
        for (auto& x : cur) x = rng.int_in(-2, 2);
        const std::size_t ai = rng.below(m);
        const std::size_t dj = rng.below(2 * n);
        if (std::abs(p.W_hat(ai, dj)) < 0.3) continue;

        const ComplexVector r = residual_of(p, cur);
        const Complex w = p.W_hat(ai, dj);
        const Complex a = r[ai] - p.tau * w * static_cast<double>(cur[dj]);
        const double vertex = -(a.real() * w.real() + a.imag() * w.imag()) /
                              (p.tau * std::norm(w));
        if (std::abs(vertex) > 40.0) continue;

        const LocalMinResult lm = local_min_dim(p, r, ai, dj, cur[dj]);
        double best = 1e300;
        for (int x = -50; x <= 50; ++x)
            best = std::min(best, std::norm(a + p.tau * w * static_cast<double>(x)));
        CHECK(lm.f_star == doctest::Approx(best).epsilon(1e-9));
        const double f_at_xstar =
            std::norm(a + p.tau * w * static_cast<double>(lm.x_star));
        CHECK(f_at_xstar == doctest::Approx(best).epsilon(1e-9));
        ++tested;
    }
}

TEST_CASE("full expansion") {
    RngStream rng = RngStream::derive(51, {2});
    const VppProblem p = random_zf_problem(3, 3, rng);

    const auto one = full_expansion(p, 1, 1);
    REQUIRE(one.size() == 3);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(one[c].values[0] == static_cast<int>(c) - 1);
        CHECK(one[c].assigned_prefix == 1);
        for (std::size_t d = 1; d < 6; ++d) CHECK(one[c].values[d] == 0);
    }

    const auto empty = full_expansion(p, 0, 1);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].assigned_prefix == 0);

    const auto nine = full_expansion(p, 2, 1);
    REQUIRE(nine.size() == 9);
    std::set<std::pair<int, int>> distinct;
    for (const auto& q : nine) distinct.insert({q.values[0], q.values[1]});
    CHECK(distinct.size() == 9);
    // lexicographic enumeration
    CHECK(nine.front().values[0] == -1);
    CHECK(nine.front().values[1] == -1);
    CHECK(nine.back().values[0] == 1);
    CHECK(nine.back().values[1] == 1);

    CHECK_THROWS_AS(full_expansion(p, 6, 2), std::invalid_argument);  // 5^6 > default cap
    CHECK_THROWS_AS(full_expansion(p, 7, 1, 1000000), std::invalid_argument);  // L > 2n
    CHECK_THROWS_AS(full_expansion(p, 1, 0), std::invalid_argument);
}

TEST_CASE("single expansion") {
    // 1x1 system with u inside the fundamental region: zero perturbation wins
    {
        const Constellation c = make_constellation(4);
        const PrecodingMatrix W{ComplexMatrix(1, 1, {Complex{1.0}}), PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, {Complex{1.0, 1.0}}, c.tau);
        StageOneCandidate q;
        q.values = {0, 0};
        q.assigned_prefix = 0;
        const PerturbationVector v = single_expansion(p, q);
        CHECK(v == PerturbationVector{0, 0});
        CHECK(objective(p, v) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        // exhaustive confirmation over [-1,1]^2
        const SolveOutcome ex = exhaustive_solve(p, 1);
        CHECK(ex.v_hat == v);
    }
    // fully assigned candidate passes through unchanged
    {
        RngStream rng = RngStream::derive(51, {3});
        const VppProblem p = random_zf_problem(2, 2, rng);
        StageOneCandidate q;
        q.values = {1, -1, 0, 1};
        q.assigned_prefix = 4;
        CHECK(single_expansion(p, q) == q.values);
    }
}

TEST_CASE("single expansion performs exactly 2n - L fixing steps") {
    // the op counter pins the loop structure: one residual build up front,
    // then per step a full (antenna x unassigned) scan plus one update
    RngStream rng = RngStream::derive(51, {4});
    const int cases[][3] = {{3, 4, 0}, {3, 4, 2}, {4, 4, 5}, {2, 6, 4}};
    for (const auto& tc : cases) {
        const int nu = tc[0], nt = tc[1], L = tc[2];
        const VppProblem p = random_zf_problem(nu, nt, rng);
        StageOneCandidate q;
        q.values.assign(2 * nu, 0);
        q.assigned_prefix = static_cast<std::size_t>(L);
        std::uint64_t ops = 0;
        (void)single_expansion(p, q, {}, &ops);

        const std::uint64_t m = nt, dims = 2 * nu;
        const std::uint64_t steps = dims - L;
        std::uint64_t expected = 8 * m * dims;  // initial residual
        for (std::uint64_t u = steps; u >= 1; --u)
            expected += m * u * (10 + 10 * m) + 8 * m;
        CHECK(ops == expected);
    }
}

TEST_CASE("treestep solves never worse than zero perturbation") {
    RngStream rng = RngStream::derive(51, {5});
    TreeStepParams params;  // L=1, V=1, K=0
    for (int trial = 0; trial < 200; ++trial) {
        const VppProblem p = random_zf_problem(4, 4, rng);
        RngStream solver_rng = rng.fork(trial);
        const SolveOutcome out = treestep_solve(p, params, solver_rng);
        CHECK(out.objective <= objective(p, PerturbationVector(8, 0)));
        CHECK(out.objective == objective(p, out.v_hat));  // re-evaluable
        CHECK(out.candidates_evaluated == 4);             // 3 + zero
    }
}

TEST_CASE("treestep degenerate full expansion equals the oracle") {
    RngStream rng = RngStream::derive(51, {6});
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(2);
        const VppProblem p = random_zf_problem(n, n, rng);
        TreeStepParams params;
        params.L = static_cast<int>(2 * n);
        params.V = 1;
        params.K = 0;
        RngStream solver_rng = rng.fork(trial);
        const SolveOutcome ts = treestep_solve(p, params, solver_rng);
        const SolveOutcome ex = exhaustive_solve(p, 1);
        CHECK(ts.objective == ex.objective);  // bitwise
        CHECK(ts.v_hat == ex.v_hat);
    }
}

TEST_CASE("treestep improves on the zero perturbation on average") {
    RngStream rng = RngStream::derive(51, {7});
    TreeStepParams params;
    double sum_ts = 0.0, sum_zf = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const VppProblem p = random_zf_problem(4, 4, rng);
        RngStream solver_rng = rng.fork(trial);
        sum_ts += treestep_solve(p, params, solver_rng).objective;
        sum_zf += objective(p, PerturbationVector(8, 0));
    }
    CHECK(sum_ts < sum_zf);
}

TEST_CASE("treestep parameter validation and candidate accounting") {
    RngStream rng = RngStream::derive(51, {8});
    const VppProblem p = random_zf_problem(3, 3, rng);

    TreeStepParams bad;
    bad.B = 2;  // B > V
    RngStream r1 = rng.fork(1);
    CHECK_THROWS_AS(treestep_solve(p, bad, r1), std::invalid_argument);
    TreeStepParams deep;
    deep.L = 7;  // > 2 * n_users
    CHECK_THROWS_AS(treestep_solve(p, deep, r1), std::invalid_argument);

    TreeStepParams reps;
    reps.L = 2;
    reps.V = 1;
    reps.K = 3;
    reps.B = 1;
    CHECK(reps.complexity_factor() == 36);
    RngStream r2 = rng.fork(2);
    const SolveOutcome out = treestep_solve(p, reps, r2);
    CHECK(out.candidates_evaluated == 37);

    // repetitions only add candidates: objective monotone in K
    TreeStepParams base = reps;
    base.K = 0;
    RngStream r3 = rng.fork(3);
    CHECK(out.objective <= treestep_solve(p, base, r3).objective);

    // determinism: identical stream, identical outcome
    RngStream r4a = rng.fork(4);
    RngStream r4b = rng.fork(4);
    CHECK(treestep_solve(p, reps, r4a).v_hat == treestep_solve(p, reps, r4b).v_hat);
}

TEST_CASE("fse baseline") {
    // identity channel, symbols inside the fundamental region: no perturbation
    {
        const Constellation c = make_constellation(4);
        const PrecodingMatrix W{ComplexMatrix::identity(2), PrecoderKind::ZF};
        const ComplexVector u{Complex{1.0, 1.0}, Complex{-1.0, 1.0}};
        const VppProblem p = make_vpp_problem(W, u, c.tau);
        for (auto sel : {FseSelection::L2, FseSelection::Linf}) {
            const SolveOutcome out = fse_solve(p, W, u, 1, sel);
            CHECK(out.v_hat == PerturbationVector(4, 0));
            CHECK(out.candidates_evaluated == 9);
        }
    }

    RngStream rng = RngStream::derive(51, {9});
    const Constellation c = make_constellation(4);

    // per-antenna selection dominates the L2 selection in the reported norm
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(3);
        const ChannelInstance ch = sample_rayleigh(n, n, rng);
        const PrecodingMatrix W = zf_precoder(ch);
        const ComplexVector u = random_qam_vector(c, n, rng);
        const VppProblem p = make_vpp_problem(W, u, c.tau);
        const SolveOutcome l2 = fse_solve(p, W, u, 1, FseSelection::L2);
        const SolveOutcome li = fse_solve(p, W, u, 1, FseSelection::Linf);
        CHECK(li.objective <= l2.objective);
    }

    // L2 winner agrees with an independent L2 scan over the same candidates
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2;
        const ChannelInstance ch = sample_rayleigh(n, n, rng);
        const PrecodingMatrix W = zf_precoder(ch);
        const ComplexVector u = random_qam_vector(c, n, rng);
        const VppProblem p = make_vpp_problem(W, u, c.tau);
        const SolveOutcome out = fse_solve(p, W, u, 1, FseSelection::L2);

        // independent reconstruction of the candidate set and metric
        const QrResult qr = qr_decompose(W.W);
        double best_metric = 1e300;
        for (int re = -1; re <= 1; ++re)
            for (int im = -1; im <= 1; ++im) {
                ComplexVector v(n);
                v[n - 1] = Complex(re, im);
                for (std::size_t k = n - 1; k-- > 0;) {
                    Complex s{};
                    for (std::size_t m2 = k + 1; m2 < n; ++m2)
                        s += qr.R(k, m2) * (u[m2] + c.tau * v[m2]);
                    const Complex z = (u[k] + s / qr.R(k, k)) / c.tau;
                    v[k] = Complex(-std::round(z.real()), -std::round(z.imag()));
                }
                // metric via the W route rather than the R route
                ComplexVector d(n);
                for (std::size_t k = 0; k < n; ++k) d[k] = u[k] + c.tau * v[k];
                const ComplexVector wd = matvec(W.W, d);
                double l2sq = 0.0;
                for (const auto& z : wd) l2sq += std::norm(z);
                best_metric = std::min(best_metric, l2sq);
            }
        // winner's metric equals the scan minimum
        ComplexVector d(n);
        const ComplexVector vw = fold_complex(out.v_hat);
        for (std::size_t k = 0; k < n; ++k) d[k] = u[k] + c.tau * vw[k];
        const ComplexVector wd = matvec(W.W, d);
        double win_l2sq = 0.0;
        for (const auto& z : wd) win_l2sq += std::norm(z);
        CHECK(win_l2sq == doctest::Approx(best_metric).epsilon(1e-9));
    }

    // rank-deficient W is rejected
    ComplexMatrix flat(3, 2);
    for (std::size_t i = 0; i < 3; ++i) flat(i, 0) = flat(i, 1) = Complex{1.0, 0.5};
    const PrecodingMatrix Wb{flat, PrecoderKind::ZF};
    const ComplexVector ub{Complex{1.0, 1.0}, Complex{1.0, -1.0}};
    const VppProblem pb = make_vpp_problem(Wb, ub, 4.0);
    CHECK_THROWS_AS(fse_solve(pb, Wb, ub, 1, FseSelection::L2), std::runtime_error);
}

TEST_CASE("exhaustive oracle") {
    const Constellation c = make_constellation(4);
    // u = 3: stepping down by tau beats staying put
    {
        const PrecodingMatrix W{ComplexMatrix(1, 1, {Complex{1.0}}), PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, {Complex{3.0}}, c.tau);
        const SolveOutcome out = exhaustive_solve(p, 1);
        CHECK(out.v_hat == PerturbationVector{-1, 0});
        CHECK(out.objective == doctest::Approx(c.tau - 3.0).epsilon(1e-12));
        CHECK(out.candidates_evaluated == 9);
    }
    // u = 0 keeps the zero perturbation
    {
        const PrecodingMatrix W{ComplexMatrix(1, 1, {Complex{1.0}}), PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, {Complex{}}, c.tau);
        const SolveOutcome out = exhaustive_solve(p, 1);
        CHECK(out.v_hat == PerturbationVector{0, 0});
        CHECK(out.objective == 0.0);
    }
    // oracle <= treestep <= zero across random instances; the greedy stage
    // can step outside [-1,1], so the oracle box is widened to cover the
    // treestep solution before comparing
    {
        RngStream rng = RngStream::derive(51, {10});
        TreeStepParams params;
        for (int trial = 0; trial < 300; ++trial) {
            const VppProblem p = random_zf_problem(2, 2, rng);
            RngStream solver_rng = rng.fork(trial);
            const SolveOutcome tree = treestep_solve(p, params, solver_rng);
            int box = 1;
            for (int e : tree.v_hat) box = std::max(box, std::abs(e));
            const double oracle = exhaustive_solve(p, box, 1u << 20).objective;
            const double zero = objective(p, PerturbationVector(4, 0));
            CHECK(oracle <= tree.objective);
            CHECK(tree.objective <= zero);
        }
    }
    // cap guard
    {
        RngStream rng = RngStream::derive(51, {11});
        const VppProblem p = random_zf_problem(6, 6, rng);
        CHECK_THROWS_AS(exhaustive_solve(p, 1), std::invalid_argument);  // 3^12 > cap
    }
}
