#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vpp/harness.hpp"

namespace vpp {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    ComplexMatrix A(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) A(i, j) = Complex(rng.normal(), rng.normal());
    return A;
}

ComplexVector random_vector(std::size_t n, RngStream& rng) {
    ComplexVector v(n);
    for (auto& z : v) z = Complex(rng.normal(), rng.normal());
    return v;
}

double max_abs_dev_from_identity(const ComplexMatrix& M) {
    double worst = 0.0;
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) {
            const Complex want = (i == j) ? Complex{1.0} : Complex{};
            worst = std::max(worst, std::abs(M(i, j) - want));
        }
    return worst;
}

VerifyCheck check_pinv_identity(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {101});
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rows = 1 + rng.below(8);
        const std::size_t cols = rows + rng.below(9);
        const ComplexMatrix H = random_matrix(rows, cols, rng);
        const ComplexMatrix W = right_pseudo_inverse(H, 0.0);
        worst = std::max(worst, max_abs_dev_from_identity(matmul(H, W)));
    }
    return {"numerics/pinv-identity", worst < 1e-10,
            "100 draws, max |HW - I| = " + fmt(worst)};
}

VerifyCheck check_qr(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {102});
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t cols = 1 + rng.below(6);
        const std::size_t rows = cols + rng.below(5);
        const ComplexMatrix A = random_matrix(rows, cols, rng);
        const QrResult qr = qr_decompose(A);
        worst = std::max(worst, max_abs_dev_from_identity(matmul(hermitian(qr.Q), qr.Q)));
        const ComplexMatrix recon = matmul(qr.Q, qr.R);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                worst = std::max(worst, std::abs(recon(i, j) - A(i, j)));
        for (std::size_t k = 0; k < cols; ++k) {
            if (qr.R(k, k).imag() != 0.0 || qr.R(k, k).real() < 0.0)
                worst = std::max(worst, 1.0);
        }
    }
    return {"numerics/qr-residuals", worst < 1e-10, "100 draws, max residual = " + fmt(worst)};
}

VerifyCheck check_linf_bounds(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {103});
    bool ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        const ComplexVector v = random_vector(n, rng);
        double l2 = 0.0;
        for (const auto& z : v) l2 += std::norm(z);
        l2 = std::sqrt(l2);
        const double li = linf_norm(v);
        // tiny slack for rounding in the two accumulations
        ok = ok && li <= l2 * (1.0 + 1e-12) &&
             li >= l2 / std::sqrt(static_cast<double>(n)) * (1.0 - 1e-12);
    }
    return {"numerics/linf-norm-bounds", ok, "200 draws against the L2 envelope"};
}

VerifyCheck check_modulo_fold(std::uint64_t) {
    bool ok = true;
    int cases = 0;
    for (int order : {4, 16, 64}) {
        const Constellation c = make_constellation(order);
        ok = ok && c.tau > 2.0 * c.c_max;
        for (const auto& s : c.symbols)
            for (int gr = -3; gr <= 3; ++gr)
                for (int gi = -3; gi <= 3; ++gi) {
                    const Complex shifted = s + c.tau * Complex(gr, gi);
                    const Complex folded = modulo_tau(c, shifted);
                    ok = ok && std::abs(folded - s) < 1e-12;
                    ++cases;
                }
    }
    return {"constellation/modulo-fold", ok,
            std::to_string(cases) + " shifted symbols folded back"};
}

VerifyCheck check_gray_roundtrip(std::uint64_t) {
    bool ok = true;
    for (int order : {4, 16, 64}) {
        const Constellation c = make_constellation(order);
        for (int idx = 0; idx < order; ++idx) {
            const Bits& b = symbol_to_bits(c, idx);
            const Complex s = bits_to_symbol(c, b);
            ok = ok && s == c.symbols[idx];
            const auto [got, rb] = nearest_symbol(c, s);
            ok = ok && got == idx && rb == b;
        }
        // Gray property: one-bit difference between axis neighbors.
        for (int rk = 0; rk < c.side; ++rk)
            for (int ik = 0; ik < c.side; ++ik) {
                if (rk + 1 < c.side) {
                    const Bits& a = c.index_to_bits[rk * c.side + ik];
                    const Bits& b = c.index_to_bits[(rk + 1) * c.side + ik];
                    int diff = 0;
                    for (std::size_t t = 0; t < a.size(); ++t) diff += a[t] != b[t];
                    ok = ok && diff == 1;
                }
                if (ik + 1 < c.side) {
                    const Bits& a = c.index_to_bits[rk * c.side + ik];
                    const Bits& b = c.index_to_bits[rk * c.side + ik + 1];
                    int diff = 0;
                    for (std::size_t t = 0; t < a.size(); ++t) diff += a[t] != b[t];
                    ok = ok && diff == 1;
                }
            }
    }
    return {"constellation/gray-roundtrip", ok, "all orders, all patterns"};
}

VerifyCheck check_noise_energy(std::uint64_t seed) {
    const std::size_t n = 4;
    const SnrConfig cfg = sigma_for_snr(1.0, 7.0, n);
    ChannelInstance id;
    id.n_users = n;
    id.n_tx = n;
    id.H = ComplexMatrix::identity(n);
    RngStream rng = RngStream::derive(seed, {104});
    const ComplexVector zero(n, Complex{});
    double acc = 0.0;
    const int trials = 25000;
    for (int t = 0; t < trials; ++t) {
        const ComplexVector y = apply_channel(id, zero, cfg, rng);
        for (const auto& z : y) acc += std::norm(z);
    }
    const double measured = acc / trials;
    const double expected = static_cast<double>(n) * cfg.sigma2;
    const double rel = std::abs(measured - expected) / expected;
    return {"channel/noise-energy", rel < 0.02,
            "E||n||^2 rel err = " + fmt(rel) + " over 1e5 samples"};
}

VerifyCheck check_rayleigh_moments(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {105});
    const std::size_t nu = 100, nt = 100;
    double sum_re = 0.0, sum_im = 0.0, sum_sq = 0.0;
    const int reps = 100;  // 1e6 entries total
    for (int r = 0; r < reps; ++r) {
        const ChannelInstance ch = sample_rayleigh(nu, nt, rng);
        for (const auto& h : ch.H.data()) {
            sum_re += h.real();
            sum_im += h.imag();
            sum_sq += std::norm(h);
        }
    }
    const double count = static_cast<double>(nu * nt * reps);
    const double mean_bound = 5.0 * std::sqrt(0.5) / std::sqrt(count);
    const double var = sum_sq / count;
    const bool ok = std::abs(sum_re / count) < mean_bound &&
                    std::abs(sum_im / count) < mean_bound && std::abs(var - 1.0) < 0.01;
    return {"channel/rayleigh-moments", ok,
            "1e6 entries, var = " + fmt(var) + ", mean bound " + fmt(mean_bound)};
}

VerifyCheck check_channel_determinism(std::uint64_t seed) {
    RngStream a = RngStream::derive(seed, {42, 7});
    RngStream b = RngStream::derive(seed, {42, 7});
    const ChannelInstance ha = sample_rayleigh(4, 8, a);
    const ChannelInstance hb = sample_rayleigh(4, 8, b);
    bool ok = true;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 8; ++j) ok = ok && ha.H(i, j) == hb.H(i, j);
    return {"channel/seed-determinism", ok, "identical key -> identical matrix"};
}

// Independent complex-domain route for the objective, the transform oracle.
double complex_route_objective(const ComplexMatrix& W, const ComplexVector& u,
                               const ComplexVector& v, double tau) {
    ComplexVector d(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) d[k] = u[k] + tau * v[k];
    return linf_norm(matvec(W, d));
}

VerifyCheck check_transform_equiv(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {106});
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        const std::size_t m = n + rng.below(5);
        const ComplexMatrix Wm = random_matrix(m, n, rng);
        const ComplexVector u = random_vector(n, rng);
        const double tau = 1.0 + 4.0 * std::abs(rng.normal());
        PerturbationVector v_hat(2 * n);
        for (auto& x : v_hat) x = rng.int_in(-3, 3);
        const PrecodingMatrix W{Wm, PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, u, tau);
        const double real_route = objective(p, v_hat);
        const double complex_route = complex_route_objective(Wm, u, fold_complex(v_hat), tau);
        const double rel = std::abs(real_route - complex_route) /
                           std::max(1e-30, std::abs(complex_route));
        worst = std::max(worst, rel);
    }
    return {"precoding/transform-equivalence", worst < 1e-12,
            "1000 draws, worst rel dev = " + fmt(worst)};
}

VerifyCheck check_snr_monotone(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {107});
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2;
        const ComplexMatrix Wm = random_matrix(n + 1, n, rng);
        const ComplexVector u = random_vector(n, rng);
        const PrecodingMatrix W{Wm, PrecoderKind::ZF};
        const VppProblem p = make_vpp_problem(W, u, 4.0);
        PerturbationVector a(2 * n), b(2 * n);
        for (auto& x : a) x = rng.int_in(-2, 2);
        for (auto& x : b) x = rng.int_in(-2, 2);
        const double oa = objective(p, a);
        const double ob = objective(p, b);
        if (oa == 0.0 || ob == 0.0) continue;
        const double sa = transmit_vector(p, a, 1.0).second;
        const double sb = transmit_vector(p, b, 1.0).second;
        // smaller objective -> larger received scale sqrt(P)/gamma
        if (oa < ob) ok = ok && (1.0 / sa > 1.0 / sb);
        if (ob < oa) ok = ok && (1.0 / sb > 1.0 / sa);
    }
    return {"precoding/effective-snr-monotone", ok, "100 paired perturbations"};
}

VerifyCheck check_zf_identity(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {108});
    const Constellation c = make_constellation(4);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        RngStream ch_rng = rng.fork(trial);
        const ChannelInstance ch = sample_rayleigh(4, 8, ch_rng);
        const PrecodingMatrix W = zf_precoder(ch);
        ComplexVector u(4);
        for (auto& s : u) {
            Bits b(c.bits_per_symbol);
            for (auto& bit : b) bit = ch_rng.bit();
            s = bits_to_symbol(c, b);
        }
        const VppProblem p = make_vpp_problem(W, u, c.tau);
        PerturbationVector v(8);
        for (auto& x : v) x = ch_rng.int_in(-1, 1);
        const auto [x, gamma] = transmit_vector(p, v, 1.0);
        const ComplexVector received = matvec(ch.H, x);
        const double scale = 1.0 / gamma;  // sqrt(P)/gamma with P = 1
        const ComplexVector folded = fold_complex(v);
        for (std::size_t k = 0; k < 4; ++k) {
            const Complex want = scale * (u[k] + c.tau * folded[k]);
            worst = std::max(worst, std::abs(received[k] - want));
        }
    }
    return {"precoding/zf-noiseless-identity", worst < 1e-8,
            "50 draws, max deviation = " + fmt(worst)};
}

// Brute-force oracle for the one-dimensional quadratic, including the
// half-away-from-zero tie side. Every tenth instance is a constructed exact
// tie (quadratic vertex at k + 1/2), where the two rounding rules differ.
VerifyCheck check_local_min_brute(std::uint64_t seed,
                                  bool inject_half_even_fault = false) {
    RngStream rng = RngStream::derive(seed, {109});
    const double tie_res[4] = {0.5, -0.5, 2.5, -2.5};
    int agree = 0, total = 0;
    std::uint64_t attempts = 0;
    while (total < 10000 && attempts < 200000) {
        ++attempts;
        std::size_t n, m, ai, dj;
        VppProblem p;
        PerturbationVector cur;
        if (total % 10 == 0) {
            // 1x1 system, W_hat = [1, i], residual forced onto a tie point
            n = 1;
            m = 1;
            ai = 0;
            dj = 0;
            const PrecodingMatrix W{ComplexMatrix(1, 1, {Complex{1.0}}), PrecoderKind::ZF};
            p = make_vpp_problem(W, {Complex{tie_res[(total / 10) % 4]}}, 1.0);
            cur.assign(2, 0);
        } else {
            n = 1 + rng.below(3);
            m = n + rng.below(3);
            ComplexMatrix Wm = random_matrix(m, n, rng);
            ai = rng.below(m);
            dj = rng.below(2 * n);
            const ComplexVector u = random_vector(n, rng);
            const double tau = 1.0 + 4.0 * (static_cast<double>(rng.below(1000)) / 1000.0);
            const PrecodingMatrix W{Wm, PrecoderKind::ZF};
            p = make_vpp_problem(W, u, tau);
            Complex wij = p.W_hat(ai, dj);
            if (std::abs(wij) < 0.3) {
                p.W_hat(ai, dj) = (wij == Complex{}) ? Complex{0.5, 0.2}
                                                     : wij / std::abs(wij) * 0.5;
            }
            cur.assign(2 * n, 0);
            for (auto& x : cur) x = rng.int_in(-2, 2);
        }
        const double tau = p.tau;
        ComplexVector residual(m);
        for (std::size_t i = 0; i < m; ++i) {
            Complex acc{};
            for (std::size_t j = 0; j < 2 * n; ++j)
                acc += p.W_hat(i, j) * (p.u_hat[j] + tau * cur[j]);
            residual[i] = acc;
        }
        {
            // reject instances whose vertex falls outside the brute window
            const Complex w = p.W_hat(ai, dj);
            const Complex a = residual[ai] - tau * w * static_cast<double>(cur[dj]);
            const double vertex = -(a.real() * w.real() + a.imag() * w.imag()) /
                                  (tau * std::norm(w));
            if (!(std::abs(vertex) <= 40.0)) continue;
        }

        LocalMinResult lm = local_min_dim(p, residual, ai, dj, cur[dj]);
        if (inject_half_even_fault) {
            // mutant rounding: recompute with round-half-to-even
            const Complex w = p.W_hat(ai, dj);
            const Complex a = residual[ai] - tau * w * static_cast<double>(cur[dj]);
            const double alpha = tau * tau * std::norm(w);
            const double beta = 2.0 * tau * (a.real() * w.real() + a.imag() * w.imag());
            const double t = -beta / (2.0 * alpha);
            const double even = std::nearbyint(t);  // ties-to-even in default mode
            lm.x_star = static_cast<int>(even);
            const double xs = even;
            lm.f_star = alpha * xs * xs + beta * xs + std::norm(a);
        }

        // independent brute force over x in [-50, 50]
        const Complex w = p.W_hat(ai, dj);
        const Complex a = residual[ai] - tau * w * static_cast<double>(cur[dj]);
        double best_f = std::numeric_limits<double>::infinity();
        int best_x = 0;
        for (int x = -50; x <= 50; ++x) {
            const double f = std::norm(a + tau * w * static_cast<double>(x));
            if (f < best_f) {
                best_f = f;
                best_x = x;
            }
        }
        // the documented tie rule, recomputed independently of the implementation
        const double alpha = tau * tau * std::norm(w);
        const double beta = 2.0 * tau * (a.real() * w.real() + a.imag() * w.imag());
        const double t = -beta / (2.0 * alpha);
        const double frac = t - std::floor(t);
        int expected_x = best_x;
        if (frac == 0.5)  // exact tie: half away from zero
            expected_x = static_cast<int>(t >= 0.0 ? std::ceil(t) : std::floor(t));

        const bool value_ok = std::abs(lm.f_star - best_f) <=
                              1e-9 * std::max(1.0, std::abs(best_f));
        const bool arg_ok = lm.x_star == expected_x;
        total += 1;
        agree += (value_ok && arg_ok) ? 1 : 0;
    }
    const bool pass = inject_half_even_fault ? agree < total : agree == total;
    return {inject_half_even_fault ? "solvers/local-min-fault-injection"
                                   : "solvers/local-min-brute-force",
            pass, std::to_string(agree) + "/" + std::to_string(total) + " agreements"};
}

VppProblem random_problem(std::size_t n_users, std::size_t n_tx, int mod_order,
                          RngStream& rng, PrecodingMatrix* W_out = nullptr) {
    const Constellation c = make_constellation(mod_order);
    const ChannelInstance ch = sample_rayleigh(n_users, n_tx, rng);
    const PrecodingMatrix W = zf_precoder(ch);
    ComplexVector u(n_users);
    for (auto& s : u) {
        Bits b(c.bits_per_symbol);
        for (auto& bit : b) bit = rng.bit();
        s = bits_to_symbol(c, b);
    }
    if (W_out) *W_out = W;
    return make_vpp_problem(W, u, c.tau);
}

VerifyCheck check_greedy_external(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {110});
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        const VppProblem p = random_problem(3, 4, 4, rng);
        const auto stage1 = full_expansion(p, 1, 1);
        for (const auto& q : stage1) {
            // external re-derivation with the public pieces only
            std::vector<int> v = q.values;
            std::vector<char> assigned(v.size(), 0);
            for (std::size_t d = 0; d < q.assigned_prefix; ++d) assigned[d] = 1;
            std::size_t remaining = v.size() - q.assigned_prefix;
            while (remaining > 0) {
                ComplexVector residual(p.n_tx);
                for (std::size_t i = 0; i < p.n_tx; ++i) {
                    Complex acc{};
                    for (std::size_t j = 0; j < v.size(); ++j)
                        acc += p.W_hat(i, j) * (p.u_hat[j] + p.tau * v[j]);
                    residual[i] = acc;
                }
                double best_p = std::numeric_limits<double>::infinity();
                std::size_t best_dim = 0;
                int best_x = 0;
                for (std::size_t i = 0; i < p.n_tx; ++i)
                    for (std::size_t j = 0; j < v.size(); ++j) {
                        if (assigned[j]) continue;
                        const LocalMinResult lm = local_min_dim(p, residual, i, j, v[j]);
                        if (lm.p_value * lm.p_value < best_p) {
                            best_p = lm.p_value * lm.p_value;
                            best_dim = j;
                            best_x = lm.x_star;
                        }
                    }
                v[best_dim] = best_x;
                assigned[best_dim] = 1;
                --remaining;
            }
            const PerturbationVector direct = single_expansion(p, q);
            ok = ok && direct == v;
        }
    }
    return {"solvers/greedy-step-optimality", ok, "60 expansions re-derived externally"};
}

VerifyCheck check_degenerate_equiv(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {111});
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(2);
        const VppProblem p = random_problem(n, n + rng.below(3), 4, rng);
        TreeStepParams params;
        params.L = static_cast<int>(2 * n);
        params.V = 1;
        params.K = 0;
        params.B = 1;
        RngStream solver_rng = rng.fork(trial);
        const SolveOutcome ts = treestep_solve(p, params, solver_rng);
        const SolveOutcome ex = exhaustive_solve(p, 1);
        ok = ok && ts.objective == ex.objective && ts.v_hat == ex.v_hat;
    }
    return {"solvers/degenerate-exhaustive-equivalence", ok,
            "100 instances, bitwise objective match"};
}

VerifyCheck check_pool_dominance(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {112});
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        const VppProblem p = random_problem(3, 3, 4, rng);
        TreeStepParams params;  // L=1, V=1, K=0
        RngStream solver_rng = rng.fork(trial);
        const SolveOutcome ts = treestep_solve(p, params, solver_rng);
        // external pool: zero-start traces plus the zero vector
        double ext_min = objective(p, PerturbationVector(2 * p.n_users, 0));
        for (const auto& q : full_expansion(p, params.L, params.V))
            ext_min = std::min(ext_min, objective(p, single_expansion(p, q)));
        ok = ok && ts.objective == ext_min;

        // random repetitions only add pool members
        params.K = 2;
        RngStream rep_rng = rng.fork(trial + 1000);
        const SolveOutcome ts_rep = treestep_solve(p, params, rep_rng);
        ok = ok && ts_rep.objective <= ts.objective;
    }
    return {"solvers/pool-dominance", ok, "50 instances, argmin over re-derived traces"};
}

VerifyCheck check_candidate_count(std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, {113});
    const VppProblem p = random_problem(4, 4, 4, rng);
    bool ok = true;
    const int tuples[][3] = {{1, 1, 0}, {2, 1, 0}, {3, 1, 0}, {1, 2, 0},
                             {1, 1, 1}, {1, 1, 2}, {2, 1, 1}};
    for (const auto& t : tuples) {
        TreeStepParams params;
        params.L = t[0];
        params.V = t[1];
        params.K = t[2];
        params.B = params.V;
        RngStream solver_rng = rng.fork(static_cast<std::uint64_t>(t[0] * 100 + t[1] * 10 + t[2]));
        const SolveOutcome out = treestep_solve(p, params, solver_rng);
        ok = ok && out.candidates_evaluated == params.complexity_factor() + 1;
    }
    return {"solvers/candidate-count", ok, "7 parameter tuples, C_f + 1 each"};
}

VerifyCheck check_op_scaling(std::uint64_t seed) {
    // Square systems, 4-QAM, one zero-start expansion each; slope of
    // log(op/n_tx) against log(n_users).
    RngStream rng = RngStream::derive(seed, {114});
    std::vector<double> lx, ly;
    for (std::size_t n : {4, 8, 16}) {
        const VppProblem p = random_problem(n, n, 4, rng);
        StageOneCandidate q;
        q.values.assign(2 * n, 0);
        q.assigned_prefix = 0;
        std::uint64_t ops = 0;
        (void)single_expansion(p, q, {}, &ops);
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(static_cast<double>(ops) / static_cast<double>(n)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return {"solvers/op-count-scaling", std::abs(slope - 3.0) <= 0.3,
            "user-dimension exponent = " + fmt(slope)};
}

VerifyCheck check_noiseless_ber(std::uint64_t seed) {
    SweepConfig cfg;
    cfg.n_users = 4;
    cfg.n_tx = 4;
    cfg.mod_order = 4;
    cfg.master_seed = seed;
    const SnrConfig noiseless{1.0, 1e300, 0.0, cfg.n_users};
    std::uint64_t errors = 0, bits = 0;
    for (const char* pc : {"treestep", "fse", "fse_mod", "oracle"}) {
        for (std::size_t t = 0; t < 250; ++t) {
            RngStream ch_rng = RngStream::derive(seed, {201, t});
            const ChannelInstance ch = sample_rayleigh(cfg.n_users, cfg.n_tx, ch_rng);
            RngStream trial_rng = RngStream::derive(seed, {202, t});
            const TrialResult tr = run_trial(cfg, pc, ch, noiseless, trial_rng);
            errors += tr.bit_errors;
            bits += tr.bits;
        }
    }
    return {"harness/noiseless-ber-zero", errors == 0,
            std::to_string(errors) + " errors in " + std::to_string(bits) + " noiseless bits"};
}

VerifyCheck check_sweep_determinism(std::uint64_t seed) {
    SweepConfig cfg;
    cfg.n_users = 4;
    cfg.n_tx = 4;
    cfg.mod_order = 4;
    cfg.snr_grid_db = {6.0, 12.0};
    cfg.precoders = {"treestep", "rzf"};
    cfg.n_channels = 6;
    cfg.n_vectors_per_channel = 8;
    cfg.master_seed = seed;
    cfg.workers = 1;
    const std::string a = format_records(run_sweep(cfg), OutputFormat::Csv);
    cfg.workers = 4;
    const std::string b = format_records(run_sweep(cfg), OutputFormat::Csv);
    cfg.workers = 1;
    const std::string c = format_records(run_sweep(cfg), OutputFormat::Csv);
    return {"harness/worker-determinism", a == b && a == c,
            "1-worker, 4-worker, repeat runs byte-identical"};
}

VerifyCheck check_objective_ber_coupling(std::uint64_t seed) {
    // The effective-SNR mechanism relates objective and BER only among
    // precoders sharing the same W, so compare the ZF-matrix family.
    SweepConfig cfg;
    cfg.n_users = 4;
    cfg.n_tx = 4;
    cfg.mod_order = 4;
    cfg.snr_grid_db = {14.0};
    cfg.precoders = {"treestep", "fse", "zf"};
    cfg.n_channels = 64;
    cfg.n_vectors_per_channel = 32;
    cfg.master_seed = seed;
    cfg.workers = 4;
    const auto recs = run_sweep(cfg);
    bool ok = true;
    std::string detail;
    for (const auto& a : recs) {
        for (const auto& b : recs) {
            if (a.mean_objective >= b.mean_objective) continue;
            const double se = std::sqrt(a.ber * (1 - a.ber) / a.bits_total +
                                        b.ber * (1 - b.ber) / b.bits_total);
            ok = ok && a.ber <= b.ber + 3.0 * se;
        }
    }
    for (const auto& r : recs)
        detail += r.precoder + " obj " + fmt(r.mean_objective) + " ber " + fmt(r.ber) + "; ";
    return {"harness/objective-ber-coupling", ok, detail};
}

}  // namespace

VerifyReport verify_suite(std::uint64_t seed) {
    VerifyReport rep;
    rep.checks.push_back(check_pinv_identity(seed));
    rep.checks.push_back(check_qr(seed));
    rep.checks.push_back(check_linf_bounds(seed));
    rep.checks.push_back(check_modulo_fold(seed));
    rep.checks.push_back(check_gray_roundtrip(seed));
    rep.checks.push_back(check_noise_energy(seed));
    rep.checks.push_back(check_rayleigh_moments(seed));
    rep.checks.push_back(check_channel_determinism(seed));
    rep.checks.push_back(check_transform_equiv(seed));
    rep.checks.push_back(check_snr_monotone(seed));
    rep.checks.push_back(check_zf_identity(seed));
    rep.checks.push_back(check_local_min_brute(seed));
    rep.checks.push_back(check_local_min_brute(seed, /*inject_half_even_fault=*/true));
    rep.checks.push_back(check_greedy_external(seed));
    rep.checks.push_back(check_degenerate_equiv(seed));
    rep.checks.push_back(check_pool_dominance(seed));
    rep.checks.push_back(check_candidate_count(seed));
    rep.checks.push_back(check_op_scaling(seed));
    rep.checks.push_back(check_noiseless_ber(seed));
    rep.checks.push_back(check_sweep_determinism(seed));
    rep.checks.push_back(check_objective_ber_coupling(seed));
    return rep;
}

}  // namespace vpp
