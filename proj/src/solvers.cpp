#include "vpp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vpp {

namespace {

// Op-counter weights, roughly one unit per real multiply-add.
constexpr std::uint64_t kOpsQuadSetup = 10;       // per closed-form minimization
constexpr std::uint64_t kOpsPerAntennaScan = 10;  // per antenna in a p_value scan
constexpr std::uint64_t kOpsPerResidualTerm = 8;  // per entry of a residual build/update

struct LocalMinSq {
    long x_star = 0;
    double f_star = 0.0;
    double p_value_sq = 0.0;
};

// Squared-magnitude variant used in the hot loop; square roots are deferred
// to the public surface since argmin is invariant under the square map.
LocalMinSq local_min_dim_sq(const VppProblem& p, const ComplexVector& residual,
                            std::size_t antenna_i, std::size_t dim_j, int current_j,
                            std::uint64_t* ops) {
    const std::size_t m = p.n_tx;
    if (ops) *ops += kOpsQuadSetup;

    LocalMinSq out;
    const Complex w = p.W_hat(antenna_i, dim_j);
    if (w == Complex{}) {
        // No leverage on this antenna along dim_j: no-op minimization.
        out.x_star = current_j;
        out.f_star = std::norm(residual[antenna_i]);
        double worst = 0.0;
        for (std::size_t k = 0; k < m; ++k) worst = std::max(worst, std::norm(residual[k]));
        if (ops) *ops += kOpsPerAntennaScan * m;
        out.p_value_sq = worst;
        return out;
    }

    // f(x) = |a + tau*W_hat(i,j)*x|^2 with a the residual contribution of
    // everything except dimension j.
    const Complex a = residual[antenna_i] - p.tau * w * static_cast<double>(current_j);
    const double alpha = p.tau * p.tau * std::norm(w);
    const double beta = 2.0 * p.tau * (a.real() * w.real() + a.imag() * w.imag());
    const double gamma = std::norm(a);
    const double vertex = std::clamp(-beta / (2.0 * alpha), -1e9, 1e9);
    out.x_star = std::lround(vertex);  // half away from zero
    const double xs = static_cast<double>(out.x_star);
    out.f_star = alpha * xs * xs + beta * xs + gamma;

    const double step = p.tau * (xs - static_cast<double>(current_j));
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const Complex r = residual[k] + step * p.W_hat(k, dim_j);
        worst = std::max(worst, std::norm(r));
    }
    if (ops) *ops += kOpsPerAntennaScan * m;
    out.p_value_sq = worst;
    return out;
}

ComplexVector build_residual(const VppProblem& p, const std::vector<int>& v_hat,
                             std::uint64_t* ops) {
    const std::size_t dims = p.u_hat.size();
    ComplexVector r(p.n_tx);
    for (std::size_t i = 0; i < p.n_tx; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < dims; ++j)
            acc += p.W_hat(i, j) * (p.u_hat[j] + p.tau * static_cast<double>(v_hat[j]));
        r[i] = acc;
    }
    if (ops) *ops += kOpsPerResidualTerm * p.n_tx * dims;
    return r;
}

bool lex_less(const PerturbationVector& a, const PerturbationVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Deterministic pool argmin: better objective wins, equal objectives fall
// back to the lexicographically smallest vector.
struct PoolBest {
    PerturbationVector v;
    double obj = std::numeric_limits<double>::infinity();

    void consider(const PerturbationVector& cand, double cand_obj) {
        if (cand_obj < obj || (cand_obj == obj && lex_less(cand, v))) {
            v = cand;
            obj = cand_obj;
        }
    }
};

std::uint64_t pow_u64(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > UINT64_MAX / base) return UINT64_MAX;
        r *= base;
    }
    return r;
}

int round_away(double x) { return static_cast<int>(std::lround(x)); }

}  // namespace

std::uint64_t TreeStepParams::complexity_factor() const {
    return static_cast<std::uint64_t>(K + 1) * pow_u64(2 * static_cast<std::uint64_t>(V) + 1, L);
}

LocalMinResult local_min_dim(const VppProblem& p, const ComplexVector& residual,
                             std::size_t antenna_i, std::size_t dim_j, int current_j) {
    if (antenna_i >= p.n_tx || dim_j >= p.u_hat.size())
        throw std::invalid_argument("local_min_dim: index out of range");
    const LocalMinSq sq = local_min_dim_sq(p, residual, antenna_i, dim_j, current_j, nullptr);
    LocalMinResult out;
    out.x_star = static_cast<int>(sq.x_star);
    out.f_star = sq.f_star;
    out.p_value = std::sqrt(sq.p_value_sq);
    return out;
}

std::vector<StageOneCandidate> full_expansion(const VppProblem& p, int L, int V,
                                              std::uint64_t max_candidates) {
    const std::size_t dims = p.u_hat.size();
    if (L < 0 || static_cast<std::size_t>(L) > dims)
        throw std::invalid_argument("full_expansion: L out of range");
    if (V < 1) throw std::invalid_argument("full_expansion: V must be >= 1");

    const std::uint64_t width = 2 * static_cast<std::uint64_t>(V) + 1;
    const std::uint64_t count = pow_u64(width, L);
    if (count > max_candidates)
        throw std::invalid_argument("full_expansion: (2V+1)^L exceeds candidate cap");

    std::vector<StageOneCandidate> out;
    out.reserve(count);
    // Mixed-radix enumeration with dimension 0 as the most significant digit
    // keeps the candidates in lexicographic order.
    for (std::uint64_t c = 0; c < count; ++c) {
        StageOneCandidate cand;
        cand.values.assign(dims, 0);
        cand.assigned_prefix = static_cast<std::size_t>(L);
        std::uint64_t rem = c;
        for (int d = L - 1; d >= 0; --d) {
            cand.values[d] = static_cast<int>(rem % width) - V;
            rem /= width;
        }
        out.push_back(std::move(cand));
    }
    return out;
}

PerturbationVector single_expansion(const VppProblem& p, const StageOneCandidate& q,
                                    const std::vector<int>& init, std::uint64_t* op_counter) {
    const std::size_t dims = p.u_hat.size();
    if (q.values.size() != dims)
        throw std::invalid_argument("single_expansion: candidate size mismatch");
    if (!init.empty() && init.size() != dims)
        throw std::invalid_argument("single_expansion: init size mismatch");

    std::vector<int> v = q.values;
    std::vector<char> assigned(dims, 0);
    for (std::size_t d = 0; d < q.assigned_prefix; ++d) assigned[d] = 1;
    if (!init.empty())
        for (std::size_t d = q.assigned_prefix; d < dims; ++d) v[d] = init[d];

    ComplexVector residual = build_residual(p, v, op_counter);

    std::size_t remaining = dims - q.assigned_prefix;
    while (remaining > 0) {
        double best_p = std::numeric_limits<double>::infinity();
        std::size_t best_dim = 0;
        long best_x = 0;
        // Antenna-major scan; strict improvement keeps the smallest
        // (antenna, dimension) pair on ties.
        for (std::size_t i = 0; i < p.n_tx; ++i) {
            for (std::size_t j = 0; j < dims; ++j) {
                if (assigned[j]) continue;
                const LocalMinSq lm = local_min_dim_sq(p, residual, i, j, v[j], op_counter);
                if (lm.p_value_sq < best_p) {
                    best_p = lm.p_value_sq;
                    best_dim = j;
                    best_x = lm.x_star;
                }
            }
        }
        const double step = p.tau * static_cast<double>(best_x - v[best_dim]);
        if (step != 0.0)
            for (std::size_t k = 0; k < p.n_tx; ++k)
                residual[k] += step * p.W_hat(k, best_dim);
        if (op_counter) *op_counter += kOpsPerResidualTerm * p.n_tx;
        v[best_dim] = static_cast<int>(best_x);
        assigned[best_dim] = 1;
        --remaining;
    }
    return v;
}

SolveOutcome treestep_solve(const VppProblem& p, const TreeStepParams& params, RngStream& rng) {
    const std::size_t dims = p.u_hat.size();
    if (params.L < 0 || static_cast<std::size_t>(params.L) > dims)
        throw std::invalid_argument("treestep_solve: L out of range");
    if (params.V < 1) throw std::invalid_argument("treestep_solve: V must be >= 1");
    if (params.K < 0) throw std::invalid_argument("treestep_solve: K must be >= 0");
    if (params.B < 0 || params.B > params.V)
        throw std::invalid_argument("treestep_solve: need 0 <= B <= V");

    SolveOutcome out;
    PoolBest best;

    const auto stage1 = full_expansion(p, params.L, params.V);
    std::vector<int> init(dims, 0);
    for (const auto& q : stage1) {
        PerturbationVector v = single_expansion(p, q, {}, &out.op_counter);
        best.consider(v, objective(p, v));
        ++out.candidates_evaluated;
        for (int rep = 0; rep < params.K; ++rep) {
            for (std::size_t d = q.assigned_prefix; d < dims; ++d)
                init[d] = rng.int_in(-params.B, params.B);
            v = single_expansion(p, q, init, &out.op_counter);
            best.consider(v, objective(p, v));
            ++out.candidates_evaluated;
        }
    }

    // The all-zero perturbation joins the pool so the result is never worse
    // than unperturbed linear precoding.
    const PerturbationVector zero(dims, 0);
    best.consider(zero, objective(p, zero));
    ++out.candidates_evaluated;

    out.v_hat = std::move(best.v);
    out.objective = best.obj;
    return out;
}

SolveOutcome fse_solve(const VppProblem& p, const PrecodingMatrix& W, const ComplexVector& u,
                       int V, FseSelection selection) {
    const std::size_t n = W.W.cols();
    if (u.size() != n) throw std::invalid_argument("fse_solve: dimension mismatch");
    if (V < 1) throw std::invalid_argument("fse_solve: V must be >= 1");

    const QrResult qr = qr_decompose(W.W);
    const ComplexMatrix& R = qr.R;
    const double tau = p.tau;

    SolveOutcome out;
    PoolBest best;  // keyed by the selection metric, not the final objective

    ComplexVector v(n);
    for (int re = -V; re <= V; ++re) {
        for (int im = -V; im <= V; ++im) {
            v[n - 1] = Complex(static_cast<double>(re), static_cast<double>(im));
            // Successive interference cancellation through the triangular
            // system, rounding each perturbation to the nearest Gaussian
            // integer.
            for (std::size_t k = n - 1; k-- > 0;) {
                Complex s{};
                for (std::size_t m2 = k + 1; m2 < n; ++m2)
                    s += R(k, m2) * (u[m2] + tau * v[m2]);
                const Complex z = (u[k] + s / R(k, k)) / tau;
                v[k] = Complex(-std::round(z.real()), -std::round(z.imag()));
                out.op_counter += kOpsPerResidualTerm * (n - k);
            }

            PerturbationVector v_hat(2 * n);
            for (std::size_t k = 0; k < n; ++k) {
                v_hat[k] = round_away(v[k].real());
                v_hat[n + k] = round_away(v[k].imag());
            }

            double metric;
            if (selection == FseSelection::L2) {
                // ||R(u + tau*v)||^2, cheap triangular evaluation.
                metric = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    Complex acc{};
                    for (std::size_t m2 = k; m2 < n; ++m2)
                        acc += R(k, m2) * (u[m2] + tau * v[m2]);
                    metric += std::norm(acc);
                }
                out.op_counter += kOpsPerResidualTerm * n * n / 2;
            } else {
                metric = objective(p, v_hat);
                out.op_counter += kOpsPerResidualTerm * p.n_tx * 2 * n;
            }
            best.consider(v_hat, metric);
            ++out.candidates_evaluated;
        }
    }

    out.v_hat = std::move(best.v);
    out.objective = objective(p, out.v_hat);
    return out;
}

SolveOutcome exhaustive_solve(const VppProblem& p, int V, std::uint64_t max_candidates) {
    const std::size_t dims = p.u_hat.size();
    if (V < 1) throw std::invalid_argument("exhaustive_solve: V must be >= 1");
    const std::uint64_t width = 2 * static_cast<std::uint64_t>(V) + 1;
    const std::uint64_t count = pow_u64(width, static_cast<int>(dims));
    if (count > max_candidates)
        throw std::invalid_argument("exhaustive_solve: search space exceeds cap");

    SolveOutcome out;
    PoolBest best;
    PerturbationVector v(dims, -V);
    for (;;) {
        best.consider(v, objective(p, v));
        out.op_counter += kOpsPerResidualTerm * p.n_tx * dims;
        ++out.candidates_evaluated;
        // Odometer increment, last dimension fastest.
        std::size_t d = dims;
        while (d-- > 0) {
            if (v[d] < V) {
                ++v[d];
                break;
            }
            v[d] = -V;
            if (d == 0) {
                out.v_hat = std::move(best.v);
                out.objective = best.obj;
                return out;
            }
        }
    }
}

}  // namespace vpp
