#pragma once

#include <cstdint>
#include <vector>

#include "vpp/precoding.hpp"
#include "vpp/rng.hpp"

namespace vpp {

// Search parameters: full expansion over dimensions 1..L with integer values
// in [-V, V], then greedy single expansion for the rest, optionally repeated
// K times per candidate from random starting values in [-B, B].
struct TreeStepParams {
    int L = 1;
    int V = 1;
    int K = 0;
    int B = 1;

    std::uint64_t complexity_factor() const;  // (K+1)*(2V+1)^L
};

// Outcome of a one-dimensional local minimization of a single antenna's
// power: the integer minimizer of the quadratic alpha*x^2 + beta*x + gamma,
// its value, and the full-problem objective after applying it.
struct LocalMinResult {
    int x_star = 0;
    double f_star = 0.0;   // quadratic value at x_star (squared amplitude)
    double p_value = 0.0;  // resulting loudest-antenna amplitude
};

struct SolveOutcome {
    PerturbationVector v_hat;
    double objective = 0.0;
    std::uint64_t candidates_evaluated = 0;
    std::uint64_t op_counter = 0;  // approximate scalar multiply-add tally
};

// Stage-1 output: dimensions [0, assigned_prefix) carry values, the rest
// are zero placeholders awaiting single expansion.
struct StageOneCandidate {
    std::vector<int> values;  // length 2*n_users
    std::size_t assigned_prefix = 0;
};

enum class FseSelection { L2, Linf };

// Minimize |residual_i + tau*W_hat(i,j)*(x - current_j)|^2 over integer x.
// residual must equal W_hat(u_hat + tau*v_current) for the caller's current
// perturbation. A zero matrix entry yields the no-op result (x_star =
// current_j, p_value = current loudest amplitude).
LocalMinResult local_min_dim(const VppProblem& p, const ComplexVector& residual,
                             std::size_t antenna_i, std::size_t dim_j, int current_j);

// All (2V+1)^L assignments of dimensions 0..L-1 over [-V, V], in
// lexicographic order. Throws when the candidate count exceeds max_candidates.
std::vector<StageOneCandidate> full_expansion(const VppProblem& p, int L, int V,
                                              std::uint64_t max_candidates = 729);

// Greedy completion: while unassigned dimensions remain, evaluate the local
// minimum for every (antenna, dimension) pair, fix the dimension whose
// result gives the smallest loudest-antenna power, and update the residual
// incrementally. init supplies starting values for unassigned dimensions
// (zeros when empty); every unassigned dimension still gets re-fixed.
PerturbationVector single_expansion(const VppProblem& p, const StageOneCandidate& q,
                                    const std::vector<int>& init = {},
                                    std::uint64_t* op_counter = nullptr);

// Full TreeStep: stage-1 expansion, one zero-start single expansion per
// candidate plus K random-start repetitions, the all-zero perturbation added
// to the pool, and the best pool member returned. Ties resolve to the
// lexicographically smallest vector.
SolveOutcome treestep_solve(const VppProblem& p, const TreeStepParams& params, RngStream& rng);

// Fixed-complexity sphere-encoder baseline: thin QR of W, full expansion of
// the last complex dimension over Gaussian integers with parts in [-V, V],
// successive-interference-cancellation rounding for the rest. selection
// picks the winner by ||R(u+tau*v)||_2 or by the per-antenna criterion
// ||W(u+tau*v)||_inf; the reported objective is always the per-antenna one.
SolveOutcome fse_solve(const VppProblem& p, const PrecodingMatrix& W, const ComplexVector& u,
                       int V, FseSelection selection);

// Small-instance oracle: scans every v_hat in [-V, V]^(2*n_users).
SolveOutcome exhaustive_solve(const VppProblem& p, int V,
                              std::uint64_t max_candidates = 59049);

}  // namespace vpp
