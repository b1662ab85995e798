#pragma once

#include <cmath>

#include "mtdea/tape.hpp"

namespace mtdea {

struct LossConfig {
    int n_tail = 2;          // tail-corrupted negatives per positive
    int m_rel = 2;           // relation-corrupted negatives per positive
    double lambda1 = 0.1;    // one-hot entropy weight
    double lambda2 = 0.1;    // concentration weight
    double anneal = 1.1;     // per-epoch multiplicative factor

    double lambda1_at(int epoch) const { return lambda1 * std::pow(anneal, epoch); }
    double lambda2_at(int epoch) const { return lambda2 * std::pow(anneal, epoch); }
    void validate() const;
};

/// Dual-sampling task loss over a batch:
///   -sum_pos [ log s_pos - (1/n) sum_i log(1 - s_tail_i) - (1/m) sum_j log(1 - s_rel_j) ].
/// Scores are clamped to [1e-12, 1 - 1e-12] before the logs. scores_tail and
/// scores_rel are flat (positive-major) and sized P*n and P*m; pass an invalid
/// Var when the corresponding count is zero.
Var dual_loss(Tape& tape, Var scores_pos, Var scores_tail, Var scores_rel, int n, int m);

/// sum_r ( -sum_k alpha[r,k] log alpha[r,k] ), with 0 log 0 = 0. Zero iff
/// every row is one-hot.
Var one_hot_entropy(Tape& tape, Var alpha);

/// -sum_k lgamma(1 + sum_r alpha[r,k]); lower when mass concentrates in few
/// task columns.
Var concentration_lgamma(Tape& tape, Var alpha);

/// dual + lambda1_t * L_1hot + lambda2_t * L_conc with the epoch's annealed
/// coefficients.
Var total_loss(Tape& tape, Var dual, Var alpha, double lambda1_t, double lambda2_t);

}  // namespace mtdea
