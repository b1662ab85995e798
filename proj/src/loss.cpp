#include "mtdea/loss.hpp"

#include "mtdea/errors.hpp"
#include "mtdea/ops.hpp"

namespace mtdea {

void LossConfig::validate() const {
    if (n_tail < 0 || m_rel < 0) throw ContractViolation("LossConfig: negative sample counts must be nonnegative");
    if (lambda1 < 0.0 || lambda2 < 0.0) throw ContractViolation("LossConfig: lambda weights must be nonnegative");
    if (anneal < 1.0) throw ContractViolation("LossConfig: anneal factor must be at least 1");
}

namespace {
constexpr double kScoreClamp = 1e-12;

Var log_clamped(Tape& t, Var scores) { return ops::log(t, ops::clamp(t, scores, kScoreClamp, 1.0 - kScoreClamp)); }
}  // namespace

Var dual_loss(Tape& tape, Var scores_pos, Var scores_tail, Var scores_rel, int n, int m) {
    const std::int64_t p = tape.value(scores_pos).size();
    if (p == 0) throw ContractViolation("dual_loss: empty positive set");
    // Joint log-likelihood of positives scoring 1 and negatives scoring 0;
    // the negative terms enter with a positive sign so the loss is bounded
    // below and minimizing it drives negative scores down.
    Var acc = ops::sum_all(tape, log_clamped(tape, scores_pos));
    if (n > 0) {
        if (tape.value(scores_tail).size() != p * n)
            throw ContractViolation("dual_loss: tail negative count must be P*n");
        Var neg = ops::sum_all(tape, ops::log(tape, ops::clamp(tape, ops::rsub_const(tape, scores_tail, 1.0),
                                                               kScoreClamp, 1.0 - kScoreClamp)));
        acc = ops::add(tape, acc, ops::scale(tape, neg, 1.0 / n));
    }
    if (m > 0) {
        if (tape.value(scores_rel).size() != p * m)
            throw ContractViolation("dual_loss: relation negative count must be P*m");
        Var neg = ops::sum_all(tape, ops::log(tape, ops::clamp(tape, ops::rsub_const(tape, scores_rel, 1.0),
                                                               kScoreClamp, 1.0 - kScoreClamp)));
        acc = ops::add(tape, acc, ops::scale(tape, neg, 1.0 / m));
    }
    return ops::scale(tape, acc, -1.0);
}

Var one_hot_entropy(Tape& tape, Var alpha) {
    const Tensor& a = tape.value(alpha);
    for (int i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (int j = 0; j < a.cols(); ++j) row += a.at(i, j);
        if (std::abs(row - 1.0) > 1e-9) throw ContractViolation("one_hot_entropy: rows must sum to 1");
    }
    return ops::sum_all(tape, ops::neg_xlogx(tape, alpha));
}

Var concentration_lgamma(Tape& tape, Var alpha) {
    Var colsum = ops::sum_axis0(tape, alpha);
    Var lg = ops::lgamma(tape, ops::add_const(tape, colsum, 1.0));
    return ops::scale(tape, ops::sum_all(tape, lg), -1.0);
}

Var total_loss(Tape& tape, Var dual, Var alpha, double lambda1_t, double lambda2_t) {
    Var reg1 = ops::scale(tape, one_hot_entropy(tape, alpha), lambda1_t);
    Var reg2 = ops::scale(tape, concentration_lgamma(tape, alpha), lambda2_t);
    return ops::add(tape, dual, ops::add(tape, reg1, reg2));
}

}  // namespace mtdea
