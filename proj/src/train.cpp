#include "mtdea/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <span>

#include "mtdea/adam.hpp"
#include "mtdea/errors.hpp"
#include "mtdea/eval.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

void TrainConfig::validate() const {
    if (batch_positives < 1 || max_epochs < 1 || patience < 1 || adapt_epochs < 0)
        throw ContractViolation("TrainConfig: counts must be positive");
    if (patience > max_epochs) throw ContractViolation("TrainConfig: patience must not exceed max_epochs");
    if (!(lr > 0.0) || !(clip_norm > 0.0) || weight_decay < 0.0)
        throw ContractViolation("TrainConfig: optimizer settings must be positive");
    if (!(adapt_holdout_fraction > 0.0 && adapt_holdout_fraction < 1.0))
        throw ContractViolation("TrainConfig: adapt holdout fraction must lie in (0, 1)");
    loss.validate();
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t count, std::mt19937_64& rng) {
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rand_below(rng, i)]);
    return order;
}

// One optimizer step on a mini-batch: forward, Eq. 5 + Eq. 6 loss, backward.
// Returns the batch loss. `step_params`/`step_grads` select what the optimizer
// updates (all parameters in training, only the logits in adaptation).
double batch_step(const Multigraph& context, std::span<const Triplet> positives, const ModelParams& params,
                  const BindOptions& bind_opts, const TrainConfig& tcfg, int epoch, std::mt19937_64& neg_rng,
                  std::span<Tensor* const> step_params, AdamState& opt_state,
                  const std::function<std::vector<Tensor>(Tape&, const ParamVars&, Tape::Gradients&)>& pick_grads) {
    NegativeBatch negs = sample_negatives(context, positives, tcfg.loss.n_tail, tcfg.loss.m_rel, neg_rng);

    Tape tape;
    ParamVars pv = bind_params(tape, params, bind_opts);
    ForwardResult fwd = forward_graph(tape, context, pv, params.config);
    Var s_pos = score_batch(tape, fwd, pv.scorer, positives);
    Var s_tail = tcfg.loss.n_tail > 0 ? score_batch(tape, fwd, pv.scorer, negs.tail_corrupted) : Var{};
    Var s_rel = tcfg.loss.m_rel > 0 ? score_batch(tape, fwd, pv.scorer, negs.relation_corrupted) : Var{};
    Var dual = dual_loss(tape, s_pos, s_tail, s_rel, tcfg.loss.n_tail, tcfg.loss.m_rel);
    Var total = total_loss(tape, dual, fwd.alpha, tcfg.loss.lambda1_at(epoch), tcfg.loss.lambda2_at(epoch));

    const double loss_value = tape.value(total).item();
    if (!std::isfinite(loss_value)) throw NumericError("non-finite loss");

    Tape::Gradients grads = tape.backward(total);
    std::vector<Tensor> grad_tensors = pick_grads(tape, pv, grads);
    std::vector<Tensor*> grad_ptrs;
    grad_ptrs.reserve(grad_tensors.size());
    for (Tensor& g : grad_tensors) grad_ptrs.push_back(&g);

    AdamConfig acfg{tcfg.lr, tcfg.weight_decay, tcfg.clip_norm};
    adam_step(step_params, grad_ptrs, opt_state, acfg);
    return loss_value;
}

}  // namespace

TrainResult train(const DatasetSplit& train_split, const DatasetSplit& valid_split, const TrainConfig& tcfg,
                  const ModelConfig& mcfg) {
    tcfg.validate();
    mcfg.validate();
    validate_split(train_split);
    validate_split(valid_split);
    // Positives are the observable training triplets (the loss sums over the
    // triplets of the training graph); the split's missing triplets are
    // evaluation targets and are never seen here.
    const std::vector<Triplet>& positives = train_split.observable.triplets();
    if (positives.empty()) throw ContractViolation("train: the training split has no observable triplets");
    if (valid_split.missing.num_triplets() == 0)
        throw ContractViolation("train: the validation split has no missing triplets");

    ModelParams params = ModelParams::init(mcfg, train_split.observable.num_relations(), tcfg.seed);
    std::vector<Tensor*> flat = params.flat();
    AdamState opt_state = AdamState::init(std::vector<const Tensor*>(flat.begin(), flat.end()));

    auto all_grads = [&](Tape&, const ParamVars& pv, Tape::Gradients& grads) {
        std::vector<Tensor> out;
        out.reserve(pv.flat.size());
        for (Var v : pv.flat) out.push_back(grads.at(v));
        return out;
    };

    TrainResult result{params, {}};
    double best_mrr = -1.0;
    int stale = 0;
    const std::uint64_t val_seed = substream_seed(tcfg.seed, "train.valeval");

    for (int epoch = 0; epoch < tcfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        auto shuffle_rng = substream(tcfg.seed, "train.shuffle", static_cast<std::uint64_t>(epoch));
        const auto order = shuffled_indices(positives.size(), shuffle_rng);

        double loss_sum = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(tcfg.batch_positives)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(tcfg.batch_positives));
            std::vector<Triplet> batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) batch.push_back(positives[order[i]]);

            auto neg_rng = substream(tcfg.seed, "train.neg",
                                     static_cast<std::uint64_t>(epoch) * 1000000 + static_cast<std::uint64_t>(batches));
            double loss_value = 0.0;
            try {
                loss_value = batch_step(train_split.observable, batch, params, BindOptions{}, tcfg, epoch, neg_rng,
                                        flat, opt_state, all_grads);
            } catch (const NumericError& e) {
                throw NumericError("train: " + std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batches));
            }
            loss_sum += loss_value / static_cast<double>(batch.size());
            ++batches;
        }

        const double val_mrr = evaluate(make_scorer(params, valid_split.observable), valid_split.observable,
                                        valid_split.missing, RankingScheme::dual(), val_seed)
                                   .mrr;
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.epochs.push_back({epoch, loss_sum / std::max(1, batches), val_mrr,
                                         tcfg.loss.lambda1_at(epoch), tcfg.loss.lambda2_at(epoch), seconds});

        if (val_mrr > best_mrr) {
            best_mrr = val_mrr;
            result.params = params;
            result.history.best_epoch = epoch;
            result.history.best_val_mrr = val_mrr;
            stale = 0;
        } else {
            ++stale;
            if (stale >= tcfg.patience) break;
        }
    }
    return result;
}

AttentionWeights adapt(const ModelParams& trained, const Multigraph& test_observable, const TrainConfig& tcfg) {
    tcfg.validate();
    const int rows = trained.config.homogeneous ? 1 : test_observable.num_relations();

    // Fresh logits start at zero (uniform attention): the adaptation budget is
    // short, so the argmax must be decided by the accumulated gradient signal
    // rather than buried under init noise.
    AttentionWeights aw;
    aw.logits = Tensor({rows, trained.config.max_tasks});

    std::vector<Tensor*> step_params = {&aw.logits};
    AdamState opt_state = AdamState::init(std::vector<const Tensor*>{&aw.logits});

    BindOptions opts;
    opts.backbone_trainable = false;
    opts.logits_trainable = true;
    opts.logits_override = &aw.logits;

    auto logit_grad = [](Tape&, const ParamVars& pv, Tape::Gradients& grads) {
        return std::vector<Tensor>{grads.at(pv.attn_logits)};
    };

    for (int epoch = 0; epoch < tcfg.adapt_epochs; ++epoch) {
        auto mask_rng = substream(tcfg.seed, "adapt.mask", static_cast<std::uint64_t>(epoch));
        SelfSupervisedSplit split = self_supervised_split(test_observable, tcfg.adapt_holdout_fraction, mask_rng);
        const std::vector<Triplet>& positives = split.targets.triplets();
        if (positives.empty()) continue;

        auto shuffle_rng = substream(tcfg.seed, "adapt.shuffle", static_cast<std::uint64_t>(epoch));
        const auto order = shuffled_indices(positives.size(), shuffle_rng);
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(tcfg.batch_positives)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(tcfg.batch_positives));
            std::vector<Triplet> batch;
            for (std::size_t i = start; i < stop; ++i) batch.push_back(positives[order[i]]);
            auto neg_rng = substream(tcfg.seed, "adapt.neg",
                                     static_cast<std::uint64_t>(epoch) * 1000000 + static_cast<std::uint64_t>(batches));
            try {
                batch_step(split.context, batch, trained, opts, tcfg, epoch, neg_rng, step_params, opt_state,
                           logit_grad);
            } catch (const NumericError& e) {
                throw NumericError("adapt: " + std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batches));
            }
            ++batches;
        }
    }
    return aw;
}

void write_history_csv(std::ostream& os, const TrainHistory& history) {
    os << "epoch,loss,val_mrr,lambda1,lambda2,seconds\n";
    for (const EpochStats& e : history.epochs) {
        char buf[192];
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.3f\n", e.epoch, e.train_loss, e.val_mrr, e.lambda1,
                      e.lambda2, e.seconds);
        os << buf;
    }
}

}  // namespace mtdea
