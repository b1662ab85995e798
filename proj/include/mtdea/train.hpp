#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mtdea/datasets.hpp"
#include "mtdea/loss.hpp"
#include "mtdea/model.hpp"

namespace mtdea {

struct TrainConfig {
    int batch_positives = 256;
    double lr = 1e-3;
    double weight_decay = 5e-4;
    double clip_norm = 1.0;
    int max_epochs = 10;
    int patience = 5;  // early stop after this many non-improving epochs
    std::uint64_t seed = 0;
    LossConfig loss;
    int adapt_epochs = 10;
    double adapt_holdout_fraction = 0.1;  // resampled every adaptation epoch

    void validate() const;
};

struct EpochStats {
    int epoch = 0;          // 0-based; lambda_t = lambda0 * anneal^epoch
    double train_loss = 0;  // mean per-positive batch loss, logging only
    double val_mrr = 0;     // dual-sampling MRR on the validation split
    double lambda1 = 0;
    double lambda2 = 0;
    double seconds = 0;  // wall time; the only non-deterministic column
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_mrr = 0.0;
};

struct TrainResult {
    ModelParams params;  // parameters of the best validation epoch
    TrainHistory history;
};

/// Mini-batch training with the observable training triplets as positives and
/// the observable graph as message-passing context; the split's missing
/// triplets are reserved for evaluation. Early stopping watches dual-sampling
/// MRR on the validation split's missing triplets. Deterministic given
/// (seed, configs, data); aborts with epoch/batch context on a non-finite
/// loss.
TrainResult train(const DatasetSplit& train_split, const DatasetSplit& valid_split, const TrainConfig& tcfg,
                  const ModelConfig& mcfg);

/// Test-time adaptation: discards the training logits, initializes a fresh
/// R_te x K-hat matrix, and optimizes only it on self-supervised splits of the
/// observable test graph; every other parameter stays bit-identical.
AttentionWeights adapt(const ModelParams& trained, const Multigraph& test_observable, const TrainConfig& tcfg);

/// CSV: epoch,loss,val_mrr,lambda1,lambda2,seconds.
void write_history_csv(std::ostream& os, const TrainHistory& history);

}  // namespace mtdea
