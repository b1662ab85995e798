#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "mtdea/multigraph.hpp"

namespace mtdea {

enum class SplitRole { Train, Valid, Test };

/// Observable graph plus the designated missing triplets (prediction targets).
/// The two parts are disjoint and share N and R.
struct DatasetSplit {
    Multigraph observable;
    Multigraph missing;
    SplitRole role;
};

void validate_split(const DatasetSplit& split);

/// Dual negatives per positive: n tail-corrupted triplets followed by m
/// relation-corrupted triplets, grouped positive-major. Sampling is uniform,
/// with replacement, and unfiltered (a negative may coincide with a true
/// triplet); the corrupted relation never equals the original.
struct NegativeBatch {
    int n = 0;
    int m = 0;
    std::vector<Triplet> tail_corrupted;      // positives.size() * n
    std::vector<Triplet> relation_corrupted;  // positives.size() * m
};

NegativeBatch sample_negatives(const Multigraph& observable, std::span<const Triplet> positives, int n, int m,
                               std::mt19937_64& rng);

/// Uniform triplet holdout for test-time adaptation: round(fraction * |T|)
/// targets, the rest as message-passing context. Fails when the holdout
/// would empty the context.
struct SelfSupervisedSplit {
    Multigraph context;
    Multigraph targets;
};

SelfSupervisedSplit self_supervised_split(const Multigraph& observable, double holdout_fraction,
                                          std::mt19937_64& rng);

// Split directory layout: {train,valid,test}_{observable,missing}.tsv in the
// canonical TSV form, plus ontology.txt (relation names, one per line, id
// order) for generated kinship data.
struct Dataset {
    DatasetSplit train;
    DatasetSplit valid;
    DatasetSplit test;
};

std::string split_filename(SplitRole role, bool observable);
void save_split(const DatasetSplit& split, const std::string& dir);
DatasetSplit load_split(const std::string& dir, SplitRole role);
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace mtdea
