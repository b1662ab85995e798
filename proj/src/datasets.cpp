#include "mtdea/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "mtdea/errors.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

void validate_split(const DatasetSplit& split) {
    if (split.observable.num_nodes() != split.missing.num_nodes() ||
        split.observable.num_relations() != split.missing.num_relations())
        throw ContractViolation("DatasetSplit: observable and missing disagree on N or R");
    for (const Triplet& t : split.missing.triplets())
        if (split.observable.contains(t)) throw ContractViolation("DatasetSplit: observable and missing overlap");
}

NegativeBatch sample_negatives(const Multigraph& observable, std::span<const Triplet> positives, int n, int m,
                               std::mt19937_64& rng) {
    if (n < 0 || m < 0) throw ContractViolation("sample_negatives: n and m must be nonnegative");
    const int num_nodes = observable.num_nodes();
    const int num_rels = observable.num_relations();
    NegativeBatch batch;
    batch.n = n;
    batch.m = m;
    batch.tail_corrupted.reserve(positives.size() * static_cast<std::size_t>(n));
    batch.relation_corrupted.reserve(positives.size() * static_cast<std::size_t>(m));
    for (const Triplet& pos : positives) {
        for (int i = 0; i < n; ++i) {
            Triplet neg = pos;
            neg.tail = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(num_nodes)));
            batch.tail_corrupted.push_back(neg);
        }
        for (int j = 0; j < m; ++j) {
            Triplet neg = pos;
            const int k = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(num_rels - 1)));
            neg.rel = k >= pos.rel ? k + 1 : k;
            batch.relation_corrupted.push_back(neg);
        }
    }
    return batch;
}

SelfSupervisedSplit self_supervised_split(const Multigraph& observable, double holdout_fraction,
                                          std::mt19937_64& rng) {
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw ContractViolation("self_supervised_split: holdout fraction must lie in (0, 1)");
    const std::size_t total = observable.num_triplets();
    const std::size_t count =
        static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(total)));
    if (count >= total)
        throw DegenerateInput("self_supervised_split: holdout would empty the context graph");

    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rand_below(rng, total - i);
        std::swap(order[i], order[j]);
    }
    TripletMask mask;
    mask.hidden.reserve(count);
    for (std::size_t i = 0; i < count; ++i) mask.hidden.push_back(observable.triplets()[order[i]]);
    MaskSplit ms = mask_split(observable, mask);
    return SelfSupervisedSplit{std::move(ms.observable), std::move(ms.hidden)};
}

std::string split_filename(SplitRole role, bool observable) {
    const char* prefix = role == SplitRole::Train ? "train" : role == SplitRole::Valid ? "valid" : "test";
    return std::string(prefix) + (observable ? "_observable.tsv" : "_missing.tsv");
}

void save_split(const DatasetSplit& split, const std::string& dir) {
    validate_split(split);
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_multigraph(split.observable, (fs::path(dir) / split_filename(split.role, true)).string());
    save_multigraph(split.missing, (fs::path(dir) / split_filename(split.role, false)).string());
}

DatasetSplit load_split(const std::string& dir, SplitRole role) {
    namespace fs = std::filesystem;
    DatasetSplit split{load_multigraph((fs::path(dir) / split_filename(role, true)).string()),
                       load_multigraph((fs::path(dir) / split_filename(role, false)).string()), role};
    validate_split(split);
    return split;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    save_split(ds.train, dir);
    save_split(ds.valid, dir);
    save_split(ds.test, dir);
}

Dataset load_dataset(const std::string& dir) {
    return Dataset{load_split(dir, SplitRole::Train), load_split(dir, SplitRole::Valid),
                   load_split(dir, SplitRole::Test)};
}

}  // namespace mtdea
