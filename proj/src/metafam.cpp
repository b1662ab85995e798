#include "mtdea/metafam.hpp"

#include <algorithm>
#include <set>

#include "mtdea/errors.hpp"
#include "mtdea/perm.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

namespace {

constexpr int kTreeRetries = 1000;

struct MaskedTree {
    std::vector<Triplet> observable;  // tree-local ids
    std::vector<Triplet> hidden;
    int num_nodes = 0;
};

// Hide 50% (rounded down) of the triplets carrying one of the two given
// relation ids, chosen uniformly without replacement.
MaskedTree mask_tree(const std::vector<Triplet>& closure, int num_nodes, RelId rel_a, RelId rel_b,
                     std::mt19937_64& rng) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < closure.size(); ++i)
        if (closure[i].rel == rel_a || closure[i].rel == rel_b) eligible.push_back(i);
    const std::size_t hide = eligible.size() / 2;
    for (std::size_t i = 0; i < hide; ++i) {
        const std::size_t j = i + rand_below(rng, eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
    }
    std::vector<bool> hidden_flag(closure.size(), false);
    for (std::size_t i = 0; i < hide; ++i) hidden_flag[eligible[i]] = true;

    MaskedTree out;
    out.num_nodes = num_nodes;
    for (std::size_t i = 0; i < closure.size(); ++i)
        (hidden_flag[i] ? out.hidden : out.observable).push_back(closure[i]);
    return out;
}

DatasetSplit assemble(const std::vector<MaskedTree>& trees, int num_relations, SplitRole role) {
    std::vector<Triplet> observable, hidden;
    int offset = 0;
    for (const MaskedTree& t : trees) {
        for (Triplet tr : t.observable) observable.push_back({tr.head + offset, tr.rel, tr.tail + offset});
        for (Triplet tr : t.hidden) hidden.push_back({tr.head + offset, tr.rel, tr.tail + offset});
        offset += t.num_nodes;
    }
    DatasetSplit split{Multigraph(offset, num_relations, std::move(observable)),
                       Multigraph(offset, num_relations, std::move(hidden)), role};
    validate_split(split);
    return split;
}

}  // namespace

MetafamDataset metafam_generate(std::uint64_t seed, int n_train_trees, int n_test_trees) {
    if (n_train_trees < 2 || n_test_trees < 1)
        throw ContractViolation("metafam_generate: needs at least 2 train trees and 1 test tree");
    const KinshipOntology& ontology = KinshipOntology::instance();
    const int num_relations = ontology.num_relations();

    // pairwise non-isomorphic trees across train and test, enforced by
    // canonical-form rejection with a bounded retry budget per slot
    const int total_trees = n_train_trees + n_test_trees;
    std::vector<FamilyTree> trees;
    std::set<std::string> canon_seen;
    for (int slot = 0; slot < total_trees; ++slot) {
        bool accepted = false;
        for (int attempt = 0; attempt < kTreeRetries && !accepted; ++attempt) {
            auto rng = substream(seed, "metafam.tree", static_cast<std::uint64_t>(slot) * kTreeRetries +
                                                           static_cast<std::uint64_t>(attempt));
            FamilyTree tree = FamilyTree::grow(rng);
            if (canon_seen.insert(tree.canonical_form()).second) {
                trees.push_back(std::move(tree));
                accepted = true;
            }
        }
        if (!accepted)
            throw GenerationError("metafam_generate: could not find enough non-isomorphic trees for seed " +
                                  std::to_string(seed));
    }

    const int n_valid = static_cast<int>(std::llround(0.2 * n_train_trees));
    const int n_core = n_train_trees - n_valid;
    if (n_core < 1) throw ContractViolation("metafam_generate: validation carve leaves no training trees");

    // per-tree masking mode: true hides {mother_of, father_of}, false hides
    // {son_of, daughter_of}; both modes must occur among the core train trees
    std::vector<bool> parent_mode(static_cast<std::size_t>(n_train_trees));
    for (int i = 0; i < n_train_trees; ++i) {
        auto rng = substream(seed, "metafam.mode", static_cast<std::uint64_t>(i));
        parent_mode[static_cast<std::size_t>(i)] = rand_below(rng, 2) == 0;
    }
    if (n_core >= 2) {
        bool all_same = true;
        for (int i = 1; i < n_core; ++i)
            if (parent_mode[static_cast<std::size_t>(i)] != parent_mode[0]) all_same = false;
        if (all_same) parent_mode[static_cast<std::size_t>(n_core - 1)] = !parent_mode[0];
    }

    std::vector<MaskedTree> core, valid;
    for (int i = 0; i < n_train_trees; ++i) {
        const FamilyTree& tree = trees[static_cast<std::size_t>(i)];
        auto closure = ontology.closure_triplets(tree);
        const RelId a = parent_mode[static_cast<std::size_t>(i)] ? ontology.mother() : ontology.son();
        const RelId b = parent_mode[static_cast<std::size_t>(i)] ? ontology.father() : ontology.daughter();
        auto rng = substream(seed, "metafam.mask", static_cast<std::uint64_t>(i));
        MaskedTree masked = mask_tree(closure, tree.size(), a, b, rng);
        (i < n_core ? core : valid).push_back(std::move(masked));
    }

    // test relation ids are a random permutation of the training ids
    auto perm_rng = substream(seed, "metafam.relperm");
    Perm rel_perm = Perm::random(num_relations, perm_rng);

    std::vector<MaskedTree> test;
    for (int i = 0; i < n_test_trees; ++i) {
        const FamilyTree& tree = trees[static_cast<std::size_t>(n_train_trees + i)];
        std::vector<Triplet> closure = ontology.closure_triplets(tree);
        for (Triplet& t : closure) t.rel = rel_perm(t.rel);
        auto rng = substream(seed, "metafam.mask.test", static_cast<std::uint64_t>(i));
        test.push_back(mask_tree(closure, tree.size(), rel_perm(ontology.mother()), rel_perm(ontology.father()), rng));
    }

    MetafamDataset out{Dataset{assemble(core, num_relations, SplitRole::Train),
                               assemble(valid, num_relations, SplitRole::Valid),
                               assemble(test, num_relations, SplitRole::Test)},
                       rel_perm.mapping()};
    return out;
}

}  // namespace mtdea
