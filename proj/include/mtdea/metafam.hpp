#pragma once

#include <cstdint>

#include "mtdea/datasets.hpp"
#include "mtdea/ontology.hpp"

namespace mtdea {

/// MetaFam synthetic kinship dataset. Train/valid graphs are disjoint unions
/// of non-isomorphic family trees with, per tree, a coin-flipped masking mode
/// hiding 50% of either the {mother_of, father_of} or the {son_of,
/// daughter_of} triplets; the two conflicting modes are both present among the
/// training trees by construction. Test trees carry a random permutation of
/// the relation ids and hide only (permuted) {mother_of, father_of} triplets.
struct MetafamDataset {
    Dataset data;
    std::vector<int> test_relation_perm;  // canonical rel id -> test rel id
};

/// Fully determined by the seed. Validation holds out 20% of the training
/// trees whole. Throws GenerationError when non-isomorphic tree generation
/// exhausts its retry budget.
MetafamDataset metafam_generate(std::uint64_t seed, int n_train_trees = 50, int n_test_trees = 25);

}  // namespace mtdea
