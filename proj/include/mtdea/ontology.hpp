#pragma once

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mtdea/multigraph.hpp"

namespace mtdea {

enum class Gender : unsigned char { Female, Male };

/// Single-parent family tree: person 0 is the root, every other person has
/// exactly one parent. Grown within the caps size <= 26, depth <= 5,
/// branching <= 5.
struct FamilyTree {
    std::vector<Gender> gender;
    std::vector<int> parent;  // -1 for the root

    int size() const { return static_cast<int>(gender.size()); }
    int depth_of(int v) const;

    /// AHU canonical form of the gendered rooted tree; equal strings iff the
    /// trees are isomorphic as gendered rooted trees.
    std::string canonical_form() const;

    static FamilyTree grow(std::mt19937_64& rng, int max_nodes = 26, int max_depth = 5, int max_branch = 5);
};

/// Fixed 29-relation gendered kinship vocabulary with deterministic derivation
/// rules over parent edges and genders. The upstream ontology generator the
/// MetaFam construction refers to is not redistributable, so this table is the
/// repo-level constant; it covers parent/child/sibling, grand- and
/// great-grand- generations, aunt/uncle, niece/nephew, great-aunt/-uncle, and
/// cousin/second-cousin composites, each gendered where English has a
/// gendered noun. The full list in id order lives in names().
class KinshipOntology {
public:
    static const KinshipOntology& instance();

    int num_relations() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    RelId id(std::string_view name) const;

    // the four relations the masking scheme singles out
    RelId mother() const { return 0; }
    RelId father() const { return 1; }
    RelId daughter() const { return 2; }
    RelId son() const { return 3; }

    /// Every relation instance derivable from the tree, as tree-local triplets.
    std::vector<Triplet> closure_triplets(const FamilyTree& tree) const;

private:
    KinshipOntology();
    std::vector<std::string> names_;
};

/// Deterministic kinship closure of one tree as a 29-relation multigraph.
Multigraph kinship_closure(const FamilyTree& tree, const KinshipOntology& ontology);

}  // namespace mtdea
