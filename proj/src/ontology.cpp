#include "mtdea/ontology.hpp"

#include <algorithm>
#include <functional>

#include "mtdea/errors.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

int FamilyTree::depth_of(int v) const {
    int d = 0;
    while (parent[static_cast<std::size_t>(v)] >= 0) {
        v = parent[static_cast<std::size_t>(v)];
        ++d;
    }
    return d;
}

std::string FamilyTree::canonical_form() const {
    const int n = size();
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    int root = -1;
    for (int v = 0; v < n; ++v) {
        if (parent[static_cast<std::size_t>(v)] < 0)
            root = v;
        else
            children[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])].push_back(v);
    }
    // iterative post-order would do; recursion depth is capped at 6
    std::function<std::string(int)> canon = [&](int v) -> std::string {
        std::vector<std::string> parts;
        for (int c : children[static_cast<std::size_t>(v)]) parts.push_back(canon(c));
        std::sort(parts.begin(), parts.end());
        std::string s = "(";
        s += gender[static_cast<std::size_t>(v)] == Gender::Female ? 'f' : 'm';
        for (const auto& p : parts) s += p;
        s += ')';
        return s;
    };
    return canon(root);
}

FamilyTree FamilyTree::grow(std::mt19937_64& rng, int max_nodes, int max_depth, int max_branch) {
    FamilyTree tree;
    tree.gender.push_back(rand_below(rng, 2) == 0 ? Gender::Female : Gender::Male);
    tree.parent.push_back(-1);
    std::vector<int> child_count = {0};
    std::vector<int> depth = {0};

    while (tree.size() < max_nodes) {
        std::vector<int> eligible;
        for (int v = 0; v < tree.size(); ++v)
            if (child_count[static_cast<std::size_t>(v)] < max_branch && depth[static_cast<std::size_t>(v)] < max_depth)
                eligible.push_back(v);
        if (eligible.empty()) break;
        const int p = eligible[rand_below(rng, eligible.size())];
        tree.gender.push_back(rand_below(rng, 2) == 0 ? Gender::Female : Gender::Male);
        tree.parent.push_back(p);
        child_count.push_back(0);
        depth.push_back(depth[static_cast<std::size_t>(p)] + 1);
        ++child_count[static_cast<std::size_t>(p)];
    }
    return tree;
}

KinshipOntology::KinshipOntology()
    : names_{
          "mother_of",
          "father_of",
          "daughter_of",
          "son_of",
          "parent_of",
          "child_of",
          "sibling_of",
          "sister_of",
          "brother_of",
          "grandparent_of",
          "grandmother_of",
          "grandfather_of",
          "grandchild_of",
          "granddaughter_of",
          "grandson_of",
          "great_grandparent_of",
          "great_grandmother_of",
          "great_grandfather_of",
          "great_grandchild_of",
          "great_granddaughter_of",
          "great_grandson_of",
          "aunt_of",
          "uncle_of",
          "niece_of",
          "nephew_of",
          "great_aunt_of",
          "great_uncle_of",
          "cousin_of",
          "second_cousin_of",
      } {}

const KinshipOntology& KinshipOntology::instance() {
    static const KinshipOntology ontology;
    return ontology;
}

RelId KinshipOntology::id(std::string_view name) const {
    for (int i = 0; i < num_relations(); ++i)
        if (names_[static_cast<std::size_t>(i)] == name) return i;
    throw ContractViolation("unknown kinship relation: " + std::string(name));
}

std::vector<Triplet> KinshipOntology::closure_triplets(const FamilyTree& tree) const {
    const int n = tree.size();
    auto par = [&](int v) -> int { return v < 0 ? -1 : tree.parent[static_cast<std::size_t>(v)]; };
    auto par2 = [&](int v) -> int { return par(par(v)); };
    auto par3 = [&](int v) -> int { return par(par2(v)); };
    auto female = [&](int v) { return tree.gender[static_cast<std::size_t>(v)] == Gender::Female; };
    auto sib = [&](int a, int b) { return a >= 0 && b >= 0 && a != b && par(a) >= 0 && par(a) == par(b); };

    std::vector<Triplet> out;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            const bool fx = female(x);
            if (par(y) == x) {
                out.push_back({x, 4, y});               // parent_of
                out.push_back({x, fx ? 0 : 1, y});      // mother_of / father_of
            }
            if (par(x) == y) {
                out.push_back({x, 5, y});               // child_of
                out.push_back({x, fx ? 2 : 3, y});      // daughter_of / son_of
            }
            if (sib(x, y)) {
                out.push_back({x, 6, y});               // sibling_of
                out.push_back({x, fx ? 7 : 8, y});      // sister_of / brother_of
            }
            if (par2(y) == x) {
                out.push_back({x, 9, y});               // grandparent_of
                out.push_back({x, fx ? 10 : 11, y});    // grandmother_of / grandfather_of
            }
            if (par2(x) == y) {
                out.push_back({x, 12, y});              // grandchild_of
                out.push_back({x, fx ? 13 : 14, y});    // granddaughter_of / grandson_of
            }
            if (par3(y) == x) {
                out.push_back({x, 15, y});              // great_grandparent_of
                out.push_back({x, fx ? 16 : 17, y});
            }
            if (par3(x) == y) {
                out.push_back({x, 18, y});              // great_grandchild_of
                out.push_back({x, fx ? 19 : 20, y});
            }
            if (sib(x, par(y))) out.push_back({x, fx ? 21 : 22, y});   // aunt_of / uncle_of
            if (sib(par(x), y)) out.push_back({x, fx ? 23 : 24, y});   // niece_of / nephew_of
            if (sib(x, par2(y))) out.push_back({x, fx ? 25 : 26, y});  // great_aunt_of / great_uncle_of
            if (sib(par(x), par(y))) out.push_back({x, 27, y});        // cousin_of
            if (sib(par2(x), par2(y))) out.push_back({x, 28, y});      // second_cousin_of
        }
    }
    return out;
}

Multigraph kinship_closure(const FamilyTree& tree, const KinshipOntology& ontology) {
    if (tree.size() < 2) throw ContractViolation("kinship_closure: tree must have at least two persons");
    return Multigraph(tree.size(), ontology.num_relations(), ontology.closure_triplets(tree));
}

}  // namespace mtdea
