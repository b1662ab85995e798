#include <filesystem>
#include <set>

#include "doctest.h"
#include "mtdea/datasets.hpp"
#include "mtdea/errors.hpp"
#include "mtdea/metafam.hpp"
#include "mtdea/rng.hpp"

using namespace mtdea;

TEST_CASE("kinship closure on a two-person tree") {
    const auto& ontology = KinshipOntology::instance();
    FamilyTree tree;
    tree.gender = {Gender::Female, Gender::Male};  // a (root, female), b (child, male)
    tree.parent = {-1, 0};
    Multigraph g = kinship_closure(tree, ontology);
    // exactly: (a mother_of b), (a parent_of b), (b son_of a), (b child_of a)
    std::vector<Triplet> expected = {{0, ontology.id("mother_of"), 1},
                                     {0, ontology.id("parent_of"), 1},
                                     {1, ontology.id("son_of"), 0},
                                     {1, ontology.id("child_of"), 0}};
    std::sort(expected.begin(), expected.end());
    CHECK(g.triplets() == expected);
    CHECK(g.num_relations() == 29);
}

TEST_CASE("kinship closure rule audit on a three-generation tree") {
    const auto& ontology = KinshipOntology::instance();
    // root f(0); children m(1), f(2); child of 1: f(3)
    FamilyTree tree;
    tree.gender = {Gender::Female, Gender::Male, Gender::Female, Gender::Female};
    tree.parent = {-1, 0, 0, 1};
    Multigraph g = kinship_closure(tree, ontology);

    auto has = [&](const char* rel, int h, int t) {
        return g.contains({h, ontology.id(rel), t});
    };
    CHECK(has("sibling_of", 1, 2));
    CHECK(has("sibling_of", 2, 1));
    CHECK(has("brother_of", 1, 2));
    CHECK(has("sister_of", 2, 1));
    CHECK(has("grandmother_of", 0, 3));
    CHECK(has("granddaughter_of", 3, 0));
    CHECK(has("aunt_of", 2, 3));
    CHECK(has("niece_of", 3, 2));
    CHECK(!has("uncle_of", 2, 3));
    // root has no ancestors: nothing points above it
    for (const Triplet& t : g.triplets()) {
        if (t.rel == ontology.id("grandparent_of") || t.rel == ontology.id("great_grandparent_of"))
            CHECK(t.head == 0);
    }

    // sibling variants are mirrored according to the partner's gender
    for (const Triplet& t : g.triplets()) {
        if (t.rel == ontology.id("sibling_of")) CHECK(g.contains({t.tail, ontology.id("sibling_of"), t.head}));
        if (t.rel == ontology.id("sister_of") || t.rel == ontology.id("brother_of")) {
            bool partner_female = false;
            for (const Triplet& u : g.triplets())
                if (u.head == t.tail && (u.rel == ontology.id("sister_of") || u.rel == ontology.id("daughter_of") ||
                                         u.rel == ontology.id("mother_of")))
                    partner_female = true;
            const RelId mirrored = partner_female ? ontology.id("sister_of") : ontology.id("brother_of");
            CHECK(g.contains({t.tail, mirrored, t.head}));
        }
    }
}

TEST_CASE("family tree growth respects the caps") {
    auto rng = substream(11, "tree");
    for (int trial = 0; trial < 20; ++trial) {
        FamilyTree tree = FamilyTree::grow(rng);
        CHECK(tree.size() <= 26);
        std::vector<int> child_count(static_cast<std::size_t>(tree.size()), 0);
        for (int v = 0; v < tree.size(); ++v) {
            CHECK(tree.depth_of(v) <= 5);
            if (tree.parent[static_cast<std::size_t>(v)] >= 0)
                ++child_count[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(v)])];
        }
        for (int c : child_count) CHECK(c <= 5);
    }
}

TEST_CASE("metafam generation invariants") {
    MetafamDataset ds = metafam_generate(2024, 50, 25);
    const auto& ontology = KinshipOntology::instance();

    SUBCASE("29 relations everywhere and valid splits") {
        for (const DatasetSplit* s : {&ds.data.train, &ds.data.valid, &ds.data.test}) {
            CHECK(s->observable.num_relations() == 29);
            CHECK(s->missing.num_relations() == 29);
            validate_split(*s);
            CHECK(s->missing.num_triplets() > 0);
        }
    }

    SUBCASE("test missing triplets carry only the permuted parent relations") {
        const int pm = ds.test_relation_perm[static_cast<std::size_t>(ontology.mother())];
        const int pf = ds.test_relation_perm[static_cast<std::size_t>(ontology.father())];
        for (const Triplet& t : ds.data.test.missing.triplets()) CHECK((t.rel == pm || t.rel == pf));
    }

    SUBCASE("train missing triplets come from the two conflicting modes") {
        std::set<int> rels;
        for (const Triplet& t : ds.data.train.missing.triplets()) rels.insert(t.rel);
        const bool has_parent_mode = rels.count(ontology.mother()) || rels.count(ontology.father());
        const bool has_child_mode = rels.count(ontology.son()) || rels.count(ontology.daughter());
        CHECK(has_parent_mode);
        CHECK(has_child_mode);
        for (int r : rels)
            CHECK((r == ontology.mother() || r == ontology.father() || r == ontology.son() ||
                   r == ontology.daughter()));
    }

    SUBCASE("deterministic for equal seeds, different across seeds") {
        MetafamDataset again = metafam_generate(2024, 50, 25);
        CHECK(again.data.train.observable == ds.data.train.observable);
        CHECK(again.data.train.missing == ds.data.train.missing);
        CHECK(again.data.valid.observable == ds.data.valid.observable);
        CHECK(again.data.test.observable == ds.data.test.observable);
        CHECK(again.test_relation_perm == ds.test_relation_perm);

        MetafamDataset other = metafam_generate(2025, 50, 25);
        CHECK(other.data.train.observable.triplets() != ds.data.train.observable.triplets());
    }
}

TEST_CASE("negative sampling") {
    Multigraph g(10, 29, {{0, 0, 1}, {2, 3, 4}});
    std::vector<Triplet> positives = {{0, 0, 1}, {2, 3, 4}, {5, 7, 6}};
    auto rng = substream(3, "neg");

    NegativeBatch b = sample_negatives(g, positives, 2, 2, rng);
    CHECK(b.tail_corrupted.size() == 6);
    CHECK(b.relation_corrupted.size() == 6);
    // batch arithmetic from the spec: 256 positives at n=m=2 give 1280 triplets
    CHECK(256 * (1 + 2 + 2) == 1280);

    for (std::size_t i = 0; i < b.tail_corrupted.size(); ++i) {
        const Triplet& pos = positives[i / 2];
        CHECK(b.tail_corrupted[i].head == pos.head);
        CHECK(b.tail_corrupted[i].rel == pos.rel);
    }
    for (std::size_t i = 0; i < b.relation_corrupted.size(); ++i) {
        const Triplet& pos = positives[i / 2];
        CHECK(b.relation_corrupted[i].head == pos.head);
        CHECK(b.relation_corrupted[i].tail == pos.tail);
        CHECK(b.relation_corrupted[i].rel != pos.rel);
        CHECK(b.relation_corrupted[i].rel < 29);
    }

    // m > R-1 forces duplicates (sampling with replacement)
    auto rng2 = substream(4, "neg2");
    NegativeBatch big = sample_negatives(g, std::span<const Triplet>(positives.data(), 1), 0, 50, rng2);
    std::set<int> distinct;
    for (const Triplet& t : big.relation_corrupted) {
        CHECK(t.rel != positives[0].rel);
        distinct.insert(t.rel);
    }
    CHECK(distinct.size() < 50);
}

TEST_CASE("self-supervised split") {
    std::vector<Triplet> ts;
    for (int i = 0; i < 10; ++i) ts.push_back({i % 5, i % 3, (i + 1) % 5});
    Multigraph g(5, 3, ts);
    const std::size_t total = g.num_triplets();

    auto rng = substream(5, "ssl");
    SelfSupervisedSplit s = self_supervised_split(g, 0.1, rng);
    CHECK(s.targets.num_triplets() == static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(total))));
    CHECK(s.context.num_triplets() + s.targets.num_triplets() == total);

    // determinism under an equally seeded stream
    auto rng_a = substream(6, "ssl2");
    auto rng_b = substream(6, "ssl2");
    SelfSupervisedSplit a = self_supervised_split(g, 0.3, rng_a);
    SelfSupervisedSplit b = self_supervised_split(g, 0.3, rng_b);
    CHECK(a.targets == b.targets);
    CHECK(a.context == b.context);

    CHECK_THROWS_AS(self_supervised_split(g, 0.99, rng), DegenerateInput);  // rounds to all 10
    CHECK_THROWS_AS(self_supervised_split(g, 1.5, rng), ContractViolation);
}

TEST_CASE("split directory round trip") {
    MetafamDataset ds = metafam_generate(77, 10, 5);
    const std::string dir = (std::filesystem::temp_directory_path() / "mtdea_split_test").string();
    std::filesystem::remove_all(dir);
    save_dataset(ds.data, dir);
    Dataset loaded = load_dataset(dir);
    CHECK(loaded.train.observable == ds.data.train.observable);
    CHECK(loaded.train.missing == ds.data.train.missing);
    CHECK(loaded.valid.observable == ds.data.valid.observable);
    CHECK(loaded.test.missing == ds.data.test.missing);
    std::filesystem::remove_all(dir);
}
