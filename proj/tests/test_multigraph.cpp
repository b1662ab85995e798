#include <sstream>

#include "doctest.h"
#include "mtdea/errors.hpp"
#include "mtdea/multigraph.hpp"
#include "mtdea/perm.hpp"
#include "mtdea/rng.hpp"

using namespace mtdea;

namespace {

Multigraph random_graph(std::mt19937_64& rng, int max_nodes = 6, int max_rels = 4) {
    const int n = 2 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(max_nodes - 1)));
    const int r = 2 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(max_rels - 1)));
    const int count = 1 + static_cast<int>(rand_below(rng, 10));
    std::vector<Triplet> ts;
    for (int i = 0; i < count; ++i)
        ts.push_back({static_cast<int>(rand_below(rng, n)), static_cast<int>(rand_below(rng, r)),
                      static_cast<int>(rand_below(rng, n))});
    return Multigraph(n, r, std::move(ts));
}

}  // namespace

TEST_CASE("multigraph canonicalizes and validates") {
    Multigraph g(3, 2, {{1, 0, 2}, {0, 1, 1}, {1, 0, 2}});
    CHECK(g.num_triplets() == 2);  // duplicate removed
    CHECK(g.triplets()[0] == Triplet{0, 1, 1});

    CHECK_THROWS_AS(Multigraph(1, 2, {}), ContractViolation);
    CHECK_THROWS_AS(Multigraph(2, 1, {}), ContractViolation);
    CHECK_THROWS_AS(Multigraph(2, 2, {{0, 0, 5}}), ContractViolation);
    CHECK_THROWS_AS(Multigraph(2, 2, {{0, 3, 1}}), ContractViolation);
}

TEST_CASE("apply_perms definition and group laws") {
    Multigraph a(2, 2, {{0, 0, 1}});

    SUBCASE("identity acts trivially") {
        CHECK(apply_perms(a, Perm::identity(2), Perm::identity(2)) == a);
    }

    SUBCASE("node swap maps (0,0,1) to (1,0,0)") {
        Perm swap({1, 0});
        Multigraph b = apply_perms(a, swap, Perm::identity(2));
        CHECK(b.triplets() == std::vector<Triplet>{{1, 0, 0}});
    }

    SUBCASE("size mismatch rejected") {
        CHECK_THROWS_AS(apply_perms(a, Perm::identity(3), Perm::identity(2)), ContractViolation);
    }

    auto rng = substream(5, "perm");
    SUBCASE("apply then apply inverse is the identity") {
        for (int trial = 0; trial < 100; ++trial) {
            Multigraph g = random_graph(rng);
            Perm pi = Perm::random(g.num_nodes(), rng);
            Perm sigma = Perm::random(g.num_relations(), rng);
            CHECK(apply_perms(apply_perms(g, pi, sigma), pi.inverse(), sigma.inverse()) == g);
        }
    }

    SUBCASE("composition law") {
        for (int trial = 0; trial < 50; ++trial) {
            Multigraph g = random_graph(rng);
            Perm p1 = Perm::random(g.num_nodes(), rng), p2 = Perm::random(g.num_nodes(), rng);
            Perm s1 = Perm::random(g.num_relations(), rng), s2 = Perm::random(g.num_relations(), rng);
            Multigraph lhs = apply_perms(g, p2.after(p1), s2.after(s1));
            Multigraph rhs = apply_perms(apply_perms(g, p1, s1), p2, s2);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("node and relation actions commute") {
    Multigraph a(2, 2, {{0, 0, 1}});
    CHECK(perms_commute_check(a, Perm::identity(2), Perm::identity(2)));

    auto rng = substream(6, "commute");
    for (int trial = 0; trial < 1000; ++trial) {
        Multigraph g = random_graph(rng);
        CHECK(perms_commute_check(g, Perm::random(g.num_nodes(), rng), Perm::random(g.num_relations(), rng)));
    }
}

TEST_CASE("mask_split partitions the graph") {
    Multigraph a(4, 2, {{0, 0, 1}, {1, 0, 2}, {2, 1, 3}, {3, 1, 0}});

    SUBCASE("empty mask") {
        MaskSplit s = mask_split(a, TripletMask{});
        CHECK(s.observable == a);
        CHECK(s.hidden.num_triplets() == 0);
    }

    SUBCASE("full mask") {
        MaskSplit s = mask_split(a, TripletMask{a.triplets()});
        CHECK(s.observable.num_triplets() == 0);
        CHECK(s.hidden == a);
    }

    SUBCASE("absent triplet rejected") {
        CHECK_THROWS_AS(mask_split(a, TripletMask{{{0, 1, 1}}}), ContractViolation);
    }

    SUBCASE("random mask partitions counts exactly") {
        auto rng = substream(7, "mask");
        for (int trial = 0; trial < 50; ++trial) {
            Multigraph g = random_graph(rng);
            TripletMask m;
            for (const Triplet& t : g.triplets())
                if (rand_unit(rng) < 0.3) m.hidden.push_back(t);
            MaskSplit s = mask_split(g, m);
            CHECK(s.observable.num_triplets() + s.hidden.num_triplets() == g.num_triplets());
            for (const Triplet& t : s.hidden.triplets()) CHECK(!s.observable.contains(t));
            std::vector<Triplet> merged = s.observable.triplets();
            merged.insert(merged.end(), s.hidden.triplets().begin(), s.hidden.triplets().end());
            CHECK(Multigraph(g.num_nodes(), g.num_relations(), merged) == g);
        }
    }
}

TEST_CASE("canonical TSV serialization") {
    SUBCASE("round trip on random graphs") {
        auto rng = substream(8, "tsv");
        for (int trial = 0; trial < 30; ++trial) {
            Multigraph g = random_graph(rng);
            std::stringstream ss;
            write_multigraph(ss, g);
            CHECK(read_multigraph(ss) == g);
        }
    }

    SUBCASE("exact bytes") {
        Multigraph g(2, 2, {{0, 0, 1}, {1, 1, 0}});
        std::stringstream ss;
        write_multigraph(ss, g);
        CHECK(ss.str() == "2\t2\n0\t0\t1\n1\t1\t0\n");
    }

    SUBCASE("empty triplet section keeps declared N and R") {
        std::stringstream ss("5\t3\n");
        Multigraph g = read_multigraph(ss);
        CHECK(g.num_nodes() == 5);
        CHECK(g.num_relations() == 3);
        CHECK(g.num_triplets() == 0);
    }

    SUBCASE("non-integer head is a parse error with line number") {
        std::stringstream ss("2\t2\na\t0\t1\n");
        try {
            read_multigraph(ss);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }

    SUBCASE("id out of declared range is a contract violation") {
        std::stringstream ss("2\t2\n0\t0\t9\n");
        CHECK_THROWS_AS(read_multigraph(ss), ContractViolation);
    }

    SUBCASE("wrong field count is a parse error") {
        std::stringstream ss("2\t2\n0\t1\n");
        CHECK_THROWS_AS(read_multigraph(ss), ParseError);
    }
}
