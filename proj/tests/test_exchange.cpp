#include <algorithm>
#include <set>

#include "doctest.h"
#include "mtdea/errors.hpp"
#include "mtdea/exchange.hpp"
#include "mtdea/rng.hpp"

using namespace mtdea;

namespace {

EmpiricalDistribution point_mass(Multigraph g) {
    return EmpiricalDistribution({{std::move(g), 1.0}});
}

EmpiricalDistribution random_distribution(std::mt19937_64& rng, int n, int r) {
    const int support = 1 + static_cast<int>(rand_below(rng, 2));
    std::vector<std::pair<Multigraph, double>> entries;
    for (int s = 0; s < support; ++s) {
        const int count = 1 + static_cast<int>(rand_below(rng, 5));
        std::vector<Triplet> ts;
        for (int i = 0; i < count; ++i)
            ts.push_back({static_cast<int>(rand_below(rng, n)), static_cast<int>(rand_below(rng, r)),
                          static_cast<int>(rand_below(rng, n))});
        entries.emplace_back(Multigraph(n, r, std::move(ts)), 0.0);
    }
    for (auto& [g, p] : entries) p = 1.0 / static_cast<double>(entries.size());
    return EmpiricalDistribution(std::move(entries));
}

std::set<std::set<int>> class_sets(const TaskPartition& tp) {
    std::set<std::set<int>> out;
    for (const auto& cls : tp.members()) out.insert(std::set<int>(cls.begin(), cls.end()));
    return out;
}

}  // namespace

TEST_CASE("exchangeability examples") {
    SUBCASE("reflexivity via identity permutations") {
        auto rng = substream(1, "refl");
        for (int trial = 0; trial < 20; ++trial) {
            auto dist = random_distribution(rng, 4, 3);
            for (int r = 0; r < 3; ++r) CHECK(exchangeable_bruteforce(dist, r, r));
        }
    }

    SUBCASE("parallel relations on the same edge are exchangeable") {
        auto dist = point_mass(Multigraph(2, 2, {{0, 0, 1}, {0, 1, 1}}));
        CHECK(exchangeable_bruteforce(dist, 0, 1));
        CHECK(exchangeable_bruteforce(dist, 1, 0));
    }

    SUBCASE("relations with different degree profiles are not exchangeable") {
        auto dist = point_mass(Multigraph(3, 2, {{0, 0, 1}, {1, 1, 0}, {2, 1, 0}}));
        CHECK(!exchangeable_bruteforce(dist, 0, 1));
        CHECK(!exchangeable_bruteforce(dist, 1, 0));
    }

    SUBCASE("capacity bound enforced") {
        auto dist = point_mass(Multigraph(7, 2, {{0, 0, 1}}));
        CHECK_THROWS_AS((void)exchangeable_bruteforce(dist, 0, 1), CapacityError);
    }
}

TEST_CASE("relational task partitions") {
    SUBCASE("all-exchangeable gives a single task") {
        auto dist = point_mass(Multigraph(2, 3, {{0, 0, 1}, {0, 1, 1}, {0, 2, 1}}));
        TaskPartition tp = relational_tasks(dist);
        CHECK(tp.num_tasks == 1);
        CHECK(tp.assignment == std::vector<int>{0, 0, 0});
    }

    SUBCASE("duplicated mirrored groups give exactly two classes") {
        // relations 0,1 form an inverse pair on nodes {0,1}; relations 2,3 are
        // parallel copies on nodes {2,3}. Hand enumeration: no (pi, sigma) maps
        // one group onto the other.
        Multigraph g(4, 4, {{0, 0, 1}, {1, 1, 0}, {2, 2, 3}, {2, 3, 3}});
        TaskPartition tp = relational_tasks(point_mass(g));
        CHECK(tp.num_tasks == 2);
        CHECK(tp.assignment == std::vector<int>{0, 0, 1, 1});
    }

    SUBCASE("multi-task boundary: K > 1 iff more than one class") {
        auto single = point_mass(Multigraph(2, 2, {{0, 0, 1}, {0, 1, 1}}));
        CHECK(relational_tasks(single).num_tasks == 1);
        auto multi = point_mass(Multigraph(3, 2, {{0, 0, 1}, {1, 1, 0}, {2, 1, 0}}));
        CHECK(relational_tasks(multi).num_tasks == 2);
    }
}

TEST_CASE("lemma: exchangeability is an equivalence relation") {
    auto rng = substream(2, "lemma");
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + static_cast<int>(rand_below(rng, 2));
        const int r = 2 + static_cast<int>(rand_below(rng, 2));
        auto dist = random_distribution(rng, n, r);
        std::vector<std::vector<bool>> ex(r, std::vector<bool>(r));
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) ex[a][b] = exchangeable_bruteforce(dist, a, b);
        for (int a = 0; a < r; ++a) {
            CHECK(ex[a][a]);  // reflexive
            for (int b = 0; b < r; ++b) {
                CHECK(ex[a][b] == ex[b][a]);  // symmetric
                for (int c = 0; c < r; ++c)
                    if (ex[a][b] && ex[b][c]) CHECK(ex[a][c]);  // transitive
            }
        }
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("relational_tasks is invariant under joint relabeling") {
    auto rng = substream(3, "invar");
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 3 + static_cast<int>(rand_below(rng, 2));
        const int r = 2 + static_cast<int>(rand_below(rng, 2));
        auto dist = random_distribution(rng, n, r);
        Perm pi = Perm::random(n, rng);
        Perm sigma = Perm::random(r, rng);
        TaskPartition orig = relational_tasks(dist);
        TaskPartition pushed = relational_tasks(dist.pushforward(pi, sigma));

        std::set<std::set<int>> mapped;
        for (const auto& cls : orig.members()) {
            std::set<int> m;
            for (int rel : cls) m.insert(sigma(rel));
            mapped.insert(std::move(m));
        }
        CHECK(mapped == class_sets(pushed));
    }
}

TEST_CASE("empirical distribution validation") {
    Multigraph g(2, 2, {{0, 0, 1}});
    CHECK_THROWS_AS(EmpiricalDistribution({{g, 0.5}}), ContractViolation);   // sums to 0.5
    CHECK_THROWS_AS(EmpiricalDistribution({{g, -1.0}, {g, 2.0}}), ContractViolation);
    Multigraph other(3, 2, {{0, 0, 1}});
    CHECK_THROWS_AS(EmpiricalDistribution({{g, 0.5}, {other, 0.5}}), ContractViolation);

    // duplicate support entries merge
    EmpiricalDistribution d({{g, 0.5}, {g, 0.5}});
    CHECK(d.support().size() == 1);
    CHECK(d.support()[0].second == doctest::Approx(1.0));
}
