#pragma once

#include <vector>

#include "mtdea/multigraph.hpp"
#include "mtdea/perm.hpp"

namespace mtdea {

/// Finite distribution over graphs sharing one (N, R); the computable stand-in
/// for the data distribution when deciding exchangeability by enumeration.
class EmpiricalDistribution {
public:
    EmpiricalDistribution(std::vector<std::pair<Multigraph, double>> support);

    const std::vector<std::pair<Multigraph, double>>& support() const { return support_; }
    int num_nodes() const;
    int num_relations() const;

    EmpiricalDistribution pushforward(const Perm& node_perm, const Perm& rel_perm) const;

    /// Support sets equal and probabilities within 1e-12.
    bool equals(const EmpiricalDistribution& other) const;

private:
    std::vector<std::pair<Multigraph, double>> support_;  // sorted by graph
};

/// Disjoint cover of {0..R-1} by task indices {0..K-1}; classes are numbered
/// by their smallest member, so the partition is deterministic.
struct TaskPartition {
    std::vector<int> assignment;  // relation id -> task index
    int num_tasks = 0;

    static TaskPartition from_assignment(std::vector<int> assignment);
    std::vector<std::vector<int>> members() const;  // per task, ascending
    bool operator==(const TaskPartition&) const = default;
};

// Enumeration bound: N! * R! stays within 6! * 4! = 17,280.
inline constexpr int kMaxOracleNodes = 6;
inline constexpr int kMaxOracleRelations = 4;

/// Brute-force test of relation exchangeability: true iff some (pi, sigma)
/// with sigma(r) = r_other leaves the distribution invariant. Exact
/// pushforward comparison over the full permutation groups.
bool exchangeable_bruteforce(const EmpiricalDistribution& dist, RelId r, RelId r_other);

/// Equivalence classes of exchangeable_bruteforce over all relation pairs.
TaskPartition relational_tasks(const EmpiricalDistribution& dist);

}  // namespace mtdea
