#include "mtdea/exchange.hpp"

#include <algorithm>
#include <cmath>

#include "mtdea/errors.hpp"

namespace mtdea {

namespace {

bool graph_less(const Multigraph& a, const Multigraph& b) { return a.triplets() < b.triplets(); }

constexpr double kProbTol = 1e-12;

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<std::pair<Multigraph, double>> support)
    : support_(std::move(support)) {
    if (support_.empty()) throw ContractViolation("EmpiricalDistribution: empty support");
    const int n = support_[0].first.num_nodes();
    const int r = support_[0].first.num_relations();
    double total = 0.0;
    for (const auto& [g, p] : support_) {
        if (g.num_nodes() != n || g.num_relations() != r)
            throw ContractViolation("EmpiricalDistribution: graphs must share N and R");
        if (!(p > 0.0)) throw ContractViolation("EmpiricalDistribution: probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw ContractViolation("EmpiricalDistribution: probabilities must sum to 1");
    std::sort(support_.begin(), support_.end(),
              [](const auto& a, const auto& b) { return graph_less(a.first, b.first); });
    // merge duplicate graphs
    std::vector<std::pair<Multigraph, double>> merged;
    for (auto& entry : support_) {
        if (!merged.empty() && merged.back().first == entry.first)
            merged.back().second += entry.second;
        else
            merged.push_back(std::move(entry));
    }
    support_ = std::move(merged);
}

int EmpiricalDistribution::num_nodes() const { return support_[0].first.num_nodes(); }

int EmpiricalDistribution::num_relations() const { return support_[0].first.num_relations(); }

EmpiricalDistribution EmpiricalDistribution::pushforward(const Perm& node_perm, const Perm& rel_perm) const {
    std::vector<std::pair<Multigraph, double>> mapped;
    mapped.reserve(support_.size());
    for (const auto& [g, p] : support_) mapped.emplace_back(apply_perms(g, node_perm, rel_perm), p);
    return EmpiricalDistribution(std::move(mapped));
}

bool EmpiricalDistribution::equals(const EmpiricalDistribution& other) const {
    if (support_.size() != other.support_.size()) return false;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        if (!(support_[i].first == other.support_[i].first)) return false;
        if (std::abs(support_[i].second - other.support_[i].second) > kProbTol) return false;
    }
    return true;
}

TaskPartition TaskPartition::from_assignment(std::vector<int> assignment) {
    if (assignment.empty()) throw ContractViolation("TaskPartition: empty assignment");
    // relabel classes by smallest member
    std::vector<int> relabel(assignment.size(), -1);
    int next = 0;
    for (int a : assignment) {
        if (a < 0 || a >= static_cast<int>(assignment.size()))
            throw ContractViolation("TaskPartition: task index out of range");
        if (relabel[static_cast<std::size_t>(a)] < 0) relabel[static_cast<std::size_t>(a)] = next++;
    }
    for (int& a : assignment) a = relabel[static_cast<std::size_t>(a)];
    TaskPartition tp;
    tp.assignment = std::move(assignment);
    tp.num_tasks = next;
    return tp;
}

std::vector<std::vector<int>> TaskPartition::members() const {
    std::vector<std::vector<int>> m(static_cast<std::size_t>(num_tasks));
    for (int r = 0; r < static_cast<int>(assignment.size()); ++r)
        m[static_cast<std::size_t>(assignment[static_cast<std::size_t>(r)])].push_back(r);
    return m;
}

namespace {

void check_capacity(const EmpiricalDistribution& dist) {
    if (dist.num_nodes() > kMaxOracleNodes || dist.num_relations() > kMaxOracleRelations)
        throw CapacityError("exchangeability oracle: graph exceeds the enumeration bound (N <= 6, R <= 4)");
}

}  // namespace

bool exchangeable_bruteforce(const EmpiricalDistribution& dist, RelId r, RelId r_other) {
    check_capacity(dist);
    const int n = dist.num_nodes();
    const int nr = dist.num_relations();
    if (r < 0 || r >= nr || r_other < 0 || r_other >= nr)
        throw ContractViolation("exchangeable_bruteforce: relation id out of range");

    std::vector<int> sigma(static_cast<std::size_t>(nr));
    for (int i = 0; i < nr; ++i) sigma[static_cast<std::size_t>(i)] = i;
    do {
        if (sigma[static_cast<std::size_t>(r)] != r_other) continue;
        const Perm rel_perm(sigma);
        std::vector<int> pi(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pi[static_cast<std::size_t>(i)] = i;
        do {
            const Perm node_perm(pi);
            if (dist.pushforward(node_perm, rel_perm).equals(dist)) return true;
        } while (std::next_permutation(pi.begin(), pi.end()));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return false;
}

TaskPartition relational_tasks(const EmpiricalDistribution& dist) {
    check_capacity(dist);
    const int nr = dist.num_relations();
    std::vector<int> assignment(static_cast<std::size_t>(nr), -1);
    int next = 0;
    for (int r = 0; r < nr; ++r) {
        if (assignment[static_cast<std::size_t>(r)] >= 0) continue;
        const int task = next++;
        assignment[static_cast<std::size_t>(r)] = task;
        for (int r2 = r + 1; r2 < nr; ++r2) {
            if (assignment[static_cast<std::size_t>(r2)] >= 0) continue;
            if (exchangeable_bruteforce(dist, r, r2)) assignment[static_cast<std::size_t>(r2)] = task;
        }
    }
    return TaskPartition::from_assignment(std::move(assignment));
}

}  // namespace mtdea
