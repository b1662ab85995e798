#include "mtdea/perm.hpp"

#include <algorithm>

#include "mtdea/errors.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

Perm::Perm(std::vector<int> mapping) : map_(std::move(mapping)) {
    std::vector<bool> seen(map_.size(), false);
    for (int v : map_) {
        if (v < 0 || v >= static_cast<int>(map_.size()) || seen[static_cast<std::size_t>(v)])
            throw ContractViolation("Perm: mapping is not a bijection");
        seen[static_cast<std::size_t>(v)] = true;
    }
}

Perm Perm::identity(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
    return Perm(std::move(m));
}

Perm Perm::random(int n, std::mt19937_64& rng) {
    std::vector<int> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(m[static_cast<std::size_t>(i)], m[rand_below(rng, static_cast<std::uint64_t>(i) + 1)]);
    return Perm(std::move(m));
}

Perm Perm::inverse() const {
    std::vector<int> inv(map_.size());
    for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(map_[static_cast<std::size_t>(i)])] = i;
    return Perm(std::move(inv));
}

Perm Perm::after(const Perm& other) const {
    if (size() != other.size()) throw ContractViolation("Perm::after: size mismatch");
    std::vector<int> m(map_.size());
    for (int i = 0; i < size(); ++i) m[static_cast<std::size_t>(i)] = (*this)(other(i));
    return Perm(std::move(m));
}

Multigraph apply_perms(const Multigraph& a, const Perm& node_perm, const Perm& rel_perm) {
    if (node_perm.size() != a.num_nodes() || rel_perm.size() != a.num_relations())
        throw ContractViolation("apply_perms: permutation sized to a different graph");
    std::vector<Triplet> mapped;
    mapped.reserve(a.num_triplets());
    for (const Triplet& t : a.triplets()) mapped.push_back({node_perm(t.head), rel_perm(t.rel), node_perm(t.tail)});
    return Multigraph(a.num_nodes(), a.num_relations(), std::move(mapped));
}

bool perms_commute_check(const Multigraph& a, const Perm& node_perm, const Perm& rel_perm) {
    const Perm id_nodes = Perm::identity(a.num_nodes());
    const Perm id_rels = Perm::identity(a.num_relations());
    Multigraph pi_then_sigma = apply_perms(apply_perms(a, node_perm, id_rels), id_nodes, rel_perm);
    Multigraph sigma_then_pi = apply_perms(apply_perms(a, id_nodes, rel_perm), node_perm, id_rels);
    return pi_then_sigma == sigma_then_pi;
}

}  // namespace mtdea
