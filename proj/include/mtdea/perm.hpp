#pragma once

#include <random>
#include <vector>

#include "mtdea/multigraph.hpp"

namespace mtdea {

/// Bijection on {0..n-1}.
class Perm {
public:
    explicit Perm(std::vector<int> mapping);

    static Perm identity(int n);
    static Perm random(int n, std::mt19937_64& rng);  // Fisher-Yates

    int size() const { return static_cast<int>(map_.size()); }
    int operator()(int i) const { return map_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& mapping() const { return map_; }

    Perm inverse() const;
    /// Composition (other first, then this): result(i) = this(other(i)).
    Perm after(const Perm& other) const;

    bool operator==(const Perm&) const = default;

private:
    std::vector<int> map_;
};

/// Joint action of a node permutation and a relation permutation:
/// (u, r, v) -> (pi(u), sigma(r), pi(v)).
Multigraph apply_perms(const Multigraph& a, const Perm& node_perm, const Perm& rel_perm);

/// True iff applying sigma then pi equals pi then sigma on this graph.
/// Always true; exposed as a test hook for the commutativity property.
bool perms_commute_check(const Multigraph& a, const Perm& node_perm, const Perm& rel_perm);

}  // namespace mtdea
