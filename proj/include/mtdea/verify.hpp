#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mtdea {

/// Outcome of one property suite: per-property lines plus the overall verdict.
/// Failing lines name the property and the counterexample seed.
struct SuiteResult {
    bool passed = true;
    std::vector<std::string> lines;

    void record(bool ok, const std::string& line);
};

/// Reverse-mode gradients vs central finite differences: the per-op sweep and
/// the full training objective (dual loss + both regularizers) on a small
/// random graph. Threshold 1e-5.
SuiteResult verify_gradcheck(std::uint64_t seed);

/// Double equivariance of the stacked forward under joint (node, relation)
/// relabelings (200 cases, 1e-9), one-hot soft/hard layer consistency (1e-9),
/// and the K=1 single-task reduction (1e-12, 100 draws).
SuiteResult verify_equivariance(std::uint64_t seed);

/// The brute-force exchangeability oracle is reflexive, symmetric, and
/// transitive on constructed distributions, and relational_tasks matches the
/// classes known from each construction.
SuiteResult verify_exchangeability(std::uint64_t seed);

/// Pessimistic tie ranking, metric arithmetic, pool composition, and the
/// deterministic homogeneous-baseline rows (relation-scheme MR exactly 51,
/// dual Hits@10 exactly 0).
SuiteResult verify_ranking(std::uint64_t seed);

}  // namespace mtdea
