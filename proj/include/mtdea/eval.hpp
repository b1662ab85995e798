#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "mtdea/model.hpp"
#include "mtdea/multigraph.hpp"

namespace mtdea {

/// Negative-pool recipe per positive. All three defaults build 51-candidate
/// pools: dual 1+24+26, entity 1+50, relation 1+50.
struct RankingScheme {
    enum class Variant { Dual, Entity, Relation };
    Variant variant = Variant::Dual;
    int n_tail = 24;
    int n_rel = 26;

    static RankingScheme dual() { return {Variant::Dual, 24, 26}; }
    static RankingScheme entity() { return {Variant::Entity, 50, 0}; }
    static RankingScheme relation() { return {Variant::Relation, 0, 50}; }
    static RankingScheme parse(const std::string& name);

    int pool_size() const { return 1 + n_tail + n_rel; }
    const char* name() const;
};

struct MetricsReport {
    double mr = 0.0;
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits5 = 0.0;
    double hits10 = 0.0;
    std::size_t count = 0;
};

/// Worst position among score ties:
/// rank = 1 + |{c != pos : s_c > s_pos}| + |{c != pos : s_c == s_pos}|.
int rank_pessimistic(std::span<const double> candidate_scores, std::size_t positive_index);

MetricsReport metrics_from_ranks(std::span<const int> ranks);

/// Ranks every missing triplet inside a freshly sampled candidate pool
/// (uniform, with replacement, unfiltered; one derived RNG stream per
/// positive, so any evaluation order gives the same report).
MetricsReport evaluate(const TripletScorer& scorer, const Multigraph& observable, const Multigraph& missing,
                       const RankingScheme& scheme, std::uint64_t seed);

/// CSV rows `scheme,metric,value,count`.
void write_metrics_csv(std::ostream& os, const RankingScheme& scheme, const MetricsReport& report);
void print_metrics(std::ostream& os, const RankingScheme& scheme, const MetricsReport& report);

}  // namespace mtdea
