#include "mtdea/eval.hpp"

#include <cstdio>
#include <ostream>

#include "mtdea/datasets.hpp"
#include "mtdea/errors.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

RankingScheme RankingScheme::parse(const std::string& name) {
    if (name == "dual") return dual();
    if (name == "entity") return entity();
    if (name == "relation") return relation();
    throw ContractViolation("unknown ranking scheme: " + name + " (expected dual|entity|relation)");
}

const char* RankingScheme::name() const {
    switch (variant) {
        case Variant::Dual: return "dual";
        case Variant::Entity: return "entity";
        case Variant::Relation: return "relation";
    }
    return "?";
}

int rank_pessimistic(std::span<const double> candidate_scores, std::size_t positive_index) {
    if (candidate_scores.empty() || positive_index >= candidate_scores.size())
        throw ContractViolation("rank_pessimistic: positive must be inside the candidate list");
    const double pos = candidate_scores[positive_index];
    int rank = 1;
    for (std::size_t i = 0; i < candidate_scores.size(); ++i) {
        if (i == positive_index) continue;
        if (candidate_scores[i] >= pos) ++rank;  // strictly-above plus exact ties
    }
    return rank;
}

MetricsReport metrics_from_ranks(std::span<const int> ranks) {
    if (ranks.empty()) throw ContractViolation("metrics_from_ranks: no ranks");
    MetricsReport rep;
    rep.count = ranks.size();
    for (int r : ranks) {
        if (r < 1) throw ContractViolation("metrics_from_ranks: ranks start at 1");
        rep.mr += r;
        rep.mrr += 1.0 / r;
        rep.hits1 += r <= 1;
        rep.hits3 += r <= 3;
        rep.hits5 += r <= 5;
        rep.hits10 += r <= 10;
    }
    const double n = static_cast<double>(ranks.size());
    rep.mr /= n;
    rep.mrr /= n;
    rep.hits1 /= n;
    rep.hits3 /= n;
    rep.hits5 /= n;
    rep.hits10 /= n;
    return rep;
}

MetricsReport evaluate(const TripletScorer& scorer, const Multigraph& observable, const Multigraph& missing,
                       const RankingScheme& scheme, std::uint64_t seed) {
    if (missing.num_triplets() == 0) throw ContractViolation("evaluate: empty missing set");
    const int pool = scheme.pool_size();

    std::vector<Triplet> candidates;
    candidates.reserve(missing.num_triplets() * static_cast<std::size_t>(pool));
    for (std::size_t i = 0; i < missing.num_triplets(); ++i) {
        const Triplet& pos = missing.triplets()[i];
        auto rng = substream(seed, "eval.pool", i);
        NegativeBatch negs =
            sample_negatives(observable, std::span<const Triplet>(&pos, 1), scheme.n_tail, scheme.n_rel, rng);
        candidates.push_back(pos);
        candidates.insert(candidates.end(), negs.tail_corrupted.begin(), negs.tail_corrupted.end());
        candidates.insert(candidates.end(), negs.relation_corrupted.begin(), negs.relation_corrupted.end());
    }

    const std::vector<double> scores = scorer(candidates);
    if (scores.size() != candidates.size()) throw ContractViolation("evaluate: scorer returned wrong count");

    std::vector<int> ranks;
    ranks.reserve(missing.num_triplets());
    std::vector<double> pool_scores;
    for (std::size_t i = 0; i < missing.num_triplets(); ++i) {
        const std::size_t base = i * static_cast<std::size_t>(pool);
        const Triplet& pos = candidates[base];
        // unfiltered sampling may re-draw the positive itself; such candidates
        // are the same assertion, not competitors, and stay out of the ranking
        pool_scores.clear();
        pool_scores.push_back(scores[base]);
        for (int j = 1; j < pool; ++j)
            if (!(candidates[base + static_cast<std::size_t>(j)] == pos))
                pool_scores.push_back(scores[base + static_cast<std::size_t>(j)]);
        ranks.push_back(rank_pessimistic(pool_scores, 0));
    }
    return metrics_from_ranks(ranks);
}

namespace {

void metric_row(std::ostream& os, const char* scheme, const char* metric, double value, std::size_t count) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%zu\n", scheme, metric, value, count);
    os << buf;
}

}  // namespace

void write_metrics_csv(std::ostream& os, const RankingScheme& scheme, const MetricsReport& rep) {
    os << "scheme,metric,value,count\n";
    metric_row(os, scheme.name(), "MR", rep.mr, rep.count);
    metric_row(os, scheme.name(), "MRR", rep.mrr, rep.count);
    metric_row(os, scheme.name(), "Hits@1", rep.hits1, rep.count);
    metric_row(os, scheme.name(), "Hits@3", rep.hits3, rep.count);
    metric_row(os, scheme.name(), "Hits@5", rep.hits5, rep.count);
    metric_row(os, scheme.name(), "Hits@10", rep.hits10, rep.count);
}

void print_metrics(std::ostream& os, const RankingScheme& scheme, const MetricsReport& rep) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%-9s  MR %8.3f  MRR %6.3f  H@1 %6.3f  H@3 %6.3f  H@5 %6.3f  H@10 %6.3f  (%zu positives)\n",
                  scheme.name(), rep.mr, rep.mrr, rep.hits1, rep.hits3, rep.hits5, rep.hits10, rep.count);
    os << buf;
}

}  // namespace mtdea
