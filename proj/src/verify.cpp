#include "mtdea/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "mtdea/datasets.hpp"
#include "mtdea/eval.hpp"
#include "mtdea/exchange.hpp"
#include "mtdea/gradcheck.hpp"
#include "mtdea/loss.hpp"
#include "mtdea/model.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

void SuiteResult::record(bool ok, const std::string& line) {
    passed = passed && ok;
    lines.push_back(std::string(ok ? "  ok   " : "  FAIL ") + line);
}

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rand_range(rng, lo, hi);
    return t;
}

Multigraph random_graph(std::mt19937_64& rng, int min_nodes, int max_nodes, int max_rels) {
    const int n = min_nodes + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(max_nodes - min_nodes + 1)));
    const int r = 2 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(max_rels - 1)));
    const int count = 3 + static_cast<int>(rand_below(rng, 8));
    std::vector<Triplet> ts;
    for (int i = 0; i < count; ++i)
        ts.push_back({static_cast<int>(rand_below(rng, n)), static_cast<int>(rand_below(rng, r)),
                      static_cast<int>(rand_below(rng, n))});
    return Multigraph(n, r, std::move(ts));
}

}  // namespace

SuiteResult verify_gradcheck(std::uint64_t seed) {
    SuiteResult result;

    // full objective on a fixed random 5-node, 3-relation graph, d=8, K=2
    auto grng = substream(seed, "verify.grad.graph");
    std::vector<Triplet> ts;
    for (int i = 0; i < 7; ++i)
        ts.push_back({static_cast<int>(rand_below(grng, 5)), static_cast<int>(rand_below(grng, 3)),
                      static_cast<int>(rand_below(grng, 5))});
    Multigraph graph(5, 3, ts);
    const std::vector<Triplet>& positives = graph.triplets();

    ModelConfig mcfg;
    mcfg.hidden_dim = 8;
    mcfg.num_gnn_layers = 1;
    mcfg.num_mlp_layers = 1;
    mcfg.max_tasks = 2;
    ModelParams params = ModelParams::init(mcfg, graph.num_relations(), substream_seed(seed, "verify.grad.init"));

    LossConfig lcfg;
    auto neg_rng = substream(seed, "verify.grad.neg");
    NegativeBatch negs = sample_negatives(graph, positives, lcfg.n_tail, lcfg.m_rel, neg_rng);

    auto objective = [&](Tape& t) {
        ParamVars pv = bind_params(t, params);
        ForwardResult fwd = forward_graph(t, graph, pv, mcfg);
        Var s_pos = score_batch(t, fwd, pv.scorer, positives);
        Var s_tail = score_batch(t, fwd, pv.scorer, negs.tail_corrupted);
        Var s_rel = score_batch(t, fwd, pv.scorer, negs.relation_corrupted);
        Var dual = dual_loss(t, s_pos, s_tail, s_rel, lcfg.n_tail, lcfg.m_rel);
        return total_loss(t, dual, fwd.alpha, lcfg.lambda1_at(0), lcfg.lambda2_at(0));
    };
    auto eval = [&]() {
        Tape t;
        return t.value(objective(t)).item();
    };
    auto grad = [&]() {
        Tape t;
        ParamVars pv_probe;  // need the same leaf order; rebuild inside
        Var out;
        {
            ParamVars pv = bind_params(t, params);
            ForwardResult fwd = forward_graph(t, graph, pv, mcfg);
            Var s_pos = score_batch(t, fwd, pv.scorer, positives);
            Var s_tail = score_batch(t, fwd, pv.scorer, negs.tail_corrupted);
            Var s_rel = score_batch(t, fwd, pv.scorer, negs.relation_corrupted);
            Var dual = dual_loss(t, s_pos, s_tail, s_rel, lcfg.n_tail, lcfg.m_rel);
            out = total_loss(t, dual, fwd.alpha, lcfg.lambda1_at(0), lcfg.lambda2_at(0));
            pv_probe = pv;
        }
        auto grads = t.backward(out);
        std::vector<Tensor> gs;
        for (Var v : pv_probe.flat) gs.push_back(grads.at(v));
        return gs;
    };
    std::vector<Tensor*> flat = params.flat();
    const double err = finite_diff_check(eval, grad, flat, 1e-4);
    result.record(err <= 1e-5, fmt("full-objective gradient check: max rel err %.3e (threshold 1e-5)", err));

    // Eq. 5 alone on a 4-node, 2-relation graph
    {
        auto g2rng = substream(seed, "verify.grad.small");
        std::vector<Triplet> small;
        for (int i = 0; i < 5; ++i)
            small.push_back({static_cast<int>(rand_below(g2rng, 4)), static_cast<int>(rand_below(g2rng, 2)),
                             static_cast<int>(rand_below(g2rng, 4))});
        Multigraph graph2(4, 2, small);
        ModelParams params2 = ModelParams::init(mcfg, 2, substream_seed(seed, "verify.grad.init2"));
        NegativeBatch negs2 = sample_negatives(graph2, graph2.triplets(), 1, 1, g2rng);
        auto loss2 = [&](Tape& t) {
            ParamVars pv = bind_params(t, params2);
            ForwardResult fwd = forward_graph(t, graph2, pv, mcfg);
            Var s_pos = score_batch(t, fwd, pv.scorer, graph2.triplets());
            Var s_tail = score_batch(t, fwd, pv.scorer, negs2.tail_corrupted);
            Var s_rel = score_batch(t, fwd, pv.scorer, negs2.relation_corrupted);
            return dual_loss(t, s_pos, s_tail, s_rel, 1, 1);
        };
        auto eval2 = [&]() {
            Tape t;
            return t.value(loss2(t)).item();
        };
        auto grad2 = [&]() {
            Tape t;
            ParamVars pv = bind_params(t, params2);
            ForwardResult fwd = forward_graph(t, graph2, pv, mcfg);
            Var s_pos = score_batch(t, fwd, pv.scorer, graph2.triplets());
            Var s_tail = score_batch(t, fwd, pv.scorer, negs2.tail_corrupted);
            Var s_rel = score_batch(t, fwd, pv.scorer, negs2.relation_corrupted);
            Var out = dual_loss(t, s_pos, s_tail, s_rel, 1, 1);
            auto grads = t.backward(out);
            std::vector<Tensor> gs;
            for (Var v : pv.flat) gs.push_back(grads.at(v));
            return gs;
        };
        std::vector<Tensor*> flat2 = params2.flat();
        const double err2 = finite_diff_check(eval2, grad2, flat2, 1e-4);
        result.record(err2 <= 1e-5, fmt("dual-loss gradient check: max rel err %.3e (threshold 1e-5)", err2));
    }

    // regularizers on random logits
    {
        auto rrng = substream(seed, "verify.grad.reg");
        Tensor logits = random_tensor({4, 3}, rrng, -1.0, 1.0);
        auto build = [&](Tape& t, Var w) {
            Var alpha = ops::row_softmax(t, w);
            return ops::add(t, one_hot_entropy(t, alpha), concentration_lgamma(t, alpha));
        };
        auto eval3 = [&]() {
            Tape t;
            return t.value(build(t, t.leaf(logits))).item();
        };
        auto grad3 = [&]() {
            Tape t;
            Var w = t.leaf(logits);
            auto grads = t.backward(build(t, w));
            return std::vector<Tensor>{grads.at(w)};
        };
        std::vector<Tensor*> flat3 = {&logits};
        const double err3 = finite_diff_check(eval3, grad3, flat3, 1e-5);
        result.record(err3 <= 1e-6, fmt("regularizer gradient check: max rel err %.3e (threshold 1e-6)", err3));
    }
    return result;
}

SuiteResult verify_equivariance(std::uint64_t seed) {
    SuiteResult result;
    ModelConfig mcfg;
    mcfg.hidden_dim = 8;
    mcfg.num_gnn_layers = 1;
    mcfg.num_mlp_layers = 1;
    mcfg.max_tasks = 2;

    // 200 joint relabelings through the stacked forward
    {
        auto rng = substream(seed, "verify.equi");
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            Multigraph g = random_graph(rng, 3, 6, 4);
            ModelParams params =
                ModelParams::init(mcfg, g.num_relations(), substream_seed(seed, "verify.equi.init", trial));
            Perm pi = Perm::random(g.num_nodes(), rng);
            Perm sigma = Perm::random(g.num_relations(), rng);
            ModelParams relabeled = params;
            for (int r = 0; r < g.num_relations(); ++r)
                for (int k = 0; k < mcfg.max_tasks; ++k)
                    relabeled.attn_logits.at(sigma(r), k) = params.attn_logits.at(r, k);

            Tape t1, t2;
            ForwardResult f1 = forward_graph(t1, g, bind_params(t1, params), mcfg);
            ForwardResult f2 = forward_graph(t2, apply_perms(g, pi, sigma), bind_params(t2, relabeled), mcfg);
            for (int r = 0; r < g.num_relations(); ++r) {
                const Tensor& a = t1.value(f1.states[static_cast<std::size_t>(r)]);
                const Tensor& b = t2.value(f2.states[static_cast<std::size_t>(sigma(r))]);
                for (int u = 0; u < g.num_nodes(); ++u)
                    for (int j = 0; j < mcfg.hidden_dim; ++j)
                        worst = std::max(worst, std::abs(a.at(u, j) - b.at(pi(u), j)));
            }
        }
        result.record(worst <= 1e-9, fmt("double equivariance over 200 relabelings: max deviation %.3e (threshold 1e-9)", worst));
    }

    // one-hot soft/hard consistency and the K=1 reduction
    {
        auto rng = substream(seed, "verify.hardsoft");
        double worst_hard = 0.0, worst_k1 = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 4, d = 6, num_rels = 4;
            const int num_tasks = 2 + static_cast<int>(rand_below(rng, 2));
            auto mk = [&]() {
                return MlpParams{{random_tensor({d, d}, rng), random_tensor({d}, rng)},
                                 {random_tensor({d, d}, rng), random_tensor({d}, rng)}};
            };
            MtdeLayerParams layer{mk(), mk(), mk()};
            Tensor pos = random_tensor({num_tasks, d}, rng);
            std::vector<Tensor> states;
            for (int r = 0; r < num_rels; ++r) states.push_back(random_tensor({n, d}, rng));

            std::vector<int> assignment;
            for (int r = 0; r < num_rels; ++r)
                assignment.push_back(static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(num_tasks))));
            TaskPartition tasks = TaskPartition::from_assignment(assignment);
            Tensor alpha({num_rels, tasks.num_tasks});
            for (int r = 0; r < num_rels; ++r) alpha.at(r, tasks.assignment[static_cast<std::size_t>(r)]) = 1.0;

            Tape t;
            std::vector<Var> sv;
            for (const Tensor& s : states) sv.push_back(t.constant(s));
            MtdeLayerVars lv{{{t.constant(layer.l1.lin1.w), t.constant(layer.l1.lin1.b)},
                              {t.constant(layer.l1.lin2.w), t.constant(layer.l1.lin2.b)}},
                             {{t.constant(layer.l2.lin1.w), t.constant(layer.l2.lin1.b)},
                              {t.constant(layer.l2.lin2.w), t.constant(layer.l2.lin2.b)}},
                             {{t.constant(layer.l3.lin1.w), t.constant(layer.l3.lin1.b)},
                              {t.constant(layer.l3.lin2.w), t.constant(layer.l3.lin2.b)}}};
            Var pv = t.constant(pos);
            auto hard = hard_mtde_layer(t, sv, tasks, lv, pv, nullptr);
            auto soft = soft_mtde_layer(t, sv, t.constant(alpha), lv, pv, nullptr);
            for (int r = 0; r < num_rels; ++r)
                for (std::int64_t i = 0; i < t.value(hard[static_cast<std::size_t>(r)]).size(); ++i)
                    worst_hard = std::max(worst_hard, std::abs(t.value(hard[static_cast<std::size_t>(r)])[i] -
                                                               t.value(soft[static_cast<std::size_t>(r)])[i]));

            // K = 1 reduction with the same nets
            TaskPartition single = TaskPartition::from_assignment(std::vector<int>(num_rels, 0));
            auto hard1 = hard_mtde_layer(t, sv, single, lv, pv, nullptr);
            auto soft1 = soft_mtde_layer(t, sv, t.constant(Tensor::ones({num_rels, 1})), lv, pv, nullptr);
            for (int r = 0; r < num_rels; ++r)
                for (std::int64_t i = 0; i < t.value(hard1[static_cast<std::size_t>(r)]).size(); ++i)
                    worst_k1 = std::max(worst_k1, std::abs(t.value(hard1[static_cast<std::size_t>(r)])[i] -
                                                           t.value(soft1[static_cast<std::size_t>(r)])[i]));
        }
        result.record(worst_hard <= 1e-9,
                      fmt("one-hot soft layer vs hard layer (100 draws): max deviation %.3e (threshold 1e-9)", worst_hard));
        result.record(worst_k1 <= 1e-12,
                      fmt("K=1 soft layer vs single-task form (100 draws): max deviation %.3e (threshold 1e-12)", worst_k1));
    }
    return result;
}

SuiteResult verify_exchangeability(std::uint64_t seed) {
    SuiteResult result;
    auto rng = substream(seed, "verify.exch");

    struct Case {
        EmpiricalDistribution dist;
        std::vector<int> expected;  // expected assignment (canonical labels)
        std::string name;
    };
    std::vector<Case> cases;

    // (a) parallel clones: every relation on the same edge set -> one task
    for (int variant = 0; variant < 5; ++variant) {
        const int n = 3 + variant % 3;
        const int r = 2 + variant % 3;
        std::vector<Triplet> ts;
        std::set<std::pair<int, int>> edges;
        for (int e = 0; e < n - 1; ++e) edges.insert({e, static_cast<int>(rand_below(rng, n))});
        for (auto [u, v] : edges)
            for (int rel = 0; rel < r; ++rel) ts.push_back({u, rel, v});
        cases.push_back({EmpiricalDistribution({{Multigraph(n, r, ts), 1.0}}), std::vector<int>(r, 0),
                         "parallel-clones-" + std::to_string(variant)});
    }

    // (b) inverse pair vs copy pair on disjoint blocks -> two tasks
    for (int variant = 0; variant < 5; ++variant) {
        std::vector<Triplet> ts = {{0, 0, 1}, {1, 1, 0}, {2, 2, 3}, {2, 3, 3}};
        cases.push_back({EmpiricalDistribution({{Multigraph(4 + variant % 3, 4, ts), 1.0}}),
                         std::vector<int>{0, 0, 1, 1}, "inverse-vs-copy-" + std::to_string(variant)});
    }

    // (c) distinct edge counts per relation -> singleton tasks
    for (int variant = 0; variant < 5; ++variant) {
        const int n = 5;
        std::vector<Triplet> ts;
        for (int rel = 0; rel < 3; ++rel)
            for (int e = 0; e <= rel; ++e) ts.push_back({e, rel, (e + 1 + variant) % n});
        std::vector<int> expected = {0, 1, 2};
        cases.push_back({EmpiricalDistribution({{Multigraph(n, 3, ts), 1.0}}), expected,
                         "degree-separated-" + std::to_string(variant)});
    }

    // (d) duplicated pattern across two node blocks -> pairs of tasks.
    // Block A = {0,1} carries relations 0 and 2, block B = {2,3} carries the
    // duplicated relations 1 and 3. Swapping blocks with sigma = (01)(23)
    // exchanges within each pair; distinct per-relation edge counts (1 vs 2)
    // forbid cross-pair exchanges.
    for (int variant = 0; variant < 5; ++variant) {
        std::vector<Triplet> ts = {{0, 0, 1}, {2, 1, 3}, {0, 2, 1}, {0, 2, 0}, {2, 3, 3}, {2, 3, 2}};
        cases.push_back({EmpiricalDistribution({{Multigraph(4 + variant % 3, 4, ts), 1.0}}),
                         std::vector<int>{0, 0, 1, 1}, "duplicated-pattern-" + std::to_string(variant)});
    }

    // (e) two-graph uniform mixture closed under the relation swap -> one task
    for (int variant = 0; variant < 5; ++variant) {
        const int n = 4;
        std::vector<Triplet> base;
        base.push_back({0, 0, 1});
        base.push_back({1, 1, 2});
        base.push_back({static_cast<int>(rand_below(rng, n)), 1, static_cast<int>(rand_below(rng, n))});
        Multigraph g1(n, 2, base);
        Multigraph g2 = apply_perms(g1, Perm::identity(n), Perm({1, 0}));
        if (g1 == g2) {
            cases.push_back({EmpiricalDistribution({{g1, 1.0}}), std::vector<int>{0, 0}, "swap-closed-point"});
        } else {
            cases.push_back({EmpiricalDistribution({{g1, 0.5}, {g2, 0.5}}), std::vector<int>{0, 0},
                             "swap-closed-mixture-" + std::to_string(variant)});
        }
    }

    int equivalence_ok = 0;
    int partition_ok = 0;
    for (const Case& c : cases) {
        const int r = c.dist.num_relations();
        std::vector<std::vector<bool>> ex(static_cast<std::size_t>(r), std::vector<bool>(static_cast<std::size_t>(r)));
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) ex[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = exchangeable_bruteforce(c.dist, a, b);
        bool props = true;
        for (int a = 0; a < r; ++a) {
            props = props && ex[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)];
            for (int b = 0; b < r; ++b) {
                props = props && (ex[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] ==
                                  ex[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]);
                for (int d = 0; d < r; ++d)
                    if (ex[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] &&
                        ex[static_cast<std::size_t>(b)][static_cast<std::size_t>(d)])
                        props = props && ex[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
            }
        }
        equivalence_ok += props;
        const TaskPartition tp = relational_tasks(c.dist);
        const bool match = tp.assignment == c.expected;
        partition_ok += match;
        if (!props || !match) result.record(false, "case " + c.name + (props ? "" : " [equivalence]") + (match ? "" : " [classes]"));
    }
    result.record(equivalence_ok == static_cast<int>(cases.size()),
                  "reflexive/symmetric/transitive on " + std::to_string(equivalence_ok) + "/" +
                      std::to_string(cases.size()) + " constructed distributions");
    result.record(partition_ok == static_cast<int>(cases.size()),
                  "relational_tasks matches hand-built classes on " + std::to_string(partition_ok) + "/" +
                      std::to_string(cases.size()) + " cases");
    return result;
}

SuiteResult verify_ranking(std::uint64_t seed) {
    SuiteResult result;

    {
        std::vector<double> tied(51, 0.3);
        result.record(rank_pessimistic(tied, 10) == 51, "51 tied candidates rank 51");
        std::vector<double> mixed = {0.9, 0.7, 0.7, 0.5};
        result.record(rank_pessimistic(mixed, 1) == 3, "tie rank counts the worst position");
        std::vector<double> top = {0.9, 0.1, 0.2};
        result.record(rank_pessimistic(top, 0) == 1, "strict winner ranks first");
    }

    {
        std::vector<int> ranks = {1, 2, 4};
        MetricsReport rep = metrics_from_ranks(ranks);
        result.record(std::abs(rep.mrr - 7.0 / 12.0) < 1e-12 && std::abs(rep.mr - 7.0 / 3.0) < 1e-12,
                      "metric arithmetic on ranks {1,2,4}");
    }

    // untrained homogeneous model: the deterministic tie rows
    {
        auto rng = substream(seed, "verify.rank.graph");
        std::vector<Triplet> ts;
        for (int i = 0; i < 40; ++i)
            ts.push_back({static_cast<int>(rand_below(rng, 30)), static_cast<int>(rand_below(rng, 6)),
                          static_cast<int>(rand_below(rng, 30))});
        Multigraph observable(30, 6, ts);
        std::vector<Triplet> missing_ts;
        for (int i = 0; i < 25; ++i)
            missing_ts.push_back({static_cast<int>(rand_below(rng, 30)), static_cast<int>(rand_below(rng, 6)),
                                  static_cast<int>(rand_below(rng, 30))});
        Multigraph missing(30, 6, missing_ts);

        ModelConfig mcfg;
        mcfg.hidden_dim = 8;
        mcfg.num_gnn_layers = 1;
        mcfg.num_mlp_layers = 1;
        mcfg.homogeneous = true;
        ModelParams homo = ModelParams::init(mcfg, observable.num_relations(), substream_seed(seed, "verify.rank"));
        auto scorer = make_scorer(homo, observable);

        MetricsReport rel = evaluate(scorer, observable, missing, RankingScheme::relation(), seed);
        result.record(rel.mr == 51.0, fmt("homogeneous relation-scheme MR = %.3f (expected exactly 51.000)", rel.mr));
        result.record(std::abs(rel.mrr - 0.0196) <= 0.0005,
                      fmt("homogeneous relation-scheme MRR = %.6f (expected 0.0196 +- 0.0005)", rel.mrr));
        result.record(rel.hits10 == 0.0, fmt("homogeneous relation-scheme Hits@10 = %.3f (expected 0)", rel.hits10));

        MetricsReport dual = evaluate(scorer, observable, missing, RankingScheme::dual(), seed + 1);
        result.record(dual.hits10 == 0.0, fmt("homogeneous dual-scheme Hits@10 = %.3f (expected 0)", dual.hits10));
        result.record(dual.mr >= 27.0, fmt("homogeneous dual-scheme MR = %.3f (expected >= 27)", dual.mr));

        // oracle separation sanity
        TripletScorer oracle = [&](std::span<const Triplet> cand) {
            std::vector<double> out;
            for (const Triplet& t : cand) out.push_back(missing.contains(t) ? 1.0 : 0.0);
            return out;
        };
        MetricsReport perfect = evaluate(oracle, observable, missing, RankingScheme::dual(), seed + 2);
        result.record(perfect.mrr == 1.0 && perfect.mr == 1.0 && perfect.hits1 == 1.0,
                      "oracle scorer attains MRR = MR = Hits@1 = 1");
    }
    return result;
}

}  // namespace mtdea
