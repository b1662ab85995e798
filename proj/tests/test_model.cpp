#include <cmath>

#include "doctest.h"
#include "mtdea/errors.hpp"
#include "mtdea/model.hpp"
#include "mtdea/perm.hpp"
#include "mtdea/rng.hpp"

using namespace mtdea;

namespace {

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rand_range(rng, lo, hi);
    return t;
}

Multigraph random_graph(std::mt19937_64& rng, int max_nodes = 6, int max_rels = 4) {
    const int n = 3 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(max_nodes - 2)));
    const int r = 2 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(max_rels - 1)));
    const int count = 2 + static_cast<int>(rand_below(rng, 8));
    std::vector<Triplet> ts;
    for (int i = 0; i < count; ++i)
        ts.push_back({static_cast<int>(rand_below(rng, n)), static_cast<int>(rand_below(rng, r)),
                      static_cast<int>(rand_below(rng, n))});
    return Multigraph(n, r, std::move(ts));
}

MlpVars bind_mlp(Tape& t, const MlpParams& m) {
    return {{t.constant(m.lin1.w), t.constant(m.lin1.b)}, {t.constant(m.lin2.w), t.constant(m.lin2.b)}};
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    REQUIRE(a.same_shape(b));
    double m = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("gin layer basics") {
    auto rng = substream(21, "gin");
    const int d = 4;

    SUBCASE("isolated node sees only itself") {
        MlpParams net{{random_tensor({d, d}, rng), random_tensor({d}, rng)},
                      {random_tensor({d, d}, rng), random_tensor({d}, rng)}};
        Tensor x = random_tensor({3, d}, rng);
        Tape t;
        auto adj = std::make_shared<AdjacencyCsr>(AdjacencyCsr::from_edges(3, {{0, 1}}));  // node 2 isolated
        Var out = gin_apply(t, bind_mlp(t, net), t.constant(x), adj);

        // reference: row 2 of MLP(x) with zero neighbor term
        Tensor h = linear_forward(x, net.lin1.w, net.lin1.b);
        for (std::int64_t i = 0; i < h.size(); ++i) h[i] = h[i] > 0 ? h[i] : 0;
        Tensor ref = linear_forward(h, net.lin2.w, net.lin2.b);
        for (int j = 0; j < d; ++j) CHECK(t.value(out).at(2, j) == doctest::Approx(ref.at(2, j)).epsilon(1e-14));
    }

    SUBCASE("identity MLP on a single edge adds the neighbor mean") {
        // identity weights, zero bias, nonnegative inputs so relu passes through
        Tensor eye({d, d});
        for (int i = 0; i < d; ++i) eye.at(i, i) = 1.0;
        MlpParams net{{eye, Tensor::zeros({d})}, {eye, Tensor::zeros({d})}};
        Tensor x = random_tensor({2, d}, rng, 0.1, 1.0);
        Tape t;
        auto adj = std::make_shared<AdjacencyCsr>(AdjacencyCsr::from_edges(2, {{0, 1}}));
        Var out = gin_apply(t, bind_mlp(t, net), t.constant(x), adj);
        for (int j = 0; j < d; ++j) {
            CHECK(t.value(out).at(0, j) == doctest::Approx(x.at(0, j) + x.at(1, j)).epsilon(1e-14));
            CHECK(t.value(out).at(1, j) == doctest::Approx(x.at(1, j) + x.at(0, j)).epsilon(1e-14));
        }
    }

    SUBCASE("node relabeling permutes outputs") {
        MlpParams net{{random_tensor({d, d}, rng), random_tensor({d}, rng)},
                      {random_tensor({d, d}, rng), random_tensor({d}, rng)}};
        const int n = 5;
        std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {3, 1}, {4, 0}, {2, 2}};
        Tensor x = random_tensor({n, d}, rng);
        Perm pi = Perm::random(n, rng);

        Tape t1;
        Var out1 = gin_apply(t1, bind_mlp(t1, net), t1.constant(x),
                             std::make_shared<AdjacencyCsr>(AdjacencyCsr::from_edges(n, edges)));

        std::vector<std::pair<int, int>> pedges;
        for (auto [u, v] : edges) pedges.emplace_back(pi(u), pi(v));
        Tensor px({n, d});
        for (int u = 0; u < n; ++u)
            for (int j = 0; j < d; ++j) px.at(pi(u), j) = x.at(u, j);
        Tape t2;
        Var out2 = gin_apply(t2, bind_mlp(t2, net), t2.constant(px),
                             std::make_shared<AdjacencyCsr>(AdjacencyCsr::from_edges(n, pedges)));

        for (int u = 0; u < n; ++u)
            for (int j = 0; j < d; ++j)
                CHECK(t1.value(out1).at(u, j) == doctest::Approx(t2.value(out2).at(pi(u), j)).epsilon(1e-12));
    }
}

namespace {

struct LayerFixture {
    int n = 5, d = 6, num_rels = 4;
    MtdeLayerParams layer;
    Tensor pos_emb;
    std::vector<Tensor> states;

    explicit LayerFixture(std::mt19937_64& rng, int num_tasks) {
        auto mk = [&]() {
            return MlpParams{{random_tensor({d, d}, rng), random_tensor({d}, rng)},
                             {random_tensor({d, d}, rng), random_tensor({d}, rng)}};
        };
        layer = {mk(), mk(), mk()};
        pos_emb = random_tensor({num_tasks, d}, rng);
        for (int r = 0; r < num_rels; ++r) states.push_back(random_tensor({n, d}, rng));
    }

    MtdeLayerVars bind_layer(Tape& t) const {
        return {bind_mlp(t, layer.l1), bind_mlp(t, layer.l2), bind_mlp(t, layer.l3)};
    }
};

Tensor one_hot_alpha(const TaskPartition& tasks, int num_tasks) {
    Tensor a({static_cast<int>(tasks.assignment.size()), num_tasks});
    for (std::size_t r = 0; r < tasks.assignment.size(); ++r)
        a.at(static_cast<int>(r), tasks.assignment[r]) = 1.0;
    return a;
}

}  // namespace

TEST_CASE("hard and soft MTDE layers") {
    auto rng = substream(33, "mtde");

    SUBCASE("one-hot attention reproduces the hard layer") {
        for (int trial = 0; trial < 20; ++trial) {
            const int num_tasks = 2 + static_cast<int>(rand_below(rng, 2));
            LayerFixture fx(rng, num_tasks);
            std::vector<int> assignment;
            for (int r = 0; r < fx.num_rels; ++r)
                assignment.push_back(static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(num_tasks))));
            TaskPartition tasks = TaskPartition::from_assignment(assignment);

            Tape t;
            std::vector<Var> sv;
            for (const Tensor& s : fx.states) sv.push_back(t.constant(s));
            MtdeLayerVars lv = fx.bind_layer(t);
            Var pos = t.constant(fx.pos_emb);
            // column k of alpha corresponds to task k; no empty columns
            Tensor alpha = one_hot_alpha(tasks, tasks.num_tasks);
            auto hard = hard_mtde_layer(t, sv, tasks, lv, pos, nullptr);
            auto soft = soft_mtde_layer(t, sv, t.constant(alpha), lv, pos, nullptr);
            for (int r = 0; r < fx.num_rels; ++r)
                CHECK(max_abs_diff(t.value(hard[static_cast<std::size_t>(r)]),
                                   t.value(soft[static_cast<std::size_t>(r)])) <= 1e-9);
        }
    }

    SUBCASE("K=1 soft layer equals the single-task reduction") {
        for (int trial = 0; trial < 100; ++trial) {
            LayerFixture fx(rng, 1);
            TaskPartition tasks = TaskPartition::from_assignment(std::vector<int>(fx.num_rels, 0));

            Tape t;
            std::vector<Var> sv;
            for (const Tensor& s : fx.states) sv.push_back(t.constant(s));
            MtdeLayerVars lv = fx.bind_layer(t);
            Var pos = t.constant(fx.pos_emb);
            Tensor alpha = Tensor::ones({fx.num_rels, 1});
            auto soft = soft_mtde_layer(t, sv, t.constant(alpha), lv, pos, nullptr);
            auto hard = hard_mtde_layer(t, sv, tasks, lv, pos, nullptr);
            for (int r = 0; r < fx.num_rels; ++r)
                CHECK(max_abs_diff(t.value(soft[static_cast<std::size_t>(r)]),
                                   t.value(hard[static_cast<std::size_t>(r)])) <= 1e-12);
        }
    }

    SUBCASE("K=1 reduction against a hand-rolled single-task form") {
        LayerFixture fx(rng, 1);
        Tape t;
        std::vector<Var> sv;
        for (const Tensor& s : fx.states) sv.push_back(t.constant(s));
        MtdeLayerVars lv = fx.bind_layer(t);
        auto soft = soft_mtde_layer(t, sv, t.constant(Tensor::ones({fx.num_rels, 1})), lv,
                                    t.constant(fx.pos_emb), nullptr);
        // out_r = L1(H_r) + L2(p + mean_{r' != r} H_r'), no L3 terms
        for (int r = 0; r < fx.num_rels; ++r) {
            Tensor mean({fx.n, fx.d});
            for (int r2 = 0; r2 < fx.num_rels; ++r2) {
                if (r2 == r) continue;
                for (std::int64_t i = 0; i < mean.size(); ++i) mean[i] += fx.states[static_cast<std::size_t>(r2)][i];
            }
            for (std::int64_t i = 0; i < mean.size(); ++i) {
                mean[i] /= (fx.num_rels - 1);
                mean[i] += fx.pos_emb[i % fx.d];
            }
            auto run_mlp = [](const MlpParams& net, const Tensor& x) {
                Tensor h = linear_forward(x, net.lin1.w, net.lin1.b);
                for (std::int64_t i = 0; i < h.size(); ++i) h[i] = h[i] > 0 ? h[i] : 0;
                return linear_forward(h, net.lin2.w, net.lin2.b);
            };
            Tensor ref = run_mlp(fx.layer.l1, fx.states[static_cast<std::size_t>(r)]);
            Tensor l2 = run_mlp(fx.layer.l2, mean);
            for (std::int64_t i = 0; i < ref.size(); ++i) ref[i] += l2[i];
            CHECK(max_abs_diff(t.value(soft[static_cast<std::size_t>(r)]), ref) <= 1e-12);
        }
    }

    SUBCASE("same-task relations with identical inputs get identical outputs") {
        LayerFixture fx(rng, 2);
        fx.states[1] = fx.states[0];  // relations 0 and 1 identical
        TaskPartition tasks = TaskPartition::from_assignment({0, 0, 1, 1});
        Tape t;
        std::vector<Var> sv;
        for (const Tensor& s : fx.states) sv.push_back(t.constant(s));
        auto out = hard_mtde_layer(t, sv, tasks, fx.bind_layer(t), t.constant(fx.pos_emb), nullptr);
        CHECK(max_abs_diff(t.value(out[0]), t.value(out[1])) <= 1e-12);
    }

    SUBCASE("swapping same-task inputs swaps outputs") {
        LayerFixture fx(rng, 2);
        TaskPartition tasks = TaskPartition::from_assignment({0, 0, 1, 1});
        Tape t;
        std::vector<Var> sv;
        for (const Tensor& s : fx.states) sv.push_back(t.constant(s));
        MtdeLayerVars lv = fx.bind_layer(t);
        Var pos = t.constant(fx.pos_emb);
        auto out = hard_mtde_layer(t, sv, tasks, lv, pos, nullptr);
        std::swap(sv[0], sv[1]);
        auto swapped = hard_mtde_layer(t, sv, tasks, lv, pos, nullptr);
        CHECK(max_abs_diff(t.value(out[0]), t.value(swapped[1])) <= 1e-12);
        CHECK(max_abs_diff(t.value(out[1]), t.value(swapped[0])) <= 1e-12);
        CHECK(max_abs_diff(t.value(out[2]), t.value(swapped[2])) <= 1e-12);
    }

    SUBCASE("empty same-task complement zeroes the L2 aggregation") {
        LayerFixture fx(rng, 2);
        TaskPartition tasks = TaskPartition::from_assignment({0, 1, 1, 1});  // relation 0 alone in its task
        Tape t;
        std::vector<Var> sv;
        for (const Tensor& s : fx.states) sv.push_back(t.constant(s));
        MtdeLayerVars lv = fx.bind_layer(t);
        Var pos = t.constant(fx.pos_emb);
        auto out = hard_mtde_layer(t, sv, tasks, lv, pos, nullptr);
        // soft layer with the matching one-hot alpha must agree (its normalizer floors)
        auto soft = soft_mtde_layer(t, sv, t.constant(one_hot_alpha(tasks, 2)), lv, pos, nullptr);
        CHECK(max_abs_diff(t.value(out[0]), t.value(soft[0])) <= 1e-9);
    }
}

TEST_CASE("stacked forward") {
    auto rng = substream(44, "fwd");
    ModelConfig cfg;
    cfg.hidden_dim = 8;
    cfg.num_gnn_layers = 1;
    cfg.num_mlp_layers = 1;
    cfg.max_tasks = 2;

    SUBCASE("all-zero weights give zero states and 0.5 scores") {
        Multigraph g(4, 2, {{0, 0, 1}, {1, 1, 2}, {2, 0, 3}});
        ModelParams params = ModelParams::init(cfg, g.num_relations(), 1);
        for (auto* tensor : params.flat())
            if (tensor != &params.attn_logits)
                for (std::int64_t i = 0; i < tensor->size(); ++i) (*tensor)[i] = 0.0;
        Tape t;
        ParamVars pv = bind_params(t, params);
        ForwardResult fwd = forward_graph(t, g, pv, cfg);
        for (Var s : fwd.states)
            for (std::int64_t i = 0; i < t.value(s).size(); ++i) CHECK(t.value(s)[i] == 0.0);
        CHECK(score_triplet(t, fwd, pv.scorer, {0, 0, 1}) == 0.5);
    }

    SUBCASE("double equivariance under joint relabeling") {
        for (int trial = 0; trial < 30; ++trial) {
            Multigraph g = random_graph(rng);
            ModelParams params = ModelParams::init(cfg, g.num_relations(), 100 + trial);
            Perm pi = Perm::random(g.num_nodes(), rng);
            Perm sigma = Perm::random(g.num_relations(), rng);

            ModelParams relabeled = params;
            for (int r = 0; r < g.num_relations(); ++r)
                for (int k = 0; k < cfg.max_tasks; ++k)
                    relabeled.attn_logits.at(sigma(r), k) = params.attn_logits.at(r, k);

            Tape t1, t2;
            ForwardResult f1 = forward_graph(t1, g, bind_params(t1, params), cfg);
            ForwardResult f2 = forward_graph(t2, apply_perms(g, pi, sigma), bind_params(t2, relabeled), cfg);

            double dev = 0.0;
            for (int r = 0; r < g.num_relations(); ++r) {
                const Tensor& a = t1.value(f1.states[static_cast<std::size_t>(r)]);
                const Tensor& b = t2.value(f2.states[static_cast<std::size_t>(sigma(r))]);
                for (int u = 0; u < g.num_nodes(); ++u)
                    for (int j = 0; j < cfg.hidden_dim; ++j)
                        dev = std::max(dev, std::abs(a.at(u, j) - b.at(pi(u), j)));
            }
            CHECK(dev <= 1e-9);
        }
    }

    SUBCASE("disjoint duplicate copy duplicates representations") {
        Multigraph g(3, 2, {{0, 0, 1}, {1, 1, 2}});
        std::vector<Triplet> doubled = g.triplets();
        for (const Triplet& t : g.triplets()) doubled.push_back({t.head + 3, t.rel, t.tail + 3});
        Multigraph g2(6, 2, doubled);

        ModelParams params = ModelParams::init(cfg, 2, 5);
        Tape t1, t2;
        ForwardResult f1 = forward_graph(t1, g, bind_params(t1, params), cfg);
        ForwardResult f2 = forward_graph(t2, g2, bind_params(t2, params), cfg);
        for (int r = 0; r < 2; ++r) {
            const Tensor& a = t1.value(f1.states[static_cast<std::size_t>(r)]);
            const Tensor& b = t2.value(f2.states[static_cast<std::size_t>(r)]);
            for (int u = 0; u < 3; ++u)
                for (int j = 0; j < cfg.hidden_dim; ++j) {
                    CHECK(b.at(u, j) == doctest::Approx(a.at(u, j)).epsilon(1e-12));
                    CHECK(b.at(u + 3, j) == doctest::Approx(a.at(u, j)).epsilon(1e-12));
                }
        }
    }
}

TEST_CASE("scoring") {
    auto rng = substream(55, "score");
    ModelConfig cfg;
    cfg.hidden_dim = 8;
    cfg.num_gnn_layers = 1;
    cfg.num_mlp_layers = 1;
    Multigraph g(5, 3, {{0, 0, 1}, {1, 1, 2}, {2, 2, 3}, {3, 0, 4}});
    ModelParams params = ModelParams::init(cfg, g.num_relations(), 9);

    SUBCASE("deterministic and bit-equal across tape and plain paths") {
        Tape t;
        ParamVars pv = bind_params(t, params);
        ForwardResult fwd = forward_graph(t, g, pv, cfg);
        const double s1 = score_triplet(t, fwd, pv.scorer, {0, 1, 3});
        const double s2 = score_triplet(t, fwd, pv.scorer, {0, 1, 3});
        CHECK(s1 == s2);

        auto scorer = make_scorer(params, g);
        std::vector<Triplet> batch = {{0, 1, 3}};
        CHECK(scorer(batch)[0] == s1);
    }

    SUBCASE("score depends only on the two gathered rows") {
        StateValues sv = compute_states(params, g);
        std::vector<Triplet> batch = {{1, 2, 4}};
        const double base = score_with_states(sv, params, batch)[0];
        StateValues perturbed = sv;
        for (int u = 0; u < 5; ++u) {
            if (u == 1 || u == 4) continue;
            for (int j = 0; j < cfg.hidden_dim; ++j) perturbed.states[2].at(u, j) += rand_range(rng, -1.0, 1.0);
        }
        for (int j = 0; j < cfg.hidden_dim; ++j) perturbed.states[0].at(1, j) += 1.0;  // other relation entirely
        CHECK(score_with_states(perturbed, params, batch)[0] == base);
    }

    SUBCASE("id range violations") {
        Tape t;
        ParamVars pv = bind_params(t, params);
        ForwardResult fwd = forward_graph(t, g, pv, cfg);
        CHECK_THROWS_AS((void)score_triplet(t, fwd, pv.scorer, {9, 0, 1}), ContractViolation);
        CHECK_THROWS_AS((void)score_triplet(t, fwd, pv.scorer, {0, 7, 1}), ContractViolation);
    }

    SUBCASE("homogeneous scores ignore the relation id exactly") {
        ModelConfig hcfg = cfg;
        hcfg.homogeneous = true;
        ModelParams homo = ModelParams::init(hcfg, g.num_relations(), 10);
        CHECK(homo.num_relations == 1);
        auto scorer = make_scorer(homo, g);
        std::vector<Triplet> batch;
        for (int r = 0; r < 3; ++r) batch.push_back({0, r, 2});
        auto scores = scorer(batch);
        CHECK(scores[0] == scores[1]);
        CHECK(scores[1] == scores[2]);
    }
}
