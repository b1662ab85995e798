#include "mtdea/model.hpp"

#include <algorithm>
#include <cmath>

#include "mtdea/errors.hpp"
#include "mtdea/rng.hpp"

namespace mtdea {

void ModelConfig::validate() const {
    if (hidden_dim < 1 || max_tasks < 1 || num_gnn_layers < 0 || num_mlp_layers < 0 || num_layers() < 1)
        throw ContractViolation("ModelConfig: dimensions and layer counts must be positive");
}

Tensor AttentionWeights::alpha() const {
    Tape t;
    return t.value(ops::row_softmax(t, t.constant(logits)));
}

std::vector<int> AttentionWeights::argmax_per_row() const {
    std::vector<int> out;
    const int rows = logits.rows(), cols = logits.cols();
    for (int i = 0; i < rows; ++i) {
        int best = 0;
        for (int j = 1; j < cols; ++j)
            if (logits.at(i, j) > logits.at(i, best)) best = j;
        out.push_back(best);
    }
    return out;
}

namespace {

Tensor glorot_uniform(int in, int out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / (in + out));
    Tensor w({in, out});
    for (std::int64_t i = 0; i < w.size(); ++i) w[i] = rand_range(rng, -limit, limit);
    return w;
}

MlpParams init_mlp(int in, int hidden, int out, std::mt19937_64& rng) {
    return MlpParams{{glorot_uniform(in, hidden, rng), Tensor::zeros({hidden})},
                     {glorot_uniform(hidden, out, rng), Tensor::zeros({out})}};
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& config, int num_relations, std::uint64_t seed) {
    config.validate();
    if (num_relations < 1) throw ContractViolation("ModelParams: num_relations must be positive");
    auto rng = substream(seed, "init");
    const int d = config.hidden_dim;

    ModelParams p;
    p.config = config;
    p.num_relations = config.homogeneous ? 1 : num_relations;
    for (int t = 0; t < config.num_layers(); ++t)
        p.layers.push_back({init_mlp(d, d, d, rng), init_mlp(d, d, d, rng), init_mlp(d, d, d, rng)});
    p.pos_emb = Tensor({config.max_tasks, d});
    for (std::int64_t i = 0; i < p.pos_emb.size(); ++i) p.pos_emb[i] = rand_range(rng, -0.5, 0.5);
    p.scorer = init_mlp(2 * d, d, 1, rng);
    p.attn_logits = Tensor({p.num_relations, config.max_tasks});
    for (std::int64_t i = 0; i < p.attn_logits.size(); ++i) p.attn_logits[i] = rand_range(rng, -0.1, 0.1);
    return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named() {
    std::vector<std::pair<std::string, Tensor*>> out;
    for (std::size_t t = 0; t < layers.size(); ++t) {
        const std::string prefix = "layer" + std::to_string(t) + ".";
        MlpParams* ls[3] = {&layers[t].l1, &layers[t].l2, &layers[t].l3};
        for (int j = 0; j < 3; ++j) {
            const std::string lp = prefix + "l" + std::to_string(j + 1) + ".";
            out.emplace_back(lp + "lin1.w", &ls[j]->lin1.w);
            out.emplace_back(lp + "lin1.b", &ls[j]->lin1.b);
            out.emplace_back(lp + "lin2.w", &ls[j]->lin2.w);
            out.emplace_back(lp + "lin2.b", &ls[j]->lin2.b);
        }
    }
    out.emplace_back("pos_emb", &pos_emb);
    out.emplace_back("scorer.lin1.w", &scorer.lin1.w);
    out.emplace_back("scorer.lin1.b", &scorer.lin1.b);
    out.emplace_back("scorer.lin2.w", &scorer.lin2.w);
    out.emplace_back("scorer.lin2.b", &scorer.lin2.b);
    out.emplace_back("attn_logits", &attn_logits);
    return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
    std::vector<std::pair<std::string, const Tensor*>> out;
    for (const auto& [name, tensor] : const_cast<ModelParams*>(this)->named()) out.emplace_back(name, tensor);
    return out;
}

std::vector<Tensor*> ModelParams::flat() {
    std::vector<Tensor*> out;
    for (auto& [name, tensor] : named()) out.push_back(tensor);
    return out;
}

std::uint64_t ModelParams::backbone_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [name, tensor] : named()) {
        if (name == "attn_logits") continue;
        mix(tensor->data(), static_cast<std::size_t>(tensor->size()) * sizeof(double));
    }
    return h;
}

ParamVars bind_params(Tape& tape, const ModelParams& params, const BindOptions& opts) {
    auto bind = [&](const Tensor& t, bool trainable) { return trainable ? tape.leaf(t) : tape.constant(t); };

    ParamVars pv;
    auto bind_mlp = [&](const MlpParams& m) {
        MlpVars v{{bind(m.lin1.w, opts.backbone_trainable), bind(m.lin1.b, opts.backbone_trainable)},
                  {bind(m.lin2.w, opts.backbone_trainable), bind(m.lin2.b, opts.backbone_trainable)}};
        pv.flat.insert(pv.flat.end(), {v.lin1.w, v.lin1.b, v.lin2.w, v.lin2.b});
        return v;
    };
    for (const auto& layer : params.layers)
        pv.layers.push_back({bind_mlp(layer.l1), bind_mlp(layer.l2), bind_mlp(layer.l3)});
    pv.pos_emb = bind(params.pos_emb, opts.backbone_trainable);
    pv.flat.push_back(pv.pos_emb);
    pv.scorer = bind_mlp(params.scorer);
    const Tensor& logits = opts.logits_override ? *opts.logits_override : params.attn_logits;
    if (logits.cols() != params.config.max_tasks)
        throw ContractViolation("bind_params: attention logits column count must equal max_tasks");
    pv.attn_logits = bind(logits, opts.logits_trainable);
    pv.flat.push_back(pv.attn_logits);
    return pv;
}

Var gin_apply(Tape& tape, const MlpVars& net, Var x, const std::shared_ptr<const AdjacencyCsr>& adj) {
    Var agg = ops::neighbor_mean(tape, x, adj);
    Var z = ops::add(tape, x, agg);  // (1 + eps) h_v + mean, eps = 0
    Var h = ops::relu(tape, ops::linear(tape, z, net.lin1.w, net.lin1.b));
    return ops::linear(tape, h, net.lin2.w, net.lin2.b);
}

Var mlp_apply(Tape& tape, const MlpVars& net, Var x) {
    Var h = ops::relu(tape, ops::linear(tape, x, net.lin1.w, net.lin1.b));
    return ops::linear(tape, h, net.lin2.w, net.lin2.b);
}

namespace {

Var apply_l(Tape& tape, const MlpVars& net, Var x, const AdjacencyList* adjacency, int r) {
    if (adjacency) return gin_apply(tape, net, x, (*adjacency)[static_cast<std::size_t>(r)]);
    return mlp_apply(tape, net, x);
}

Var pos_row(Tape& tape, Var pos_emb, int k, int n) {
    return ops::broadcast_row(tape, ops::gather_rows(tape, pos_emb, {k}), n);
}

}  // namespace

std::vector<Var> soft_mtde_layer(Tape& tape, const std::vector<Var>& states, Var alpha,
                                 const MtdeLayerVars& layer, Var pos_emb, const AdjacencyList* adjacency) {
    const int num_rels = static_cast<int>(states.size());
    const Tensor alpha_val = tape.value(alpha);  // copy: argmax decisions read it while nodes are appended
    if (alpha_val.rows() != num_rels) throw ContractViolation("soft_mtde_layer: one alpha row per relation required");
    const int num_tasks = alpha_val.cols();
    const int n = tape.value(states[0]).rows();

    Var colsum = ops::sum_axis0(tape, alpha);
    std::vector<Var> task_sum;  // S_k = sum_r alpha[r, k] H_r
    task_sum.reserve(static_cast<std::size_t>(num_tasks));
    for (int k = 0; k < num_tasks; ++k)
        task_sum.push_back(ops::weighted_sum(tape, states, ops::col_slice(tape, alpha, k)));

    std::vector<Var> out;
    out.reserve(states.size());
    for (int r = 0; r < num_rels; ++r) {
        int own_task = 0;
        for (int k = 1; k < num_tasks; ++k)
            if (alpha_val.at(r, k) > alpha_val.at(r, own_task)) own_task = k;

        Var acc = apply_l(tape, layer.l1, states[r], adjacency, r);
        for (int k = 0; k < num_tasks; ++k) {
            Var a_rk = ops::elem2(tape, alpha, r, k);
            Var excl = ops::sub_scaled(tape, task_sum[static_cast<std::size_t>(k)], states[r], a_rk);
            Var norm = ops::sub(tape, ops::elem1(tape, colsum, k), a_rk);
            Var agg = ops::div_floored(tape, excl, norm, 1e-12);
            Var inp = ops::add(tape, agg, pos_row(tape, pos_emb, k, n));
            Var term = apply_l(tape, k == own_task ? layer.l2 : layer.l3, inp, adjacency, r);
            acc = ops::add(tape, acc, term);
        }
        out.push_back(acc);
    }
    return out;
}

std::vector<Var> hard_mtde_layer(Tape& tape, const std::vector<Var>& states, const TaskPartition& tasks,
                                 const MtdeLayerVars& layer, Var pos_emb, const AdjacencyList* adjacency) {
    const int num_rels = static_cast<int>(states.size());
    if (static_cast<int>(tasks.assignment.size()) != num_rels)
        throw ContractViolation("hard_mtde_layer: partition must cover all relations");
    const int n = tape.value(states[0]).rows();
    const int d = tape.value(states[0]).cols();
    const auto members = tasks.members();

    auto mean_of = [&](const std::vector<int>& rels, int exclude) -> Var {
        std::vector<Var> picked;
        for (int r : rels)
            if (r != exclude) picked.push_back(states[static_cast<std::size_t>(r)]);
        if (picked.empty()) return tape.constant(Tensor::zeros({n, d}));
        Var acc = picked[0];
        for (std::size_t i = 1; i < picked.size(); ++i) acc = ops::add(tape, acc, picked[i]);
        return ops::scale(tape, acc, 1.0 / static_cast<double>(picked.size()));
    };

    std::vector<Var> out;
    out.reserve(states.size());
    for (int r = 0; r < num_rels; ++r) {
        const int own_task = tasks.assignment[static_cast<std::size_t>(r)];
        Var acc = apply_l(tape, layer.l1, states[r], adjacency, r);
        Var own_inp = ops::add(tape, mean_of(members[static_cast<std::size_t>(own_task)], r),
                               pos_row(tape, pos_emb, own_task, n));
        acc = ops::add(tape, acc, apply_l(tape, layer.l2, own_inp, adjacency, r));
        for (int k = 0; k < tasks.num_tasks; ++k) {
            if (k == own_task) continue;
            Var inp = ops::add(tape, mean_of(members[static_cast<std::size_t>(k)], -1), pos_row(tape, pos_emb, k, n));
            acc = ops::add(tape, acc, apply_l(tape, layer.l3, inp, adjacency, r));
        }
        out.push_back(acc);
    }
    return out;
}

ForwardResult forward_graph(Tape& tape, const Multigraph& observable, const ParamVars& pv,
                            const ModelConfig& config) {
    config.validate();
    const int n = observable.num_nodes();
    const int model_rels = config.homogeneous ? 1 : observable.num_relations();
    if (tape.value(pv.attn_logits).rows() != model_rels)
        throw ContractViolation("forward_graph: attention logits row count does not match the graph");

    AdjacencyList adjacency;
    adjacency.reserve(static_cast<std::size_t>(model_rels));
    if (config.homogeneous) {
        adjacency.push_back(std::make_shared<AdjacencyCsr>(AdjacencyCsr::from_edges(n, observable.collapsed_edges())));
    } else {
        for (int r = 0; r < model_rels; ++r)
            adjacency.push_back(std::make_shared<AdjacencyCsr>(AdjacencyCsr::from_edges(n, observable.relation_edges(r))));
    }

    Var alpha = ops::row_softmax(tape, pv.attn_logits);

    Var ones = tape.constant(Tensor::ones({n, config.hidden_dim}));
    std::vector<Var> states(static_cast<std::size_t>(model_rels), ones);

    const int total_layers = config.num_layers();
    for (int t = 0; t < total_layers; ++t) {
        const AdjacencyList* adj = t < config.num_gnn_layers ? &adjacency : nullptr;
        states = soft_mtde_layer(tape, states, alpha, pv.layers[static_cast<std::size_t>(t)], pv.pos_emb, adj);
        if (t + 1 < total_layers)
            for (auto& s : states) s = ops::relu(tape, s);
    }

    return ForwardResult{std::move(states), alpha, n, observable.num_relations(), config.homogeneous};
}

Var score_batch(Tape& tape, const ForwardResult& fwd, const MlpVars& scorer, std::span<const Triplet> triplets) {
    const int n = fwd.num_nodes;
    std::vector<int> head_idx, tail_idx;
    head_idx.reserve(triplets.size());
    tail_idx.reserve(triplets.size());
    for (const Triplet& t : triplets) {
        if (t.head < 0 || t.head >= n || t.tail < 0 || t.tail >= n)
            throw ContractViolation("score: node id out of range");
        if (t.rel < 0 || t.rel >= fwd.graph_relations) throw ContractViolation("score: relation id out of range");
        const int r = fwd.homogeneous ? 0 : t.rel;
        head_idx.push_back(r * n + t.head);
        tail_idx.push_back(r * n + t.tail);
    }
    Var h_all = ops::concat_rows(tape, fwd.states);
    Var heads = ops::gather_rows(tape, h_all, std::move(head_idx));
    Var tails = ops::gather_rows(tape, h_all, std::move(tail_idx));
    Var x = ops::concat_cols(tape, heads, tails);  // head-then-tail
    Var h = ops::relu(tape, ops::linear(tape, x, scorer.lin1.w, scorer.lin1.b));
    Var logit = ops::linear(tape, h, scorer.lin2.w, scorer.lin2.b);
    return ops::sigmoid(tape, ops::reshape(tape, logit, {static_cast<int>(triplets.size())}));
}

double score_triplet(Tape& tape, const ForwardResult& fwd, const MlpVars& scorer, const Triplet& t) {
    return tape.value(score_batch(tape, fwd, scorer, std::span<const Triplet>(&t, 1)))[0];
}

StateValues compute_states(const ModelParams& params, const Multigraph& observable) {
    Tape tape;
    BindOptions opts;
    opts.backbone_trainable = false;
    opts.logits_trainable = false;
    ParamVars pv = bind_params(tape, params, opts);
    ForwardResult fwd = forward_graph(tape, observable, pv, params.config);
    StateValues sv;
    sv.num_nodes = fwd.num_nodes;
    sv.graph_relations = fwd.graph_relations;
    sv.homogeneous = fwd.homogeneous;
    for (Var s : fwd.states) sv.states.push_back(tape.value(s));
    return sv;
}

std::vector<double> score_with_states(const StateValues& sv, const ModelParams& params,
                                      std::span<const Triplet> triplets) {
    Tape tape;
    ForwardResult fwd;
    fwd.num_nodes = sv.num_nodes;
    fwd.graph_relations = sv.graph_relations;
    fwd.homogeneous = sv.homogeneous;
    for (const Tensor& s : sv.states) fwd.states.push_back(tape.constant(s));
    MlpVars scorer{{tape.constant(params.scorer.lin1.w), tape.constant(params.scorer.lin1.b)},
                   {tape.constant(params.scorer.lin2.w), tape.constant(params.scorer.lin2.b)}};
    const Tensor& scores = tape.value(score_batch(tape, fwd, scorer, triplets));
    return scores.vec();
}

TripletScorer make_scorer(const ModelParams& params, const Multigraph& observable) {
    auto states = std::make_shared<StateValues>(compute_states(params, observable));
    auto params_copy = std::make_shared<ModelParams>(params);
    return [states, params_copy](std::span<const Triplet> triplets) {
        return score_with_states(*states, *params_copy, triplets);
    };
}

}  // namespace mtdea
