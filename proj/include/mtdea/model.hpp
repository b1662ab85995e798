#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mtdea/exchange.hpp"
#include "mtdea/multigraph.hpp"
#include "mtdea/ops.hpp"
#include "mtdea/tape.hpp"

namespace mtdea {

struct ModelConfig {
    int hidden_dim = 32;
    int num_gnn_layers = 2;  // 1 for MetaFam-style runs
    int num_mlp_layers = 2;
    int max_tasks = 2;  // K-hat, the maximum number of relational tasks modeled
    bool homogeneous = false;  // collapse all relations into one merged graph

    int num_layers() const { return num_gnn_layers + num_mlp_layers; }
    void validate() const;
};

struct LinearParams {
    Tensor w;  // [in, out]
    Tensor b;  // [out]
};

struct MlpParams {
    LinearParams lin1, lin2;  // relu between
};

struct MtdeLayerParams {
    MlpParams l1, l2, l3;
};

/// Learned task-membership state: R x K-hat logits and their row-softmax.
struct AttentionWeights {
    Tensor logits;
    Tensor alpha() const;  // rows sum to 1
    std::vector<int> argmax_per_row() const;  // ties broken toward smaller k
};

/// All learnable state. Positional embeddings are shared across layers; every
/// L inside a layer is a 2-layer MLP of width hidden_dim (used row-wise for
/// MLP layers, as the GIN update net for GNN layers).
struct ModelParams {
    ModelConfig config;
    int num_relations = 0;  // rows of attn_logits (1 for homogeneous models)
    std::vector<MtdeLayerParams> layers;
    Tensor pos_emb;     // [max_tasks, hidden_dim]
    MlpParams scorer;   // lin1 [2d, d], lin2 [d, 1]
    Tensor attn_logits;  // [num_relations, max_tasks]

    static ModelParams init(const ModelConfig& config, int num_relations, std::uint64_t seed);

    /// Stable name -> tensor view, the canonical parameter order for
    /// optimizers, checkpoints, and gradient maps.
    std::vector<std::pair<std::string, Tensor*>> named();
    std::vector<std::pair<std::string, const Tensor*>> named() const;
    std::vector<Tensor*> flat();

    /// FNV-1a over the raw bytes of every non-attention tensor; used to verify
    /// the adaptation freezing contract.
    std::uint64_t backbone_hash() const;
};

// ---- tape binding ----

struct LinearVars {
    Var w, b;
};
struct MlpVars {
    LinearVars lin1, lin2;
};
struct MtdeLayerVars {
    MlpVars l1, l2, l3;
};

struct ParamVars {
    std::vector<MtdeLayerVars> layers;
    Var pos_emb;
    MlpVars scorer;
    Var attn_logits;
    std::vector<Var> flat;  // aligned with ModelParams::named()
};

struct BindOptions {
    bool backbone_trainable = true;
    bool logits_trainable = true;
    const Tensor* logits_override = nullptr;  // adaptation swaps in fresh logits
};

ParamVars bind_params(Tape& tape, const ModelParams& params, const BindOptions& opts = {});

// ---- layers and forward ----

using AdjacencyList = std::vector<std::shared_ptr<const AdjacencyCsr>>;

/// One GIN pass (epsilon = 0, symmetrized neighborhoods, mean aggregation)
/// followed by the layer's 2-layer MLP.
Var gin_apply(Tape& tape, const MlpVars& net, Var x, const std::shared_ptr<const AdjacencyCsr>& adj);

/// Row-wise 2-layer MLP.
Var mlp_apply(Tape& tape, const MlpVars& net, Var x);

/// Soft MTDE layer: per relation r with i = argmax_k alpha[r, k],
///   out_r = L1(H_r)
///         + L2(pos[i] + sum_{r' != r} alpha[r', i] H_r' / norm)
///         + sum_{k != i} L3(pos[k] + sum_{r'' != r} alpha[r'', k] H_r'' / norm),
/// where norm is the sum of the participating alpha weights floored at 1e-12
/// (realizing mean aggregation so that one-hot alpha recovers the hard layer).
/// `adjacency` null means L1/L2/L3 act as row-wise MLPs; otherwise each L is a
/// GIN over relation r's subgraph.
std::vector<Var> soft_mtde_layer(Tape& tape, const std::vector<Var>& states, Var alpha,
                                 const MtdeLayerVars& layer, Var pos_emb, const AdjacencyList* adjacency);

/// Hard MTDE layer, written directly from its definition with explicit
/// set means over the task partition; the independent counterpart of the
/// soft layer for the one-hot consistency check.
std::vector<Var> hard_mtde_layer(Tape& tape, const std::vector<Var>& states, const TaskPartition& tasks,
                                 const MtdeLayerVars& layer, Var pos_emb, const AdjacencyList* adjacency);

struct ForwardResult {
    std::vector<Var> states;  // one [N, d] per model relation
    Var alpha;
    int num_nodes = 0;
    int graph_relations = 0;
    bool homogeneous = false;
};

/// Stacked network: all-ones initial states, num_gnn_layers GIN-based soft
/// MTDE layers, then num_mlp_layers MLP-based ones, relu between layers.
ForwardResult forward_graph(Tape& tape, const Multigraph& observable, const ParamVars& pv,
                            const ModelConfig& config);

/// Batched triplet scores in [0, 1]: sigmoid(MLP2(H_r[u] || H_r[v])).
/// Homogeneous models ignore the relation id (single merged state).
Var score_batch(Tape& tape, const ForwardResult& fwd, const MlpVars& scorer, std::span<const Triplet> triplets);

double score_triplet(Tape& tape, const ForwardResult& fwd, const MlpVars& scorer, const Triplet& t);

// ---- no-tape evaluation path ----

struct StateValues {
    std::vector<Tensor> states;
    int num_nodes = 0;
    int graph_relations = 0;
    bool homogeneous = false;
};

/// Runs forward once and keeps only the final values.
StateValues compute_states(const ModelParams& params, const Multigraph& observable);

std::vector<double> score_with_states(const StateValues& sv, const ModelParams& params,
                                      std::span<const Triplet> triplets);

using TripletScorer = std::function<std::vector<double>(std::span<const Triplet>)>;

/// Scorer closure over a fixed observable graph; forward runs once at
/// construction. Works for both MTDEA and homogeneous parameter sets.
TripletScorer make_scorer(const ModelParams& params, const Multigraph& observable);

}  // namespace mtdea
