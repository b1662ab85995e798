#pragma once

#include <deque>
#include <functional>
#include <vector>

#include "mtdea/tensor.hpp"

namespace mtdea {

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Gradient accumulator handed to backward rules. buf(i) is the gradient
/// buffer of node i, zero-initialized to the node's value shape on first use.
class GradSink {
public:
    GradSink(const Tape& tape, std::vector<Tensor>& grads) : tape_(tape), grads_(grads) {}
    Tensor& buf(int id);
    const Tensor& val(int id) const;

private:
    const Tape& tape_;
    std::vector<Tensor>& grads_;
};

/// Reverse-mode autodiff record over dense tensors. Nodes are appended in
/// execution order, so the tape is topologically sorted by construction:
/// every node's inputs precede it. Single-writer; one tape per forward pass.
class Tape {
public:
    using BackwardFn = std::function<void(const Tensor& gout, GradSink& sink)>;

    /// Differentiable parameter. Gradients are reported for every leaf.
    Var leaf(Tensor value);

    /// Non-differentiable input (graph structure, constants).
    Var constant(Tensor value);

    /// Record an op result. `fn` receives the output gradient and accumulates
    /// into the inputs' buffers; it may be null when no input is differentiable.
    Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn);

    /// Reference stays valid for the tape's lifetime (node storage is a deque).
    const Tensor& value(Var v) const;
    bool requires_grad(Var v) const;
    std::size_t num_nodes() const { return nodes_.size(); }
    const std::vector<int>& leaf_ids() const { return leaves_; }

    class Gradients {
    public:
        /// Gradient of the swept output w.r.t. a leaf; zeros if the leaf was
        /// never touched by the output.
        const Tensor& at(Var leaf) const;

    private:
        friend class Tape;
        std::vector<std::pair<int, Tensor>> by_leaf_;
    };

    /// Reverse sweep from a scalar ([1]-shaped) output node. Intermediate
    /// gradient buffers are released as soon as they have been propagated.
    Gradients backward(Var scalar_output);

private:
    friend class GradSink;
    struct Node {
        Tensor value;
        BackwardFn backward;
        bool requires_grad = false;
        bool is_leaf = false;
    };
    std::deque<Node> nodes_;
    std::vector<int> leaves_;

    void check(Var v) const;
};

}  // namespace mtdea
