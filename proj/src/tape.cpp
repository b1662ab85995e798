#include "mtdea/tape.hpp"

#include "mtdea/errors.hpp"

namespace mtdea {

Tensor& GradSink::buf(int id) {
    Tensor& g = grads_[static_cast<std::size_t>(id)];
    if (g.empty()) g = Tensor::zeros(tape_.nodes_[static_cast<std::size_t>(id)].value.shape());
    return g;
}

const Tensor& GradSink::val(int id) const { return tape_.nodes_[static_cast<std::size_t>(id)].value; }

void Tape::check(Var v) const {
    if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size())
        throw ContractViolation("Var does not belong to this tape");
}

Var Tape::leaf(Tensor value) {
    nodes_.push_back(Node{std::move(value), nullptr, true, true});
    int id = static_cast<int>(nodes_.size()) - 1;
    leaves_.push_back(id);
    return Var{id};
}

Var Tape::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), nullptr, false, false});
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn) {
    bool rg = false;
    for (Var in : inputs) {
        check(in);
        if (in.id >= static_cast<int>(nodes_.size()))
            throw ContractViolation("tape inputs must precede the node");
        rg = rg || nodes_[static_cast<std::size_t>(in.id)].requires_grad;
    }
    nodes_.push_back(Node{std::move(value), rg ? std::move(fn) : nullptr, rg, false});
    return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Tape::value(Var v) const {
    check(v);
    return nodes_[static_cast<std::size_t>(v.id)].value;
}

bool Tape::requires_grad(Var v) const {
    check(v);
    return nodes_[static_cast<std::size_t>(v.id)].requires_grad;
}

const Tensor& Tape::Gradients::at(Var leaf) const {
    for (const auto& [id, g] : by_leaf_)
        if (id == leaf.id) return g;
    throw ContractViolation("Gradients::at: not a leaf of the swept tape");
}

Tape::Gradients Tape::backward(Var scalar_output) {
    check(scalar_output);
    const Node& out = nodes_[static_cast<std::size_t>(scalar_output.id)];
    if (out.value.size() != 1) throw ContractViolation("backward: output must be scalar, got " + out.value.shape_str());

    std::vector<Tensor> grads(nodes_.size());
    grads[static_cast<std::size_t>(scalar_output.id)] = Tensor::scalar(1.0);
    GradSink sink(*this, grads);

    for (int i = scalar_output.id; i >= 0; --i) {
        Node& node = nodes_[static_cast<std::size_t>(i)];
        Tensor& g = grads[static_cast<std::size_t>(i)];
        if (g.empty() || !node.requires_grad) {
            g = Tensor();
            continue;
        }
        if (node.backward) node.backward(g, sink);
        if (!node.is_leaf) g = Tensor();  // release as soon as propagated
    }

    Gradients result;
    result.by_leaf_.reserve(leaves_.size());
    for (int id : leaves_) {
        Tensor& g = grads[static_cast<std::size_t>(id)];
        if (g.empty()) g = Tensor::zeros(nodes_[static_cast<std::size_t>(id)].value.shape());
        result.by_leaf_.emplace_back(id, std::move(g));
    }
    return result;
}

}  // namespace mtdea
