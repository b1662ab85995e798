#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mtdea/tape.hpp"

namespace mtdea {

/// Symmetrized adjacency in CSR form: each directed edge (u, v) contributes v
/// to u's list and u to v's list, so a node's neighborhood is the multiset of
/// endpoints of its incident edges.
struct AdjacencyCsr {
    int num_nodes = 0;
    std::vector<int> offsets;    // size num_nodes + 1
    std::vector<int> neighbors;  // size 2 * num_edges

    static AdjacencyCsr from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges);
};

// Raw kernels shared by tape ops and the no-tape scoring path; keeping a single
// accumulation order makes tape and plain evaluations bit-equal.
void matmul_nn(const Tensor& a, const Tensor& b, Tensor& out);           // a[n,k] * b[k,m]
void matmul_nt(const Tensor& a, const Tensor& b, Tensor& out);           // a[n,k] * b[m,k]^T
void matmul_tn(const Tensor& a, const Tensor& b, Tensor& out);           // a[k,n]^T * b[k,m]
Tensor linear_forward(const Tensor& x, const Tensor& w, const Tensor& b);  // x*w + row-broadcast b
double sigmoid_scalar(double x);
double digamma(double x);

namespace ops {

Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double c);
Var add_const(Tape& t, Var a, double c);
Var rsub_const(Tape& t, Var a, double c);  // c - a

Var matmul(Tape& t, Var a, Var b);
Var linear(Tape& t, Var x, Var w, Var b);  // x[n,i], w[i,o], b[o]

Var relu(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var log(Tape& t, Var a);    // domain: strictly positive
Var exp(Tape& t, Var a);
Var clamp(Tape& t, Var a, double lo, double hi);
Var lgamma(Tape& t, Var a);  // domain: strictly positive
Var neg_xlogx(Tape& t, Var a);  // -x*log(x) elementwise, 0 at x == 0

Var row_softmax(Tape& t, Var a);

Var sum_all(Tape& t, Var a);    // -> [1]
Var sum_axis0(Tape& t, Var a);  // [n,m] -> [m]
Var sum_axis1(Tape& t, Var a);  // [n,m] -> [n]
Var mean_axis0(Tape& t, Var a);
Var mean_axis1(Tape& t, Var a);

Var concat_rows(Tape& t, std::span<const Var> parts);  // along axis 0
Var concat_cols(Tape& t, Var a, Var b);                // along axis 1
Var broadcast_row(Tape& t, Var row, int n);            // [d] or [1,d] -> [n,d]
Var gather_rows(Tape& t, Var a, std::vector<int> idx);
Var reshape(Tape& t, Var a, std::vector<int> shape);

/// Per node v: mean of rows over v's neighborhood; zero row when isolated.
/// The adjacency must outlive the tape.
Var neighbor_mean(Tape& t, Var a, std::shared_ptr<const AdjacencyCsr> adj);

/// sum_k w[k] * xs[k]; w is a 1-d tape var of length xs.size().
Var weighted_sum(Tape& t, std::span<const Var> xs, Var w);

Var col_slice(Tape& t, Var a, int j);   // [n,m] -> [n]
Var elem2(Tape& t, Var a, int i, int j);  // [n,m] -> [1]
Var elem1(Tape& t, Var a, int i);         // [n] -> [1]

/// s - a*x with scalar tape var a.
Var sub_scaled(Tape& t, Var s, Var x, Var a);

/// x / max(n, floor) with scalar tape var n; gradient w.r.t. n is zero when
/// the floor is active.
Var div_floored(Tape& t, Var x, Var n, double floor);

}  // namespace ops

}  // namespace mtdea
