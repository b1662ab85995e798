#include "mtdea/ops.hpp"

#include <algorithm>
#include <cmath>

#include "mtdea/errors.hpp"

namespace mtdea {

AdjacencyCsr AdjacencyCsr::from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges) {
    AdjacencyCsr adj;
    adj.num_nodes = num_nodes;
    std::vector<int> deg(static_cast<std::size_t>(num_nodes), 0);
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes)
            throw ContractViolation("AdjacencyCsr: edge endpoint out of range");
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    adj.offsets.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
    for (int v = 0; v < num_nodes; ++v) adj.offsets[static_cast<std::size_t>(v) + 1] = adj.offsets[static_cast<std::size_t>(v)] + deg[static_cast<std::size_t>(v)];
    adj.neighbors.resize(static_cast<std::size_t>(adj.offsets.back()));
    std::vector<int> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const auto& [u, v] : edges) {
        adj.neighbors[static_cast<std::size_t>(fill[static_cast<std::size_t>(u)]++)] = v;
        adj.neighbors[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = u;
    }
    return adj;
}

void matmul_nn(const Tensor& a, const Tensor& b, Tensor& out) {
    const int n = a.rows(), k = a.cols(), m = b.cols();
    if (b.rows() != k) throw ContractViolation("matmul: inner dimensions differ: " + a.shape_str() + " * " + b.shape_str());
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (int i = 0; i < n; ++i) {
        double* orow = po + static_cast<std::size_t>(i) * m;
        const double* arow = pa + static_cast<std::size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            const double* brow = pb + static_cast<std::size_t>(kk) * m;
            for (int j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

void matmul_nt(const Tensor& a, const Tensor& b, Tensor& out) {
    const int n = a.rows(), k = a.cols(), m = b.rows();
    if (b.cols() != k) throw ContractViolation("matmul_nt: inner dimensions differ");
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (int i = 0; i < n; ++i) {
        const double* arow = pa + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < m; ++j) {
            const double* brow = pb + static_cast<std::size_t>(j) * k;
            double acc = 0.0;
            for (int kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
            po[static_cast<std::size_t>(i) * m + j] += acc;
        }
    }
}

void matmul_tn(const Tensor& a, const Tensor& b, Tensor& out) {
    const int k = a.rows(), n = a.cols(), m = b.cols();
    if (b.rows() != k) throw ContractViolation("matmul_tn: inner dimensions differ");
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (int kk = 0; kk < k; ++kk) {
        const double* arow = pa + static_cast<std::size_t>(kk) * n;
        const double* brow = pb + static_cast<std::size_t>(kk) * m;
        for (int i = 0; i < n; ++i) {
            const double av = arow[i];
            double* orow = po + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

Tensor linear_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
    const int n = x.rows(), o = w.cols();
    if (x.cols() != w.rows()) throw ContractViolation("linear: feature dim mismatch");
    if (b.size() != o) throw ContractViolation("linear: bias length mismatch");
    Tensor out({n, o});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < o; ++j) out.at(i, j) = b[j];
    matmul_nn(x, w, out);
    return out;
}

double sigmoid_scalar(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double r = 0.0;
    while (x < 6.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, u = inv * inv;
    double series = u * (1.0 / 12 - u * (1.0 / 120 - u * (1.0 / 252 - u * (1.0 / 240 - u * (1.0 / 132 - u * (691.0 / 32760))))));
    return r + std::log(x) - 0.5 * inv - series;
}

namespace ops {

namespace {

void check_same_shape(const Tape& t, Var a, Var b, const char* op) {
    if (!t.value(a).same_shape(t.value(b)))
        throw ContractViolation(std::string(op) + ": shape mismatch " + t.value(a).shape_str() + " vs " + t.value(b).shape_str());
}

void axpy(Tensor& dst, double c, const Tensor& src) {
    double* pd = dst.data();
    const double* ps = src.data();
    const std::int64_t n = dst.size();
    for (std::int64_t i = 0; i < n; ++i) pd[i] += c * ps[i];
}

double dot_all(const Tensor& a, const Tensor& b) {
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    const std::int64_t n = a.size();
    for (std::int64_t i = 0; i < n; ++i) acc += pa[i] * pb[i];
    return acc;
}

}  // namespace

Var add(Tape& t, Var a, Var b) {
    check_same_shape(t, a, b, "add");
    Tensor out = t.value(a);
    axpy(out, 1.0, t.value(b));
    return t.record(std::move(out), {a, b}, [a, b](const Tensor& g, GradSink& s) {
        axpy(s.buf(a.id), 1.0, g);
        axpy(s.buf(b.id), 1.0, g);
    });
}

Var sub(Tape& t, Var a, Var b) {
    check_same_shape(t, a, b, "sub");
    Tensor out = t.value(a);
    axpy(out, -1.0, t.value(b));
    return t.record(std::move(out), {a, b}, [a, b](const Tensor& g, GradSink& s) {
        axpy(s.buf(a.id), 1.0, g);
        axpy(s.buf(b.id), -1.0, g);
    });
}

Var mul(Tape& t, Var a, Var b) {
    check_same_shape(t, a, b, "mul");
    Tensor out = t.value(a);
    {
        double* po = out.data();
        const double* pb = t.value(b).data();
        for (std::int64_t i = 0; i < out.size(); ++i) po[i] *= pb[i];
    }
    return t.record(std::move(out), {a, b}, [a, b](const Tensor& g, GradSink& s) {
        const Tensor& va = s.val(a.id);
        const Tensor& vb = s.val(b.id);
        Tensor& ga = s.buf(a.id);
        Tensor& gb = s.buf(b.id);
        for (std::int64_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] * vb[i];
            gb[i] += g[i] * va[i];
        }
    });
}

Var scale(Tape& t, Var a, double c) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= c;
    return t.record(std::move(out), {a}, [a, c](const Tensor& g, GradSink& s) { axpy(s.buf(a.id), c, g); });
}

Var add_const(Tape& t, Var a, double c) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] += c;
    return t.record(std::move(out), {a}, [a](const Tensor& g, GradSink& s) { axpy(s.buf(a.id), 1.0, g); });
}

Var rsub_const(Tape& t, Var a, double c) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = c - out[i];
    return t.record(std::move(out), {a}, [a](const Tensor& g, GradSink& s) { axpy(s.buf(a.id), -1.0, g); });
}

Var matmul(Tape& t, Var a, Var b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    Tensor out({va.rows(), vb.cols()});
    matmul_nn(va, vb, out);
    return t.record(std::move(out), {a, b}, [a, b](const Tensor& g, GradSink& s) {
        matmul_nt(g, s.val(b.id), s.buf(a.id));  // ga += g * b^T
        matmul_tn(s.val(a.id), g, s.buf(b.id));  // gb += a^T * g
    });
}

Var linear(Tape& t, Var x, Var w, Var b) {
    Tensor out = linear_forward(t.value(x), t.value(w), t.value(b));
    return t.record(std::move(out), {x, w, b}, [x, w, b](const Tensor& g, GradSink& s) {
        matmul_nt(g, s.val(w.id), s.buf(x.id));
        matmul_tn(s.val(x.id), g, s.buf(w.id));
        Tensor& gb = s.buf(b.id);
        const int n = g.rows(), o = g.cols();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < o; ++j) gb[j] += g.at(i, j);
    });
}

Var relu(Tape& t, Var a) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
    return t.record(std::move(out), {a}, [a](const Tensor& g, GradSink& s) {
        const Tensor& v = s.val(a.id);
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i)
            if (v[i] > 0.0) ga[i] += g[i];
    });
}

Var sigmoid(Tape& t, Var a) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = sigmoid_scalar(out[i]);
    Tensor saved = out;
    return t.record(std::move(out), {a}, [a, saved = std::move(saved)](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * saved[i] * (1.0 - saved[i]);
    });
}

Var log(Tape& t, Var a) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) throw DomainError("log: argument must be strictly positive");
        out[i] = std::log(out[i]);
    }
    return t.record(std::move(out), {a}, [a](const Tensor& g, GradSink& s) {
        const Tensor& v = s.val(a.id);
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] / v[i];
    });
}

Var exp(Tape& t, Var a) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
    Tensor saved = out;
    return t.record(std::move(out), {a}, [a, saved = std::move(saved)](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * saved[i];
    });
}

Var clamp(Tape& t, Var a, double lo, double hi) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::min(hi, std::max(lo, out[i]));
    return t.record(std::move(out), {a}, [a, lo, hi](const Tensor& g, GradSink& s) {
        const Tensor& v = s.val(a.id);
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i)
            if (v[i] > lo && v[i] < hi) ga[i] += g[i];
    });
}

Var lgamma(Tape& t, Var a) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) throw DomainError("lgamma: argument must be strictly positive");
        out[i] = std::lgamma(out[i]);
    }
    return t.record(std::move(out), {a}, [a](const Tensor& g, GradSink& s) {
        const Tensor& v = s.val(a.id);
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * digamma(v[i]);
    });
}

Var neg_xlogx(Tape& t, Var a) {
    Tensor out = t.value(a);
    for (std::int64_t i = 0; i < out.size(); ++i) {
        if (out[i] < 0.0) throw DomainError("neg_xlogx: argument must be nonnegative");
        out[i] = out[i] > 0.0 ? -out[i] * std::log(out[i]) : 0.0;
    }
    return t.record(std::move(out), {a}, [a](const Tensor& g, GradSink& s) {
        const Tensor& v = s.val(a.id);
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i)
            if (v[i] > 0.0) ga[i] += -g[i] * (std::log(v[i]) + 1.0);
    });
}

Var row_softmax(Tape& t, Var a) {
    const Tensor& v = t.value(a);
    const int n = v.rows(), m = v.cols();
    Tensor out({n, m});
    for (int i = 0; i < n; ++i) {
        double mx = v.at(i, 0);
        for (int j = 1; j < m; ++j) mx = std::max(mx, v.at(i, j));
        double z = 0.0;
        for (int j = 0; j < m; ++j) {
            out.at(i, j) = std::exp(v.at(i, j) - mx);
            z += out.at(i, j);
        }
        for (int j = 0; j < m; ++j) out.at(i, j) /= z;
    }
    Tensor saved = out;
    return t.record(std::move(out), {a}, [a, saved = std::move(saved), n, m](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (int i = 0; i < n; ++i) {
            double inner = 0.0;
            for (int j = 0; j < m; ++j) inner += g.at(i, j) * saved.at(i, j);
            for (int j = 0; j < m; ++j) ga.at(i, j) += saved.at(i, j) * (g.at(i, j) - inner);
        }
    });
}

Var sum_all(Tape& t, Var a) {
    const Tensor& v = t.value(a);
    double acc = 0.0;
    for (std::int64_t i = 0; i < v.size(); ++i) acc += v[i];
    return t.record(Tensor::scalar(acc), {a}, [a](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        const double gv = g[0];
        for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += gv;
    });
}

Var sum_axis0(Tape& t, Var a) {
    const Tensor& v = t.value(a);
    const int n = v.rows(), m = v.cols();
    Tensor out({m});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) out[j] += v.at(i, j);
    return t.record(std::move(out), {a}, [a, n, m](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) ga.at(i, j) += g[j];
    });
}

Var sum_axis1(Tape& t, Var a) {
    const Tensor& v = t.value(a);
    const int n = v.rows(), m = v.cols();
    Tensor out({n});
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += v.at(i, j);
        out[i] = acc;
    }
    return t.record(std::move(out), {a}, [a, n, m](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) ga.at(i, j) += g[i];
    });
}

Var mean_axis0(Tape& t, Var a) { return scale(t, sum_axis0(t, a), 1.0 / t.value(a).rows()); }

Var mean_axis1(Tape& t, Var a) { return scale(t, sum_axis1(t, a), 1.0 / t.value(a).cols()); }

Var concat_rows(Tape& t, std::span<const Var> parts) {
    if (parts.empty()) throw ContractViolation("concat_rows: no inputs");
    const int m = t.value(parts[0]).cols();
    int total = 0;
    for (Var p : parts) {
        if (t.value(p).cols() != m) throw ContractViolation("concat_rows: column mismatch");
        total += t.value(p).rows();
    }
    Tensor out({total, m});
    std::vector<Var> inputs(parts.begin(), parts.end());
    std::vector<int> starts;
    starts.reserve(parts.size());
    int row = 0;
    for (Var p : parts) {
        const Tensor& v = t.value(p);
        starts.push_back(row);
        std::copy(v.data(), v.data() + v.size(), out.data() + static_cast<std::size_t>(row) * m);
        row += v.rows();
    }
    return t.record(std::move(out), inputs, [inputs, starts, m](const Tensor& g, GradSink& s) {
        for (std::size_t p = 0; p < inputs.size(); ++p) {
            Tensor& gp = s.buf(inputs[p].id);
            const double* src = g.data() + static_cast<std::size_t>(starts[p]) * m;
            for (std::int64_t i = 0; i < gp.size(); ++i) gp[i] += src[i];
        }
    });
}

Var concat_cols(Tape& t, Var a, Var b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    if (va.rows() != vb.rows()) throw ContractViolation("concat_cols: row mismatch");
    const int n = va.rows(), ca = va.cols(), cb = vb.cols();
    Tensor out({n, ca + cb});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < ca; ++j) out.at(i, j) = va.at(i, j);
        for (int j = 0; j < cb; ++j) out.at(i, ca + j) = vb.at(i, j);
    }
    return t.record(std::move(out), {a, b}, [a, b, n, ca, cb](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        Tensor& gb = s.buf(b.id);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < ca; ++j) ga.at(i, j) += g.at(i, j);
            for (int j = 0; j < cb; ++j) gb.at(i, j) += g.at(i, ca + j);
        }
    });
}

Var broadcast_row(Tape& t, Var row, int n) {
    const Tensor& v = t.value(row);
    const int d = static_cast<int>(v.size());
    if (!(v.shape().size() == 1 || (v.shape().size() == 2 && v.rows() == 1)))
        throw ContractViolation("broadcast_row: input must be a single row");
    Tensor out({n, d});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) out.at(i, j) = v[j];
    return t.record(std::move(out), {row}, [row, n, d](const Tensor& g, GradSink& s) {
        Tensor& gr = s.buf(row.id);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) gr[j] += g.at(i, j);
    });
}

Var gather_rows(Tape& t, Var a, std::vector<int> idx) {
    const Tensor& v = t.value(a);
    const int n = v.rows(), m = v.cols();
    Tensor out({static_cast<int>(idx.size()), m});
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= n) throw ContractViolation("gather_rows: index out of range");
        std::copy(v.data() + static_cast<std::size_t>(idx[i]) * m, v.data() + (static_cast<std::size_t>(idx[i]) + 1) * m,
                  out.data() + i * static_cast<std::size_t>(m));
    }
    return t.record(std::move(out), {a}, [a, idx = std::move(idx), m](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            double* dst = ga.data() + static_cast<std::size_t>(idx[i]) * m;
            const double* src = g.data() + i * static_cast<std::size_t>(m);
            for (int j = 0; j < m; ++j) dst[j] += src[j];
        }
    });
}

Var reshape(Tape& t, Var a, std::vector<int> shape) {
    const Tensor& v = t.value(a);
    if (shape_numel(shape) != v.size()) throw ContractViolation("reshape: element count mismatch");
    Tensor out(std::move(shape), v.vec());
    return t.record(std::move(out), {a}, [a](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    });
}

Var neighbor_mean(Tape& t, Var a, std::shared_ptr<const AdjacencyCsr> adj) {
    const Tensor& v = t.value(a);
    const int n = v.rows(), d = v.cols();
    if (adj->num_nodes != n) throw ContractViolation("neighbor_mean: adjacency size mismatch");
    Tensor out({n, d});
    for (int node = 0; node < n; ++node) {
        const int lo = adj->offsets[static_cast<std::size_t>(node)], hi = adj->offsets[static_cast<std::size_t>(node) + 1];
        if (lo == hi) continue;  // isolated: zero row
        double* orow = out.data() + static_cast<std::size_t>(node) * d;
        for (int e = lo; e < hi; ++e) {
            const double* src = v.data() + static_cast<std::size_t>(adj->neighbors[static_cast<std::size_t>(e)]) * d;
            for (int j = 0; j < d; ++j) orow[j] += src[j];
        }
        const double inv = 1.0 / (hi - lo);
        for (int j = 0; j < d; ++j) orow[j] *= inv;
    }
    return t.record(std::move(out), {a}, [a, adj = std::move(adj), d](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (int node = 0; node < adj->num_nodes; ++node) {
            const int lo = adj->offsets[static_cast<std::size_t>(node)], hi = adj->offsets[static_cast<std::size_t>(node) + 1];
            if (lo == hi) continue;
            const double inv = 1.0 / (hi - lo);
            const double* grow = g.data() + static_cast<std::size_t>(node) * d;
            for (int e = lo; e < hi; ++e) {
                double* dst = ga.data() + static_cast<std::size_t>(adj->neighbors[static_cast<std::size_t>(e)]) * d;
                for (int j = 0; j < d; ++j) dst[j] += inv * grow[j];
            }
        }
    });
}

Var weighted_sum(Tape& t, std::span<const Var> xs, Var w) {
    if (xs.empty()) throw ContractViolation("weighted_sum: no inputs");
    const Tensor& vw = t.value(w);
    if (vw.size() != static_cast<std::int64_t>(xs.size())) throw ContractViolation("weighted_sum: weight length mismatch");
    const Tensor& v0 = t.value(xs[0]);
    Tensor out(v0.shape());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const Tensor& vk = t.value(xs[k]);
        if (!vk.same_shape(v0)) throw ContractViolation("weighted_sum: shape mismatch");
        axpy(out, vw[static_cast<std::int64_t>(k)], vk);
    }
    std::vector<Var> inputs(xs.begin(), xs.end());
    inputs.push_back(w);
    return t.record(std::move(out), inputs, [xs = std::vector<Var>(xs.begin(), xs.end()), w](const Tensor& g, GradSink& s) {
        const Tensor& vw = s.val(w.id);
        Tensor& gw = s.buf(w.id);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            axpy(s.buf(xs[k].id), vw[static_cast<std::int64_t>(k)], g);
            gw[static_cast<std::int64_t>(k)] += dot_all(s.val(xs[k].id), g);
        }
    });
}

Var col_slice(Tape& t, Var a, int j) {
    const Tensor& v = t.value(a);
    const int n = v.rows(), m = v.cols();
    if (j < 0 || j >= m) throw ContractViolation("col_slice: column out of range");
    Tensor out({n});
    for (int i = 0; i < n; ++i) out[i] = v.at(i, j);
    return t.record(std::move(out), {a}, [a, j, n](const Tensor& g, GradSink& s) {
        Tensor& ga = s.buf(a.id);
        for (int i = 0; i < n; ++i) ga.at(i, j) += g[i];
    });
}

Var elem2(Tape& t, Var a, int i, int j) {
    const Tensor& v = t.value(a);
    if (i < 0 || i >= v.rows() || j < 0 || j >= v.cols()) throw ContractViolation("elem2: index out of range");
    return t.record(Tensor::scalar(v.at(i, j)), {a},
                    [a, i, j](const Tensor& g, GradSink& s) { s.buf(a.id).at(i, j) += g[0]; });
}

Var elem1(Tape& t, Var a, int i) {
    const Tensor& v = t.value(a);
    if (v.shape().size() != 1 || i < 0 || i >= static_cast<int>(v.size()))
        throw ContractViolation("elem1: index out of range");
    return t.record(Tensor::scalar(v[i]), {a}, [a, i](const Tensor& g, GradSink& s) { s.buf(a.id)[i] += g[0]; });
}

Var sub_scaled(Tape& t, Var sv, Var x, Var a) {
    check_same_shape(t, sv, x, "sub_scaled");
    const double av = t.value(a).item();
    Tensor out = t.value(sv);
    axpy(out, -av, t.value(x));
    return t.record(std::move(out), {sv, x, a}, [sv, x, a](const Tensor& g, GradSink& s) {
        const double av = s.val(a.id).item();
        axpy(s.buf(sv.id), 1.0, g);
        axpy(s.buf(x.id), -av, g);
        s.buf(a.id)[0] += -dot_all(s.val(x.id), g);
    });
}

Var div_floored(Tape& t, Var x, Var n, double floor) {
    const double nv = t.value(n).item();
    const double den = std::max(nv, floor);
    Tensor out = t.value(x);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] /= den;
    return t.record(std::move(out), {x, n}, [x, n, floor](const Tensor& g, GradSink& s) {
        const double nv = s.val(n.id).item();
        const double den = std::max(nv, floor);
        axpy(s.buf(x.id), 1.0 / den, g);
        if (nv > floor) s.buf(n.id)[0] += -dot_all(s.val(x.id), g) / (nv * nv);
    });
}

}  // namespace ops

}  // namespace mtdea
