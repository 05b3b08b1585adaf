#pragma once
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vil2c::ad {

// Parameter / data container. Gradients accumulate across backward calls
// until zero_grad().
struct Tensor {
    std::vector<int> shape;
    std::vector<double> values;
    std::vector<double> grad;

    static Tensor zeros(std::vector<int> shape_) {
        Tensor t;
        t.shape = std::move(shape_);
        int n = 1;
        for (int d : t.shape) n *= d;
        t.values.assign(n, 0.0);
        t.grad.assign(n, 0.0);
        return t;
    }
    int size() const { return (int)values.size(); }
    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
    double& at(int r, int c) { return values[r * shape[1] + c]; }
    double at(int r, int c) const { return values[r * shape[1] + c]; }
};

class Graph;

// Handle into a Graph node; caches the forward value.
struct Var {
    Graph* g = nullptr;
    int i = -1;
    double v = 0.0;
    double val() const { return v; }
};

// Tape of scalar nodes with at most two parents each. Local partials are
// known at forward time, so backward is a single reverse sweep.
class Graph {
public:
    struct Node {
        double grad;
        int p0, p1;
        double w0, w1;
    };

    Var constant(double v) { return push(v, -1, 0.0, -1, 0.0); }

    // Leaf bound to a tensor: after backward(), node gradients are
    // accumulated into the tensor's grad array.
    std::vector<Var> bind(Tensor& t) {
        std::vector<Var> out(t.size());
        int start = (int)nodes_.size();
        for (int k = 0; k < t.size(); ++k) out[k] = push(t.values[k], -1, 0.0, -1, 0.0);
        hooks_.push_back({start, &t});
        return out;
    }

    Var unary(double v, Var a, double wa) { return push(v, a.i, wa, -1, 0.0); }
    Var binary(double v, Var a, double wa, Var b, double wb) {
        return push(v, a.i, wa, b.i, wb);
    }

    void backward(Var loss) {
        if (loss.g != this || loss.i < 0 || loss.i >= (int)nodes_.size())
            throw std::logic_error("backward: loss not on this graph");
        for (auto& n : nodes_) n.grad = 0.0;
        nodes_[loss.i].grad = 1.0;
        for (int i = loss.i; i >= 0; --i) {
            const Node& n = nodes_[i];
            if (n.grad == 0.0) continue;
            if (n.p0 >= 0) nodes_[n.p0].grad += n.w0 * n.grad;
            if (n.p1 >= 0) nodes_[n.p1].grad += n.w1 * n.grad;
        }
        for (const Hook& h : hooks_)
            for (int k = 0; k < h.tensor->size(); ++k)
                h.tensor->grad[k] += nodes_[h.start + k].grad;
    }

    double grad_of(Var x) const { return nodes_[x.i].grad; }

    void clear() {
        nodes_.clear();
        hooks_.clear();
    }
    size_t size() const { return nodes_.size(); }

private:
    struct Hook {
        int start;
        Tensor* tensor;
    };

    Var push(double v, int p0, double w0, int p1, double w1) {
        nodes_.push_back({0.0, p0, p1, w0, w1});
        return Var{this, (int)nodes_.size() - 1, v};
    }

    std::vector<Node> nodes_;
    std::vector<Hook> hooks_;
};

inline Var operator+(Var a, Var b) { return a.g->binary(a.v + b.v, a, 1.0, b, 1.0); }
inline Var operator-(Var a, Var b) { return a.g->binary(a.v - b.v, a, 1.0, b, -1.0); }
inline Var operator*(Var a, Var b) { return a.g->binary(a.v * b.v, a, b.v, b, a.v); }
inline Var operator/(Var a, Var b) {
    return a.g->binary(a.v / b.v, a, 1.0 / b.v, b, -a.v / (b.v * b.v));
}
inline Var operator+(Var a, double c) { return a.g->unary(a.v + c, a, 1.0); }
inline Var operator+(double c, Var a) { return a + c; }
inline Var operator-(Var a, double c) { return a.g->unary(a.v - c, a, 1.0); }
inline Var operator-(double c, Var a) { return a.g->unary(c - a.v, a, -1.0); }
inline Var operator*(Var a, double c) { return a.g->unary(a.v * c, a, c); }
inline Var operator*(double c, Var a) { return a * c; }
inline Var operator/(Var a, double c) { return a * (1.0 / c); }
inline Var operator/(double c, Var a) {
    return a.g->unary(c / a.v, a, -c / (a.v * a.v));
}
inline Var operator-(Var a) { return a * -1.0; }

inline Var log(Var a) { return a.g->unary(std::log(a.v), a, 1.0 / a.v); }
inline Var log2(Var a) {
    constexpr double inv_ln2 = 1.4426950408889634;
    return a.g->unary(std::log2(a.v), a, inv_ln2 / a.v);
}
inline Var exp(Var a) {
    double e = std::exp(a.v);
    return a.g->unary(e, a, e);
}
inline Var tanh(Var a) {
    double t = std::tanh(a.v);
    return a.g->unary(t, a, 1.0 - t * t);
}
inline Var relu(Var a) { return a.g->unary(a.v > 0 ? a.v : 0.0, a, a.v > 0 ? 1.0 : 0.0); }
inline Var sqrt(Var a) {
    double s = std::sqrt(a.v);
    return a.g->unary(s, a, 0.5 / s);
}

// Pairwise summation keeps reductions order-stable under permutation of
// equal-magnitude inputs.
inline Var sum_pairwise(std::span<const Var> xs) {
    if (xs.empty()) throw std::invalid_argument("sum_pairwise: empty");
    if (xs.size() == 1) return xs[0];
    std::vector<Var> level(xs.begin(), xs.end());
    while (level.size() > 1) {
        std::vector<Var> next;
        next.reserve((level.size() + 1) / 2);
        for (size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] + level[i + 1]);
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
    }
    return level[0];
}

inline std::vector<Var> softmax(std::span<const Var> logits) {
    if (logits.empty()) throw std::invalid_argument("softmax: empty");
    double m = logits[0].v;
    for (const Var& x : logits) m = std::max(m, x.v);
    std::vector<Var> e;
    e.reserve(logits.size());
    for (const Var& x : logits) e.push_back(exp(x - m));
    Var s = sum_pairwise(e);
    std::vector<Var> out;
    out.reserve(e.size());
    for (Var& x : e) out.push_back(x / s);
    return out;
}

inline std::vector<double> values_of(std::span<const Var> xs) {
    std::vector<double> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = xs[i].v;
    return out;
}

}  // namespace vil2c::ad
