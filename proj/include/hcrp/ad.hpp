#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace hcrp::ad {

// Reverse-mode tape over scalars. Every operation records its value and the
// local partials w.r.t. at most two inputs; gradient() replays the tape
// backwards. Leaves created first (parameters) end up at indices 0..P-1, so
// the adjoint vector doubles as the flat parameter gradient.
class Tape {
public:
    struct Node {
        double val;
        double pa, pb;
        std::int32_t a, b;
    };

    std::int32_t leaf(double v) { return push(v, 0.0, 0.0, -1, -1); }

    std::int32_t push(double val, double pa, double pb, std::int32_t a, std::int32_t b) {
        nodes_.push_back({val, pa, pb, a, b});
        return static_cast<std::int32_t>(nodes_.size()) - 1;
    }

    double val(std::int32_t i) const { return nodes_[i].val; }
    std::size_t size() const { return nodes_.size(); }

    void clear() { nodes_.clear(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

    // Adjoints of every node w.r.t. the output node.
    std::vector<double> gradient(std::int32_t output) const {
        std::vector<double> adj(nodes_.size(), 0.0);
        adj[output] = 1.0;
        for (std::int32_t i = static_cast<std::int32_t>(nodes_.size()) - 1; i >= 0; --i) {
            const double g = adj[i];
            if (g == 0.0) continue;
            const Node& n = nodes_[i];
            if (n.a >= 0) adj[n.a] += n.pa * g;
            if (n.b >= 0) adj[n.b] += n.pb * g;
        }
        return adj;
    }

private:
    std::vector<Node> nodes_;
};

struct Var {
    Tape* tape = nullptr;
    std::int32_t idx = -1;
    double value() const { return tape->val(idx); }
};

inline double value(double x) { return x; }
inline double value(const Var& v) { return v.value(); }

inline Var make_var(Tape& t, double v) { return {&t, t.leaf(v)}; }
// Constant: a leaf whose adjoint is discarded.
inline Var constant(Tape& t, double v) { return {&t, t.leaf(v)}; }

inline Var operator+(Var x, Var y) { return {x.tape, x.tape->push(x.value() + y.value(), 1.0, 1.0, x.idx, y.idx)}; }
inline Var operator+(Var x, double c) { return {x.tape, x.tape->push(x.value() + c, 1.0, 0.0, x.idx, -1)}; }
inline Var operator+(double c, Var x) { return x + c; }

inline Var operator-(Var x, Var y) { return {x.tape, x.tape->push(x.value() - y.value(), 1.0, -1.0, x.idx, y.idx)}; }
inline Var operator-(Var x, double c) { return {x.tape, x.tape->push(x.value() - c, 1.0, 0.0, x.idx, -1)}; }
inline Var operator-(double c, Var x) { return {x.tape, x.tape->push(c - x.value(), -1.0, 0.0, x.idx, -1)}; }
inline Var operator-(Var x) { return {x.tape, x.tape->push(-x.value(), -1.0, 0.0, x.idx, -1)}; }

inline Var operator*(Var x, Var y) { return {x.tape, x.tape->push(x.value() * y.value(), y.value(), x.value(), x.idx, y.idx)}; }
inline Var operator*(Var x, double c) { return {x.tape, x.tape->push(x.value() * c, c, 0.0, x.idx, -1)}; }
inline Var operator*(double c, Var x) { return x * c; }

inline Var operator/(Var x, Var y) {
    const double yv = y.value();
    return {x.tape, x.tape->push(x.value() / yv, 1.0 / yv, -x.value() / (yv * yv), x.idx, y.idx)};
}
inline Var operator/(Var x, double c) { return x * (1.0 / c); }
inline Var operator/(double c, Var x) {
    const double xv = x.value();
    return {x.tape, x.tape->push(c / xv, -c / (xv * xv), 0.0, x.idx, -1)};
}

inline Var& operator+=(Var& x, Var y) { x = x + y; return x; }
inline Var& operator-=(Var& x, Var y) { x = x - y; return x; }
inline Var& operator*=(Var& x, Var y) { x = x * y; return x; }

inline Var exp(Var x) {
    const double e = std::exp(x.value());
    return {x.tape, x.tape->push(e, e, 0.0, x.idx, -1)};
}

inline Var log(Var x) {
    return {x.tape, x.tape->push(std::log(x.value()), 1.0 / x.value(), 0.0, x.idx, -1)};
}

inline Var sqrt(Var x) {
    const double s = std::sqrt(x.value());
    return {x.tape, x.tape->push(s, 0.5 / s, 0.0, x.idx, -1)};
}

// x^p for constant exponent.
inline Var pow(Var x, double p) {
    const double xv = x.value();
    return {x.tape, x.tape->push(std::pow(xv, p), p * std::pow(xv, p - 1.0), 0.0, x.idx, -1)};
}

// max(x, c) with the constant branch detached.
inline Var clamp_min(Var x, double c) {
    if (x.value() >= c) return x;
    return {x.tape, x.tape->push(c, 0.0, 0.0, x.idx, -1)};
}
inline double clamp_min(double x, double c) { return x >= c ? x : c; }

}  // namespace hcrp::ad
