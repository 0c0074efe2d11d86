#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "hcrp/ad.hpp"

namespace hcrp {

// Dense row-major matrix over a scalar type (double or ad::Var).
template <class S>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<S> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
    Mat(int r, int c, S fill) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    S& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    const S& at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    std::span<S> row(int r) { return {a.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
    std::span<const S> row(int r) const { return {a.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
};

template <class S>
S dot(std::span<const S> x, std::span<const S> y) {
    S acc = x[0] * y[0];
    for (std::size_t i = 1; i < x.size(); ++i) acc = acc + x[i] * y[i];
    return acc;
}

template <class S>
S dot(const std::vector<S>& x, const std::vector<S>& y) {
    return dot(std::span<const S>(x), std::span<const S>(y));
}

template <class S>
S sum(std::span<const S> x) {
    S acc = x[0];
    for (std::size_t i = 1; i < x.size(); ++i) acc = acc + x[i];
    return acc;
}

// Numerically stable softmax; the row max is subtracted as a detached
// constant, which leaves both the values and the gradients unchanged.
template <class S>
std::vector<S> softmax(const std::vector<S>& logits) {
    using ad::value;
    double m = value(logits[0]);
    for (const S& x : logits) m = std::max(m, value(x));
    std::vector<S> e;
    e.reserve(logits.size());
    using std::exp;
    for (const S& x : logits) e.push_back(exp(x - m));
    S z = sum(std::span<const S>(e));
    for (S& v : e) v = v / z;
    return e;
}

template <class S>
std::vector<S> concat(std::span<const S> x, std::span<const S> y) {
    std::vector<S> out;
    out.reserve(x.size() + y.size());
    out.insert(out.end(), x.begin(), x.end());
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

template <class S>
std::vector<S> concat(const std::vector<S>& x, const std::vector<S>& y) {
    return concat(std::span<const S>(x), std::span<const S>(y));
}

}  // namespace hcrp
