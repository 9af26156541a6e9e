#include "miner/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace miner::ag {

namespace {
double stable_softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
double sigmoid_of(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
} // namespace

Var Graph::make(std::vector<double> v, int rows, int cols, std::function<void(Graph&)> back) {
    Node n;
    n.rows = rows;
    n.cols = cols;
    if (grad_enabled_) {
        n.g.assign(v.size(), 0.0);
        n.back = std::move(back);
    }
    n.v = std::move(v);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Graph::constant(std::vector<double> v, int rows, int cols) {
    if (rows < 0) rows = static_cast<int>(v.size());
    MINER_CHECK(static_cast<std::size_t>(rows) * cols == v.size(),
                "constant: shape does not match data");
    return make(std::move(v), rows, cols, nullptr);
}

Var Graph::zeros(int rows, int cols) {
    return constant(std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0), rows, cols);
}

Var Graph::param(Tensor& t) {
    Tensor* tp = &t;
    std::vector<double> v = t.v;
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), t.rows, t.cols, [id, tp](Graph& g) {
        const auto& gn = g.nodes_[static_cast<std::size_t>(id)].g;
        for (std::size_t i = 0; i < gn.size(); ++i) tp->g[i] += gn[i];
    });
}

Var Graph::row(Tensor& t, int r) {
    MINER_CHECK(r >= 0 && r < t.rows, "row: index out of range for " + t.name);
    Tensor* tp = &t;
    const std::size_t off = static_cast<std::size_t>(r) * t.cols;
    std::vector<double> v(t.v.begin() + static_cast<std::ptrdiff_t>(off),
                          t.v.begin() + static_cast<std::ptrdiff_t>(off + t.cols));
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), t.cols, 1, [id, tp, off](Graph& g) {
        const auto& gn = g.nodes_[static_cast<std::size_t>(id)].g;
        for (std::size_t i = 0; i < gn.size(); ++i) tp->g[off + i] += gn[i];
    });
}

namespace {
void check_same_shape(const char* op, std::size_t a, std::size_t b) {
    MINER_CHECK(a == b, std::string(op) + ": operand sizes differ");
}
} // namespace

Var Graph::add(Var a, Var b) {
    const auto& na = node(a);
    const auto& nb = node(b);
    check_same_shape("add", na.v.size(), nb.v.size());
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] + nb.v[i];
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a, b](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& ga = g.node(a).g;
        auto& gb = g.node(b).g;
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i];
            gb[i] += go[i];
        }
    });
}

Var Graph::sub(Var a, Var b) {
    const auto& na = node(a);
    const auto& nb = node(b);
    check_same_shape("sub", na.v.size(), nb.v.size());
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] - nb.v[i];
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a, b](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& ga = g.node(a).g;
        auto& gb = g.node(b).g;
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i];
            gb[i] -= go[i];
        }
    });
}

Var Graph::mul(Var a, Var b) {
    const auto& na = node(a);
    const auto& nb = node(b);
    check_same_shape("mul", na.v.size(), nb.v.size());
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] * nb.v[i];
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a, b](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& an = g.node(a);
        auto& bn = g.node(b);
        for (std::size_t i = 0; i < go.size(); ++i) {
            an.g[i] += go[i] * bn.v[i];
            bn.g[i] += go[i] * an.v[i];
        }
    });
}

Var Graph::div(Var a, Var b) {
    const auto& na = node(a);
    const auto& nb = node(b);
    check_same_shape("div", na.v.size(), nb.v.size());
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] / nb.v[i];
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a, b](Graph& g) {
        const auto& out = g.nodes_[static_cast<std::size_t>(id)];
        auto& an = g.node(a);
        auto& bn = g.node(b);
        for (std::size_t i = 0; i < out.g.size(); ++i) {
            an.g[i] += out.g[i] / bn.v[i];
            bn.g[i] -= out.g[i] * out.v[i] / bn.v[i];
        }
    });
}

Var Graph::neg(Var a) { return scale(a, -1.0); }

Var Graph::scale(Var a, double c) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] * c;
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a, c](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& ga = g.node(a).g;
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * c;
    });
}

Var Graph::add_const(Var a, double c) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] + c;
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& ga = g.node(a).g;
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    });
}

Var Graph::scale_by(Var a, Var s) {
    const auto& na = node(a);
    MINER_CHECK(node(s).v.size() == 1, "scale_by: scale must be scalar");
    const double sv = node(s).v[0];
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] * sv;
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a, s](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& an = g.node(a);
        auto& sn = g.node(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < go.size(); ++i) {
            an.g[i] += go[i] * sn.v[0];
            acc += go[i] * an.v[i];
        }
        sn.g[0] += acc;
    });
}

Var Graph::sub_scalar(Var a, Var s) {
    const auto& na = node(a);
    MINER_CHECK(node(s).v.size() == 1, "sub_scalar: subtrahend must be scalar");
    const double sv = node(s).v[0];
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] - sv;
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a, s](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& ga = g.node(a).g;
        auto& sn = g.node(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i];
            acc += go[i];
        }
        sn.g[0] -= acc;
    });
}

Var Graph::tanh(Var a) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(na.v[i]);
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a](Graph& g) {
        const auto& out = g.nodes_[static_cast<std::size_t>(id)];
        auto& ga = g.node(a).g;
        for (std::size_t i = 0; i < out.g.size(); ++i) {
            ga[i] += out.g[i] * (1.0 - out.v[i] * out.v[i]);
        }
    });
}

Var Graph::sigmoid(Var a) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = sigmoid_of(na.v[i]);
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a](Graph& g) {
        const auto& out = g.nodes_[static_cast<std::size_t>(id)];
        auto& ga = g.node(a).g;
        for (std::size_t i = 0; i < out.g.size(); ++i) {
            ga[i] += out.g[i] * out.v[i] * (1.0 - out.v[i]);
        }
    });
}

Var Graph::softplus(Var a) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = stable_softplus(na.v[i]);
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& an = g.node(a);
        for (std::size_t i = 0; i < go.size(); ++i) {
            an.g[i] += go[i] * sigmoid_of(an.v[i]);
        }
    });
}

Var Graph::exp(Var a) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(na.v[i]);
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a](Graph& g) {
        const auto& out = g.nodes_[static_cast<std::size_t>(id)];
        auto& ga = g.node(a).g;
        for (std::size_t i = 0; i < out.g.size(); ++i) ga[i] += out.g[i] * out.v[i];
    });
}

Var Graph::log(Var a) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(na.v[i]);
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& an = g.node(a);
        for (std::size_t i = 0; i < go.size(); ++i) an.g[i] += go[i] / an.v[i];
    });
}

Var Graph::square(Var a) {
    const auto& na = node(a);
    std::vector<double> v(na.v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = na.v[i] * na.v[i];
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), na.rows, na.cols, [id, a](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& an = g.node(a);
        for (std::size_t i = 0; i < go.size(); ++i) an.g[i] += go[i] * 2.0 * an.v[i];
    });
}

Var Graph::matvec(Var w, Var x) {
    const auto& nw = node(w);
    const auto& nx = node(x);
    MINER_CHECK(nx.cols == 1 && nw.cols == nx.rows, "matvec: shape mismatch");
    const int r = nw.rows, c = nw.cols;
    std::vector<double> v(static_cast<std::size_t>(r), 0.0);
    for (int i = 0; i < r; ++i) {
        const double* wrow = nw.v.data() + static_cast<std::size_t>(i) * c;
        double acc = 0.0;
        for (int j = 0; j < c; ++j) acc += wrow[j] * nx.v[static_cast<std::size_t>(j)];
        v[static_cast<std::size_t>(i)] = acc;
    }
    const int id = static_cast<int>(nodes_.size());
    return make(std::move(v), r, 1, [id, w, x, r, c](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        auto& wn = g.node(w);
        auto& xn = g.node(x);
        for (int i = 0; i < r; ++i) {
            const double gi = go[static_cast<std::size_t>(i)];
            if (gi == 0.0) continue;
            double* gw = wn.g.data() + static_cast<std::size_t>(i) * c;
            const double* wrow = wn.v.data() + static_cast<std::size_t>(i) * c;
            for (int j = 0; j < c; ++j) {
                gw[j] += gi * xn.v[static_cast<std::size_t>(j)];
                xn.g[static_cast<std::size_t>(j)] += gi * wrow[j];
            }
        }
    });
}

Var Graph::concat(const std::vector<Var>& parts) {
    MINER_CHECK(!parts.empty(), "concat: no parts");
    std::vector<double> v;
    for (const Var p : parts) {
        const auto& np = node(p);
        MINER_CHECK(np.cols == 1, "concat: parts must be column vectors");
        v.insert(v.end(), np.v.begin(), np.v.end());
    }
    const int total = static_cast<int>(v.size());
    const int id = static_cast<int>(nodes_.size());
    std::vector<Var> ps = parts;
    return make(std::move(v), total, 1, [id, ps](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        std::size_t off = 0;
        for (const Var p : ps) {
            auto& gp = g.node(p).g;
            for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += go[off + i];
            off += gp.size();
        }
    });
}

Var Graph::stack(const std::vector<Var>& scalars) {
    MINER_CHECK(!scalars.empty(), "stack: no parts");
    std::vector<double> v;
    v.reserve(scalars.size());
    for (const Var s : scalars) {
        MINER_CHECK(node(s).v.size() == 1, "stack: parts must be scalars");
        v.push_back(node(s).v[0]);
    }
    const int id = static_cast<int>(nodes_.size());
    std::vector<Var> ss = scalars;
    return make(std::move(v), static_cast<int>(ss.size()), 1, [id, ss](Graph& g) {
        const auto& go = g.nodes_[static_cast<std::size_t>(id)].g;
        for (std::size_t i = 0; i < ss.size(); ++i) g.node(ss[i]).g[0] += go[i];
    });
}

Var Graph::pick(Var a, int i) {
    const auto& na = node(a);
    MINER_CHECK(i >= 0 && static_cast<std::size_t>(i) < na.v.size(), "pick: index out of range");
    const int id = static_cast<int>(nodes_.size());
    return make({na.v[static_cast<std::size_t>(i)]}, 1, 1, [id, a, i](Graph& g) {
        g.node(a).g[static_cast<std::size_t>(i)] += g.nodes_[static_cast<std::size_t>(id)].g[0];
    });
}

Var Graph::sum(Var a) {
    const auto& na = node(a);
    double acc = 0.0;
    for (const double x : na.v) acc += x;
    const int id = static_cast<int>(nodes_.size());
    return make({acc}, 1, 1, [id, a](Graph& g) {
        const double go = g.nodes_[static_cast<std::size_t>(id)].g[0];
        auto& ga = g.node(a).g;
        for (auto& x : ga) x += go;
    });
}

Var Graph::mean(Var a) {
    const auto& na = node(a);
    MINER_CHECK(!na.v.empty(), "mean: empty operand");
    return scale(sum(a), 1.0 / static_cast<double>(na.v.size()));
}

Var Graph::dot(Var a, Var b) {
    const auto& na = node(a);
    const auto& nb = node(b);
    check_same_shape("dot", na.v.size(), nb.v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < na.v.size(); ++i) acc += na.v[i] * nb.v[i];
    const int id = static_cast<int>(nodes_.size());
    return make({acc}, 1, 1, [id, a, b](Graph& g) {
        const double go = g.nodes_[static_cast<std::size_t>(id)].g[0];
        auto& an = g.node(a);
        auto& bn = g.node(b);
        for (std::size_t i = 0; i < an.v.size(); ++i) {
            an.g[i] += go * bn.v[i];
            bn.g[i] += go * an.v[i];
        }
    });
}

Var Graph::logsumexp(Var a) {
    const auto& na = node(a);
    MINER_CHECK(!na.v.empty(), "logsumexp: empty operand");
    const double m = *std::max_element(na.v.begin(), na.v.end());
    double acc = 0.0;
    for (const double x : na.v) acc += std::exp(x - m);
    const double lse = m + std::log(acc);
    const int id = static_cast<int>(nodes_.size());
    return make({lse}, 1, 1, [id, a](Graph& g) {
        const auto& out = g.nodes_[static_cast<std::size_t>(id)];
        const double go = out.g[0];
        const double lse_v = out.v[0];
        auto& an = g.node(a);
        for (std::size_t i = 0; i < an.v.size(); ++i) {
            an.g[i] += go * std::exp(an.v[i] - lse_v);
        }
    });
}

double Graph::scalar_val(Var v) const {
    const auto& n = node(v);
    MINER_CHECK(n.v.size() == 1, "scalar_val: node is not scalar");
    return n.v[0];
}

const std::vector<double>& Graph::grad(Var v) const {
    MINER_CHECK(grad_enabled_, "grad: graph built with grad_enabled=false");
    return node(v).g;
}

void Graph::backward(Var loss) {
    MINER_CHECK(grad_enabled_, "backward: graph built with grad_enabled=false");
    MINER_CHECK(!backward_done_, "backward: already called on this graph");
    backward_done_ = true;
    auto& ln = node(loss);
    MINER_CHECK(ln.v.size() == 1, "backward: loss must be scalar");
    ln.g[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].back) nodes_[i].back(*this);
    }
}

Var ParamCache::operator()(const std::string& name) {
    const auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    const Var v = g_.param(params_.get(name));
    cache_.emplace(name, v);
    return v;
}

} // namespace miner::ag
