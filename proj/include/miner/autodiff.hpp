#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "miner/tensor.hpp"

namespace miner::ag {

// Handle into a Graph. Vars are only meaningful for the graph that made them.
struct Var {
    std::int32_t id = -1;
    bool valid() const { return id >= 0; }
};

// Tape-based reverse-mode autodiff over double vectors/matrices. A graph is
// built per forward pass and discarded (parameters live in ModelParams and
// receive gradient contributions during backward()). Construct with
// grad_enabled=false for inference-only passes; backward bookkeeping is then
// skipped entirely.
class Graph {
public:
    explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    // ----- leaves -----
    Var constant(std::vector<double> v, int rows = -1, int cols = 1);
    Var scalar(double x) { return constant({x}, 1, 1); }
    Var zeros(int rows, int cols = 1);
    // Whole tensor as a node; backward adds into t.g.
    Var param(Tensor& t);
    // Single row of a tensor as a column vector; backward scatters into t.g.
    Var row(Tensor& t, int r);

    // ----- elementwise -----
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);
    Var neg(Var a);
    Var scale(Var a, double c);
    Var add_const(Var a, double c);
    Var scale_by(Var a, Var s);   // a * s, s scalar node
    Var sub_scalar(Var a, Var s); // a - s, s scalar node (broadcast)
    Var tanh(Var a);
    Var sigmoid(Var a);
    Var softplus(Var a);
    Var exp(Var a);
    Var log(Var a);
    Var square(Var a);

    // ----- linear algebra / shape -----
    Var matvec(Var w, Var x); // (r x c) * (c x 1) -> (r x 1)
    Var concat(const std::vector<Var>& parts);
    Var stack(const std::vector<Var>& scalars); // scalars -> column vector
    Var pick(Var a, int i);                     // a[i] as scalar

    // ----- reductions -----
    Var sum(Var a);
    Var mean(Var a);
    Var dot(Var a, Var b);
    Var logsumexp(Var a);

    // ----- access -----
    const std::vector<double>& val(Var v) const { return node(v).v; }
    double scalar_val(Var v) const;
    const std::vector<double>& grad(Var v) const;
    int rows(Var v) const { return node(v).rows; }
    int cols(Var v) const { return node(v).cols; }
    std::size_t size() const { return nodes_.size(); }
    bool grad_enabled() const { return grad_enabled_; }

    // Reverse sweep from a scalar loss. May be called once per graph.
    void backward(Var loss);

private:
    struct Node {
        std::vector<double> v;
        std::vector<double> g;
        int rows = 0;
        int cols = 0;
        std::function<void(Graph&)> back; // empty for leaves/constants
    };

    Node& node(Var v) {
        MINER_CHECK(v.id >= 0 && static_cast<std::size_t>(v.id) < nodes_.size(),
                    "autodiff: invalid Var");
        return nodes_[static_cast<std::size_t>(v.id)];
    }
    const Node& node(Var v) const {
        MINER_CHECK(v.id >= 0 && static_cast<std::size_t>(v.id) < nodes_.size(),
                    "autodiff: invalid Var");
        return nodes_[static_cast<std::size_t>(v.id)];
    }

    Var make(std::vector<double> v, int rows, int cols, std::function<void(Graph&)> back);
    Var unary(Var a, const std::function<double(double)>& f,
              const std::function<double(double, double)>& dfdx_times); // helper

    std::vector<Node> nodes_;
    bool grad_enabled_;
    bool backward_done_ = false;
};

// Per-graph cache of whole-tensor param nodes, so each weight matrix is
// materialized once per forward pass no matter how many sites use it.
class ParamCache {
public:
    ParamCache(Graph& g, ModelParams& params) : g_(g), params_(params) {}
    Var operator()(const std::string& name);
    ModelParams& params() { return params_; }

private:
    Graph& g_;
    ModelParams& params_;
    std::unordered_map<std::string, Var> cache_;
};

} // namespace miner::ag
