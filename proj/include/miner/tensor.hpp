#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "miner/error.hpp"

namespace miner {

// A named trainable parameter: row-major values plus a gradient accumulator.
struct Tensor {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::vector<double> v;
    std::vector<double> g;

    std::size_t size() const { return v.size(); }
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

// Ordered collection of named tensors. Iteration order is creation order, so
// checkpoints and optimizer state stay aligned across runs.
class ModelParams {
public:
    Tensor& add(const std::string& name, int rows, int cols);
    Tensor& get(const std::string& name);
    const Tensor& get(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    std::vector<Tensor>& tensors() { return tensors_; }
    const std::vector<Tensor>& tensors() const { return tensors_; }

    void zero_grads();
    std::size_t param_count() const;

    // Name of the first tensor holding a non-finite entry, if any.
    std::optional<std::string> first_nonfinite_value() const;
    std::optional<std::string> first_nonfinite_grad() const;

private:
    std::vector<Tensor> tensors_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace miner
