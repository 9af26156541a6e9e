#include "miner/tensor.hpp"

#include <cmath>

namespace miner {

Tensor& ModelParams::add(const std::string& name, int rows, int cols) {
    MINER_CHECK(!has(name), "ModelParams: duplicate tensor name " + name);
    MINER_CHECK(rows > 0 && cols > 0, "ModelParams: dims must be positive for " + name);
    index_.emplace(name, tensors_.size());
    Tensor t;
    t.name = name;
    t.rows = rows;
    t.cols = cols;
    t.v.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    t.g.assign(t.v.size(), 0.0);
    tensors_.push_back(std::move(t));
    return tensors_.back();
}

Tensor& ModelParams::get(const std::string& name) {
    const auto it = index_.find(name);
    MINER_CHECK(it != index_.end(), "ModelParams: unknown tensor " + name);
    return tensors_[it->second];
}

const Tensor& ModelParams::get(const std::string& name) const {
    const auto it = index_.find(name);
    MINER_CHECK(it != index_.end(), "ModelParams: unknown tensor " + name);
    return tensors_[it->second];
}

void ModelParams::zero_grads() {
    for (auto& t : tensors_) {
        std::fill(t.g.begin(), t.g.end(), 0.0);
    }
}

std::size_t ModelParams::param_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += t.size();
    return n;
}

std::optional<std::string> ModelParams::first_nonfinite_value() const {
    for (const auto& t : tensors_) {
        for (const double x : t.v) {
            if (!std::isfinite(x)) return t.name;
        }
    }
    return std::nullopt;
}

std::optional<std::string> ModelParams::first_nonfinite_grad() const {
    for (const auto& t : tensors_) {
        for (const double x : t.g) {
            if (!std::isfinite(x)) return t.name;
        }
    }
    return std::nullopt;
}

} // namespace miner
