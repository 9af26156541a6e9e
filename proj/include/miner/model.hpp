#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miner/corpus.hpp"
#include "miner/tensor.hpp"

namespace miner {

enum class ContextArch { BiRecurrent, WindowedSelfAttention };
enum class CriticArch { Bilinear, Mlp };

ContextArch context_arch_from_string(const std::string& s);
std::string to_string(ContextArch a);
CriticArch critic_arch_from_string(const std::string& s);
std::string to_string(CriticArch a);

struct ModelConfig {
    int embed_dim = 32;
    int hidden_dim = 32;
    int max_span_length = 4;
    int length_embed_dim = 25;
    double dropout_rate = 0.2;
    ContextArch context_arch = ContextArch::BiRecurrent;
    int attention_window = 3;
    int ib_hidden_dim = 64;
    int bottleneck_dim = 50; // K
    CriticArch critic_arch = CriticArch::Bilinear;
    int critic_hidden_dim = 32;
    double scale_floor = 1e-6;

    // Contextual vector width; both encoder architectures emit the same
    // width so the span layer is architecture-agnostic.
    int context_dim() const { return 2 * hidden_dim; }
    int span_repr_dim() const { return 2 * context_dim() + length_embed_dim; }
    void check() const;
};

std::string to_json_string(const ModelConfig& cfg);
ModelConfig model_config_from_json_string(const std::string& json_text);

// Bundles everything a forward pass needs: dims, vocabulary, label inventory
// (labels[0] is always "O") and the trainable tensors.
struct Model {
    ModelConfig cfg;
    Vocabulary vocab;
    std::vector<std::string> labels;
    ModelParams params;

    int num_labels() const { return static_cast<int>(labels.size()); }
    int label_id(const std::string& label) const;
    const std::string& label_name(int id) const;

    static Model create(ModelConfig cfg, Vocabulary vocab, std::vector<std::string> labels,
                        std::uint64_t seed);
};

// Label inventory from the training split: "O" first, entity types sorted.
std::vector<std::string> collect_labels(const std::vector<Sentence>& train);

} // namespace miner
