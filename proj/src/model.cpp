#include "miner/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "miner/rng.hpp"

namespace miner {

using nlohmann::json;

ContextArch context_arch_from_string(const std::string& s) {
    if (s == "bidirectional-recurrent") return ContextArch::BiRecurrent;
    if (s == "windowed-self-attention") return ContextArch::WindowedSelfAttention;
    throw ConfigError("unknown context_arch: " + s);
}

std::string to_string(ContextArch a) {
    return a == ContextArch::BiRecurrent ? "bidirectional-recurrent" : "windowed-self-attention";
}

CriticArch critic_arch_from_string(const std::string& s) {
    if (s == "bilinear") return CriticArch::Bilinear;
    if (s == "mlp") return CriticArch::Mlp;
    throw ConfigError("unknown critic_arch: " + s);
}

std::string to_string(CriticArch a) {
    return a == CriticArch::Bilinear ? "bilinear" : "mlp";
}

void ModelConfig::check() const {
    MINER_CHECK(embed_dim > 0 && hidden_dim > 0 && length_embed_dim > 0 && ib_hidden_dim > 0 &&
                    bottleneck_dim > 0 && critic_hidden_dim > 0 && max_span_length > 0 &&
                    attention_window > 0,
                "ModelConfig: all dims must be positive");
    MINER_CHECK(dropout_rate >= 0.0 && dropout_rate < 1.0, "ModelConfig: dropout_rate in [0,1)");
    MINER_CHECK(scale_floor > 0.0, "ModelConfig: scale_floor must be positive");
}

std::string to_json_string(const ModelConfig& cfg) {
    json j;
    j["embed_dim"] = cfg.embed_dim;
    j["hidden_dim"] = cfg.hidden_dim;
    j["max_span_length"] = cfg.max_span_length;
    j["length_embed_dim"] = cfg.length_embed_dim;
    j["dropout_rate"] = cfg.dropout_rate;
    j["context_arch"] = to_string(cfg.context_arch);
    j["attention_window"] = cfg.attention_window;
    j["ib_hidden_dim"] = cfg.ib_hidden_dim;
    j["bottleneck_dim"] = cfg.bottleneck_dim;
    j["critic_arch"] = to_string(cfg.critic_arch);
    j["critic_hidden_dim"] = cfg.critic_hidden_dim;
    j["scale_floor"] = cfg.scale_floor;
    return j.dump(2);
}

ModelConfig model_config_from_json_string(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model config: invalid JSON: ") + e.what());
    }
    ModelConfig cfg;
    try {
        if (j.contains("embed_dim")) cfg.embed_dim = j["embed_dim"].get<int>();
        if (j.contains("hidden_dim")) cfg.hidden_dim = j["hidden_dim"].get<int>();
        if (j.contains("max_span_length")) cfg.max_span_length = j["max_span_length"].get<int>();
        if (j.contains("length_embed_dim"))
            cfg.length_embed_dim = j["length_embed_dim"].get<int>();
        if (j.contains("dropout_rate")) cfg.dropout_rate = j["dropout_rate"].get<double>();
        if (j.contains("context_arch"))
            cfg.context_arch = context_arch_from_string(j["context_arch"].get<std::string>());
        if (j.contains("attention_window"))
            cfg.attention_window = j["attention_window"].get<int>();
        if (j.contains("ib_hidden_dim")) cfg.ib_hidden_dim = j["ib_hidden_dim"].get<int>();
        if (j.contains("bottleneck_dim")) cfg.bottleneck_dim = j["bottleneck_dim"].get<int>();
        if (j.contains("critic_arch"))
            cfg.critic_arch = critic_arch_from_string(j["critic_arch"].get<std::string>());
        if (j.contains("critic_hidden_dim"))
            cfg.critic_hidden_dim = j["critic_hidden_dim"].get<int>();
        if (j.contains("scale_floor")) cfg.scale_floor = j["scale_floor"].get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model config: bad field: ") + e.what());
    }
    cfg.check();
    return cfg;
}

int Model::label_id(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<int>(i);
    }
    throw ContractViolation("unknown label: " + label);
}

const std::string& Model::label_name(int id) const {
    MINER_CHECK(id >= 0 && id < num_labels(), "label id out of range");
    return labels[static_cast<std::size_t>(id)];
}

namespace {

void init_uniform(Tensor& t, Rng& rng, double limit) {
    for (auto& x : t.v) x = (2.0 * rng.uniform() - 1.0) * limit;
}

// Glorot-style fan scaling for dense maps.
void init_dense(Tensor& t, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
    init_uniform(t, rng, limit);
}

void add_dense(ModelParams& p, Rng& rng, const std::string& name, int rows, int cols) {
    init_dense(p.add(name, rows, cols), rng);
}

void add_bias(ModelParams& p, const std::string& name, int rows) {
    p.add(name, rows, 1); // zero-initialized
}

void add_table(ModelParams& p, Rng& rng, const std::string& name, int rows, int cols) {
    init_uniform(p.add(name, rows, cols), rng, 0.1);
}

} // namespace

Model Model::create(ModelConfig cfg, Vocabulary vocab, std::vector<std::string> labels,
                    std::uint64_t seed) {
    cfg.check();
    MINER_CHECK(!labels.empty() && labels[0] == kOutsideLabel,
                "Model: labels[0] must be \"O\"");
    Model m{std::move(cfg), std::move(vocab), std::move(labels), {}};
    Rng rng = Rng(seed).derive(0x1417);

    const auto& c = m.cfg;
    add_table(m.params, rng, "embed.table", m.vocab.size(), c.embed_dim);

    if (c.context_arch == ContextArch::BiRecurrent) {
        for (const char* dir : {"fwd", "bwd"}) {
            for (const char* gate : {"z", "r", "c"}) {
                const std::string base = std::string("enc.") + dir + ".";
                add_dense(m.params, rng, base + "W" + gate, c.hidden_dim, c.embed_dim);
                add_dense(m.params, rng, base + "U" + gate, c.hidden_dim, c.hidden_dim);
                add_bias(m.params, base + "b" + gate, c.hidden_dim);
            }
        }
    } else {
        add_dense(m.params, rng, "att.Wq", c.hidden_dim, c.embed_dim);
        add_dense(m.params, rng, "att.Wk", c.hidden_dim, c.embed_dim);
        add_dense(m.params, rng, "att.Wv", c.hidden_dim, c.embed_dim);
        add_dense(m.params, rng, "att.Wo", c.context_dim(), c.hidden_dim);
        add_bias(m.params, "att.bo", c.context_dim());
    }

    add_table(m.params, rng, "span.len_table", c.max_span_length, c.length_embed_dim);

    add_dense(m.params, rng, "ib.W1", c.ib_hidden_dim, c.span_repr_dim());
    add_bias(m.params, "ib.b1", c.ib_hidden_dim);
    add_dense(m.params, rng, "ib.Wmu", c.bottleneck_dim, c.ib_hidden_dim);
    add_bias(m.params, "ib.bmu", c.bottleneck_dim);
    add_dense(m.params, rng, "ib.Wsig", c.bottleneck_dim, c.ib_hidden_dim);
    add_bias(m.params, "ib.bsig", c.bottleneck_dim);

    add_table(m.params, rng, "cls.labels", m.num_labels(), c.bottleneck_dim);

    if (c.critic_arch == CriticArch::Bilinear) {
        add_dense(m.params, rng, "critic.W", c.bottleneck_dim, c.bottleneck_dim);
    } else {
        add_dense(m.params, rng, "critic.W1", c.critic_hidden_dim, c.bottleneck_dim);
        add_dense(m.params, rng, "critic.W2", c.critic_hidden_dim, c.bottleneck_dim);
        add_bias(m.params, "critic.b", c.critic_hidden_dim);
        add_dense(m.params, rng, "critic.v", 1, c.critic_hidden_dim);
    }
    return m;
}

std::vector<std::string> collect_labels(const std::vector<Sentence>& train) {
    std::set<std::string> types;
    for (const auto& s : train) {
        for (const auto& m : s.mentions) types.insert(m.etype);
    }
    std::vector<std::string> labels{kOutsideLabel};
    labels.insert(labels.end(), types.begin(), types.end());
    return labels;
}

} // namespace miner
