#include "miner/objectives.hpp"

#include <iostream>

namespace miner {

ag::Var label_logits(ag::Graph& g, ag::ParamCache& pc, ag::Var z) {
    return g.matvec(pc("cls.labels"), z);
}

ag::Var span_score(ag::Graph& g, ag::ParamCache& pc, ag::Var z, int label_id) {
    Tensor& labels = pc.params().get("cls.labels");
    MINER_CHECK(label_id >= 0 && label_id < labels.rows, "span_score: label id out of range");
    return g.exp(g.dot(z, g.row(labels, label_id)));
}

ag::Var span_nll(ag::Graph& g, ag::ParamCache& pc, ag::Var z, int gold_label_id) {
    const ag::Var logits = label_logits(g, pc, z);
    MINER_CHECK(gold_label_id >= 0 && gold_label_id < g.rows(logits),
                "span_nll: gold label out of range");
    return g.sub(g.logsumexp(logits), g.pick(logits, gold_label_id));
}

ag::Var base_loss(ag::Graph& g, ag::ParamCache& pc,
                  const std::vector<std::pair<ag::Var, int>>& spans) {
    MINER_CHECK(!spans.empty(), "base_loss: no spans");
    std::vector<ag::Var> losses;
    losses.reserve(spans.size());
    for (const auto& [z, gold] : spans) losses.push_back(span_nll(g, pc, z, gold));
    return g.mean(g.stack(losses));
}

namespace {

// Critic score g_w(z1, z2). Bilinear: z1^T W z2 (callers prefold W z2 via
// `wz2`); MLP: v^T tanh(W1 z1 + W2 z2 + b).
ag::Var critic_score(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg, ag::Var z1,
                     ag::Var z2, ag::Var wz2) {
    if (cfg.critic_arch == CriticArch::Bilinear) {
        return g.dot(z1, wz2);
    }
    const ag::Var hid = g.tanh(g.add(
        g.add(g.matvec(pc("critic.W1"), z1), g.matvec(pc("critic.W2"), z2)), pc("critic.b")));
    return g.pick(g.matvec(pc("critic.v"), hid), 0);
}

} // namespace

ag::Var gi_loss(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg,
                const std::vector<std::pair<ag::Var, ag::Var>>& pairs, bool symmetric) {
    const int n = static_cast<int>(pairs.size());
    MINER_CHECK(n >= 2, "gi_loss: need at least 2 pairs for in-batch negatives");

    // s[i][j] = g_w(z1_i, z2_j)
    std::vector<ag::Var> wz2;
    if (cfg.critic_arch == CriticArch::Bilinear) {
        wz2.reserve(pairs.size());
        for (const auto& [z1, z2] : pairs) wz2.push_back(g.matvec(pc("critic.W"), z2));
    }
    std::vector<std::vector<ag::Var>> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        s[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const ag::Var z1 = pairs[static_cast<std::size_t>(i)].first;
            const ag::Var z2 = pairs[static_cast<std::size_t>(j)].second;
            const ag::Var folded =
                cfg.critic_arch == CriticArch::Bilinear ? wz2[static_cast<std::size_t>(j)] : z2;
            s[static_cast<std::size_t>(i)].push_back(critic_score(g, pc, cfg, z1, z2, folded));
        }
    }

    std::vector<ag::Var> losses;
    losses.reserve(static_cast<std::size_t>(symmetric ? 2 * n : n));
    for (int i = 0; i < n; ++i) {
        // anchor z1_i against all z2_j
        const ag::Var row = g.stack(s[static_cast<std::size_t>(i)]);
        losses.push_back(g.sub(g.logsumexp(row), g.pick(row, i)));
    }
    if (symmetric) {
        for (int j = 0; j < n; ++j) {
            // anchor z2_j against all z1_i
            std::vector<ag::Var> col;
            col.reserve(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) col.push_back(s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            const ag::Var column = g.stack(col);
            losses.push_back(g.sub(g.logsumexp(column), g.pick(column, j)));
        }
    }
    return g.mean(g.stack(losses));
}

ag::Var si_loss(ag::Graph& g, const std::vector<std::pair<Posterior, Posterior>>& pairs,
                JsMode mode, int n_samples, Rng* rng, bool* warned_empty) {
    if (pairs.empty()) {
        std::cerr << "warning: si_loss over an empty pair list, returning 0\n";
        if (warned_empty) *warned_empty = true;
        return g.scalar(0.0);
    }
    std::vector<ag::Var> terms;
    terms.reserve(pairs.size());
    for (const auto& [p, q] : pairs) {
        terms.push_back(js_divergence(g, p, q, mode, n_samples, rng));
    }
    return g.mean(g.stack(terms));
}

ag::Var vanilla_ib_loss(ag::Graph& g, const std::vector<Posterior>& posteriors) {
    if (posteriors.empty()) return g.scalar(0.0);
    std::vector<ag::Var> terms;
    terms.reserve(posteriors.size());
    for (const auto& p : posteriors) terms.push_back(kl_to_standard_normal(g, p));
    return g.mean(g.stack(terms));
}

ag::Var total_loss(ag::Graph& g, ag::Var base, ag::Var gi, ag::Var si, const LossWeights& w) {
    w.check();
    return g.add(base, g.add(g.scale(gi, w.gamma), g.scale(si, w.beta)));
}

} // namespace miner
