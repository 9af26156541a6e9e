#include "miner/encoder.hpp"

#include <cmath>

namespace miner {

std::vector<int> token_ids(const Sentence& sentence, const Vocabulary& vocab) {
    std::vector<int> ids;
    ids.reserve(sentence.tokens.size());
    for (const auto& t : sentence.tokens) ids.push_back(vocab.lookup(t));
    return ids;
}

std::vector<ag::Var> embed_tokens(ag::Graph& g, ModelParams& params,
                                  const std::vector<int>& ids) {
    Tensor& table = params.get("embed.table");
    std::vector<ag::Var> u;
    u.reserve(ids.size());
    for (const int id : ids) u.push_back(g.row(table, id));
    return u;
}

namespace {

std::vector<ag::Var> apply_dropout(ag::Graph& g, const std::vector<ag::Var>& u, double rate,
                                   Rng& rng) {
    const double keep = 1.0 - rate;
    std::vector<ag::Var> out;
    out.reserve(u.size());
    for (const ag::Var v : u) {
        std::vector<double> mask(static_cast<std::size_t>(g.rows(v)));
        for (auto& m : mask) m = rng.uniform() < keep ? 1.0 / keep : 0.0;
        out.push_back(g.mul(v, g.constant(std::move(mask))));
    }
    return out;
}

// One GRU step: h' = z*h + (1-z)*c.
ag::Var gru_step(ag::Graph& g, ag::ParamCache& pc, const std::string& prefix, ag::Var x,
                 ag::Var h_prev) {
    const auto gate = [&](const char* name, ag::Var extra_h) {
        return g.add(g.add(g.matvec(pc(prefix + "W" + name), x),
                           g.matvec(pc(prefix + "U" + name), extra_h)),
                     pc(prefix + "b" + name));
    };
    const ag::Var z = g.sigmoid(gate("z", h_prev));
    const ag::Var r = g.sigmoid(gate("r", h_prev));
    const ag::Var c = g.tanh(gate("c", g.mul(r, h_prev)));
    return g.add(g.mul(z, h_prev), g.mul(g.add_const(g.neg(z), 1.0), c));
}

std::vector<ag::Var> encode_birecurrent(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg,
                                        const std::vector<ag::Var>& u) {
    const int n = static_cast<int>(u.size());
    std::vector<ag::Var> fwd(static_cast<std::size_t>(n)), bwd(static_cast<std::size_t>(n));

    ag::Var h = g.zeros(cfg.hidden_dim);
    for (int i = 0; i < n; ++i) {
        h = gru_step(g, pc, "enc.fwd.", u[static_cast<std::size_t>(i)], h);
        fwd[static_cast<std::size_t>(i)] = h;
    }
    h = g.zeros(cfg.hidden_dim);
    for (int i = n - 1; i >= 0; --i) {
        h = gru_step(g, pc, "enc.bwd.", u[static_cast<std::size_t>(i)], h);
        bwd[static_cast<std::size_t>(i)] = h;
    }

    std::vector<ag::Var> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.push_back(g.concat({fwd[static_cast<std::size_t>(i)], bwd[static_cast<std::size_t>(i)]}));
    }
    return out;
}

std::vector<ag::Var> encode_attention(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg,
                                      const std::vector<ag::Var>& u) {
    const int n = static_cast<int>(u.size());
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_dim));

    std::vector<ag::Var> q, k, v;
    q.reserve(u.size());
    k.reserve(u.size());
    v.reserve(u.size());
    for (const ag::Var ui : u) {
        q.push_back(g.matvec(pc("att.Wq"), ui));
        k.push_back(g.matvec(pc("att.Wk"), ui));
        v.push_back(g.matvec(pc("att.Wv"), ui));
    }

    std::vector<ag::Var> out;
    out.reserve(u.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - cfg.attention_window);
        const int hi = std::min(n - 1, i + cfg.attention_window);

        std::vector<ag::Var> scores;
        scores.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (int j = lo; j <= hi; ++j) {
            scores.push_back(g.scale(
                g.dot(q[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(j)]),
                inv_sqrt_d));
        }
        const ag::Var s = g.stack(scores);
        const ag::Var weights = g.exp(g.sub_scalar(s, g.logsumexp(s)));

        ag::Var ctx = g.scale_by(v[static_cast<std::size_t>(lo)], g.pick(weights, 0));
        for (int j = lo + 1; j <= hi; ++j) {
            ctx = g.add(ctx, g.scale_by(v[static_cast<std::size_t>(j)], g.pick(weights, j - lo)));
        }
        out.push_back(g.tanh(g.add(g.matvec(pc("att.Wo"), ctx), pc("att.bo"))));
    }
    return out;
}

} // namespace

std::vector<ag::Var> encode_context(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg,
                                    const std::vector<ag::Var>& u, bool training, Rng* rng) {
    MINER_CHECK(!u.empty(), "encode_context: empty input");
    std::vector<ag::Var> inputs = u;
    if (training && cfg.dropout_rate > 0.0) {
        MINER_CHECK(rng != nullptr, "encode_context: training dropout needs an rng");
        inputs = apply_dropout(g, inputs, cfg.dropout_rate, *rng);
    }
    if (cfg.context_arch == ContextArch::BiRecurrent) {
        return encode_birecurrent(g, pc, cfg, inputs);
    }
    return encode_attention(g, pc, cfg, inputs);
}

TokenRepr encode_sentence(ag::Graph& g, ag::ParamCache& pc, const Model& model_meta,
                          ModelParams& params, const std::vector<int>& ids, bool training,
                          Rng* rng) {
    TokenRepr repr;
    repr.u = embed_tokens(g, params, ids);
    repr.h = encode_context(g, pc, model_meta.cfg, repr.u, training, rng);
    return repr;
}

SpanRepr span_representation(ag::Graph& g, ModelParams& params, const ModelConfig& cfg,
                             const std::vector<ag::Var>& h, int start0, int end0) {
    const int n = static_cast<int>(h.size());
    MINER_CHECK(start0 >= 0 && start0 <= end0 && end0 < n,
                "span_representation: span out of range");
    const int length = end0 - start0 + 1;
    MINER_CHECK(length <= cfg.max_span_length,
                "span_representation: span length exceeds the length table");

    SpanRepr out;
    out.boundary = g.concat({h[static_cast<std::size_t>(start0)],
                             h[static_cast<std::size_t>(end0)]});
    out.length_emb = g.row(params.get("span.len_table"), length - 1);
    out.combined = g.concat({out.boundary, out.length_emb});
    return out;
}

} // namespace miner
