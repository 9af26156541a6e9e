#pragma once

#include <vector>

#include "miner/autodiff.hpp"
#include "miner/model.hpp"
#include "miner/rng.hpp"
#include "miner/types.hpp"

namespace miner {

// Per-token embedding vectors u_i and contextual vectors h_i.
struct TokenRepr {
    std::vector<ag::Var> u;
    std::vector<ag::Var> h;
};

// Boundary concatenation, length embedding and their concatenation.
struct SpanRepr {
    ag::Var boundary;
    ag::Var length_emb;
    ag::Var combined;
};

std::vector<int> token_ids(const Sentence& sentence, const Vocabulary& vocab);

// Embedding lookup; unknown tokens share the reserved unknown row.
std::vector<ag::Var> embed_tokens(ag::Graph& g, ModelParams& params,
                                  const std::vector<int>& ids);

// Contextual encoding of the embedded tokens. With training=true, inverted
// dropout at the configured rate is applied to the inputs using `rng`;
// with training=false the pass is deterministic.
std::vector<ag::Var> encode_context(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg,
                                    const std::vector<ag::Var>& u, bool training, Rng* rng);

TokenRepr encode_sentence(ag::Graph& g, ag::ParamCache& pc, const Model& model_meta,
                          ModelParams& params, const std::vector<int>& ids, bool training,
                          Rng* rng);

// start0/end0 are 0-based inclusive token offsets. Throws ContractViolation
// when the span is out of range or longer than the length table.
SpanRepr span_representation(ag::Graph& g, ModelParams& params, const ModelConfig& cfg,
                             const std::vector<ag::Var>& h, int start0, int end0);

} // namespace miner
