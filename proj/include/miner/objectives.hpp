#pragma once

#include <utility>
#include <vector>

#include "miner/autodiff.hpp"
#include "miner/bottleneck.hpp"
#include "miner/model.hpp"

namespace miner {

struct LossWeights {
    double gamma = 0.01; // generalizing-information weight
    double beta = 1e-5;  // superfluous-information weight
    void check() const {
        MINER_CHECK(gamma >= 0.0 && beta >= 0.0, "LossWeights: weights must be >= 0");
    }
};

// Logits z . y^k for every label k, in label-id order.
ag::Var label_logits(ag::Graph& g, ag::ParamCache& pc, ag::Var z);

// exp(z . y^k). The exponential of the logit; classification keeps
// everything in log space.
ag::Var span_score(ag::Graph& g, ag::ParamCache& pc, ag::Var z, int label_id);

// Negative log-likelihood of the gold label for one span.
ag::Var span_nll(ag::Graph& g, ag::ParamCache& pc, ag::Var z, int gold_label_id);

// Batch mean of span_nll over (z, gold) pairs.
ag::Var base_loss(ag::Graph& g, ag::ParamCache& pc,
                  const std::vector<std::pair<ag::Var, int>>& spans);

// InfoNCE over aligned positive pairs with in-batch negatives: for anchor i
// the candidate set is all positives z2_j (and symmetrically z1_j when
// `symmetric`). Requires at least two pairs. Loss is >= 0 and the implied
// mutual-information estimate log N - loss never exceeds log N.
ag::Var gi_loss(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg,
                const std::vector<std::pair<ag::Var, ag::Var>>& pairs, bool symmetric = true);

// Mean Jensen-Shannon divergence over aligned posterior pairs. An empty pair
// list yields 0 and sets *warned_empty.
ag::Var si_loss(ag::Graph& g, const std::vector<std::pair<Posterior, Posterior>>& pairs,
                JsMode mode, int n_samples, Rng* rng, bool* warned_empty = nullptr);

// Mean KL(p || N(0, I)) over all span posteriors (VaniIB compression term).
ag::Var vanilla_ib_loss(ag::Graph& g, const std::vector<Posterior>& posteriors);

// base + gamma * gi + beta * si.
ag::Var total_loss(ag::Graph& g, ag::Var base, ag::Var gi, ag::Var si, const LossWeights& w);

} // namespace miner
