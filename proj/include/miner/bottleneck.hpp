#pragma once

#include <string>
#include <vector>

#include "miner/autodiff.hpp"
#include "miner/model.hpp"
#include "miner/rng.hpp"

namespace miner {

// Diagonal-Gaussian posterior p(z|t) as graph nodes. scale is strictly
// positive by construction (softplus of the raw head plus a small floor).
struct Posterior {
    ag::Var mean;
    ag::Var scale;
    int dim = 0;
};

// Plain-value view of a posterior, for reports and tests.
struct GaussianParams {
    std::vector<double> mean;
    std::vector<double> scale;
};

Posterior make_posterior(ag::Graph& g, ag::Var mean, ag::Var scale);

// One-hidden-layer dense map from the span representation to (mean, scale).
Posterior posterior(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg, ag::Var t);

// z = mean + scale .* eps. The eps overload is the deterministic core; the
// rng overload draws eps ~ N(0, I).
ag::Var reparameterize(ag::Graph& g, const Posterior& post, const std::vector<double>& eps);
ag::Var reparameterize(ag::Graph& g, const Posterior& post, Rng& rng);

// Closed-form KL(p || q) for diagonal Gaussians.
ag::Var kl_diag_gaussians(ag::Graph& g, const Posterior& p, const Posterior& q);

// KL(p || N(0, I)).
ag::Var kl_to_standard_normal(ag::Graph& g, const Posterior& p);

// log N(x; mean, diag(scale^2)); x may be any graph vector (in particular a
// reparameterized sample, so gradients flow through both x and the
// posterior parameters).
ag::Var gaussian_log_density(ag::Graph& g, ag::Var x, const Posterior& p);

enum class JsMode { Mc, SymmetricKl };
JsMode js_mode_from_string(const std::string& s);
std::string to_string(JsMode m);

// Jensen-Shannon divergence between two posteriors.
//   Mc: reparameterized Monte-Carlo estimate of
//       1/2 KL(p||m) + 1/2 KL(q||m), m the equal-weight mixture.
//   SymmetricKl: closed-form 1/2 [KL(p||q) + KL(q||p)] surrogate.
ag::Var js_divergence(ag::Graph& g, const Posterior& p, const Posterior& q, JsMode mode,
                      int n_samples, Rng* rng);

// ----- plain-value helpers (separate closed-form route, cross-checked
//       against the graph ops in tests) -----
GaussianParams posterior_values(const ag::Graph& g, const Posterior& p);
double kl_diag_values(const GaussianParams& p, const GaussianParams& q);
double log_density_values(const std::vector<double>& x, const GaussianParams& p);

} // namespace miner
