#include "miner/bottleneck.hpp"

#include <cmath>

namespace miner {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
} // namespace

Posterior make_posterior(ag::Graph& g, ag::Var mean, ag::Var scale) {
    MINER_CHECK(g.rows(mean) == g.rows(scale) && g.cols(mean) == 1 && g.cols(scale) == 1,
                "make_posterior: mean/scale must be equal-length vectors");
    return Posterior{mean, scale, g.rows(mean)};
}

Posterior posterior(ag::Graph& g, ag::ParamCache& pc, const ModelConfig& cfg, ag::Var t) {
    const ag::Var hid = g.tanh(g.add(g.matvec(pc("ib.W1"), t), pc("ib.b1")));
    const ag::Var mean = g.add(g.matvec(pc("ib.Wmu"), hid), pc("ib.bmu"));
    const ag::Var raw = g.add(g.matvec(pc("ib.Wsig"), hid), pc("ib.bsig"));
    const ag::Var scale = g.add_const(g.softplus(raw), cfg.scale_floor);
    return make_posterior(g, mean, scale);
}

ag::Var reparameterize(ag::Graph& g, const Posterior& post, const std::vector<double>& eps) {
    MINER_CHECK(static_cast<int>(eps.size()) == post.dim, "reparameterize: eps dim mismatch");
    return g.add(post.mean, g.mul(post.scale, g.constant(eps)));
}

ag::Var reparameterize(ag::Graph& g, const Posterior& post, Rng& rng) {
    return reparameterize(g, post, rng.normal_vec(static_cast<std::size_t>(post.dim)));
}

ag::Var kl_diag_gaussians(ag::Graph& g, const Posterior& p, const Posterior& q) {
    MINER_CHECK(p.dim == q.dim, "kl_diag_gaussians: dimension mismatch");
    // sum_k [ log(qs/ps) + (ps^2 + (pm-qm)^2) / (2 qs^2) - 1/2 ]
    const ag::Var log_ratio = g.sub(g.log(q.scale), g.log(p.scale));
    const ag::Var num = g.add(g.square(p.scale), g.square(g.sub(p.mean, q.mean)));
    const ag::Var quad = g.div(num, g.scale(g.square(q.scale), 2.0));
    return g.add_const(g.sum(g.add(log_ratio, quad)), -0.5 * p.dim);
}

ag::Var kl_to_standard_normal(ag::Graph& g, const Posterior& p) {
    // sum_k [ -log ps + (ps^2 + pm^2)/2 - 1/2 ]
    const ag::Var quad = g.scale(g.add(g.square(p.scale), g.square(p.mean)), 0.5);
    return g.add_const(g.sum(g.sub(quad, g.log(p.scale))), -0.5 * p.dim);
}

ag::Var gaussian_log_density(ag::Graph& g, ag::Var x, const Posterior& p) {
    MINER_CHECK(g.rows(x) == p.dim, "gaussian_log_density: dim mismatch");
    const ag::Var standardized = g.div(g.sub(x, p.mean), p.scale);
    const ag::Var quad = g.sum(g.square(standardized));
    const ag::Var log_det = g.scale(g.sum(g.log(p.scale)), 2.0);
    return g.scale(g.add_const(g.add(quad, log_det), p.dim * kLog2Pi), -0.5);
}

JsMode js_mode_from_string(const std::string& s) {
    if (s == "mc") return JsMode::Mc;
    if (s == "symmetric-kl") return JsMode::SymmetricKl;
    throw ConfigError("unknown JS mode: " + s);
}

std::string to_string(JsMode m) {
    return m == JsMode::Mc ? "mc" : "symmetric-kl";
}

namespace {

// log m(z) for the equal-weight mixture of p and q.
ag::Var log_mixture_density(ag::Graph& g, ag::Var z, const Posterior& p, const Posterior& q) {
    const ag::Var lp = gaussian_log_density(g, z, p);
    const ag::Var lq = gaussian_log_density(g, z, q);
    return g.add_const(g.logsumexp(g.stack({lp, lq})), -std::log(2.0));
}

} // namespace

ag::Var js_divergence(ag::Graph& g, const Posterior& p, const Posterior& q, JsMode mode,
                      int n_samples, Rng* rng) {
    MINER_CHECK(p.dim == q.dim, "js_divergence: dimension mismatch");
    if (mode == JsMode::SymmetricKl) {
        return g.scale(g.add(kl_diag_gaussians(g, p, q), kl_diag_gaussians(g, q, p)), 0.5);
    }
    MINER_CHECK(n_samples >= 1, "js_divergence: mc mode needs n_samples >= 1");
    MINER_CHECK(rng != nullptr, "js_divergence: mc mode needs an rng");

    std::vector<ag::Var> terms;
    terms.reserve(static_cast<std::size_t>(2 * n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const ag::Var zp = reparameterize(g, p, *rng);
        terms.push_back(g.sub(gaussian_log_density(g, zp, p), log_mixture_density(g, zp, p, q)));
        const ag::Var zq = reparameterize(g, q, *rng);
        terms.push_back(g.sub(gaussian_log_density(g, zq, q), log_mixture_density(g, zq, p, q)));
    }
    // mean over the interleaved 2n terms equals 1/2 KL(p||m) + 1/2 KL(q||m)
    return g.mean(g.stack(terms));
}

GaussianParams posterior_values(const ag::Graph& g, const Posterior& p) {
    return GaussianParams{g.val(p.mean), g.val(p.scale)};
}

double kl_diag_values(const GaussianParams& p, const GaussianParams& q) {
    MINER_CHECK(p.mean.size() == q.mean.size() && p.scale.size() == q.scale.size() &&
                    p.mean.size() == p.scale.size(),
                "kl_diag_values: dimension mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < p.mean.size(); ++k) {
        const double ps = p.scale[k], qs = q.scale[k];
        const double dm = p.mean[k] - q.mean[k];
        acc += std::log(qs / ps) + (ps * ps + dm * dm) / (2.0 * qs * qs) - 0.5;
    }
    return acc;
}

double log_density_values(const std::vector<double>& x, const GaussianParams& p) {
    MINER_CHECK(x.size() == p.mean.size() && x.size() == p.scale.size(),
                "log_density_values: dimension mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double s = p.scale[k];
        const double d = (x[k] - p.mean[k]) / s;
        acc += -0.5 * (kLog2Pi + d * d) - std::log(s);
    }
    return acc;
}

} // namespace miner
