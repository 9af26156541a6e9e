#include "miner/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "miner/bottleneck.hpp"
#include "miner/encoder.hpp"

namespace miner {

TrainMode train_mode_from_string(const std::string& s) {
    if (s == "MINER") return TrainMode::Miner;
    if (s == "base-only") return TrainMode::BaseOnly;
    if (s == "VaniIB") return TrainMode::VaniIB;
    if (s == "DataAug") return TrainMode::DataAug;
    throw ConfigError("unknown training mode: " + s);
}

std::string to_string(TrainMode m) {
    switch (m) {
        case TrainMode::Miner: return "MINER";
        case TrainMode::BaseOnly: return "base-only";
        case TrainMode::VaniIB: return "VaniIB";
        case TrainMode::DataAug: return "DataAug";
    }
    return "?";
}

void TrainConfig::check() const {
    MINER_CHECK(learning_rate > 0.0, "TrainConfig: learning_rate must be positive");
    MINER_CHECK(epochs >= 0, "TrainConfig: epochs must be >= 0");
    MINER_CHECK(batch_size >= 1, "TrainConfig: batch_size must be >= 1");
    MINER_CHECK(mode != TrainMode::Miner || batch_size >= 2,
                "TrainConfig: MINER mode needs batch_size >= 2 for in-batch negatives");
    MINER_CHECK(max_sentence_len >= 1, "TrainConfig: max_sentence_len must be >= 1");
    MINER_CHECK(checkpoint_top_k >= 1, "TrainConfig: checkpoint_top_k must be >= 1");
    MINER_CHECK(o_span_ratio >= 0.0, "TrainConfig: o_span_ratio must be >= 0");
    MINER_CHECK(o_span_min >= 0, "TrainConfig: o_span_min must be >= 0");
    MINER_CHECK(js_samples >= 1, "TrainConfig: js_samples must be >= 1");
    weights.check();
}

namespace {

// Truncates to max_len tokens; mentions crossing the cut are dropped.
Sentence truncate_sentence(const Sentence& s, int max_len, BatchStats* stats) {
    if (static_cast<int>(s.tokens.size()) <= max_len) return s;
    Sentence out;
    out.tokens.assign(s.tokens.begin(), s.tokens.begin() + max_len);
    for (const auto& m : s.mentions) {
        if (m.end <= max_len) {
            out.mentions.push_back(m);
        } else if (stats) {
            ++stats->dropped_mentions;
        }
    }
    if (stats) ++stats->truncated_sentences;
    return out;
}

// Gold spans (within the length cap) plus subsampled O spans.
EncodedSentence encode_for_training(const Sentence& s, const Model& model,
                                    const TrainConfig& cfg, Rng& rng) {
    EncodedSentence enc;
    enc.ids = token_ids(s, model.vocab);

    std::vector<EntityMention> mentions = s.mentions;
    std::sort(mentions.begin(), mentions.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });

    std::size_t gold_kept = 0;
    enc.gold_span_index.assign(mentions.size(), -1);
    for (std::size_t k = 0; k < mentions.size(); ++k) {
        const auto& m = mentions[k];
        if (m.end - m.start + 1 > model.cfg.max_span_length) continue; // unreachable span
        enc.gold_span_index[k] = static_cast<int>(enc.spans.size());
        enc.spans.push_back({m.start - 1, m.end - 1, model.label_id(m.etype)});
        ++gold_kept;
    }

    // candidate O spans = enumeration minus gold intervals
    std::vector<SpanInstance> o_spans;
    for (const auto& span : enumerate_spans(s, model.cfg.max_span_length)) {
        if (span.label == kOutsideLabel) {
            o_spans.push_back({span.start - 1, span.end - 1, 0});
        }
    }
    std::size_t want = std::max(static_cast<std::size_t>(cfg.o_span_min),
                                static_cast<std::size_t>(std::llround(
                                    cfg.o_span_ratio * static_cast<double>(gold_kept))));
    want = std::min(want, o_spans.size());
    // partial Fisher-Yates draw of `want` O spans
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + rng.uniform_int(o_spans.size() - i);
        std::swap(o_spans[i], o_spans[j]);
        enc.spans.push_back(o_spans[i]);
    }
    return enc;
}

} // namespace

std::vector<Batch> make_batches(const std::vector<Sentence>& train,
                                const MentionLexicon& lexicon, const Model& model,
                                const TrainConfig& cfg, int epoch, BatchStats* stats) {
    MINER_CHECK(!train.empty(), "make_batches: empty corpus");
    cfg.check();

    const bool wants_variants = cfg.mode == TrainMode::Miner || cfg.mode == TrainMode::DataAug;

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(mix_seed(cfg.seed, 0x5u, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng.uniform_int(i))]);
    }

    std::vector<Batch> batches;
    Batch current;
    for (const std::size_t idx : order) {
        const Sentence truncated =
            truncate_sentence(train[idx], cfg.max_sentence_len, stats);
        if (truncated.tokens.empty()) continue;

        BatchItem item;
        Rng span_rng(mix_seed(cfg.seed, 0x51u, static_cast<std::uint64_t>(epoch), idx));
        item.original = encode_for_training(truncated, model, cfg, span_rng);

        if (wants_variants) {
            const std::uint64_t vseed =
                mix_seed(cfg.seed, 0xAAu, static_cast<std::uint64_t>(epoch), idx);
            ContrastivePair pair = replace_mentions(truncated, lexicon, vseed);
            const Sentence var_truncated =
                truncate_sentence(pair.variant, cfg.max_sentence_len, stats);
            Rng var_span_rng(mix_seed(cfg.seed, 0x52u, static_cast<std::uint64_t>(epoch), idx));
            item.variant = encode_for_training(var_truncated, model, cfg, var_span_rng);
            // variant truncation may have dropped trailing mentions; keep the
            // alignment arrays the same length
            item.variant->gold_span_index.resize(item.original.gold_span_index.size(), -1);
        }
        current.items.push_back(std::move(item));
        if (static_cast<int>(current.items.size()) == cfg.batch_size) {
            batches.push_back(std::move(current));
            current = Batch{};
        }
    }
    if (!current.items.empty()) batches.push_back(std::move(current));
    return batches;
}

AdamState::AdamState(const ModelParams& params) {
    m_.reserve(params.tensors().size());
    v_.reserve(params.tensors().size());
    for (const auto& t : params.tensors()) {
        m_.emplace_back(t.size(), 0.0);
        v_.emplace_back(t.size(), 0.0);
    }
}

void AdamState::step(ModelParams& params, double learning_rate) {
    MINER_CHECK(m_.size() == params.tensors().size(), "AdamState: parameter set changed");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t ti = 0; ti < params.tensors().size(); ++ti) {
        Tensor& t = params.tensors()[ti];
        auto& m = m_[ti];
        auto& v = v_[ti];
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double grad = t.g[i];
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad;
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad * grad;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            t.v[i] -= learning_rate * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

namespace {

struct ForwardCollector {
    std::vector<std::pair<ag::Var, int>> base_spans;      // (z, gold label)
    std::vector<std::pair<ag::Var, ag::Var>> gi_pairs;    // (z_orig, z_variant)
    std::vector<std::pair<Posterior, Posterior>> si_pairs;
    std::vector<Posterior> posteriors;                    // originals, for VaniIB
};

struct SentenceForward {
    std::vector<ag::Var> z;          // per span
    std::vector<Posterior> posts;    // per span
};

SentenceForward forward_spans(ag::Graph& g, ag::ParamCache& pc, Model& model,
                              const EncodedSentence& enc, bool training, Rng& rng) {
    SentenceForward fwd;
    if (enc.ids.empty()) return fwd;
    const TokenRepr repr = encode_sentence(g, pc, model, model.params, enc.ids, training, &rng);
    fwd.z.reserve(enc.spans.size());
    fwd.posts.reserve(enc.spans.size());
    for (const auto& span : enc.spans) {
        const SpanRepr t =
            span_representation(g, model.params, model.cfg, repr.h, span.start0, span.end0);
        const Posterior post = posterior(g, pc, model.cfg, t.combined);
        fwd.posts.push_back(post);
        fwd.z.push_back(training ? reparameterize(g, post, rng) : post.mean);
    }
    return fwd;
}

} // namespace

LossRecord train_step(const Batch& batch, Model& model, AdamState& opt, const TrainConfig& cfg,
                      Rng& rng, int step, int epoch) {
    MINER_CHECK(!batch.items.empty(), "train_step: empty batch");

    ag::Graph g;
    ag::ParamCache pc(g, model.params);
    ForwardCollector col;

    for (const auto& item : batch.items) {
        const SentenceForward orig =
            forward_spans(g, pc, model, item.original, /*training=*/true, rng);
        for (std::size_t si = 0; si < item.original.spans.size(); ++si) {
            col.base_spans.emplace_back(orig.z[si], item.original.spans[si].label_id);
        }
        if (cfg.mode == TrainMode::VaniIB) {
            col.posteriors.insert(col.posteriors.end(), orig.posts.begin(), orig.posts.end());
        }
        if (!item.variant.has_value()) continue;

        const SentenceForward var =
            forward_spans(g, pc, model, *item.variant, /*training=*/true, rng);
        if (cfg.mode == TrainMode::DataAug) {
            for (std::size_t si = 0; si < item.variant->spans.size(); ++si) {
                col.base_spans.emplace_back(var.z[si], item.variant->spans[si].label_id);
            }
        }
        if (cfg.mode == TrainMode::Miner) {
            const auto& align_o = item.original.gold_span_index;
            const auto& align_v = item.variant->gold_span_index;
            for (std::size_t k = 0; k < align_o.size(); ++k) {
                if (align_o[k] < 0 || align_v[k] < 0) continue;
                const auto io = static_cast<std::size_t>(align_o[k]);
                const auto iv = static_cast<std::size_t>(align_v[k]);
                col.gi_pairs.emplace_back(orig.z[io], var.z[iv]);
                col.si_pairs.emplace_back(orig.posts[io], var.posts[iv]);
            }
        }
    }

    MINER_CHECK(!col.base_spans.empty(), "train_step: batch produced no spans");
    const ag::Var base = base_loss(g, pc, col.base_spans);

    ag::Var gi = g.scalar(0.0);
    ag::Var si = g.scalar(0.0);
    LossWeights effective = cfg.weights;
    ag::Var total{};
    if (cfg.mode == TrainMode::Miner) {
        if (cfg.weights.gamma > 0.0 && col.gi_pairs.size() >= 2) {
            gi = gi_loss(g, pc, model.cfg, col.gi_pairs, cfg.gi_symmetric);
        }
        if (cfg.weights.beta > 0.0 && !col.si_pairs.empty()) {
            si = si_loss(g, col.si_pairs, cfg.js_mode, cfg.js_samples, &rng);
        }
        total = total_loss(g, base, gi, si, effective);
    } else if (cfg.mode == TrainMode::VaniIB) {
        si = vanilla_ib_loss(g, col.posteriors);
        effective.gamma = 0.0;
        total = total_loss(g, base, gi, si, effective);
    } else {
        effective.gamma = 0.0;
        effective.beta = 0.0;
        total = total_loss(g, base, gi, si, effective);
    }

    const double total_v = g.scalar_val(total);
    if (!std::isfinite(total_v)) {
        throw NumericError("non-finite total loss at step " + std::to_string(step));
    }

    model.params.zero_grads();
    g.backward(total);
    if (const auto bad = model.params.first_nonfinite_grad()) {
        throw NumericError("non-finite gradient in tensor " + *bad + " at step " +
                           std::to_string(step));
    }
    opt.step(model.params, cfg.learning_rate);
    if (const auto bad = model.params.first_nonfinite_value()) {
        throw NumericError("non-finite parameter in tensor " + *bad + " after step " +
                           std::to_string(step));
    }

    LossRecord rec;
    rec.step = step;
    rec.epoch = epoch;
    rec.base = g.scalar_val(base);
    rec.gi = g.scalar_val(gi);
    rec.si = g.scalar_val(si);
    rec.total = total_v;
    return rec;
}

GradCheckResult gradient_check(ModelParams& params, const std::vector<std::string>& names,
                               const std::function<double(bool)>& loss_fn, double epsilon,
                               std::size_t max_coords_per_tensor, Rng* sample_rng) {
    MINER_CHECK(epsilon > 0.0, "gradient_check: epsilon must be positive");

    params.zero_grads();
    loss_fn(/*with_grad=*/true);

    std::vector<Tensor*> targets;
    if (names.empty()) {
        for (auto& t : params.tensors()) targets.push_back(&t);
    } else {
        for (const auto& n : names) targets.push_back(&params.get(n));
    }

    GradCheckResult result;
    for (Tensor* t : targets) {
        const std::vector<double> analytic = t->g;
        std::vector<std::size_t> coords;
        if (max_coords_per_tensor == 0 || max_coords_per_tensor >= t->size()) {
            coords.resize(t->size());
            for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        } else {
            MINER_CHECK(sample_rng != nullptr, "gradient_check: sampling needs an rng");
            for (std::size_t i = 0; i < max_coords_per_tensor; ++i) {
                coords.push_back(sample_rng->uniform_int(t->size()));
            }
        }
        for (const std::size_t i : coords) {
            const double saved = t->v[i];
            t->v[i] = saved + epsilon;
            const double plus = loss_fn(false);
            t->v[i] = saved - epsilon;
            const double minus = loss_fn(false);
            t->v[i] = saved;
            const double numeric = (plus - minus) / (2.0 * epsilon);
            const double denom = std::max({1e-8, std::fabs(analytic[i]), std::fabs(numeric)});
            result.max_rel_err =
                std::max(result.max_rel_err, std::fabs(analytic[i] - numeric) / denom);
            ++result.coords_checked;
        }
    }
    return result;
}

FitResult fit(const std::vector<Sentence>& train, const std::vector<Sentence>& dev, Model& model,
              const MentionLexicon& lexicon, const TrainConfig& cfg) {
    cfg.check();
    MINER_CHECK(!dev.empty(), "fit: dev corpus must be non-empty");

    FitResult result;
    AdamState opt(model.params);
    int step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto batches = make_batches(train, lexicon, model, cfg, epoch, &result.stats);
        for (std::size_t b = 0; b < batches.size(); ++b) {
            Rng step_rng(mix_seed(cfg.seed, 0x57e9u, static_cast<std::uint64_t>(epoch), b));
            result.log.push_back(train_step(batches[b], model, opt, cfg, step_rng, step, epoch));
            ++step;
        }

        const double dev_f1 = evaluate(model, dev).overall.f1();
        result.epoch_dev_f1.emplace_back(epoch, dev_f1);
        if (!result.log.empty()) result.log.back().dev_f1 = dev_f1;

        // retain top-k snapshots; ties keep the earlier epoch
        if (static_cast<int>(result.checkpoints.size()) < cfg.checkpoint_top_k ||
            dev_f1 > result.checkpoints.back().dev_f1) {
            result.checkpoints.push_back({dev_f1, epoch, model.params});
            std::stable_sort(result.checkpoints.begin(), result.checkpoints.end(),
                             [](const CheckpointEntry& a, const CheckpointEntry& b) {
                                 return a.dev_f1 > b.dev_f1;
                             });
            if (static_cast<int>(result.checkpoints.size()) > cfg.checkpoint_top_k) {
                result.checkpoints.pop_back();
            }
        }
    }
    return result;
}

CheckpointEvaluation evaluate_checkpoints(const FitResult& fit_result, Model& model,
                                          const std::vector<Sentence>& test,
                                          const DictSplit* split) {
    CheckpointEvaluation out;
    const ModelParams saved = model.params;
    for (const auto& ckpt : fit_result.checkpoints) {
        model.params = ckpt.params;
        out.per_checkpoint_f1.push_back(evaluate(model, test, split).overall.f1());
    }
    model.params = saved;
    if (!out.per_checkpoint_f1.empty()) {
        double acc = 0.0;
        for (const double f : out.per_checkpoint_f1) acc += f;
        out.mean_f1 = acc / static_cast<double>(out.per_checkpoint_f1.size());
    }
    return out;
}

std::string training_log_csv(const std::vector<LossRecord>& log) {
    std::string out = "step,epoch,base,gi,si,total,dev_f1\n";
    char buf[160];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.10g,%.10g,%.10g,%.10g,", r.step, r.epoch, r.base,
                      r.gi, r.si, r.total);
        out += buf;
        if (r.dev_f1.has_value()) {
            std::snprintf(buf, sizeof(buf), "%.10g", *r.dev_f1);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace miner
