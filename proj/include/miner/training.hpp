#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "miner/augment.hpp"
#include "miner/decode_eval.hpp"
#include "miner/model.hpp"
#include "miner/objectives.hpp"

namespace miner {

enum class TrainMode { Miner, BaseOnly, VaniIB, DataAug };
TrainMode train_mode_from_string(const std::string& s);
std::string to_string(TrainMode m);

struct TrainConfig {
    double learning_rate = 5e-5;
    int epochs = 20;
    int batch_size = 32;
    std::uint64_t seed = 1;
    int max_sentence_len = 128;
    int checkpoint_top_k = 3;
    LossWeights weights;
    TrainMode mode = TrainMode::Miner;

    int min_count = 1;          // vocabulary cutoff
    double o_span_ratio = 3.0;  // sampled O spans per gold span
    int o_span_min = 4;         // O spans even for mention-free sentences
    JsMode js_mode = JsMode::Mc;
    int js_samples = 1;
    bool gi_symmetric = true;   // anchor both directions of each pair

    void check() const;
};

// 0-based token offsets; label_id indexes Model::labels.
struct SpanInstance {
    int start0 = 0;
    int end0 = 0;
    int label_id = 0;
};

struct EncodedSentence {
    std::vector<int> ids;              // vocabulary ids, truncated
    std::vector<SpanInstance> spans;   // gold spans + subsampled O spans
    std::vector<int> gold_span_index;  // mention k -> index into spans, -1 if dropped
};

struct BatchItem {
    EncodedSentence original;
    std::optional<EncodedSentence> variant;
};

struct Batch {
    std::vector<BatchItem> items;
};

struct BatchStats {
    std::size_t truncated_sentences = 0;
    std::size_t dropped_mentions = 0; // beyond the truncation cut
};

// Deterministic per-(config seed, epoch) batch stream: shuffled sentences,
// truncation at max_sentence_len, contrastive variants for MINER/DataAug
// with per-sentence derived seeds, gold spans plus subsampled O spans.
std::vector<Batch> make_batches(const std::vector<Sentence>& train,
                                const MentionLexicon& lexicon, const Model& model,
                                const TrainConfig& cfg, int epoch,
                                BatchStats* stats = nullptr);

struct LossRecord {
    int step = 0;
    int epoch = 0;
    double base = 0.0;
    double gi = 0.0;
    double si = 0.0; // JS term for MINER; KL-to-prior term for VaniIB
    double total = 0.0;
    std::optional<double> dev_f1; // set on the last step of each epoch
};

// Adam with standard defaults; moment buffers align with ModelParams order.
class AdamState {
public:
    explicit AdamState(const ModelParams& params);
    void step(ModelParams& params, double learning_rate);

private:
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    std::uint64_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

// One optimization step over a batch: forward, backward, NaN guard, update.
// Throws NumericError naming the offending tensor on non-finite values.
LossRecord train_step(const Batch& batch, Model& model, AdamState& opt, const TrainConfig& cfg,
                      Rng& rng, int step, int epoch);

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t coords_checked = 0;
};

// Central-difference check of analytic gradients. loss_fn(true) must run the
// full forward/backward into params' grads and return the loss; loss_fn(false)
// must be the same deterministic loss without backward. Checks every
// coordinate of the named tensors (all tensors when names is empty), or a
// random sample of max_coords_per_tensor when nonzero.
GradCheckResult gradient_check(ModelParams& params, const std::vector<std::string>& names,
                               const std::function<double(bool)>& loss_fn, double epsilon,
                               std::size_t max_coords_per_tensor = 0, Rng* sample_rng = nullptr);

struct CheckpointEntry {
    double dev_f1 = 0.0;
    int epoch = 0;
    ModelParams params;
};

struct FitResult {
    std::vector<CheckpointEntry> checkpoints; // sorted by dev_f1 descending
    std::vector<LossRecord> log;
    std::vector<std::pair<int, double>> epoch_dev_f1;
    BatchStats stats;
};

// Epoch loop with per-epoch dev micro-F1 and top-k checkpoint retention.
// Model params are left at their final state.
FitResult fit(const std::vector<Sentence>& train, const std::vector<Sentence>& dev, Model& model,
              const MentionLexicon& lexicon, const TrainConfig& cfg);

// Mean and per-checkpoint test F1 over the retained checkpoints.
struct CheckpointEvaluation {
    std::vector<double> per_checkpoint_f1;
    double mean_f1 = 0.0;
};
CheckpointEvaluation evaluate_checkpoints(const FitResult& fit_result, Model& model,
                                          const std::vector<Sentence>& test,
                                          const DictSplit* split = nullptr);

std::string training_log_csv(const std::vector<LossRecord>& log);

} // namespace miner
