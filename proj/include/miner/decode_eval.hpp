#pragma once

#include <map>
#include <string>
#include <vector>

#include "miner/corpus.hpp"
#include "miner/model.hpp"
#include "miner/types.hpp"

namespace miner {

// A span predicted as an entity: 1-based inclusive indices, non-O label and
// the softmax probability of that label.
struct ScoredSpan {
    int start = 0;
    int end = 0;
    std::string label;
    double prob = 0.0;
};

struct PrfCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    double precision() const;
    double recall() const;
    double f1() const;
};

struct SplitCounts {
    PrfCounts indict;
    PrfCounts outdict;
};

struct EvalReport {
    PrfCounts overall;
    std::map<std::string, PrfCounts> per_type;
    SplitCounts split;                            // InDict / OutDict, all types
    std::map<std::string, SplitCounts> per_type_split;
    bool has_split = false;
};

// Softmax distribution over labels for a given z (plain values).
std::vector<double> label_distribution(const Model& model, const std::vector<double>& z);

// Classifies every enumerated span of the sentence using the posterior mean
// (deterministic inference). Spans whose argmax label is O are dropped.
std::vector<ScoredSpan> classify_spans(const Sentence& sentence, Model& model);

// Greedy overlap resolution: descending probability, ties broken by earlier
// start, then shorter span, then label. Output sorted by start.
std::vector<ScoredSpan> heuristic_decode(std::vector<ScoredSpan> spans);

// Entity-level micro F1 with exact (start, end, label) matching. When
// `split` is given, TP/FN are attributed to the partition of the matched
// gold mention and unmatched predictions to the partition of their surface
// string.
EvalReport micro_f1(const std::vector<std::vector<ScoredSpan>>& pred,
                    const std::vector<Sentence>& gold, const DictSplit* split = nullptr);

// classify + decode + micro_f1 over a corpus.
EvalReport evaluate(Model& model, const std::vector<Sentence>& test,
                    const DictSplit* split = nullptr);
std::vector<std::vector<ScoredSpan>> predict(Model& model, const std::vector<Sentence>& test);

// Table-shaped CSV (rows = types + ALL, columns = InDict/OutDict P/R and
// diffs, percentages) and a full JSON rendering.
std::string eval_report_table_csv(const EvalReport& report);
std::string eval_report_json(const EvalReport& report);

} // namespace miner
