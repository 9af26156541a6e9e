#include "miner/decode_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "miner/autodiff.hpp"
#include "miner/bottleneck.hpp"
#include "miner/encoder.hpp"

namespace miner {

double PrfCounts::precision() const {
    const std::size_t denom = tp + fp;
    return denom == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(denom);
}

double PrfCounts::recall() const {
    const std::size_t denom = tp + fn;
    return denom == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(denom);
}

double PrfCounts::f1() const {
    const double p = precision(), r = recall();
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

std::vector<double> label_distribution(const Model& model, const std::vector<double>& z) {
    const Tensor& labels = model.params.get("cls.labels");
    MINER_CHECK(static_cast<int>(z.size()) == labels.cols, "label_distribution: dim mismatch");
    std::vector<double> logits(static_cast<std::size_t>(labels.rows), 0.0);
    for (int k = 0; k < labels.rows; ++k) {
        double acc = 0.0;
        for (int j = 0; j < labels.cols; ++j) acc += labels.at(k, j) * z[static_cast<std::size_t>(j)];
        logits[static_cast<std::size_t>(k)] = acc;
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (auto& x : logits) {
        x = std::exp(x - m);
        total += x;
    }
    for (auto& x : logits) x /= total;
    return logits;
}

std::vector<ScoredSpan> classify_spans(const Sentence& sentence, Model& model) {
    ag::Graph g(/*grad_enabled=*/false);
    ag::ParamCache pc(g, model.params);

    const auto ids = token_ids(sentence, model.vocab);
    const TokenRepr repr =
        encode_sentence(g, pc, model, model.params, ids, /*training=*/false, nullptr);

    std::vector<ScoredSpan> out;
    for (const auto& span : enumerate_spans(sentence, model.cfg.max_span_length)) {
        const SpanRepr t =
            span_representation(g, model.params, model.cfg, repr.h, span.start - 1, span.end - 1);
        const Posterior post = posterior(g, pc, model.cfg, t.combined);
        const auto probs = label_distribution(model, g.val(post.mean));
        const std::size_t argmax = static_cast<std::size_t>(
            std::max_element(probs.begin(), probs.end()) - probs.begin());
        if (argmax == 0) continue; // O
        out.push_back({span.start, span.end, model.label_name(static_cast<int>(argmax)),
                       probs[argmax]});
    }
    return out;
}

std::vector<ScoredSpan> heuristic_decode(std::vector<ScoredSpan> spans) {
    std::sort(spans.begin(), spans.end(), [](const ScoredSpan& a, const ScoredSpan& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        if (a.start != b.start) return a.start < b.start;
        const int la = a.end - a.start, lb = b.end - b.start;
        if (la != lb) return la < lb;
        return a.label < b.label;
    });

    std::vector<ScoredSpan> accepted;
    for (const auto& s : spans) {
        bool overlaps = false;
        for (const auto& a : accepted) {
            if (s.start <= a.end && a.start <= s.end) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) accepted.push_back(s);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const ScoredSpan& a, const ScoredSpan& b) { return a.start < b.start; });
    return accepted;
}

EvalReport micro_f1(const std::vector<std::vector<ScoredSpan>>& pred,
                    const std::vector<Sentence>& gold, const DictSplit* split) {
    MINER_CHECK(pred.size() == gold.size(), "micro_f1: pred/gold sentence counts differ");
    if (split) {
        MINER_CHECK(split->mention_in_dict.size() == gold.size(),
                    "micro_f1: split does not match the gold corpus");
    }

    EvalReport rep;
    rep.has_split = split != nullptr;

    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto& sent = gold[i];
        std::vector<bool> consumed(sent.mentions.size(), false);

        for (const auto& p : pred[i]) {
            int match = -1;
            for (std::size_t j = 0; j < sent.mentions.size(); ++j) {
                const auto& m = sent.mentions[j];
                if (!consumed[j] && m.start == p.start && m.end == p.end && m.etype == p.label) {
                    match = static_cast<int>(j);
                    break;
                }
            }
            if (match >= 0) {
                consumed[static_cast<std::size_t>(match)] = true;
                ++rep.overall.tp;
                ++rep.per_type[p.label].tp;
                if (split) {
                    const bool in_dict = split->mention_in_dict[i][static_cast<std::size_t>(match)];
                    auto& bucket = in_dict ? rep.split.indict : rep.split.outdict;
                    auto& tbucket = in_dict ? rep.per_type_split[p.label].indict
                                            : rep.per_type_split[p.label].outdict;
                    ++bucket.tp;
                    ++tbucket.tp;
                }
            } else {
                ++rep.overall.fp;
                ++rep.per_type[p.label].fp;
                if (split) {
                    // unmatched predictions attributed by their surface string
                    const bool in_dict =
                        split->surface_in_dict(surface(sent.tokens, p.start, p.end));
                    auto& bucket = in_dict ? rep.split.indict : rep.split.outdict;
                    auto& tbucket = in_dict ? rep.per_type_split[p.label].indict
                                            : rep.per_type_split[p.label].outdict;
                    ++bucket.fp;
                    ++tbucket.fp;
                }
            }
        }

        for (std::size_t j = 0; j < sent.mentions.size(); ++j) {
            if (consumed[j]) continue;
            const auto& m = sent.mentions[j];
            ++rep.overall.fn;
            ++rep.per_type[m.etype].fn;
            if (split) {
                const bool in_dict = split->mention_in_dict[i][j];
                auto& bucket = in_dict ? rep.split.indict : rep.split.outdict;
                auto& tbucket =
                    in_dict ? rep.per_type_split[m.etype].indict : rep.per_type_split[m.etype].outdict;
                ++bucket.fn;
                ++tbucket.fn;
            }
        }
    }
    return rep;
}

std::vector<std::vector<ScoredSpan>> predict(Model& model, const std::vector<Sentence>& test) {
    std::vector<std::vector<ScoredSpan>> pred;
    pred.reserve(test.size());
    for (const auto& s : test) pred.push_back(heuristic_decode(classify_spans(s, model)));
    return pred;
}

EvalReport evaluate(Model& model, const std::vector<Sentence>& test, const DictSplit* split) {
    return micro_f1(predict(model, test), test, split);
}

namespace {
std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
    return buf;
}
} // namespace

std::string eval_report_table_csv(const EvalReport& report) {
    std::string out = "type,indict_precision,outdict_precision,precision_diff,"
                      "indict_recall,outdict_recall,recall_diff\n";
    const auto emit = [&out](const std::string& name, const SplitCounts& s) {
        const double pi = s.indict.precision(), po = s.outdict.precision();
        const double ri = s.indict.recall(), ro = s.outdict.recall();
        out += name + "," + pct(pi) + "," + pct(po) + "," + pct(pi - po) + "," + pct(ri) + "," +
               pct(ro) + "," + pct(ri - ro) + "\n";
    };
    for (const auto& [type, s] : report.per_type_split) emit(type, s);
    emit("ALL", report.split);
    out += "# unmatched predictions are attributed to InDict when their surface string appears "
           "in the training mention dictionary, else OutDict\n";
    return out;
}

std::string eval_report_json(const EvalReport& report) {
    using nlohmann::json;
    const auto prf = [](const PrfCounts& c) {
        return json{{"tp", c.tp},         {"fp", c.fp},         {"fn", c.fn},
                    {"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()}};
    };
    json j;
    j["overall"] = prf(report.overall);
    j["per_type"] = json::object();
    for (const auto& [type, c] : report.per_type) j["per_type"][type] = prf(c);
    if (report.has_split) {
        j["indict"] = prf(report.split.indict);
        j["outdict"] = prf(report.split.outdict);
        j["per_type_split"] = json::object();
        for (const auto& [type, s] : report.per_type_split) {
            j["per_type_split"][type] = {{"indict", prf(s.indict)}, {"outdict", prf(s.outdict)}};
        }
    }
    return j.dump(2);
}

} // namespace miner
