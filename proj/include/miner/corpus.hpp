#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "miner/types.hpp"

namespace miner {

// Token -> dense id map with reserved padding and unknown ids. Ids are
// assigned in first-occurrence order over the training corpus, so a given
// corpus always produces the same table.
class Vocabulary {
public:
    static constexpr int kPadId = 0;
    static constexpr int kUnkId = 1;

    Vocabulary();
    explicit Vocabulary(std::vector<std::string> id_to_token);

    int lookup(const std::string& token) const;
    bool contains(const std::string& token) const { return token_to_id_.count(token) > 0; }
    const std::string& token(int id) const;
    int size() const { return static_cast<int>(id_to_token_.size()); }

    const std::vector<std::string>& id_to_token() const { return id_to_token_; }

private:
    friend Vocabulary build_vocabulary(const std::vector<Sentence>&, int);
    void add(const std::string& token);

    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
};

// etype -> deduplicated gold mention token sequences from the training split.
// Entry order is first occurrence, so sampling is reproducible.
class MentionLexicon {
public:
    void add(const std::string& etype, const std::vector<std::string>& tokens);
    bool has_type(const std::string& etype) const;
    // Entries for a type; empty list if the type is absent.
    const std::vector<std::vector<std::string>>& entries(const std::string& etype) const;
    bool contains(const std::string& etype, const std::vector<std::string>& tokens) const;
    std::vector<std::string> types() const;
    std::size_t total_entries() const;

    // True when no surface string of any type appears in `other`.
    bool disjoint_from(const MentionLexicon& other) const;

private:
    std::map<std::string, std::vector<std::vector<std::string>>> entries_;
    std::unordered_set<std::string> seen_; // "etype\x1f<surface>" keys
};

// All (b, e) with 1 <= b <= e <= n and e - b + 1 <= max_len, in lexicographic
// order, with labels reassigned from the gold mentions.
std::vector<SpanCandidate> enumerate_spans(const Sentence& sentence, int max_len);

// Closed-form count of enumerated spans for a sentence of n tokens.
std::size_t span_count(std::size_t n, std::size_t max_len);

// Gold mentions whose length exceeds max_len can never be produced by span
// enumeration; they still count as recall errors downstream.
struct SpanCoverage {
    std::size_t reachable = 0;
    std::size_t unreachable = 0;
};
SpanCoverage span_coverage(const std::vector<Sentence>& sentences, int max_len);

// Tokens with frequency >= min_count get ids; everything else resolves to the
// unknown id at lookup time. Throws ContractViolation on an empty corpus.
Vocabulary build_vocabulary(const std::vector<Sentence>& train, int min_count);

MentionLexicon build_mention_lexicon(const std::vector<Sentence>& train);

// Table-2-style statistics for one train/test pair. oov_rate is empty when
// the test split has no gold mentions.
struct OovStats {
    std::size_t sents = 0;
    std::size_t entities = 0;
    std::optional<double> oov_rate;
};

// occurrence-level: every test mention occurrence counts once.
// type-level: unique test mention surfaces count once.
enum class OovCounting { Occurrence, Type };

OovStats oov_rate(const std::vector<Sentence>& train, const std::vector<Sentence>& test,
                  OovCounting counting = OovCounting::Occurrence);

// Partition of test gold mentions by presence of their surface string in the
// training mention dictionary. mention_in_dict[i][j] corresponds to
// test[i].mentions[j].
struct DictSplit {
    std::unordered_set<std::string> dictionary;
    std::vector<std::vector<bool>> mention_in_dict;
    std::size_t indict_count = 0;
    std::size_t outdict_count = 0;

    bool surface_in_dict(const std::string& s) const { return dictionary.count(s) > 0; }
};

DictSplit indict_outdict_split(const std::vector<Sentence>& train,
                               const std::vector<Sentence>& test);

} // namespace miner
