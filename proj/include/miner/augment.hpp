#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "miner/corpus.hpp"
#include "miner/types.hpp"

namespace miner {

// Two sentences sharing context but differing in mention surfaces.
// span_alignment[k] is the variant mention index paired with original
// mention k (a bijection; identity under 1:1 replacement).
struct ContrastivePair {
    Sentence original;
    Sentence variant;
    std::vector<int> span_alignment;
};

// Replaces each mention by a uniformly sampled same-type lexicon entry,
// different from the original surface whenever the type has >= 2 entries.
// Mention intervals and downstream token offsets are recomputed for length
// changes. Throws AugmentError naming the type when a mention's type has no
// lexicon entries.
ContrastivePair replace_mentions(const Sentence& sentence, const MentionLexicon& lexicon,
                                 std::uint64_t rng_seed);

// Applies exactly one character-level edit (modify / insert / delete, chosen
// uniformly at a uniform position) to every gold-mention token. Non-mention
// tokens and mention boundaries are untouched. Deleting from a
// single-character token falls back to modify.
Sentence typos_transform(const Sentence& sentence, std::uint64_t rng_seed);

struct OovTestReport {
    std::size_t replaced = 0;
    std::size_t skipped = 0;                    // types absent from the holdout
    std::map<std::string, std::size_t> skipped_by_type;
};

// Replaces every test mention by a same-type entry from holdout_lexicon,
// which must be surface-disjoint from the training lexicon. Mentions of
// types missing from the holdout are left unchanged and counted.
std::vector<Sentence> make_oov_testset(const std::vector<Sentence>& test,
                                       const MentionLexicon& lexicon,
                                       const MentionLexicon& holdout_lexicon,
                                       std::uint64_t rng_seed,
                                       OovTestReport* report = nullptr);

} // namespace miner
