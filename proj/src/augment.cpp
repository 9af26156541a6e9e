#include "miner/augment.hpp"

#include <algorithm>

#include "miner/rng.hpp"

namespace miner {

namespace {

std::vector<EntityMention> sorted_mentions(const Sentence& s) {
    std::vector<EntityMention> out = s.mentions;
    std::sort(out.begin(), out.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });
    return out;
}

// Uniform pick from entries, excluding `original` when an alternative exists.
const std::vector<std::string>& pick_replacement(
    const std::vector<std::vector<std::string>>& entries,
    const std::vector<std::string>& original, Rng& rng) {
    if (entries.size() == 1) return entries[0];
    bool has_original = false;
    for (const auto& e : entries) {
        if (e == original) {
            has_original = true;
            break;
        }
    }
    if (!has_original) {
        return entries[rng.uniform_int(entries.size())];
    }
    // sample until it differs; entries are deduplicated so this terminates
    while (true) {
        const auto& cand = entries[rng.uniform_int(entries.size())];
        if (cand != original) return cand;
    }
}

// Rebuilds a sentence with each mention's tokens substituted, shifting
// downstream offsets. `surfaces[k]` replaces mention k (sorted order).
Sentence splice(const Sentence& original, const std::vector<EntityMention>& mentions,
                const std::vector<std::vector<std::string>>& surfaces) {
    Sentence out;
    out.tokens.reserve(original.tokens.size());
    int cursor = 1; // next original token to copy (1-based)
    for (std::size_t k = 0; k < mentions.size(); ++k) {
        const auto& m = mentions[k];
        for (; cursor < m.start; ++cursor) {
            out.tokens.push_back(original.tokens[static_cast<std::size_t>(cursor) - 1]);
        }
        const int new_start = static_cast<int>(out.tokens.size()) + 1;
        for (const auto& t : surfaces[k]) out.tokens.push_back(t);
        out.mentions.push_back({new_start, static_cast<int>(out.tokens.size()), m.etype});
        cursor = m.end + 1;
    }
    for (; cursor <= static_cast<int>(original.tokens.size()); ++cursor) {
        out.tokens.push_back(original.tokens[static_cast<std::size_t>(cursor) - 1]);
    }
    return out;
}

} // namespace

ContrastivePair replace_mentions(const Sentence& sentence, const MentionLexicon& lexicon,
                                 std::uint64_t rng_seed) {
    validate(sentence);
    Rng rng(rng_seed);

    const auto mentions = sorted_mentions(sentence);
    std::vector<std::vector<std::string>> surfaces;
    surfaces.reserve(mentions.size());
    for (const auto& m : mentions) {
        if (!lexicon.has_type(m.etype)) {
            throw AugmentError("no lexicon entries for entity type " + m.etype);
        }
        std::vector<std::string> original_tokens(sentence.tokens.begin() + (m.start - 1),
                                                 sentence.tokens.begin() + m.end);
        surfaces.push_back(pick_replacement(lexicon.entries(m.etype), original_tokens, rng));
    }

    ContrastivePair pair;
    pair.original = sentence;
    pair.original.mentions = mentions;
    pair.variant = splice(sentence, mentions, surfaces);
    pair.span_alignment.resize(mentions.size());
    for (std::size_t k = 0; k < mentions.size(); ++k) {
        pair.span_alignment[k] = static_cast<int>(k);
    }
    return pair;
}

namespace {

constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz";
constexpr std::size_t kAlphabetSize = 26;

std::string edit_once(const std::string& token, Rng& rng) {
    enum { kModify = 0, kInsert = 1, kDelete = 2 };
    int op = static_cast<int>(rng.uniform_int(3));
    if (op == kDelete && token.size() == 1) op = kModify;

    std::string out = token;
    switch (op) {
        case kModify: {
            const std::size_t pos = rng.uniform_int(out.size());
            // pick a letter different from the current byte so the edit
            // distance is exactly 1
            char c = kAlphabet[rng.uniform_int(kAlphabetSize)];
            while (c == out[pos]) c = kAlphabet[rng.uniform_int(kAlphabetSize)];
            out[pos] = c;
            break;
        }
        case kInsert: {
            const std::size_t pos = rng.uniform_int(out.size() + 1);
            out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos),
                       kAlphabet[rng.uniform_int(kAlphabetSize)]);
            break;
        }
        case kDelete: {
            const std::size_t pos = rng.uniform_int(out.size());
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
            break;
        }
    }
    return out;
}

} // namespace

Sentence typos_transform(const Sentence& sentence, std::uint64_t rng_seed) {
    validate(sentence);
    Rng rng(rng_seed);
    Sentence out = sentence;
    for (const auto& m : sorted_mentions(sentence)) {
        for (int i = m.start; i <= m.end; ++i) {
            auto& tok = out.tokens[static_cast<std::size_t>(i) - 1];
            tok = edit_once(tok, rng);
        }
    }
    return out;
}

std::vector<Sentence> make_oov_testset(const std::vector<Sentence>& test,
                                       const MentionLexicon& lexicon,
                                       const MentionLexicon& holdout_lexicon,
                                       std::uint64_t rng_seed, OovTestReport* report) {
    MINER_CHECK(holdout_lexicon.disjoint_from(lexicon),
                "make_oov_testset: holdout lexicon shares surfaces with the training lexicon");

    std::vector<Sentence> out;
    out.reserve(test.size());
    for (std::size_t idx = 0; idx < test.size(); ++idx) {
        const Sentence& s = test[idx];
        Rng rng = Rng(rng_seed).derive(idx);

        const auto mentions = sorted_mentions(s);
        std::vector<std::vector<std::string>> surfaces;
        surfaces.reserve(mentions.size());
        for (const auto& m : mentions) {
            std::vector<std::string> original_tokens(s.tokens.begin() + (m.start - 1),
                                                     s.tokens.begin() + m.end);
            if (!holdout_lexicon.has_type(m.etype)) {
                surfaces.push_back(original_tokens); // left unchanged, reported
                if (report) {
                    ++report->skipped;
                    ++report->skipped_by_type[m.etype];
                }
                continue;
            }
            surfaces.push_back(
                pick_replacement(holdout_lexicon.entries(m.etype), original_tokens, rng));
            if (report) ++report->replaced;
        }
        out.push_back(splice(s, mentions, surfaces));
    }
    return out;
}

} // namespace miner
