#include "miner/corpus.hpp"

#include <algorithm>

namespace miner {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{"<pad>", "<unk>"}) {}

Vocabulary::Vocabulary(std::vector<std::string> id_to_token)
    : id_to_token_(std::move(id_to_token)) {
    MINER_CHECK(id_to_token_.size() >= 2, "Vocabulary: pad and unk entries required");
    for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
        token_to_id_.emplace(id_to_token_[i], static_cast<int>(i));
    }
}

int Vocabulary::lookup(const std::string& token) const {
    const auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(int id) const {
    MINER_CHECK(id >= 0 && id < size(), "Vocabulary: id out of range");
    return id_to_token_[static_cast<std::size_t>(id)];
}

void Vocabulary::add(const std::string& token) {
    if (token_to_id_.count(token)) return;
    token_to_id_.emplace(token, size());
    id_to_token_.push_back(token);
}

namespace {
std::string lexicon_key(const std::string& etype, const std::vector<std::string>& tokens) {
    std::string key = etype;
    for (const auto& t : tokens) {
        key += '\x1f';
        key += t;
    }
    return key;
}
} // namespace

void MentionLexicon::add(const std::string& etype, const std::vector<std::string>& tokens) {
    MINER_CHECK(!tokens.empty(), "MentionLexicon: empty mention");
    if (!seen_.insert(lexicon_key(etype, tokens)).second) return;
    entries_[etype].push_back(tokens);
}

bool MentionLexicon::has_type(const std::string& etype) const {
    const auto it = entries_.find(etype);
    return it != entries_.end() && !it->second.empty();
}

const std::vector<std::vector<std::string>>& MentionLexicon::entries(
    const std::string& etype) const {
    static const std::vector<std::vector<std::string>> kEmpty;
    const auto it = entries_.find(etype);
    return it == entries_.end() ? kEmpty : it->second;
}

bool MentionLexicon::contains(const std::string& etype,
                              const std::vector<std::string>& tokens) const {
    return seen_.count(lexicon_key(etype, tokens)) > 0;
}

std::vector<std::string> MentionLexicon::types() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [etype, list] : entries_) {
        if (!list.empty()) out.push_back(etype);
    }
    return out;
}

std::size_t MentionLexicon::total_entries() const {
    std::size_t n = 0;
    for (const auto& [etype, list] : entries_) n += list.size();
    return n;
}

bool MentionLexicon::disjoint_from(const MentionLexicon& other) const {
    for (const auto& [etype, list] : entries_) {
        for (const auto& tokens : list) {
            for (const auto& other_type : other.types()) {
                if (other.contains(other_type, tokens)) return false;
            }
        }
    }
    return true;
}

std::vector<SpanCandidate> enumerate_spans(const Sentence& sentence, int max_len) {
    MINER_CHECK(max_len >= 1, "enumerate_spans: max_len must be >= 1");
    const int n = static_cast<int>(sentence.tokens.size());

    std::vector<SpanCandidate> out;
    out.reserve(span_count(static_cast<std::size_t>(n), static_cast<std::size_t>(max_len)));
    for (int b = 1; b <= n; ++b) {
        for (int e = b; e <= n && e - b + 1 <= max_len; ++e) {
            out.push_back({b, e, kOutsideLabel});
        }
    }
    for (const auto& m : sentence.mentions) {
        for (auto& span : out) {
            if (span.start == m.start && span.end == m.end) {
                span.label = m.etype;
                break;
            }
        }
    }
    return out;
}

std::size_t span_count(std::size_t n, std::size_t max_len) {
    std::size_t total = 0;
    for (std::size_t l = 1; l <= std::min(max_len, n); ++l) total += n - l + 1;
    return total;
}

SpanCoverage span_coverage(const std::vector<Sentence>& sentences, int max_len) {
    SpanCoverage cov;
    for (const auto& s : sentences) {
        for (const auto& m : s.mentions) {
            if (m.end - m.start + 1 <= max_len) {
                ++cov.reachable;
            } else {
                ++cov.unreachable;
            }
        }
    }
    return cov;
}

Vocabulary build_vocabulary(const std::vector<Sentence>& train, int min_count) {
    MINER_CHECK(!train.empty(), "build_vocabulary: training corpus is empty");
    std::unordered_map<std::string, int> counts;
    for (const auto& s : train) {
        for (const auto& t : s.tokens) ++counts[t];
    }
    Vocabulary vocab;
    for (const auto& s : train) {
        for (const auto& t : s.tokens) {
            if (counts[t] >= min_count) vocab.add(t);
        }
    }
    return vocab;
}

MentionLexicon build_mention_lexicon(const std::vector<Sentence>& train) {
    MentionLexicon lex;
    for (const auto& s : train) {
        for (const auto& m : s.mentions) {
            lex.add(m.etype, std::vector<std::string>(
                                 s.tokens.begin() + (m.start - 1), s.tokens.begin() + m.end));
        }
    }
    return lex;
}

OovStats oov_rate(const std::vector<Sentence>& train, const std::vector<Sentence>& test,
                  OovCounting counting) {
    std::unordered_set<std::string> train_surfaces;
    for (const auto& s : train) {
        for (const auto& m : s.mentions) train_surfaces.insert(surface(s, m));
    }

    OovStats stats;
    stats.sents = test.size();
    std::size_t total = 0, oov = 0;
    std::unordered_set<std::string> seen; // for type-level counting
    for (const auto& s : test) {
        for (const auto& m : s.mentions) {
            ++stats.entities;
            const std::string surf = surface(s, m);
            if (counting == OovCounting::Type && !seen.insert(surf).second) continue;
            ++total;
            if (!train_surfaces.count(surf)) ++oov;
        }
    }
    if (total > 0) {
        stats.oov_rate = static_cast<double>(oov) / static_cast<double>(total);
    }
    return stats;
}

DictSplit indict_outdict_split(const std::vector<Sentence>& train,
                               const std::vector<Sentence>& test) {
    DictSplit split;
    for (const auto& s : train) {
        for (const auto& m : s.mentions) split.dictionary.insert(surface(s, m));
    }
    split.mention_in_dict.reserve(test.size());
    for (const auto& s : test) {
        std::vector<bool> flags;
        flags.reserve(s.mentions.size());
        for (const auto& m : s.mentions) {
            const bool in_dict = split.surface_in_dict(surface(s, m));
            flags.push_back(in_dict);
            if (in_dict) {
                ++split.indict_count;
            } else {
                ++split.outdict_count;
            }
        }
        split.mention_in_dict.push_back(std::move(flags));
    }
    return split;
}

} // namespace miner
