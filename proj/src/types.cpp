#include "miner/types.hpp"

#include <algorithm>

namespace miner {

std::string surface(const std::vector<std::string>& tokens, int start, int end) {
    MINER_CHECK(start >= 1 && end >= start && end <= static_cast<int>(tokens.size()),
                "surface: interval out of range");
    std::string out = tokens[static_cast<std::size_t>(start) - 1];
    for (int i = start + 1; i <= end; ++i) {
        out += ' ';
        out += tokens[static_cast<std::size_t>(i) - 1];
    }
    return out;
}

std::string surface(const Sentence& s, const EntityMention& m) {
    return surface(s.tokens, m.start, m.end);
}

void validate(const Sentence& s) {
    MINER_CHECK(!s.tokens.empty(), "Sentence: tokens must be non-empty");
    const int n = static_cast<int>(s.tokens.size());
    std::vector<EntityMention> sorted = s.mentions;
    std::sort(sorted.begin(), sorted.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });
    int prev_end = 0;
    for (const auto& m : sorted) {
        MINER_CHECK(m.start >= 1 && m.start <= m.end && m.end <= n,
                    "Sentence: mention interval out of range");
        MINER_CHECK(!m.etype.empty() && m.etype != kOutsideLabel,
                    "Sentence: mention type must be a non-O label");
        MINER_CHECK(m.start > prev_end, "Sentence: mentions overlap");
        prev_end = m.end;
    }
}

} // namespace miner
