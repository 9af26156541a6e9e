#pragma once

#include <string>
#include <vector>

#include "miner/error.hpp"

namespace miner {

// A gold entity mention. Token indices are 1-based inclusive throughout the
// corpus layer; they are converted to 0-based offsets only at tensor
// boundaries inside the model code.
struct EntityMention {
    int start = 0;
    int end = 0;
    std::string etype;

    bool operator==(const EntityMention&) const = default;
};

struct Sentence {
    std::vector<std::string> tokens;
    std::vector<EntityMention> mentions;

    bool operator==(const Sentence&) const = default;
};

// An enumerated candidate span. label is "O" unless (start, end) exactly
// matches a gold mention interval.
struct SpanCandidate {
    int start = 0;
    int end = 0;
    std::string label;

    bool operator==(const SpanCandidate&) const = default;
};

inline const std::string kOutsideLabel = "O";

// Surface string of a token interval, tokens joined by single spaces.
std::string surface(const std::vector<std::string>& tokens, int start, int end);
std::string surface(const Sentence& s, const EntityMention& m);

// Throws ContractViolation if the Sentence invariants do not hold:
// non-empty tokens, in-bounds mentions, start <= end, no overlaps.
void validate(const Sentence& s);

} // namespace miner
