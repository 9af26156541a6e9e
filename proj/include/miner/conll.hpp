#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "miner/types.hpp"

namespace miner {

// Tag scheme of a CoNLL file.
//   BIO2: every entity starts with B-X; I-X may only continue a chunk of the
//         same type. An I-X with no open X chunk is malformed and repaired by
//         treating it as B-X (counted, never silent).
//   BIO:  classic IOB1. I-X opens a chunk on its own; B-X is only required to
//         split two adjacent chunks of the same type.
enum class TagScheme { BIO, BIO2 };

TagScheme tag_scheme_from_string(const std::string& s);
std::string to_string(TagScheme s);

struct ConllReadStats {
    std::size_t sentences = 0;
    std::size_t tokens = 0;
    std::size_t repaired_tags = 0; // I-X treated as B-X
};

// Reads a CoNLL-style file: one "token<TAB or space>tag" per line, blank line
// between sentences, UTF-8. Lines with more than two fields use the first
// field as token and the last as tag.
// Throws IoError if the file cannot be read, ParseError (naming the line
// number) on an unknown tag string.
std::vector<Sentence> read_conll(const std::string& path, TagScheme scheme,
                                 ConllReadStats* stats = nullptr);

std::vector<Sentence> parse_conll(std::istream& in, TagScheme scheme,
                                  ConllReadStats* stats = nullptr);

// Inverse of read_conll for well-formed sentences. Separator is a single
// space, one trailing newline after the final blank line is not emitted:
// output is "tok tag\n"... with a blank line between sentences.
std::string to_conll(const std::vector<Sentence>& sentences, TagScheme scheme);

void write_conll(const std::vector<Sentence>& sentences, const std::string& path,
                 TagScheme scheme);

} // namespace miner
