#include "miner/conll.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace miner {

TagScheme tag_scheme_from_string(const std::string& s) {
    if (s == "BIO") return TagScheme::BIO;
    if (s == "BIO2") return TagScheme::BIO2;
    throw ConfigError("unknown tag scheme: " + s);
}

std::string to_string(TagScheme s) {
    return s == TagScheme::BIO ? "BIO" : "BIO2";
}

namespace {

struct TagDecoder {
    TagScheme scheme;
    ConllReadStats* stats;

    Sentence sent;
    int open_start = 0;       // 1-based start of the open chunk, 0 if none
    std::string open_type;

    void close_chunk(int end) {
        if (open_start > 0) {
            sent.mentions.push_back({open_start, end, open_type});
            open_start = 0;
            open_type.clear();
        }
    }

    void feed(const std::string& token, const std::string& tag, std::size_t line_no) {
        const int pos = static_cast<int>(sent.tokens.size()) + 1;
        sent.tokens.push_back(token);

        if (tag == "O") {
            close_chunk(pos - 1);
            return;
        }
        if (tag.size() < 3 || tag[1] != '-' || (tag[0] != 'B' && tag[0] != 'I')) {
            throw ParseError("line " + std::to_string(line_no) + ": unknown tag \"" + tag + "\"");
        }
        const char marker = tag[0];
        const std::string etype = tag.substr(2);

        if (marker == 'B') {
            close_chunk(pos - 1);
            open_start = pos;
            open_type = etype;
            return;
        }

        // marker == 'I'
        if (open_start > 0 && open_type == etype) {
            return; // continues the open chunk
        }
        close_chunk(pos - 1);
        if (scheme == TagScheme::BIO2) {
            // malformed continuation, repaired as a chunk start
            if (stats) ++stats->repaired_tags;
        }
        // under IOB1 an I-X after non-X legitimately opens a chunk
        open_start = pos;
        open_type = etype;
    }

    void end_sentence(std::vector<Sentence>& out) {
        if (sent.tokens.empty()) return;
        close_chunk(static_cast<int>(sent.tokens.size()));
        out.push_back(std::move(sent));
        sent = Sentence{};
    }
};

bool is_space(char c) { return c == ' ' || c == '\t'; }

} // namespace

std::vector<Sentence> parse_conll(std::istream& in, TagScheme scheme, ConllReadStats* stats) {
    std::vector<Sentence> out;
    TagDecoder dec{scheme, stats, {}, 0, {}};
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::size_t a = 0, b = line.size();
        while (a < b && is_space(line[a])) ++a;
        while (b > a && is_space(line[b - 1])) --b;
        if (a == b) {
            dec.end_sentence(out);
            continue;
        }

        // token = first field, tag = last field
        std::size_t tok_end = a;
        while (tok_end < b && !is_space(line[tok_end])) ++tok_end;
        if (tok_end == b) {
            throw ParseError("line " + std::to_string(line_no) + ": expected \"token tag\", got \"" +
                             line.substr(a, b - a) + "\"");
        }
        std::size_t tag_start = b;
        while (tag_start > tok_end && !is_space(line[tag_start - 1])) --tag_start;

        dec.feed(line.substr(a, tok_end - a), line.substr(tag_start, b - tag_start), line_no);
        if (stats) ++stats->tokens;
    }
    dec.end_sentence(out);
    if (stats) stats->sentences = out.size();
    return out;
}

std::vector<Sentence> read_conll(const std::string& path, TagScheme scheme,
                                 ConllReadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return parse_conll(in, scheme, stats);
}

namespace {

std::vector<std::string> encode_tags(const Sentence& s, TagScheme scheme) {
    const std::size_t n = s.tokens.size();
    std::vector<std::string> tags(n, "O");
    std::vector<EntityMention> sorted = s.mentions;
    std::sort(sorted.begin(), sorted.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });

    int prev_end = 0;
    std::string prev_type;
    for (const auto& m : sorted) {
        MINER_CHECK(m.start >= 1 && m.start <= m.end && m.end <= static_cast<int>(n),
                    "to_conll: mention out of range");
        bool needs_b = true;
        if (scheme == TagScheme::BIO) {
            // IOB1: B- only splits two adjacent same-type chunks
            needs_b = (prev_end == m.start - 1 && prev_type == m.etype);
        }
        tags[static_cast<std::size_t>(m.start) - 1] =
            (scheme == TagScheme::BIO2 || needs_b ? "B-" : "I-") + m.etype;
        for (int i = m.start + 1; i <= m.end; ++i) {
            tags[static_cast<std::size_t>(i) - 1] = "I-" + m.etype;
        }
        prev_end = m.end;
        prev_type = m.etype;
    }
    return tags;
}

} // namespace

std::string to_conll(const std::vector<Sentence>& sentences, TagScheme scheme) {
    std::ostringstream out;
    bool first = true;
    for (const auto& s : sentences) {
        if (!first) out << '\n';
        first = false;
        const auto tags = encode_tags(s, scheme);
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            out << s.tokens[i] << ' ' << tags[i] << '\n';
        }
    }
    return out.str();
}

void write_conll(const std::vector<Sentence>& sentences, const std::string& path,
                 TagScheme scheme) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << to_conll(sentences, scheme);
    if (!out) throw IoError("failed writing " + path);
}

} // namespace miner
