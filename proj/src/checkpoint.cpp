#include "miner/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace miner {

namespace {

constexpr char kMagic[8] = {'M', 'I', 'N', 'E', 'R', 'C', 'P', '1'};
constexpr std::uint32_t kDtypeF64 = 0;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw ParseError("checkpoint: truncated while reading " + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_bytes(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_bytes(std::istream& in, const std::string& what) {
    const std::uint32_t len = read_u32(in, what + " length");
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw ParseError("checkpoint: truncated while reading " + what);
    return s;
}

} // namespace

void save_checkpoint(const std::string& path, const Model& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");

    nlohmann::json meta;
    meta["format"] = 1;
    meta["model_config"] = nlohmann::json::parse(to_json_string(model.cfg));
    meta["labels"] = model.labels;
    meta["vocab"] = model.vocab.id_to_token();

    out.write(kMagic, sizeof(kMagic));
    write_bytes(out, meta.dump());
    write_u32(out, static_cast<std::uint32_t>(model.params.tensors().size()));
    for (const auto& t : model.params.tensors()) {
        write_bytes(out, t.name);
        write_u32(out, kDtypeF64);
        write_u32(out, static_cast<std::uint32_t>(t.rows));
        write_u32(out, static_cast<std::uint32_t>(t.cols));
        out.write(reinterpret_cast<const char*>(t.v.data()),
                  static_cast<std::streamsize>(t.v.size() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("checkpoint: bad format tag in " + path);
    }

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_bytes(in, "metadata"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("checkpoint: invalid metadata JSON: ") + e.what());
    }
    if (!meta.contains("format") || meta["format"].get<int>() != 1) {
        throw ParseError("checkpoint: unsupported format version in " + path);
    }

    const ModelConfig cfg = model_config_from_json_string(meta["model_config"].dump());
    const auto labels = meta["labels"].get<std::vector<std::string>>();
    const auto vocab_tokens = meta["vocab"].get<std::vector<std::string>>();

    Model model = Model::create(cfg, Vocabulary(vocab_tokens), labels, /*seed=*/0);

    const std::uint32_t count = read_u32(in, "tensor count");
    if (count != model.params.tensors().size()) {
        throw ParseError("checkpoint: tensor count does not match the model layout");
    }
    for (auto& t : model.params.tensors()) {
        const std::string name = read_bytes(in, "tensor name");
        const std::uint32_t dtype = read_u32(in, "dtype");
        const std::uint32_t rows = read_u32(in, "rows");
        const std::uint32_t cols = read_u32(in, "cols");
        if (name != t.name || dtype != kDtypeF64 || rows != static_cast<std::uint32_t>(t.rows) ||
            cols != static_cast<std::uint32_t>(t.cols)) {
            throw ParseError("checkpoint: tensor " + name + " does not match the model layout");
        }
        in.read(reinterpret_cast<char*>(t.v.data()),
                static_cast<std::streamsize>(t.v.size() * sizeof(double)));
        if (!in) throw ParseError("checkpoint: truncated tensor data for " + name);
    }
    return model;
}

} // namespace miner
