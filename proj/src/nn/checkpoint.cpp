#include "orf/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace orf::nn {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'O', 'R', 'F', 'C', 'K', 'P', 'T', '1'};

json hyper_to_json(const EncoderHyper& h) {
  return {{"layers", h.layers}, {"heads", h.heads},     {"emb", h.emb},
          {"ff", h.ff},         {"out_dim", h.out_dim}, {"max_len", h.max_len},
          {"vocab", h.vocab}};
}

EncoderHyper hyper_from_json(const json& j) {
  EncoderHyper h;
  h.layers = j.at("layers").get<int>();
  h.heads = j.at("heads").get<int>();
  h.emb = j.at("emb").get<int>();
  h.ff = j.at("ff").get<int>();
  h.out_dim = j.at("out_dim").get<int>();
  h.max_len = j.at("max_len").get<int>();
  h.vocab = j.at("vocab").get<int>();
  return h;
}

void append_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t read_u64(const char* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

std::vector<Param*> ModelCheckpoint::all_params() {
  std::vector<Param*> out = phi.params();
  for (Param* p : psi.params()) out.push_back(p);
  for (Param* p : classifier.params()) out.push_back(p);
  return out;
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& file) {
  auto& mut = const_cast<ModelCheckpoint&>(ckpt);
  std::vector<Param*> params = mut.all_params();

  std::string blob;
  json tensors = json::array();
  for (const Param* p : params) {
    tensors.push_back({{"name", p->name},
                       {"rows", p->value.rows},
                       {"cols", p->value.cols},
                       {"offset", blob.size()}});
    for (double v : p->value.data) {
      float f = static_cast<float>(v);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      for (int i = 0; i < 4; ++i) blob.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }
  json manifest = {
      {"version", ckpt.version},
      {"encoder", hyper_to_json(ckpt.phi.hyper)},
      {"classifier_hidden", ckpt.classifier.hidden},
      {"vocab", std::vector<std::string>(ckpt.vocab.id_to_token.begin() + 3,
                                         ckpt.vocab.id_to_token.end())},
      {"meta",
       {{"epoch", ckpt.meta.epoch},
        {"best_val_loss", ckpt.meta.best_val_loss},
        {"seed", ckpt.meta.seed},
        {"phase", ckpt.meta.phase}}},
      {"tensors", tensors},
  };
  std::string m = manifest.dump();

  std::ofstream out(file, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + file.string());
  out.write(kMagic, 8);
  std::string len;
  append_u64(len, m.size());
  out.write(len.data(), 8);
  out.write(m.data(), static_cast<std::streamsize>(m.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + file.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw CheckpointError("bad checkpoint header in " + file.string());
  uint64_t mlen = read_u64(bytes.data() + 8);
  if (bytes.size() < 16 + mlen) throw CheckpointError("truncated manifest in " + file.string());
  json manifest = json::parse(bytes.substr(16, mlen));
  const char* blob = bytes.data() + 16 + mlen;
  size_t blob_size = bytes.size() - 16 - mlen;

  ModelCheckpoint ckpt;
  ckpt.version = manifest.at("version").get<std::string>();
  EncoderHyper hyper = hyper_from_json(manifest.at("encoder"));
  ckpt.vocab = Vocab::from_tokens(manifest.at("vocab").get<std::vector<std::string>>());
  std::mt19937_64 rng(0);
  ckpt.phi = EncoderParams("phi", hyper, rng);
  ckpt.psi = EncoderParams("psi", hyper, rng);
  ckpt.classifier =
      ClassifierParams(2 * hyper.out_dim, manifest.at("classifier_hidden").get<std::vector<int>>(), rng);
  ckpt.meta.epoch = manifest.at("meta").at("epoch").get<int>();
  ckpt.meta.best_val_loss = manifest.at("meta").at("best_val_loss").get<double>();
  ckpt.meta.seed = manifest.at("meta").at("seed").get<uint64_t>();
  ckpt.meta.phase = manifest.at("meta").at("phase").get<std::string>();

  std::vector<Param*> params = ckpt.all_params();
  const json& tensors = manifest.at("tensors");
  if (tensors.size() != params.size())
    throw CheckpointError("tensor count mismatch in " + file.string());
  for (size_t pi = 0; pi < params.size(); ++pi) {
    const json& t = tensors[pi];
    Param& p = *params[pi];
    if (t.at("name").get<std::string>() != p.name ||
        t.at("rows").get<size_t>() != p.value.rows || t.at("cols").get<size_t>() != p.value.cols)
      throw CheckpointError("tensor '" + p.name + "' mismatch in " + file.string());
    size_t off = t.at("offset").get<size_t>();
    if (off + 4 * p.value.size() > blob_size)
      throw CheckpointError("blob overrun for tensor '" + p.name + "'");
    for (size_t i = 0; i < p.value.size(); ++i) {
      uint32_t bits = 0;
      for (int b = 0; b < 4; ++b)
        bits |= static_cast<uint32_t>(static_cast<unsigned char>(blob[off + 4 * i + b])) << (8 * b);
      float f;
      std::memcpy(&f, &bits, 4);
      p.value.data[i] = static_cast<double>(f);
    }
    p.zero_grad();
  }
  return ckpt;
}

uint64_t checkpoint_hash(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + file.string());
  uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace orf::nn
