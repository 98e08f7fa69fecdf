#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "batforge/error.hpp"
#include "batforge/model.hpp"
#include "batforge/rng.hpp"

namespace batforge {
namespace {

constexpr char kMagic[8] = {'B', 'A', 'T', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t u64() { return read_le(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(read_le(4)); }
  std::uint8_t u8() { return static_cast<std::uint8_t>(read_le(1)); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::uint64_t read_le(int n) {
    if (bytes_.size() - pos_ < static_cast<std::size_t>(n)) throw ParseError("corrupt checkpoint: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams& params) {
  std::string buf(kMagic, sizeof(kMagic));
  put_u32(buf, kVersion);
  put_u64(buf, params.shape.vocab_rows);
  put_u64(buf, params.shape.dim);
  put_u64(buf, params.shape.hidden);
  put_u64(buf, params.shape.classes);
  buf.push_back(params.train_embeddings ? 1 : 0);
  for (const auto& b : params.buffers()) {
    put_u64(buf, b.size());
    for (double x : b) put_u64(buf, std::bit_cast<std::uint64_t>(x));
  }
  put_u64(buf, fnv1a64(buf));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("failed to write checkpoint");
}

ModelParams read_checkpoint(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a checkpoint");
  }
  Reader r(std::string_view(bytes).substr(sizeof(kMagic)));
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
  ModelShape shape;
  shape.vocab_rows = r.u64();
  shape.dim = r.u64();
  shape.hidden = r.u64();
  shape.classes = r.u64();
  if (shape.vocab_rows < 2 || shape.dim < 1 || shape.hidden < 1 || shape.classes < 2 ||
      shape.vocab_rows > (1ULL << 32) || shape.dim > (1ULL << 20) || shape.hidden > (1ULL << 20) ||
      shape.classes > (1ULL << 20)) {
    throw ParseError("corrupt checkpoint: implausible shape table");
  }
  ModelParams p = ModelParams::zeros(shape);
  p.train_embeddings = r.u8() != 0;
  for (auto& b : p.buffers()) {
    const std::uint64_t n = r.u64();
    if (n != b.size()) throw ParseError("shape mismatch: checkpoint buffer size disagrees with its shape table");
    for (auto& x : b) x = r.f64();
  }
  const std::size_t payload = sizeof(kMagic) + r.offset();
  const std::uint64_t checksum = r.u64();
  if (!r.at_end()) throw ParseError("corrupt checkpoint: trailing bytes");
  if (checksum != fnv1a64(std::string_view(bytes).substr(0, payload))) {
    throw ParseError("corrupt checkpoint: checksum mismatch");
  }
  return p;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, params);
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_checkpoint(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace batforge
