#include "fsaug/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace fsaug {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'A', 'E'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(bytes), std::end(bytes));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw ParseError("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(bytes), std::end(bytes));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void write_string(std::ostream& out, const std::string& s) {
  write_le<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const auto len = read_le<std::uint64_t>(in);
  if (len > (1u << 20)) throw ParseError("checkpoint: implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw ParseError("checkpoint: truncated string");
  return s;
}

void write_doubles(std::ostream& out, const double* data, std::uint64_t count) {
  write_le<std::uint64_t>(out, count);
  for (std::uint64_t i = 0; i < count; ++i) write_le<double>(out, data[i]);
}

void read_doubles(std::istream& in, double* data, std::uint64_t expected) {
  const auto count = read_le<std::uint64_t>(in);
  if (count != expected)
    throw ParseError("checkpoint: tensor size " + std::to_string(count) +
                     " != expected " + std::to_string(expected));
  for (std::uint64_t i = 0; i < count; ++i) data[i] = read_le<double>(in);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_checkpoint: cannot open " + path.string());

  AutoencoderModel model = ckpt.model;  // parameter_views wants mutable storage
  out.write(kMagic, 4);
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.feature_dim()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.hidden_size()));
  write_le<double>(out, model.dropout_prob);
  write_le<std::uint8_t>(out, model.context_dropout ? 1 : 0);

  const auto& norm = ckpt.normalization;
  write_le<std::uint8_t>(out, norm.is_identity() ? 0 : 1);
  if (!norm.is_identity()) {
    write_doubles(out, norm.mean.data(), static_cast<std::uint64_t>(norm.mean.size()));
    write_doubles(out, norm.std_dev.data(),
                  static_cast<std::uint64_t>(norm.std_dev.size()));
  }
  write_string(out, ckpt.config_fingerprint);

  const TensorViews views = parameter_views(model);
  write_le<std::uint64_t>(out, views.size());
  for (const auto& v : views) {
    write_string(out, v.name);
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(v.rows));
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(v.cols));
    write_doubles(out, v.data, static_cast<std::uint64_t>(v.size()));
  }
  if (!out) throw IoError("save_checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("load_checkpoint: bad magic in " + path.string());
  const auto version = read_le<std::uint32_t>(in);
  if (version != kVersion)
    throw ParseError("load_checkpoint: unsupported version " +
                     std::to_string(version));
  const auto feature_dim = read_le<std::uint32_t>(in);
  const auto hidden_size = read_le<std::uint32_t>(in);
  const double dropout = read_le<double>(in);
  const bool context_dropout = read_le<std::uint8_t>(in) != 0;

  Checkpoint ckpt;
  ckpt.model = AutoencoderModel::zeros(static_cast<int>(feature_dim),
                                       static_cast<int>(hidden_size));
  ckpt.model.dropout_prob = dropout;
  ckpt.model.context_dropout = context_dropout;

  if (read_le<std::uint8_t>(in) != 0) {
    ckpt.normalization.mean.resize(feature_dim);
    read_doubles(in, ckpt.normalization.mean.data(), feature_dim);
    ckpt.normalization.std_dev.resize(feature_dim);
    read_doubles(in, ckpt.normalization.std_dev.data(), feature_dim);
  }
  ckpt.config_fingerprint = read_string(in);

  const TensorViews views = parameter_views(ckpt.model);
  const auto count = read_le<std::uint64_t>(in);
  if (count != views.size())
    throw ParseError("load_checkpoint: tensor count mismatch");
  for (const auto& v : views) {
    const std::string name = read_string(in);
    if (name != v.name)
      throw ParseError("load_checkpoint: expected tensor " + v.name + ", got " +
                       name);
    const auto rows = read_le<std::uint64_t>(in);
    const auto cols = read_le<std::uint64_t>(in);
    if (rows != static_cast<std::uint64_t>(v.rows) ||
        cols != static_cast<std::uint64_t>(v.cols))
      throw ParseError("load_checkpoint: shape mismatch for " + v.name);
    read_doubles(in, v.data, static_cast<std::uint64_t>(v.size()));
  }
  return ckpt;
}

std::string config_fingerprint(const std::string& config_text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace fsaug
