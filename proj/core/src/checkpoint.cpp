#include "mcps/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "mcps/error.hpp"

namespace mcps {

namespace {

constexpr std::array<char, 5> kMagic = {'M', 'C', 'P', 'S', '1'};

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void u32(std::uint32_t v) { integer(v, 4); }
  void u64(std::uint64_t v) { integer(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<char>& data() const noexcept { return buf_; }

 private:
  void integer(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(std::vector<char> data, std::string path) : buf_(std::move(data)), path_(std::move(path)) {}
  void bytes(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(integer(4)); }
  std::uint64_t u64() { return integer(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() const noexcept { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw IoError("checkpoint '" + path_ + "' is truncated");
  }
  std::uint64_t integer(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::vector<char> buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const SimState& state, std::uint64_t config_hash) {
  const int n = state.phi.components();
  const int lmax = state.phi.coeffs.lmax;
  if (state.u.u.lmax != lmax) throw ShapeError("save_checkpoint: phi and u have different lmax");
  Writer w;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(lmax));
  w.f64(state.t);
  w.u64(state.step);
  w.u64(config_hash);
  const auto modes = static_cast<Eigen::Index>(mode_count(lmax));
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < modes; ++k) w.f64(state.phi.coeffs.coeffs(k, i));
  }
  for (Eigen::Index k = 0; k < modes; ++k) w.f64(state.u.u.coeffs(k));

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + tmp + "'");
    out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
    if (!out) throw IoError("short write to checkpoint '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into '" + path + "': " + ec.message());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(data), path);

  std::array<char, 5> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw IoError("'" + path + "' is not a checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) throw IoError("checkpoint '" + path + "' has unsupported version " + std::to_string(version));
  const std::uint32_t n = r.u32();
  const std::uint32_t lmax = r.u32();
  if (n < 2 || n > 64 || lmax < 2 || lmax > 1024) throw IoError("checkpoint '" + path + "' has an implausible header");

  Checkpoint c;
  c.state.t = r.f64();
  c.state.step = r.u64();
  c.config_hash = r.u64();
  const int l = static_cast<int>(lmax);
  c.state.phi.coeffs = VectorSpectralField::zero(l, static_cast<int>(n));
  c.state.u = Deformation::zero(l);
  const auto modes = static_cast<Eigen::Index>(mode_count(l));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index k = 0; k < modes; ++k) c.state.phi.coeffs.coeffs(k, i) = r.f64();
  }
  for (Eigen::Index k = 0; k < modes; ++k) c.state.u.u.coeffs(k) = r.f64();
  if (!r.at_end()) throw IoError("checkpoint '" + path + "' has trailing bytes");
  return c;
}

}  // namespace mcps
