#include "taman/features_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace taman {

namespace {
constexpr char kMagic[4] = {'T', 'M', 'N', 'F'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "TMNF I/O assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), 4);
}

std::uint32_t get_u32(std::ifstream& in, std::size_t offset, const std::filesystem::path& path) {
  std::uint32_t x = 0;
  in.read(reinterpret_cast<char*>(&x), 4);
  if (in.gcount() != 4)
    fail(ErrorKind::Format, path.string() + ": truncated at byte offset " + std::to_string(offset));
  return x;
}
}  // namespace

void write_features(const std::filesystem::path& path, const MatF& frames) {
  if (frames.rows < 1 || frames.cols < 1)
    fail(ErrorKind::Shape, "refusing to write empty feature matrix " + frames.shape_str());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Format, "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(frames.rows));
  put_u32(out, static_cast<std::uint32_t>(frames.cols));
  out.write(reinterpret_cast<const char*>(frames.v.data()),
            static_cast<std::streamsize>(frames.v.size() * sizeof(float)));
  if (!out) fail(ErrorKind::Format, "short write to " + path.string());
}

MatF load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Format, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
    fail(ErrorKind::Format, path.string() + ": bad magic at byte offset 0");
  const std::uint32_t version = get_u32(in, 4, path);
  if (version != kVersion)
    fail(ErrorKind::Format, path.string() + ": unsupported version " + std::to_string(version) +
                                " at byte offset 4");
  const std::uint32_t h = get_u32(in, 8, path);
  const std::uint32_t d = get_u32(in, 12, path);
  if (h == 0 || d == 0 || static_cast<std::uint64_t>(h) * d > (1ull << 31))
    fail(ErrorKind::Format, path.string() + ": implausible dimensions " + std::to_string(h) + "x" +
                                std::to_string(d) + " at byte offset 8");
  MatF m(static_cast<int>(h), static_cast<int>(d));
  const std::streamsize want = static_cast<std::streamsize>(m.v.size() * sizeof(float));
  in.read(reinterpret_cast<char*>(m.v.data()), want);
  if (in.gcount() != want)
    fail(ErrorKind::Format,
         path.string() + ": truncated payload at byte offset " + std::to_string(16 + in.gcount()));
  return m;
}

}  // namespace taman
