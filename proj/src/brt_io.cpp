#include "bbrt/brt_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bbrt {

static_assert(std::endian::native == std::endian::little,
              "value-function files are little-endian; big-endian hosts are unsupported");

namespace {

constexpr char kMagic[5] = {'B', 'B', 'R', 'T', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("value-function file truncated");
  return v;
}

}  // namespace

void write_value_function(const std::filesystem::path& path, const ValueFunction& vf) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(kMagic, sizeof(kMagic));
    const Grid& g = vf.grid();
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim_count()));
    for (int d = 0; d < g.dim_count(); ++d) {
      put<std::uint32_t>(os, static_cast<std::uint32_t>(g.points(d)));
    }
    for (int d = 0; d < g.dim_count(); ++d) put<double>(os, g.min(d));
    for (int d = 0; d < g.dim_count(); ++d) put<double>(os, g.max(d));
    for (int d = 0; d < g.dim_count(); ++d) {
      put<std::uint8_t>(os, g.periodic(d) ? 1 : 0);
    }
    put<std::uint32_t>(os, static_cast<std::uint32_t>(vf.slice_count()));
    for (double t : vf.time_stamps()) put<double>(os, t);
    os.write(reinterpret_cast<const char*>(vf.values().data()),
             static_cast<std::streamsize>(vf.values().size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ValueFunction read_value_function(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[5];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("bad magic in " + path.string());
  }
  const auto dim = get<std::uint32_t>(is);
  if (dim == 0 || dim > 16) throw std::runtime_error("bad dim count in " + path.string());
  std::vector<int> points(dim);
  for (auto& p : points) p = static_cast<int>(get<std::uint32_t>(is));
  std::vector<double> mins(dim), maxs(dim);
  for (auto& v : mins) v = get<double>(is);
  for (auto& v : maxs) v = get<double>(is);
  std::vector<bool> periodic(dim);
  for (std::uint32_t d = 0; d < dim; ++d) periodic[d] = get<std::uint8_t>(is) != 0;
  const auto stamp_count = get<std::uint32_t>(is);
  if (stamp_count == 0) throw std::runtime_error("no time stamps in " + path.string());
  std::vector<double> stamps(stamp_count);
  for (auto& t : stamps) t = get<double>(is);

  auto grid = std::make_shared<Grid>(std::move(mins), std::move(maxs), std::move(points),
                                     std::move(periodic));
  std::vector<double> values(grid->node_count() * stamp_count);
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("value payload truncated in " + path.string());
  return ValueFunction(std::move(grid), std::move(stamps), std::move(values));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bbrt
