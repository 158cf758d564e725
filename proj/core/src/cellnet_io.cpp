#include "gsna/cellnet_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gsna {

namespace {

constexpr char kMagic[5] = {'G', 'S', 'N', 'A', '1'};

static_assert(std::endian::native == std::endian::little,
              "container writer assumes a little-endian host");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void put_bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
  }
  template <class T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in_.gcount() != sizeof(T)) fail("truncated file");
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (in_.gcount() != static_cast<std::streamsize>(n)) fail("truncated string");
    return s;
  }
  void get_bytes(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) fail("truncated file");
  }
  void expect_eof() {
    char c;
    in_.read(&c, 1);
    if (!in_.eof()) fail("trailing bytes after payload");
  }
  [[noreturn]] void fail(const char* what) const {
    throw std::runtime_error(path_.string() + ": " + what);
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace

void write_cellnet(const CellNetwork& net, const std::filesystem::path& path) {
  Writer w(path);
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(net.kind));
  w.put<double>(net.cell_area_km2);
  const auto n = static_cast<std::uint32_t>(net.graph.node_count());
  w.put<std::uint32_t>(n);
  w.put<std::uint64_t>(net.graph.edge_count());
  for (NodeId v = 0; v < n; ++v) {
    if (net.kind == CellNetwork::Kind::Hex) {
      w.put<std::int32_t>(net.cells[v].row);
      w.put<std::int32_t>(net.cells[v].col);
    } else {
      w.put_string(net.codes[v]);
    }
    w.put<std::uint64_t>(net.graph.node_weight(v));
  }
  net.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t weight) {
    w.put<std::uint32_t>(s);
    w.put<std::uint32_t>(t);
    w.put<std::uint64_t>(weight);
  });
  w.finish();
}

CellNetwork read_cellnet(const std::filesystem::path& path) {
  Reader r(path);
  char magic[sizeof(kMagic)];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) r.fail("bad magic, not a cell network file");

  CellNetwork net;
  const auto kind = r.get<std::uint8_t>();
  if (kind > 1) r.fail("unknown network kind");
  net.kind = static_cast<CellNetwork::Kind>(kind);
  net.cell_area_km2 = r.get<double>();
  const auto n = r.get<std::uint32_t>();
  const auto m = r.get<std::uint64_t>();

  GraphBuilder builder(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (net.kind == CellNetwork::Kind::Hex) {
      const auto row = r.get<std::int32_t>();
      const auto col = r.get<std::int32_t>();
      net.cells.push_back(CellId{row, col});
    } else {
      net.codes.push_back(r.get_string());
    }
    builder.set_node_weight(v, r.get<std::uint64_t>());
  }
  for (std::uint64_t e = 0; e < m; ++e) {
    const auto s = r.get<std::uint32_t>();
    const auto t = r.get<std::uint32_t>();
    const auto weight = r.get<std::uint64_t>();
    if (s >= n || t >= n) r.fail("edge endpoint out of range");
    if (weight == 0) r.fail("zero edge weight");
    builder.add_edge(s, t, weight);
  }
  r.expect_eof();
  net.graph = builder.build();
  return net;
}

}  // namespace gsna
