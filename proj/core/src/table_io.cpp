#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "hoqtt/prototype_table.hpp"
#include "hoqtt/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "QTTP container assumes a little-endian host");

namespace hoqtt {

std::uint32_t crc32_ieee(const void* data, std::size_t size, std::uint32_t seed) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint32_t crc = seed ^ 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i) crc = table[(crc ^ p[i]) & 0xFFu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

namespace {

constexpr char kMagic[4] = {'Q', 'T', 'T', 'P'};
constexpr std::uint16_t kFormatVersion = 1;

class Writer {
 public:
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u16(std::uint16_t v) { raw(&v, 2); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void raw(const void* p, std::size_t n) {
    const char* c = static_cast<const char*>(p);
    buf.insert(buf.end(), c, c + n);
  }
  std::vector<char> buf;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : p_(data), end_(data + size) {}

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return get<double>(); }
  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(p_, n);
    p_ += n;
    return s;
  }
  const char* cursor() const { return p_; }
  std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }
  void skip(std::size_t n) {
    need(n);
    p_ += n;
  }

 private:
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, p_, sizeof(T));
    p_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) {
    if (remaining() < n) throw std::runtime_error("QTTP: truncated file");
  }
  const char* p_;
  const char* end_;
};

void write_entry(Writer& w, std::uint32_t index, std::uint8_t part,
                 const TableEntry& e) {
  Writer body;
  body.u32(index);
  body.u8(part);
  std::uint8_t status = 0;
  switch (e.status) {
    case TableEntry::Status::Tensor: status = 0; break;
    case TableEntry::Status::Zero: status = 1; break;
    case TableEntry::Status::Flagged: status = 2; break;
  }
  body.u8(status);
  body.u8(e.tensor ? 1 : 0);
  if (e.tensor) {
    const TTVector& t = *e.tensor;
    body.u8(static_cast<std::uint8_t>(t.mode_size()));
    body.u32(static_cast<std::uint32_t>(t.length()));
    auto ranks = t.ranks();
    for (int r : ranks) body.u32(static_cast<std::uint32_t>(r));
    for (const TTCore& c : t.cores())
      body.raw(c.data.data(), c.data.size() * sizeof(double));
    body.f64(e.report.validation_error);
    body.u64(e.report.oracle_calls);
    body.u32(static_cast<std::uint32_t>(e.report.sweeps));
    body.u8(e.report.converged ? 1 : 0);
  }
  body.f64(e.build_seconds);

  w.u64(static_cast<std::uint64_t>(body.buf.size()));
  w.raw(body.buf.data(), body.buf.size());
  w.u32(crc32_ieee(body.buf.data(), body.buf.size()));
}

TableEntry read_entry(Reader& r, std::uint32_t* index, std::uint8_t* part,
                      int grid_level) {
  std::uint64_t len = r.u64();
  if (r.remaining() < len + 4) throw std::runtime_error("QTTP: truncated entry");
  const char* body = r.cursor();
  r.skip(len);
  std::uint32_t stored_crc = r.u32();
  if (crc32_ieee(body, len) != stored_crc)
    throw std::runtime_error("QTTP: entry checksum mismatch");

  Reader b(body, len);
  *index = b.u32();
  *part = b.u8();
  std::uint8_t status = b.u8();
  bool has_tensor = b.u8() != 0;

  TableEntry e;
  switch (status) {
    case 0: e.status = TableEntry::Status::Tensor; break;
    case 1: e.status = TableEntry::Status::Zero; break;
    case 2: e.status = TableEntry::Status::Flagged; break;
    default: throw std::runtime_error("QTTP: bad entry status");
  }
  if (has_tensor) {
    int q = b.u8();
    int L = static_cast<int>(b.u32());
    if (L != grid_level) throw std::runtime_error("QTTP: tensor level != grid level");
    std::vector<int> ranks(L + 1);
    for (int i = 0; i <= L; ++i) ranks[i] = static_cast<int>(b.u32());
    std::vector<TTCore> cores(L);
    for (int nu = 0; nu < L; ++nu) {
      TTCore& c = cores[nu];
      c.r_left = ranks[nu];
      c.q = q;
      c.r_right = ranks[nu + 1];
      std::size_t n = static_cast<std::size_t>(c.r_left) * q * c.r_right;
      c.data.resize(n);
      if (b.remaining() < n * sizeof(double))
        throw std::runtime_error("QTTP: truncated core payload");
      std::memcpy(c.data.data(), b.cursor(), n * sizeof(double));
      b.skip(n * sizeof(double));
    }
    e.tensor.emplace(q, std::move(cores));
    e.report.final_ranks = e.tensor->ranks();
    e.report.effective_rank =
        L >= 3 ? effective_rank(*e.tensor) : e.tensor->max_rank();
    e.report.validation_error = b.f64();
    e.report.oracle_calls = b.u64();
    e.report.sweeps = static_cast<int>(b.u32());
    e.report.converged = b.u8() != 0;
  }
  e.build_seconds = b.f64();
  return e;
}

}  // namespace

void save_table(const PrototypeTable& table, const std::filesystem::path& path) {
  Writer header;
  header.u16(kFormatVersion);
  header.f64(table.grid().omega_min());
  header.f64(table.grid().omega_max());
  header.u32(static_cast<std::uint32_t>(table.grid().level()));
  std::uint8_t basis_kind = 0;
  switch (table.basis().kind) {
    case BasisKind::Chebyshev: basis_kind = 0; break;
    case BasisKind::Lagrange: basis_kind = 1; break;
    case BasisKind::LagrangeMulti: basis_kind = 2; break;
  }
  header.u8(basis_kind);
  header.u32(static_cast<std::uint32_t>(table.basis().degree));
  header.u32(static_cast<std::uint32_t>(table.basis().dim));
  header.u8(table.oscillator().kind() == OscKind::Phase ? 0 : 1);
  header.str(table.oscillator().text());
  header.f64(table.eps_cross());
  header.str(table.tool_version());
  header.u32(static_cast<std::uint32_t>(table.raw_entries().size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_table: cannot open " + path.string());
  out.write(kMagic, 4);
  std::uint64_t hlen = header.buf.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(header.buf.data(), static_cast<std::streamsize>(header.buf.size()));
  std::uint32_t hcrc = crc32_ieee(header.buf.data(), header.buf.size());
  out.write(reinterpret_cast<const char*>(&hcrc), 4);

  for (const auto& [key, entry] : table.raw_entries()) {
    Writer w;
    write_entry(w, key.first, key.second, entry);
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  }
  out.flush();
  if (!out) throw std::runtime_error("save_table: write failed for " + path.string());
}

PrototypeTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_table: cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::runtime_error("QTTP: bad magic");

  Reader r(bytes.data() + 4, bytes.size() - 4);
  std::uint64_t hlen = r.u64();
  if (r.remaining() < hlen + 4) throw std::runtime_error("QTTP: truncated header");
  const char* hbody = r.cursor();
  r.skip(hlen);
  std::uint32_t hcrc = r.u32();
  if (crc32_ieee(hbody, hlen) != hcrc)
    throw std::runtime_error("QTTP: header checksum mismatch");

  Reader h(hbody, hlen);
  std::uint16_t version = h.u16();
  if (version != kFormatVersion)
    throw std::runtime_error("QTTP: unsupported format version " +
                             std::to_string(version));
  double wmin = h.f64();
  double wmax = h.f64();
  int L = static_cast<int>(h.u32());
  std::uint8_t bk = h.u8();
  BasisSpec basis;
  switch (bk) {
    case 0: basis.kind = BasisKind::Chebyshev; break;
    case 1: basis.kind = BasisKind::Lagrange; break;
    case 2: basis.kind = BasisKind::LagrangeMulti; break;
    default: throw std::runtime_error("QTTP: bad basis kind");
  }
  basis.degree = static_cast<int>(h.u32());
  basis.dim = static_cast<int>(h.u32());
  OscKind okind = h.u8() == 0 ? OscKind::Phase : OscKind::Kernel;
  std::string osc_text = h.str();
  double eps_cross = h.f64();
  std::string tool_version = h.str();
  std::uint32_t entry_count = h.u32();

  PrototypeTable table(FrequencyGrid(wmin, wmax, L),
                       OscillatorSpec(okind, osc_text), basis, eps_cross,
                       tool_version);
  for (std::uint32_t i = 0; i < entry_count; ++i) {
    std::uint32_t index = 0;
    std::uint8_t part = 0;
    TableEntry e = read_entry(r, &index, &part, L);
    table.set_entry(index, part == 0 ? Part::Real : Part::Imag, std::move(e));
  }
  if (r.remaining() != 0) throw std::runtime_error("QTTP: trailing bytes");
  return table;
}

}  // namespace hoqtt
