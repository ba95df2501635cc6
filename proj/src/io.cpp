#include "qgrom/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "qgrom/errors.hpp"

namespace qgrom::io {

namespace {

constexpr char kMagic[4] = {'Q', 'G', 'R', 'M'};
constexpr std::size_t kHeaderSize = 12;

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void reals(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void field(const Field2D& f) { reals(f.values()); }
  void matrix(const Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double x : m.data()) f64(x);
  }
  void grid(const Grid& g) {
    u64(g.nx());
    u64(g.ny());
  }

  void save(const std::filesystem::path& path, PayloadKind kind) const {
    std::vector<unsigned char> out;
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    append(out, kFormatVersion, 4);
    append(out, static_cast<std::uint32_t>(kind), 4);
    out.insert(out.end(), bytes_.begin(), bytes_.end());
    std::uint64_t sum = 0;
    for (unsigned char b : bytes_) sum += b;
    append(out, sum, 8);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path.string());
  }

 private:
  static void append(std::vector<unsigned char>& out, std::uint64_t v, int n) {
    for (int k = 0; k < n; ++k) out.push_back(static_cast<unsigned char>(v >> (8 * k)));
  }
  void put(std::uint64_t v, int n) { append(bytes_, v, n); }

  std::vector<unsigned char> bytes_;
};

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::uint64_t load_le(const unsigned char* p, int n) {
  std::uint64_t v = 0;
  for (int k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(p[k]) << (8 * k);
  return v;
}

PayloadKind check_header(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  if (bytes.size() < kHeaderSize + 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw IoError(path.string() + ": not a QGRM file");
  const auto version = static_cast<std::uint32_t>(load_le(bytes.data() + 4, 4));
  if (version != kFormatVersion)
    throw IoError(path.string() + ": unsupported format version " + std::to_string(version) +
                  " (expected " + std::to_string(kFormatVersion) + ")");
  return static_cast<PayloadKind>(load_le(bytes.data() + 8, 4));
}

class Reader {
 public:
  Reader(const std::filesystem::path& path, PayloadKind expected) : path_(path) {
    bytes_ = slurp(path);
    const PayloadKind kind = check_header(bytes_, path);
    if (kind != expected)
      throw IoError(path.string() + ": payload kind " + std::to_string(static_cast<unsigned>(kind)) +
                    ", expected " + std::to_string(static_cast<unsigned>(expected)));
    end_ = bytes_.size() - 8;
    std::uint64_t sum = 0;
    for (std::size_t k = kHeaderSize; k < end_; ++k) sum += bytes_[k];
    if (sum != load_le(bytes_.data() + end_, 8)) throw IoError(path.string() + ": checksum mismatch");
    pos_ = kHeaderSize;
  }

  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  std::uint64_t u64() { return take(8); }
  double f64() { return std::bit_cast<double>(take(8)); }
  std::size_t count(std::size_t item_bytes = 8) {
    const std::uint64_t n = u64();
    if (n > (end_ - pos_) / item_bytes) fail("length field exceeds payload");
    return static_cast<std::size_t>(n);
  }
  std::vector<double> reals() {
    std::vector<double> v(count());
    for (double& x : v) x = f64();
    return v;
  }
  Grid grid() {
    const auto nx = u64(), ny = u64();
    try {
      return Grid(nx, ny);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  Field2D field(const Grid& g) {
    std::vector<double> v = reals();
    if (v.size() != g.size()) fail("field size does not match grid");
    return Field2D(g, std::move(v));
  }
  Matrix matrix() {
    const std::size_t rows = u64();
    const std::size_t cols = u64();
    if (cols != 0 && rows > (end_ - pos_) / 8 / cols) fail("matrix exceeds payload");
    Matrix m(rows, cols);
    for (double& x : m.data()) x = f64();
    return m;
  }
  void finish() const {
    if (pos_ != end_) fail("trailing bytes in payload");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path_.string() + ": " + what);
  }

 private:
  std::uint64_t take(int n) {
    if (end_ - pos_ < static_cast<std::size_t>(n)) fail("truncated payload");
    const std::uint64_t v = load_le(bytes_.data() + pos_, n);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::filesystem::path path_;
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

}  // namespace

PayloadKind peek_kind(const std::filesystem::path& path) { return check_header(slurp(path), path); }

void write_snapshots(const std::filesystem::path& path, const SnapshotSet& set) {
  Writer w;
  w.grid(set.grid);
  w.reals(set.times);
  w.u64(set.omega.size());
  for (const Field2D& f : set.omega) w.field(f);
  w.field(set.omega_mean);
  w.field(set.psi_mean);
  w.save(path, PayloadKind::snapshots);
}

SnapshotSet read_snapshots(const std::filesystem::path& path) {
  Reader r(path, PayloadKind::snapshots);
  SnapshotSet set;
  set.grid = r.grid();
  set.times = r.reals();
  const std::size_t n = r.count();
  if (n != set.times.size()) r.fail("snapshot count does not match times");
  for (std::size_t k = 0; k < n; ++k) set.omega.push_back(r.field(set.grid));
  set.omega_mean = r.field(set.grid);
  set.psi_mean = r.field(set.grid);
  r.finish();
  return set;
}

void write_basis(const std::filesystem::path& path, const PodBasis& basis) {
  Writer w;
  w.grid(basis.grid());
  w.u64(basis.r);
  w.reals(basis.lambdas);
  w.reals(basis.times);
  w.field(basis.omega_mean);
  w.field(basis.psi_mean);
  for (const Field2D& f : basis.phi) w.field(f);
  for (const Field2D& f : basis.theta) w.field(f);
  w.matrix(basis.a_train);
  w.save(path, PayloadKind::basis);
}

PodBasis read_basis(const std::filesystem::path& path) {
  Reader r(path, PayloadKind::basis);
  PodBasis b;
  const Grid g = r.grid();
  b.r = r.count();
  b.lambdas = r.reals();
  b.times = r.reals();
  b.omega_mean = r.field(g);
  b.psi_mean = r.field(g);
  for (std::size_t k = 0; k < b.r; ++k) b.phi.push_back(r.field(g));
  for (std::size_t k = 0; k < b.r; ++k) b.theta.push_back(r.field(g));
  b.a_train = r.matrix();
  if (b.a_train.rows() != b.r) r.fail("coefficient matrix row count does not match r");
  r.finish();
  return b;
}

void write_model(const std::filesystem::path& path, const lstm::LstmModel& m) {
  m.validate();
  Writer w;
  w.u64(m.r);
  w.u64(m.sigma);
  w.u64(m.hidden);
  w.u64(m.n_layers);
  w.u64(m.seed);
  w.reals(m.params);
  w.reals(m.scaler.min);
  w.reals(m.scaler.max);
  w.u64(m.adam.step);
  w.reals(m.adam.m);
  w.reals(m.adam.v);
  w.save(path, PayloadKind::model);
}

lstm::LstmModel read_model(const std::filesystem::path& path) {
  Reader r(path, PayloadKind::model);
  lstm::LstmModel m;
  m.r = r.u64();
  m.sigma = r.u64();
  m.hidden = r.u64();
  m.n_layers = r.u64();
  m.seed = r.u64();
  m.params = r.reals();
  m.scaler.min = r.reals();
  m.scaler.max = r.reals();
  m.adam.step = r.u64();
  m.adam.m = r.reals();
  m.adam.v = r.reals();
  r.finish();
  try {
    m.validate();
  } catch (const DimensionError& e) {
    r.fail(e.what());
  }
  return m;
}

void write_trajectory(const std::filesystem::path& path, const RomTrajectory& t) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(t.provenance));
  w.u64(t.sigma);
  w.reals(t.times);
  w.matrix(t.a);
  w.u32(t.diverged_at ? 1 : 0);
  w.f64(t.diverged_at.value_or(0.0));
  w.save(path, PayloadKind::trajectory);
}

RomTrajectory read_trajectory(const std::filesystem::path& path) {
  Reader r(path, PayloadKind::trajectory);
  RomTrajectory t;
  const std::uint32_t prov = r.u32();
  if (prov > 2) r.fail("unknown trajectory provenance");
  t.provenance = static_cast<Provenance>(prov);
  t.sigma = r.u64();
  t.times = r.reals();
  t.a = r.matrix();
  if (t.a.cols() != t.times.size()) r.fail("coefficient columns do not match times");
  const std::uint32_t flag = r.u32();
  const double at = r.f64();
  if (flag > 1) r.fail("bad divergence flag");
  if (flag == 1) t.diverged_at = at;
  r.finish();
  return t;
}

void write_tensors(const std::filesystem::path& path, const GalerkinTensors& t) {
  Writer w;
  w.u64(t.r);
  w.f64(t.re);
  w.f64(t.ro);
  w.reals(t.b);
  w.matrix(t.l);
  w.reals(t.n);
  w.save(path, PayloadKind::tensors);
}

GalerkinTensors read_tensors(const std::filesystem::path& path) {
  Reader r(path, PayloadKind::tensors);
  GalerkinTensors t;
  t.r = r.u64();
  t.re = r.f64();
  t.ro = r.f64();
  t.b = r.reals();
  t.l = r.matrix();
  t.n = r.reals();
  r.finish();
  if (t.b.size() != t.r || t.l.rows() != t.r || t.l.cols() != t.r || t.n.size() != t.r * t.r * t.r)
    r.fail("tensor shapes inconsistent with r");
  return t;
}

}  // namespace qgrom::io
