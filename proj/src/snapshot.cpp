#include "pagraph/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "pagraph/errors.hpp"

namespace pagraph {

namespace {

constexpr char kMagic[8] = {'P', 'A', 'G', 'R', 'A', 'P', 'H', '\0'};

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t k = 0; k < size; ++k) {
    h ^= data[k];
    h *= 0x100000001b3ull;
  }
  return h;
}

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  template <typename U>
  void uint(U v) {
    for (std::size_t b = 0; b < sizeof(U); ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  template <typename U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(static_cast<U>(data_[pos_ + b]) << (8 * b));
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw FormatError("snapshot is truncated");
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

class SnapshotCodec {
 public:
  static Snapshot encode(const GraphState& s) {
    Snapshot snap;
    auto& out = snap.bytes;
    const std::uint32_t c = s.params_.edges_per_arrival;
    out.reserve(128 + s.n_ * (8 + 4 * c + 8));
    for (char ch : kMagic) out.push_back(static_cast<std::uint8_t>(ch));
    Writer w(out);
    w.uint(Snapshot::kVersion);
    w.uint(c);
    w.f64(s.params_.delta);
    w.uint(s.n_);
    w.uint(static_cast<std::uint8_t>(s.options_.keep_adjacency ? 1 : 0));
    w.uint(s.options_.rebuild_period);
    w.uint(s.steps_since_rebuild_);
    const Philox::State rs = s.rng_.state();
    w.uint(rs.seed);
    w.uint(rs.stream);
    w.uint(rs.next_block);
    w.uint(rs.pos);
    for (std::uint64_t i = 1; i <= s.n_; ++i) w.uint(s.degrees_[i]);
    for (NodeId t : s.stubs_) w.uint(t);
    for (double cell : s.weights_.cells()) w.f64(cell);
    w.uint(fnv1a(out.data(), out.size()));
    return snap;
  }

  static GraphState decode(const Snapshot& snap) {
    const auto& in = snap.bytes;
    if (in.size() < sizeof(kMagic) + 8 || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0) {
      throw FormatError("not a pagraph snapshot");
    }
    const std::size_t body = in.size() - 8;
    Reader tail(in.data() + body, 8);
    if (tail.uint<std::uint64_t>() != fnv1a(in.data(), body)) throw FormatError("snapshot checksum mismatch");

    Reader r(in.data() + sizeof(kMagic), body - sizeof(kMagic));
    const auto version = r.uint<std::uint32_t>();
    if (version != Snapshot::kVersion) {
      throw FormatError("unsupported snapshot version " + std::to_string(version));
    }
    GraphState s;
    s.params_.edges_per_arrival = r.uint<std::uint32_t>();
    s.params_.delta = r.f64();
    try {
      s.params_.validate();
    } catch (const DomainError& e) {
      throw FormatError(std::string("snapshot parameters invalid: ") + e.what());
    }
    const std::uint32_t c = s.params_.edges_per_arrival;
    s.n_ = r.uint<std::uint64_t>();
    s.options_.keep_adjacency = r.uint<std::uint8_t>() != 0;
    s.options_.rebuild_period = r.uint<std::uint64_t>();
    s.steps_since_rebuild_ = r.uint<std::uint64_t>();
    Philox::State rs;
    rs.seed = r.uint<std::uint64_t>();
    rs.stream = r.uint<std::uint64_t>();
    rs.next_block = r.uint<std::uint64_t>();
    rs.pos = r.uint<std::uint32_t>();
    if (rs.pos > 2 || (rs.pos < 2 && rs.next_block == 0)) throw FormatError("snapshot rng state invalid");
    s.rng_ = Philox::from_state(rs);

    const std::uint64_t n = s.n_;
    if (n == 0 || s.options_.rebuild_period == 0) throw FormatError("snapshot header invalid");
    const std::uint64_t expected = n * 8 + n * c * 4 + (n + 1) * 8;
    if (n > body || r.remaining() != expected) throw FormatError("snapshot body size mismatch");

    s.degrees_.assign(n + 1, 0);
    for (std::uint64_t i = 1; i <= n; ++i) s.degrees_[i] = r.uint<std::uint64_t>();
    s.stubs_.resize(n * c);
    for (auto& t : s.stubs_) t = r.uint<NodeId>();
    std::vector<double> cells(n + 1);
    for (auto& cell : cells) cell = r.f64();

    // Node 1's stubs are its self-loops; every later node points strictly back.
    std::vector<std::uint64_t> recount(n + 1, 0);
    for (std::uint64_t v = 1; v <= n; ++v) {
      recount[v] += c;
      for (std::uint32_t k = 0; k < c; ++k) {
        const NodeId t = s.stubs_[(v - 1) * c + k];
        const bool ok = v == 1 ? t == 1 : (t >= 1 && t < v);
        if (!ok) throw FormatError("snapshot arrival targets inconsistent");
        recount[t] += 1;
      }
    }
    if (recount != s.degrees_) throw FormatError("snapshot degrees disagree with arrival targets");

    s.weights_.assign_cells(std::move(cells));
    WeightIndex exact;
    {
      std::vector<double> w(n);
      for (std::uint64_t i = 1; i <= n; ++i) w[i - 1] = static_cast<double>(s.degrees_[i]) + s.params_.delta;
      exact.rebuild(w);
    }
    for (std::uint64_t k = 1; k <= n; ++k) {
      const double a = s.weights_.cells()[k];
      const double b = exact.cells()[k];
      if (!(std::abs(a - b) <= 1e-9 * std::abs(b))) throw FormatError("snapshot weight index corrupted");
    }

    if (s.options_.keep_adjacency) {
      s.adjacency_.assign(n + 1, {});
      s.adjacency_[1] = {1};
      for (std::uint64_t v = 2; v <= n; ++v) {
        auto targets = std::span(s.stubs_).subspan((v - 1) * c, c);
        std::vector<NodeId> own(targets.begin(), targets.end());
        std::sort(own.begin(), own.end());
        own.erase(std::unique(own.begin(), own.end()), own.end());
        for (NodeId t : own) s.adjacency_[t].push_back(static_cast<NodeId>(v));
        s.adjacency_[v] = std::move(own);
      }
    }
    return s;
  }
};

Snapshot snapshot(const GraphState& state) { return SnapshotCodec::encode(state); }

GraphState restore(const Snapshot& snap) { return SnapshotCodec::decode(snap); }

void save_snapshot(const GraphState& state, const std::filesystem::path& path) {
  const Snapshot snap = snapshot(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(snap.bytes.data()), static_cast<std::streamsize>(snap.bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

GraphState load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Snapshot snap;
  snap.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return restore(snap);
}

}  // namespace pagraph
