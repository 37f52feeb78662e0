#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "enumeration.hpp"
#include "errors.hpp"

namespace geolab {

enum class CacheKind : std::uint32_t { Cosets = 1, Classes = 2, Edges = 3 };

inline const char* to_string(CacheKind k) {
  switch (k) {
    case CacheKind::Cosets: return "cosets";
    case CacheKind::Classes: return "classes";
    case CacheKind::Edges: return "edges";
  }
  return "unknown";
}

// Header: magic, format version, kind, N, record count, record size, CRC-32 of the records.
struct CacheHeader {
  static constexpr std::array<char, 8> kMagic = {'G', 'E', 'O', 'L', 'A', 'B', 'C', '1'};
  static constexpr std::uint32_t kVersion = 1;
  std::uint32_t version = kVersion;
  CacheKind kind = CacheKind::Cosets;
  std::int64_t N = 0;
  std::uint64_t count = 0;
  std::uint32_t record_size = 0;
  std::uint64_t checksum = 0;
};

namespace detail {

class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    static_assert(std::is_integral_v<T>);
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes.push_back(static_cast<unsigned char>(u >> (8 * i)));
  }
  std::vector<unsigned char> bytes;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<unsigned char>& b) : b_(b) {}
  template <class T>
  T get() {
    using U = std::make_unsigned_t<T>;
    if (pos_ + sizeof(T) > b_.size()) throw FormatError("truncated cache record");
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(b_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }

 private:
  const std::vector<unsigned char>& b_;
  std::size_t pos_ = 0;
};

inline std::uint64_t crc32(const std::vector<unsigned char>& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

inline void encode(ByteWriter& w, const DoubleCoset& x) {
  w.put(x.c);
  w.put(x.a_mod_c);
  w.put(x.theta_mod_c);
}
inline void encode(ByteWriter& w, const ClassRecord& r) {
  w.put(r.trace);
  w.put(r.u);
  w.put(r.A);
  w.put(r.B);
  w.put(r.C);
  w.put(r.cycle_length);
  w.put(r.primitive);
}
inline void encode(ByteWriter& w, const EdgeRecord& e) {
  w.put(e.x);
  w.put(e.y);
  w.put(e.k);
}
inline void decode(ByteReader& r, DoubleCoset& x) {
  x.c = r.get<std::int64_t>();
  x.a_mod_c = r.get<std::int64_t>();
  x.theta_mod_c = r.get<std::int64_t>();
}
inline void decode(ByteReader& r, ClassRecord& c) {
  c.trace = r.get<std::int64_t>();
  c.u = r.get<std::int64_t>();
  c.A = r.get<std::int64_t>();
  c.B = r.get<std::int64_t>();
  c.C = r.get<std::int64_t>();
  c.cycle_length = r.get<std::int32_t>();
  c.primitive = r.get<std::int32_t>();
}
inline void decode(ByteReader& r, EdgeRecord& e) {
  e.x = r.get<std::uint32_t>();
  e.y = r.get<std::uint32_t>();
  e.k = r.get<std::int32_t>();
}

template <class T>
constexpr std::uint32_t record_size() {
  if constexpr (std::is_same_v<T, DoubleCoset>) return 24;
  if constexpr (std::is_same_v<T, ClassRecord>) return 48;
  if constexpr (std::is_same_v<T, EdgeRecord>) return 12;
  return 0;
}

}  // namespace detail

inline std::filesystem::path cache_path(const std::filesystem::path& dir, CacheKind kind, std::int64_t N) {
  return dir / (std::string(to_string(kind)) + "_N" + std::to_string(N) + ".bin");
}

template <class T>
void write_cache(const std::filesystem::path& path, CacheKind kind, std::int64_t N, const std::vector<T>& records) {
  detail::ByteWriter body;
  for (const auto& r : records) detail::encode(body, r);
  detail::ByteWriter head;
  for (char c : CacheHeader::kMagic) head.put(static_cast<std::uint8_t>(c));
  head.put(CacheHeader::kVersion);
  head.put(static_cast<std::uint32_t>(kind));
  head.put(N);
  head.put(static_cast<std::uint64_t>(records.size()));
  head.put(detail::record_size<T>());
  head.put(detail::crc32(body.bytes));
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write cache file " + tmp);
    out.write(reinterpret_cast<const char*>(head.bytes.data()), static_cast<std::streamsize>(head.bytes.size()));
    out.write(reinterpret_cast<const char*>(body.bytes.data()), static_cast<std::streamsize>(body.bytes.size()));
    if (!out) throw FormatError("short write to cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

enum class CacheStatus { Ok, Missing, Corrupt };

// Reads a cache file; any header, size or checksum mismatch reports Corrupt and returns no records.
template <class T>
CacheStatus read_cache(const std::filesystem::path& path, CacheKind kind, std::int64_t N, std::vector<T>& out) {
  out.clear();
  std::ifstream in(path, std::ios::binary);
  if (!in) return CacheStatus::Missing;
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kHead = 8 + 4 + 4 + 8 + 8 + 4 + 8;
  if (bytes.size() < kHead) return CacheStatus::Corrupt;
  if (std::memcmp(bytes.data(), CacheHeader::kMagic.data(), 8) != 0) return CacheStatus::Corrupt;
  std::vector<unsigned char> head(bytes.begin() + 8, bytes.begin() + kHead);
  detail::ByteReader hr(head);
  CacheHeader h;
  h.version = hr.get<std::uint32_t>();
  h.kind = static_cast<CacheKind>(hr.get<std::uint32_t>());
  h.N = hr.get<std::int64_t>();
  h.count = hr.get<std::uint64_t>();
  h.record_size = hr.get<std::uint32_t>();
  h.checksum = hr.get<std::uint64_t>();
  if (h.version != CacheHeader::kVersion || h.kind != kind || h.N != N || h.record_size != detail::record_size<T>())
    return CacheStatus::Corrupt;
  std::vector<unsigned char> body(bytes.begin() + kHead, bytes.end());
  if (body.size() != h.count * h.record_size || detail::crc32(body) != h.checksum) return CacheStatus::Corrupt;
  detail::ByteReader br(body);
  out.resize(h.count);
  for (auto& r : out) detail::decode(br, r);
  return CacheStatus::Ok;
}

}  // namespace geolab
