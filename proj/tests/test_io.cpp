#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "geolab/cache.hpp"
#include "geolab/report.hpp"

using namespace geolab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geolab_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void flip_byte(const fs::path& p, std::streamoff at) {
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(at);
  char b = 0;
  f.read(&b, 1);
  b = static_cast<char>(b ^ 0x5a);
  f.seekp(at);
  f.write(&b, 1);
}

}  // namespace

TEST(Cache, RoundTripAllKinds) {
  const fs::path dir = scratch("rt");
  const std::int64_t N = 40;
  const auto cosets = enumerate_cosets(N);
  const ClassTable table = enumerate_class_table(N);
  const EdgeList E = enumerate_edges(N, table);
  write_cache(cache_path(dir, CacheKind::Cosets, N), CacheKind::Cosets, N, cosets);
  write_cache(cache_path(dir, CacheKind::Classes, N), CacheKind::Classes, N, table.classes);
  write_cache(cache_path(dir, CacheKind::Edges, N), CacheKind::Edges, N, E.edges);

  std::vector<DoubleCoset> c2;
  std::vector<ClassRecord> r2;
  std::vector<EdgeRecord> e2;
  ASSERT_EQ(read_cache(cache_path(dir, CacheKind::Cosets, N), CacheKind::Cosets, N, c2), CacheStatus::Ok);
  ASSERT_EQ(read_cache(cache_path(dir, CacheKind::Classes, N), CacheKind::Classes, N, r2), CacheStatus::Ok);
  ASSERT_EQ(read_cache(cache_path(dir, CacheKind::Edges, N), CacheKind::Edges, N, e2), CacheStatus::Ok);
  ASSERT_EQ(c2.size(), cosets.size());
  for (std::size_t i = 0; i < c2.size(); ++i) {
    EXPECT_EQ(c2[i], cosets[i]);
    EXPECT_EQ(c2[i].theta_mod_c, cosets[i].theta_mod_c);
  }
  ASSERT_EQ(r2.size(), table.classes.size());
  for (std::size_t i = 0; i < r2.size(); ++i) EXPECT_EQ(record_key(r2[i]), record_key(table.classes[i]));
  ASSERT_EQ(e2.size(), E.edges.size());
  for (std::size_t i = 0; i < e2.size(); ++i) {
    EXPECT_EQ(e2[i].x, E.edges[i].x);
    EXPECT_EQ(e2[i].y, E.edges[i].y);
    EXPECT_EQ(e2[i].k, E.edges[i].k);
  }
  fs::remove_all(dir);
}

TEST(Cache, DetectsCorruptionAndMismatch) {
  const fs::path dir = scratch("bad");
  const std::int64_t N = 30;
  const auto cosets = enumerate_cosets(N);
  const fs::path p = cache_path(dir, CacheKind::Cosets, N);
  std::vector<DoubleCoset> out;
  EXPECT_EQ(read_cache(p, CacheKind::Cosets, N, out), CacheStatus::Missing);
  write_cache(p, CacheKind::Cosets, N, cosets);
  // Wrong N and wrong kind are both refused.
  EXPECT_EQ(read_cache(p, CacheKind::Cosets, N + 1, out), CacheStatus::Corrupt);
  std::vector<EdgeRecord> wrong;
  EXPECT_EQ(read_cache(p, CacheKind::Edges, N, wrong), CacheStatus::Corrupt);
  // A flipped body byte fails the checksum.
  flip_byte(p, static_cast<std::streamoff>(fs::file_size(p) - 5));
  EXPECT_EQ(read_cache(p, CacheKind::Cosets, N, out), CacheStatus::Corrupt);
  EXPECT_TRUE(out.empty());
  // Truncation.
  write_cache(p, CacheKind::Cosets, N, cosets);
  fs::resize_file(p, fs::file_size(p) - 3);
  EXPECT_EQ(read_cache(p, CacheKind::Cosets, N, out), CacheStatus::Corrupt);
  // Bad magic.
  write_cache(p, CacheKind::Cosets, N, cosets);
  flip_byte(p, 0);
  EXPECT_EQ(read_cache(p, CacheKind::Cosets, N, out), CacheStatus::Corrupt);
  fs::remove_all(dir);
}

TEST(Report, CsvLayout) {
  Table t{"demo", 2, {"n", "x", "s"}, {}};
  t.add({std::int64_t{3}, 0.1, std::string("a")});
  t.add({std::int64_t{-1}, std::numeric_limits<double>::infinity(), std::string("b")});
  EXPECT_THROW(t.add({std::int64_t{1}}), PreconditionError);
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(), "# demo v2\nn,x,s\n3,0.1,a\n-1,inf,b\n");
  std::ostringstream two;
  write_csv(two, std::vector<Table>{t, t});
  EXPECT_EQ(two.str(), os.str() + "\n" + os.str());
}

TEST(Report, JsonLayout) {
  Table t{"demo", 1, {"n", "x"}, {}};
  t.add({std::int64_t{7}, 2.5});
  std::ostringstream os;
  write_json(os, {t}, {{"command", "demo"}, {"N", "7"}});
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["config"]["command"], "demo");
  EXPECT_EQ(j["tables"][0]["report"], "demo");
  EXPECT_EQ(j["tables"][0]["columns"][1], "x");
  EXPECT_EQ(j["tables"][0]["rows"][0][0], 7);
  EXPECT_DOUBLE_EQ(j["tables"][0]["rows"][0][1].get<double>(), 2.5);
}

TEST(Report, DoubleFormatting) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333333333");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}
