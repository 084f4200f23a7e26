#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "motion/retrieval/retrieval.hpp"
#include "motion/video/clip_io.hpp"
#include "test_util.hpp"

using motion::test_support::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = motion::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"macs", "--no-such-flag"}).code, 2);
  EXPECT_EQ(cli({"macs", "--segments", "0"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
}

TEST(Cli, RuntimeErrorIsOneLine) {
  TempDir dir;
  std::ofstream(dir / "bad.mtc1") << "not a clip";
  std::ofstream(dir / "m.mtck") << "not a checkpoint";
  const auto r = cli({"classify", "--clip", (dir / "bad.mtc1").string(), "--model", (dir / "m.mtck").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(lines(r.err), 1u);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST(Cli, MacsReportsGoldenTotal) {
  const auto r = cli({"macs"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("total 2789696"), std::string::npos);
  EXPECT_NE(r.out.find("ok"), std::string::npos);
}

TEST(Cli, ExplicitFlagBeatsConfigFile) {
  TempDir dir;
  std::ofstream(dir / "c.json") << R"({"segments": 2})";
  const auto from_file = cli({"macs", "--config", (dir / "c.json").string()});
  EXPECT_NE(from_file.out.find("segments 2\n"), std::string::npos);
  const auto both = cli({"macs", "--config", (dir / "c.json").string(), "--segments", "3"});
  EXPECT_EQ(both.code, 0);
  EXPECT_NE(both.out.find("segments 3\n"), std::string::npos);

  std::ofstream(dir / "broken.json") << "{";
  EXPECT_EQ(cli({"macs", "--config", (dir / "broken.json").string()}).code, 2);
}

TEST(Cli, EndToEndPipeline) {
  TempDir dir;
  const auto data = (dir / "data").string(), model = (dir / "m.mtck").string();
  ASSERT_EQ(cli({"synthgen", "--out", data, "--clips-per-class", "6", "--frames", "8"}).code, 0);
  const auto tr = cli({"train", "--data", data, "--out", model, "--epochs", "1", "--metrics",
                       (dir / "metrics.csv").string()});
  ASSERT_EQ(tr.code, 0) << tr.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "metrics.csv"));

  const auto ev = cli({"eval", "--data", data, "--model", model, "--split", "test"});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("\"accuracy\""), std::string::npos);

  const auto store = (dir / "f.mtfs").string();
  ASSERT_EQ(cli({"extract-features", "--data", data, "--split", "all", "--model", model, "--out", store}).code, 0);
  EXPECT_EQ(motion::retrieval::load_store(store).size(), 30u);
  const auto rt = cli({"retrieve", "--store", store, "--k", "3"});
  ASSERT_EQ(rt.code, 0) << rt.err;
  EXPECT_EQ(rt.out.substr(0, rt.out.find('\n')), "query_id,rank,neighbor_id,distance,neighbor_label");
  EXPECT_EQ(lines(rt.out), 1u + 30u * 3u);

  // Any clip from the corpus will do for the single-clip commands.
  std::filesystem::path clip;
  for (const auto& e : std::filesystem::recursive_directory_iterator(data))
    if (e.path().extension() == ".mtc1") clip = e.path();
  ASSERT_FALSE(clip.empty());

  const auto cl = cli({"classify", "--clip", clip.string(), "--model", model});
  ASSERT_EQ(cl.code, 0) << cl.err;
  EXPECT_NE(cl.out.find("\"motion\""), std::string::npos);

  const auto rc = cli({"recommend", "--clip", clip.string(), "--model", model, "--out", (dir / "s.mtc1").string()});
  ASSERT_EQ(rc.code, 0) << rc.err;
  EXPECT_NE(rc.out.find("\"style\""), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "s.mtc1"));

  const auto as = cli({"apply-style", "--clip", clip.string(), "--style", "Boomerang", "--out", (dir / "b.mtc1").string()});
  ASSERT_EQ(as.code, 0) << as.err;
  EXPECT_EQ(motion::video::load_clip(dir / "b.mtc1").frame_count, 15u);
}
