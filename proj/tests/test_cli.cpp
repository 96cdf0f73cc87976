#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "adkrylov/cli.hpp"
#include "archive_support.hpp"
#include "fixture_problems.hpp"

namespace fs = std::filesystem;
using namespace adkrylov::cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("adkrylov-cli-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunSpec fixture_run(const fs::path& out, std::size_t iters = 30) {
    RunSpec s;
    for (const auto& f : adkrylov::testing::fixture_matrices()) s.mtx_files.push_back(f.string());
    s.cfg.max_iterations = iters;
    s.out_dir = out;
    s.cache_dir = (dir_ / "cache").string();
    s.offline = true;
    return s;
  }

  static std::map<std::string, std::string> read_dir(const fs::path& d) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::directory_iterator(d)) m[e.path().filename().string()] = adkrylov::read_file(e.path());
    return m;
  }

  adkrylov::Transport no_network = [](const std::string&) {
    ADD_FAILURE() << "unexpected network access";
    return adkrylov::HttpResponse{0, {}, "offline"};
  };
  fs::path dir_;
};

TEST(Manifest, Contents) {
  EXPECT_EQ(adkrylov::kBaiManifest.size(), 65u);
  const auto a = adkrylov::find_manifest_entry("bfwa62");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->rows, 62u);
  EXPECT_EQ(a->nonzeros, 450u);
  const auto b = adkrylov::find_manifest_entry("bfwa398");
  ASSERT_TRUE(b);
  EXPECT_EQ(b->rows, 398u);
  EXPECT_EQ(b->nonzeros, 3678u);
  EXPECT_EQ(adkrylov::manifest_subset(1000).size(), 41u);
  EXPECT_EQ(adkrylov::manifest_subset(0).size(), 65u);
  EXPECT_FALSE(adkrylov::find_manifest_entry("not-a-matrix"));
}

TEST(Manifest, ListPrintsCsv) {
  std::ostringstream out;
  EXPECT_EQ(cmd_list(100, out), kOk);
  EXPECT_NE(out.str().find("293,bfwa62,Bai,62,62,450"), std::string::npos);
  EXPECT_EQ(out.str().find("bfwa398"), std::string::npos);
}

TEST_F(CliTest, RunWritesOneCsvPerCellAndIsDeterministic) {
  std::ostringstream out, err;
  auto spec = fixture_run(dir_ / "a");
  ASSERT_EQ(cmd_run(spec, no_network, out, err), kOk) << err.str();
  const auto a = read_dir(dir_ / "a");
  EXPECT_EQ(a.size(), adkrylov::testing::fixture_matrices().size() * 9);
  EXPECT_TRUE(a.contains("rand12__bicgstab__highlevel.csv"));
  spec.out_dir = dir_ / "b";
  spec.jobs = 3;
  ASSERT_EQ(cmd_run(spec, no_network, out, err), kOk);
  EXPECT_EQ(a, read_dir(dir_ / "b"));
}

TEST_F(CliTest, RunSubsetOfSolvers) {
  std::ostringstream out, err;
  auto spec = fixture_run(dir_ / "t");
  spec.mtx_files.resize(1);
  spec.solvers = {adkrylov::SolverKind::tfqmr};
  ASSERT_EQ(cmd_run(spec, no_network, out, err), kOk);
  EXPECT_EQ(read_dir(dir_ / "t").size(), 3u);
}

TEST_F(CliTest, RunUsageAndFailureCodes) {
  std::ostringstream out, err;
  RunSpec empty;
  empty.out_dir = dir_ / "e";
  EXPECT_EQ(cmd_run(empty, no_network, out, err), kUsage);
  RunSpec unknown = empty;
  unknown.matrices = {"no-such-matrix"};
  EXPECT_EQ(cmd_run(unknown, no_network, out, err), kUsage);

  auto partial = fixture_run(dir_ / "p");
  partial.mtx_files.push_back((dir_ / "missing.mtx").string());
  EXPECT_EQ(cmd_run(partial, no_network, out, err), kPartialFailure);
  EXPECT_TRUE(fs::exists(dir_ / "p" / "errors.log"));

  RunSpec offline = fixture_run(dir_ / "o");
  offline.mtx_files.clear();
  offline.matrices = {"bfwa62"};
  EXPECT_EQ(cmd_run(offline, no_network, out, err), kFetch);

  std::ofstream(dir_ / "bad.mtx") << "%%MatrixMarket matrix coordinate real general\n2 2 1\n9 9 1\n";
  RunSpec bad = fixture_run(dir_ / "q");
  bad.mtx_files = {(dir_ / "bad.mtx").string()};
  EXPECT_EQ(cmd_run(bad, no_network, out, err), kParse);
}

TEST_F(CliTest, RunFetchesThroughTransport) {
  const auto text = adkrylov::read_file(adkrylov::testing::fixture_matrices().front());
  const auto body = adkrylov::testing::gzip(adkrylov::testing::make_tar({{"bfwa62/bfwa62.mtx", text}}));
  int calls = 0;
  adkrylov::Transport t = [&](const std::string& url) {
    ++calls;
    EXPECT_EQ(url, "http://stub/MM/Bai/bfwa62.tar.gz");
    return adkrylov::HttpResponse{200, body, {}};
  };
  RunSpec spec;
  spec.matrices = {"bfwa62"};
  spec.cfg.max_iterations = 10;
  spec.cache_dir = (dir_ / "cache").string();
  spec.base_url = "http://stub";
  spec.out_dir = dir_ / "r1";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(spec, t, out, err), kOk) << err.str();
  spec.out_dir = dir_ / "r2";
  ASSERT_EQ(cmd_run(spec, t, out, err), kOk);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(read_dir(dir_ / "r1"), read_dir(dir_ / "r2"));

  adkrylov::Transport fail = [](const std::string&) { return adkrylov::HttpResponse{503, {}, {}}; };
  spec.matrices = {"bfwa398"};
  EXPECT_EQ(cmd_run(spec, fail, out, err), kFetch);
}

TEST_F(CliTest, FetchCommand) {
  std::ostringstream out, err;
  FetchSpec none;
  EXPECT_EQ(cmd_fetch(none, no_network, out, err), kUsage);
  FetchSpec unknown;
  unknown.names = {"zzz"};
  EXPECT_EQ(cmd_fetch(unknown, no_network, out, err), kUsage);
  FetchSpec f;
  f.names = {"bfwa62"};
  f.cache_dir = (dir_ / "c").string();
  adkrylov::Transport nf = [](const std::string&) { return adkrylov::HttpResponse{404, {}, {}}; };
  EXPECT_EQ(cmd_fetch(f, nf, out, err), kFetch);
}

TEST_F(CliTest, ProfileAndPlot) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(fixture_run(dir_ / "tr", 60), no_network, out, err), kOk);
  ProfileSpec p;
  p.trace_dir = dir_ / "tr";
  p.out = dir_ / "loose.csv";
  p.budget = 60;
  ASSERT_EQ(cmd_profile(p, err), kOk) << err.str();
  p.tau = 1e-4;
  p.out = dir_ / "strict.csv";
  ASSERT_EQ(cmd_profile(p, err), kOk);
  const auto loose = adkrylov::parse_profile_csv(adkrylov::read_file(dir_ / "loose.csv"));
  const auto strict = adkrylov::parse_profile_csv(adkrylov::read_file(dir_ / "strict.csv"));
  ASSERT_EQ(loose.size(), 9u);
  ASSERT_EQ(strict.size(), 9u);
  for (std::size_t c = 0; c < loose.size(); ++c) {
    EXPECT_EQ(loose[c].total_problems, adkrylov::testing::fixture_matrices().size());
    for (std::size_t i = 0; i < loose[c].points.size(); ++i)
      EXPECT_GE(loose[c].points[i].solved, strict[c].points[i].solved);
  }

  ASSERT_EQ(cmd_plot(dir_ / "loose.csv", dir_ / "loose.gp", err), kOk);
  const auto script = adkrylov::read_file(dir_ / "loose.gp");
  EXPECT_NE(script.find((dir_ / "loose.png").string()), std::string::npos);

  ProfileSpec missing;
  missing.trace_dir = dir_ / "nowhere";
  missing.out = dir_ / "x.csv";
  EXPECT_EQ(cmd_profile(missing, err), kUsage);
  fs::create_directories(dir_ / "empty");
  missing.trace_dir = dir_ / "empty";
  EXPECT_EQ(cmd_profile(missing, err), kUsage);

  std::ofstream(dir_ / "junk.csv") << "what,ever\n";
  EXPECT_EQ(cmd_plot(dir_ / "junk.csv", dir_ / "junk.gp", err), kParse);
  EXPECT_EQ(cmd_plot(dir_ / "absent.csv", dir_ / "a.gp", err), kUsage);
}

TEST_F(CliTest, ProfileRejectsMalformedTrace) {
  fs::create_directories(dir_ / "bad");
  std::ofstream(dir_ / "bad" / "m__gmres__original.csv")
      << adkrylov::kTraceHeader << "\nm,gmres,original,x,1,,1,budget_exhausted\n";
  ProfileSpec p;
  p.trace_dir = dir_ / "bad";
  p.out = dir_ / "p.csv";
  std::ostringstream err;
  EXPECT_EQ(cmd_profile(p, err), kParse);
  EXPECT_NE(err.str().find("line 2"), std::string::npos);
}

}  // namespace
