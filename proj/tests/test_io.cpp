#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "adkrylov/plot.hpp"
#include "adkrylov/trace_io.hpp"
#include "fixture_problems.hpp"

using adkrylov::IterationTrace;
using adkrylov::SolverKind;
using adkrylov::Strategy;

namespace {

IterationTrace sample() {
  IterationTrace t;
  t.matrix = "m1";
  t.solver = SolverKind::tfqmr;
  t.strategy = Strategy::lowlevel;
  t.termination = "breakdown:rho_zero@3";
  t.records = {{1, 0.1, 0.2, 1.0 / 3.0},
               {2, 1e-300, std::numeric_limits<double>::infinity(), 2.5},
               {3, std::numeric_limits<double>::quiet_NaN(), 5e-17, 0.0}};
  return t;
}

TEST(TraceCsv, RoundTripsExactly) {
  const auto t = sample();
  const auto text = adkrylov::write_trace_csv(t);
  EXPECT_TRUE(text.starts_with(adkrylov::kTraceHeader));
  EXPECT_NE(text.find("nonfinite"), std::string::npos);
  const auto back = adkrylov::parse_trace_csv(text);
  ASSERT_EQ(back.size(), 1u);
  // Non-finite values come back as infinity.
  EXPECT_EQ(back[0].records[0], t.records[0]);
  EXPECT_FALSE(std::isfinite(*back[0].records[1].err_dx));
  EXPECT_FALSE(std::isfinite(back[0].records[2].err_x));
  EXPECT_EQ(back[0].termination, t.termination);
  EXPECT_EQ(adkrylov::trace_file_name(t), "m1__tfqmr__lowlevel.csv");
}

TEST(TraceCsv, RoundTripsGridOutput) {
  const auto problems = adkrylov::testing::fixture_problems();
  const SolverKind s[] = {SolverKind::gmres, SolverKind::bicgstab, SolverKind::tfqmr};
  const Strategy st[] = {Strategy::original, Strategy::lowlevel, Strategy::highlevel};
  adkrylov::SolverConfig c;
  c.max_iterations = 40;
  for (const auto& t : adkrylov::run_grid(problems, s, st, c)) {
    const auto back = adkrylov::parse_trace_csv(adkrylov::write_trace_csv(t));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], t);
  }
}

TEST(TraceCsv, MalformedRowReportsLine) {
  std::string text(adkrylov::kTraceHeader);
  text += "\nm,gmres,original,1,0.5,,1,budget_exhausted\nm,gmres,original,2,abc,,1,budget_exhausted\n";
  try {
    adkrylov::parse_trace_csv(text);
    FAIL();
  } catch (const adkrylov::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::string dup(adkrylov::kTraceHeader);
  dup += "\nm,gmres,original,2,0.5,,1,x\nm,gmres,original,2,0.5,,1,x\n";
  EXPECT_THROW(adkrylov::parse_trace_csv(dup), adkrylov::ParseError);
  std::string missing(adkrylov::kTraceHeader);
  missing += "\nm,gmres,lowlevel,1,0.5,,1,x\n";
  EXPECT_THROW(adkrylov::parse_trace_csv(missing), adkrylov::ParseError);
  EXPECT_THROW(adkrylov::parse_trace_csv("a,b\n"), adkrylov::ParseError);
}

TEST(ProfileCsv, RoundTrip) {
  adkrylov::DataProfileCurve c{SolverKind::bicgstab, Strategy::highlevel, 1e-2, {{1, 0}, {2, 3}}, 5};
  const std::vector<adkrylov::DataProfileCurve> cs{c};
  const auto back = adkrylov::parse_profile_csv(adkrylov::write_profile_csv(cs));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].points, c.points);
  EXPECT_EQ(back[0].total_problems, 5u);
  EXPECT_EQ(back[0].solver, SolverKind::bicgstab);
}

TEST(Plot, ProfileScript) {
  adkrylov::DataProfileCurve c{SolverKind::gmres, Strategy::lowlevel, 1e-2, {{1, 0}, {2, 1}}, 2};
  const std::vector<adkrylov::DataProfileCurve> cs{c};
  std::ostringstream warn;
  const auto s = adkrylov::plot_script_from_csv(adkrylov::write_profile_csv(cs), "out.png", warn);
  EXPECT_NE(s.find("pngcairo"), std::string::npos);
  EXPECT_NE(s.find("out.png"), std::string::npos);
  EXPECT_NE(s.find("gmres"), std::string::npos);
  EXPECT_TRUE(warn.str().empty());
}

TEST(Plot, TraceScriptSkipsNonFinite) {
  std::ostringstream warn;
  const auto s = adkrylov::plot_script_from_csv(adkrylov::write_trace_csv(sample()), "t.png", warn);
  EXPECT_NE(s.find("logscale"), std::string::npos);
  EXPECT_EQ(s.find("inf"), std::string::npos);
  EXPECT_EQ(s.find("nan"), std::string::npos);
  EXPECT_EQ(s.find("nonfinite"), std::string::npos);
}

TEST(Plot, HeaderOnlyWarns) {
  std::ostringstream warn;
  const auto s = adkrylov::plot_script_from_csv(std::string(adkrylov::kTraceHeader) + "\n", "e.png", warn);
  EXPECT_FALSE(s.empty());
  EXPECT_NE(warn.str().find("warning"), std::string::npos);
  EXPECT_THROW(adkrylov::plot_script_from_csv("x,y\n1,2\n", "e.png", warn), adkrylov::ParseError);
}

}  // namespace
