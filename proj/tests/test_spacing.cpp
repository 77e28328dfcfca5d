#include <gtest/gtest.h>

#include <formwork/rng.hpp>
#include <formwork/spacing.hpp>

#include "oracles.hpp"

using namespace formwork;

namespace {

Member member(MemberCategory c, const std::string& number, double a1, double a2) {
  Member m;
  m.category = c;
  m.number = number;
  m.mean = {a1, a2, 0};
  return m;
}

}  // namespace

TEST(MeasureSpacing, TwoStuds) {
  MemberSet set;
  set[MemberCategory::Stud] = {member(MemberCategory::Stud, "1", 0, 0.100), member(MemberCategory::Stud, "2", 0, 0.400)};
  const auto r = measure_spacing(set);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].pair_label, "Stud 1\xE2\x80\x93Stud 2");
  EXPECT_NEAR(r[0].value_mm, 300.0, 1e-9);
  EXPECT_EQ(r[0].axis, 1);
}

TEST(MeasureSpacing, WalesAlongFirstAxisTiesWithinGroups) {
  MemberSet set;
  set[MemberCategory::Wale] = {member(MemberCategory::Wale, "1", -0.7, 9), member(MemberCategory::Wale, "2", 0.7, -9)};
  set[MemberCategory::Tie] = {member(MemberCategory::Tie, "1_1", -0.7, 0.0), member(MemberCategory::Tie, "1_2", -0.7, 0.9),
                              member(MemberCategory::Tie, "2_1", 0.7, 0.1), member(MemberCategory::Tie, "2_2", 0.7, 1.0)};
  set[MemberCategory::Brace] = {member(MemberCategory::Brace, "1", 0, 0.5)};
  const auto r = measure_spacing(set);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0].value_mm, 1400.0, 1e-9);
  EXPECT_EQ(r[0].axis, 0);
  EXPECT_EQ(r[1].pair_label, "Tie 1_1\xE2\x80\x93Tie 1_2");
  EXPECT_EQ(r[2].pair_label, "Tie 2_1\xE2\x80\x93Tie 2_2");
}

TEST(Metrics, Arithmetic) {
  const std::vector<double> pc{302, 305}, mt{300, 300};
  EXPECT_DOUBLE_EQ(mae(pc, mt), 3.5);
  EXPECT_NEAR(mape(pc, mt), 1.1667, 1e-4);
  EXPECT_DOUBLE_EQ(mae(mt, mt), 0.0);
  EXPECT_DOUBLE_EQ(mape(mt, mt), 0.0);
  const std::vector<double> brace_pc{1811.0}, brace_mt{1800.0};
  EXPECT_DOUBLE_EQ(mae(brace_pc, brace_mt), 11.0);
}

TEST(Metrics, Errors) {
  const std::vector<double> a{1, 2}, b{1}, none{}, zero{0, 1};
  EXPECT_THROW(mae(a, b), PairingError);
  EXPECT_THROW(mae(none, none), PairingError);
  EXPECT_THROW(mape(a, zero), ParameterError);
}

TEST(Metrics, MatchesDirectArithmetic) {
  Rng rng(1);
  std::vector<double> pc, mt;
  for (int i = 0; i < 200; ++i) {
    mt.push_back(rng.uniform(100, 2000));
    pc.push_back(mt.back() + rng.normal(0, 5));
  }
  EXPECT_NEAR(mae(pc, mt), oracle::mae(pc, mt), 1e-12 * oracle::mae(pc, mt));
  EXPECT_NEAR(mape(pc, mt), oracle::mape(pc, mt), 1e-12 * oracle::mape(pc, mt));
}

TEST(BuildReport, WithoutReferences) {
  const std::vector<SpacingResult> res{{MemberCategory::Stud, "Stud 1\xE2\x80\x93Stud 2", 300.0, 1}};
  const auto rep = build_report(res, "c");
  ASSERT_EQ(rep.categories.size(), 1u);
  EXPECT_FALSE(rep.categories[0].metrics);
  EXPECT_FALSE(rep.categories[0].pairs[0].mt_mm);
  EXPECT_FALSE(rep.all);
}

TEST(BuildReport, SingleCategoryEqualsAll) {
  const std::vector<SpacingResult> res{{MemberCategory::Stud, "Stud 1\xE2\x80\x93Stud 2", 302.0, 1}};
  ReferenceMeasurements refs;
  refs.by_category[MemberCategory::Stud] = {{"Stud 1\xE2\x80\x93Stud 2", 300.0}};
  const auto rep = build_report(res, &refs, "c");
  ASSERT_TRUE(rep.all);
  EXPECT_EQ(rep.all->mae_mm, rep.categories[0].metrics->mae_mm);
  EXPECT_EQ(rep.all->mape_pct, rep.categories[0].metrics->mape_pct);
  EXPECT_EQ(rep.all->n, 1u);
}

TEST(BuildReport, PooledAllMatchesConcatenation) {
  Rng rng(2);
  std::vector<SpacingResult> res;
  ReferenceMeasurements refs;
  std::vector<double> pc, mt;
  for (auto cat : kAllCategories) {
    for (int i = 1; i <= 3; ++i) {
      const std::string label = pair_label(category_name(cat) + " " + std::to_string(i),
                                           category_name(cat) + " " + std::to_string(i + 1));
      const double truth = rng.uniform(200, 2000);
      const double meas = truth + rng.normal(0, 4);
      res.push_back({cat, label, meas, ordering_axis(cat)});
      refs.by_category[cat].push_back({label, truth});
      pc.push_back(meas);
      mt.push_back(truth);
    }
  }
  const auto rep = build_report(res, &refs, "c");
  ASSERT_TRUE(rep.all);
  EXPECT_NEAR(rep.all->mae_mm, oracle::mae(pc, mt), 1e-9);
  EXPECT_NEAR(rep.all->mape_pct, oracle::mape(pc, mt), 1e-9);
  EXPECT_EQ(rep.all->n, 12u);
}

TEST(BuildReport, UnmatchedLabelsBothWays) {
  const std::vector<SpacingResult> res{{MemberCategory::Stud, "Stud 1\xE2\x80\x93Stud 2", 300.0, 1}};
  ReferenceMeasurements refs;
  refs.by_category[MemberCategory::Stud] = {{"Stud 2\xE2\x80\x93Stud 3", 300.0}};
  try {
    build_report(res, &refs, "c");
    FAIL();
  } catch (const PairingError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("no reference for 'Stud 1"), std::string::npos);
    EXPECT_NE(msg.find("no measurement for reference 'Stud 2"), std::string::npos);
  }
}
