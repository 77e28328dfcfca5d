#pragma once

// Adjacent-member spacing and its comparison against reference measurements
// (mean absolute error, mean absolute percentage error).

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "members.hpp"

namespace formwork {

// En dash joining the two member labels of a pair ("Stud 1–Stud 2").
inline constexpr const char* kPairSeparator = "\xE2\x80\x93";

inline std::string pair_label(const std::string& first, const std::string& second) {
  return first + kPairSeparator + second;
}

struct SpacingResult {
  MemberCategory category = MemberCategory::Stud;
  std::string pair_label;
  double value_mm = 0.0;
  int axis = 1;  // coordinate slot the spacing was measured along (0 = a1, 1 = a2)
};

// Differences of consecutive member means on each category's ordering axis,
// in millimeters. Ties pair only within their wale group.
inline std::vector<SpacingResult> measure_spacing(const MemberSet& set) {
  std::vector<SpacingResult> out;
  for (auto cat : kAllCategories) {
    const auto& members = set[cat];
    for (std::size_t j = 0; j + 1 < members.size(); ++j) {
      const Member& a = members[j];
      const Member& b = members[j + 1];
      if (cat == MemberCategory::Tie && tie_group(a) != tie_group(b)) continue;
      out.push_back({cat, pair_label(a.label(), b.label()), (b.position() - a.position()) * 1000.0, ordering_axis(cat)});
    }
  }
  return out;
}

inline void check_paired(std::span<const double> pc, std::span<const double> mt) {
  if (pc.size() != mt.size())
    throw PairingError("length mismatch: " + std::to_string(pc.size()) + " measured vs " + std::to_string(mt.size()) +
                       " reference values");
  if (pc.empty()) throw PairingError("at least one pair is required");
}

// (1/n) sum |pc_i - mt_i|
inline double mae(std::span<const double> pc, std::span<const double> mt) {
  check_paired(pc, mt);
  double s = 0.0;
  for (std::size_t i = 0; i < pc.size(); ++i) s += std::abs(pc[i] - mt[i]);
  return s / static_cast<double>(pc.size());
}

// (100/n) sum |pc_i - mt_i| / mt_i, in percent.
inline double mape(std::span<const double> pc, std::span<const double> mt) {
  check_paired(pc, mt);
  double s = 0.0;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (!(mt[i] > 0.0)) throw ParameterError("reference value must be > 0 for a percentage error");
    s += std::abs(pc[i] - mt[i]) / mt[i];
  }
  return 100.0 * s / static_cast<double>(pc.size());
}

struct ReferenceValue {
  std::string label;
  double value_mm = 0.0;
};

// Tool-measured spacings per category, keyed by the same pair labels the
// pipeline produces.
struct ReferenceMeasurements {
  std::map<MemberCategory, std::vector<ReferenceValue>> by_category;
};

struct ComparisonBlock {
  std::string scope;  // category key or "all"
  std::string case_label;
  double mae_mm = 0.0;
  double mape_pct = 0.0;
  std::size_t n = 0;
  double abs_err_std_mm = 0.0;  // population std of |pc - mt|
};

struct ReportPair {
  std::string label;
  double pc_mm = 0.0;
  std::optional<double> mt_mm;
};

struct CategoryReport {
  MemberCategory category = MemberCategory::Stud;
  std::vector<ReportPair> pairs;
  std::optional<ComparisonBlock> metrics;
};

struct SpacingReport {
  std::string case_label;
  std::vector<CategoryReport> categories;  // fixed category order; absent ones omitted
  std::optional<ComparisonBlock> all;      // pooled over every pair

  const CategoryReport* find(MemberCategory c) const {
    for (const auto& r : categories)
      if (r.category == c) return &r;
    return nullptr;
  }
  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& r : categories) n += r.pairs.size();
    return n;
  }
};

inline ComparisonBlock compare(const std::string& scope, const std::string& case_label, std::span<const double> pc,
                               std::span<const double> mt) {
  ComparisonBlock b{scope, case_label, mae(pc, mt), mape(pc, mt), pc.size(), 0.0};
  double var = 0.0;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const double d = std::abs(pc[i] - mt[i]) - b.mae_mm;
    var += d * d;
  }
  b.abs_err_std_mm = std::sqrt(var / static_cast<double>(pc.size()));
  return b;
}

// Groups results per category and, when references are given, pairs them by
// label and adds per-category and pooled comparison blocks. Any result or
// reference without a counterpart is reported in one PairingError.
inline SpacingReport build_report(std::span<const SpacingResult> results, const ReferenceMeasurements* references,
                                  const std::string& case_label) {
  SpacingReport report;
  report.case_label = case_label;
  std::vector<std::string> orphans;
  std::vector<double> all_pc, all_mt;

  for (auto cat : kAllCategories) {
    CategoryReport block;
    block.category = cat;
    for (const auto& r : results)
      if (r.category == cat) block.pairs.push_back({r.pair_label, r.value_mm, std::nullopt});

    if (references) {
      static const std::vector<ReferenceValue> kNone;
      auto it = references->by_category.find(cat);
      const auto& refs = it == references->by_category.end() ? kNone : it->second;
      for (auto& pair : block.pairs) {
        for (const auto& ref : refs) {
          if (ref.label == pair.label) {
            pair.mt_mm = ref.value_mm;
            break;
          }
        }
        if (!pair.mt_mm) orphans.push_back("no reference for '" + pair.label + "'");
      }
      for (const auto& ref : refs) {
        bool matched = false;
        for (const auto& pair : block.pairs) matched |= pair.label == ref.label;
        if (!matched) orphans.push_back("no measurement for reference '" + ref.label + "'");
      }
    }
    if (block.pairs.empty()) continue;
    report.categories.push_back(std::move(block));
  }
  if (!orphans.empty()) {
    std::string msg = "unmatched labels:";
    for (const auto& o : orphans) msg += "\n  " + o;
    throw PairingError(msg);
  }

  if (references) {
    for (auto& block : report.categories) {
      std::vector<double> pc, mt;
      for (const auto& p : block.pairs) {
        pc.push_back(p.pc_mm);
        mt.push_back(*p.mt_mm);
      }
      block.metrics = compare(category_key(block.category), case_label, pc, mt);
      all_pc.insert(all_pc.end(), pc.begin(), pc.end());
      all_mt.insert(all_mt.end(), mt.begin(), mt.end());
    }
    if (!all_pc.empty()) report.all = compare("all", case_label, all_pc, all_mt);
  }
  return report;
}

inline SpacingReport build_report(std::span<const SpacingResult> results, const std::string& case_label) {
  return build_report(results, nullptr, case_label);
}

}  // namespace formwork
