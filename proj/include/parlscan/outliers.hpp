#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parlscan/features.hpp"
#include "parlscan/model.hpp"

namespace parlscan {

// Dispersion bounds of one feature distribution. Values strictly
// outside [lower, upper] are outliers; boundary values are not.
struct IqrBounds {
  double q1 = 0;
  double q3 = 0;
  double iqr = 0;
  double lower = 0;
  double upper = 0;
};

struct OutlierHit {
  std::string committee_id;
  FeatureKind kind = FeatureKind::MeetingsCount;
  std::string subject;  // meeting_id, or "YYYY-MM" for month buckets
  double value = 0;
  enum class Side { Below, Above } side = Side::Above;
};

// Linear-interpolation quantile on the sorted list:
// p = (len-1)*q, result = x[floor(p)] + (p - floor(p)) * (x[floor(p)+1] - x[floor(p)]).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty list");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile fraction outside [0,1]");
  std::sort(values.begin(), values.end());
  const double p = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<size_t>(std::floor(p));
  const double frac = p - std::floor(p);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline IqrBounds iqr_bounds(const std::vector<double>& values) {
  IqrBounds b;
  b.q1 = quantile(values, 0.25);
  b.q3 = quantile(values, 0.75);
  b.iqr = b.q3 - b.q1;
  b.lower = b.q1 - 1.5 * b.iqr;
  b.upper = b.q3 + 1.5 * b.iqr;
  return b;
}

struct OutlierScan {
  std::optional<IqrBounds> bounds;  // unset when too few values
  std::vector<OutlierHit> hits;     // chronological
  bool too_few_values = false;
};

// Flags anomalous subjects of one (committee, feature) distribution.
// Quartiles of fewer than four values are degenerate, so short
// distributions are skipped rather than scored.
inline OutlierScan detect_outliers(const std::vector<ProtocolRecord>& corpus,
                                   const std::string& committee_id,
                                   FeatureKind kind) {
  const auto records = committee_records(corpus, committee_id);
  if (records.empty()) throw DataError("unknown committee: " + committee_id);

  std::vector<double> values = feature_values(corpus, committee_id, kind);
  OutlierScan scan;
  if (values.size() < 4) {
    scan.too_few_values = true;
    return scan;
  }
  scan.bounds = iqr_bounds(values);

  auto subject_at = [&](size_t i) -> std::string {
    if (kind == FeatureKind::MeetingsCount) {
      const int month = records.front()->date.month_index() + static_cast<int>(i);
      Date bucket{month / 12, month % 12 + 1, 1};
      return bucket.iso_month();
    }
    return records[i]->meeting_id;
  };

  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < scan.bounds->lower)
      scan.hits.push_back({committee_id, kind, subject_at(i), values[i],
                           OutlierHit::Side::Below});
    else if (values[i] > scan.bounds->upper)
      scan.hits.push_back({committee_id, kind, subject_at(i), values[i],
                           OutlierHit::Side::Above});
  }
  return scan;
}

}  // namespace parlscan
