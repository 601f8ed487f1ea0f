#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parlscan/features.hpp"
#include "parlscan/model.hpp"
#include "parlscan/text.hpp"

namespace parlscan {

// Calendar-aligned bucket widths: months, quarters starting Jan/Apr/Jul/Oct,
// halves starting Jan/Jul.
enum class Resolution { OneMonth, ThreeMonths, SixMonths };

inline int months_per(Resolution r) {
  switch (r) {
    case Resolution::OneMonth: return 1;
    case Resolution::ThreeMonths: return 3;
    case Resolution::SixMonths: return 6;
  }
  return 6;
}

inline std::string resolution_id(Resolution r) {
  switch (r) {
    case Resolution::OneMonth: return "1m";
    case Resolution::ThreeMonths: return "3m";
    case Resolution::SixMonths: return "6m";
  }
  return "6m";
}

inline std::optional<Resolution> resolution_from_id(std::string_view id) {
  if (id == "1m") return Resolution::OneMonth;
  if (id == "3m") return Resolution::ThreeMonths;
  if (id == "6m") return Resolution::SixMonths;
  return std::nullopt;
}

namespace detail {
inline int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
}  // namespace detail

inline int bucket_of(const Date& d, Resolution r) {
  return detail::floor_div(d.month_index(), months_per(r));
}

inline Date bucket_start_date(int bucket, Resolution r) {
  const int month = bucket * months_per(r);
  return Date{detail::floor_div(month, 12), ((month % 12) + 12) % 12 + 1, 1};
}

// The regular signal one committee/feature pair is segmented on. Values
// are dense: index i is the bucket starting at start_bucket advanced by
// i resolutions. Buckets without meetings hold 0 and are listed in
// empty_buckets (zero activity is itself signal: recesses, dissolutions).
struct CommitteeSeries {
  std::string committee_id;
  FeatureKind kind = FeatureKind::MeetingsCount;
  Resolution resolution = Resolution::SixMonths;
  Date start_bucket;
  std::vector<double> values;
  std::vector<int> empty_buckets;

  Date bucket_date(int index) const {
    return bucket_start_date(bucket_of(start_bucket, resolution) + index, resolution);
  }
};

inline CommitteeSeries build_series(const std::vector<ProtocolRecord>& corpus,
                                    const std::string& committee_id,
                                    FeatureKind kind, Resolution resolution) {
  const auto records = committee_records(corpus, committee_id);
  if (records.empty()) throw DataError("unknown committee: " + committee_id);

  const int first = bucket_of(records.front()->date, resolution);
  const int last = bucket_of(records.back()->date, resolution);
  const auto n = static_cast<size_t>(last - first + 1);

  std::vector<double> sums(n, 0.0);
  std::vector<std::int64_t> counts(n, 0);
  for (const ProtocolRecord* r : records) {
    const auto i = static_cast<size_t>(bucket_of(r->date, resolution) - first);
    ++counts[i];
    if (kind == FeatureKind::AvgCommitteeMembers)
      sums[i] += static_cast<double>(r->committee_members.size());
    else if (kind == FeatureKind::AvgTextLength)
      sums[i] += static_cast<double>(r->document_length);
  }

  size_t non_empty = 0;
  for (auto c : counts)
    if (c > 0) ++non_empty;
  if (non_empty < 2)
    throw DataError("series too short for " + committee_id + "/" + feature_kind_id(kind) +
                    ": needs at least 2 non-empty buckets");

  CommitteeSeries s;
  s.committee_id = committee_id;
  s.kind = kind;
  s.resolution = resolution;
  s.start_bucket = bucket_start_date(first, resolution);
  s.values.resize(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    if (counts[i] == 0) {
      s.empty_buckets.push_back(static_cast<int>(i));
      continue;
    }
    if (kind == FeatureKind::MeetingsCount)
      s.values[i] = static_cast<double>(counts[i]);
    else
      s.values[i] = sums[i] / static_cast<double>(counts[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Segmentation. All four algorithms minimize the within-segment L2 cost
//   cost(i, j) = sum over [i, j) of (x - segment mean)^2
// and break ties by the lexicographically smallest change-point list, so
// results are reproducible and comparable against the exact oracles.
// ---------------------------------------------------------------------------

// O(1) segment costs via prefix sums.
class SegmentCostTable {
 public:
  explicit SegmentCostTable(std::span<const double> xs)
      : sum_(xs.size() + 1, 0.0), sumsq_(xs.size() + 1, 0.0) {
    for (size_t i = 0; i < xs.size(); ++i) {
      sum_[i + 1] = sum_[i] + xs[i];
      sumsq_[i + 1] = sumsq_[i] + xs[i] * xs[i];
    }
  }

  size_t size() const { return sum_.size() - 1; }

  double operator()(size_t i, size_t j) const {
    const double s = sum_[j] - sum_[i];
    const double ss = sumsq_[j] - sumsq_[i];
    const double c = ss - s * s / static_cast<double>(j - i);
    return c > 0.0 ? c : 0.0;  // mathematically >= 0
  }

 private:
  std::vector<double> sum_, sumsq_;
};

inline double segment_cost(std::span<const double> xs, size_t i, size_t j) {
  if (i >= j || j > xs.size()) throw std::invalid_argument("segment_cost: bad indices");
  return SegmentCostTable(xs)(i, j);
}

namespace detail {

inline void require_feasible(size_t len, int n_bkps, int min_size, const char* who) {
  if (n_bkps < 1) throw std::invalid_argument(std::string(who) + ": n_bkps must be >= 1");
  if (min_size < 1) throw std::invalid_argument(std::string(who) + ": min_size must be >= 1");
  if (len < static_cast<size_t>(n_bkps + 1) * static_cast<size_t>(min_size))
    throw std::invalid_argument(std::string(who) + ": series of length " +
                                std::to_string(len) + " cannot hold " +
                                std::to_string(n_bkps + 1) + " segments of >= " +
                                std::to_string(min_size));
}

}  // namespace detail

// Exact segmentation into n_bkps+1 segments by dynamic programming over
// suffixes: best[j][s] is the cheapest split of [s, n) into j segments.
// Running the table on suffixes lets reconstruction pick the smallest
// admissible first change point, which yields the lexicographically
// smallest optimal list.
inline std::vector<int> dynp_signal(std::span<const double> xs, int n_bkps,
                                    int min_size) {
  detail::require_feasible(xs.size(), n_bkps, min_size, "dynp");
  const int n = static_cast<int>(xs.size());
  const SegmentCostTable cost(xs);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> best(
      static_cast<size_t>(n_bkps) + 2, std::vector<double>(static_cast<size_t>(n) + 1, kInf));
  for (int s = 0; s + min_size <= n; ++s)
    best[1][static_cast<size_t>(s)] = cost(static_cast<size_t>(s), static_cast<size_t>(n));
  for (int j = 2; j <= n_bkps + 1; ++j) {
    for (int s = 0; s + j * min_size <= n; ++s) {
      double lowest = kInf;
      for (int u = s + min_size; u + (j - 1) * min_size <= n; ++u) {
        const double v = cost(static_cast<size_t>(s), static_cast<size_t>(u)) +
                         best[static_cast<size_t>(j - 1)][static_cast<size_t>(u)];
        if (v < lowest) lowest = v;
      }
      best[static_cast<size_t>(j)][static_cast<size_t>(s)] = lowest;
    }
  }

  std::vector<int> cps;
  int s = 0;
  for (int j = n_bkps + 1; j > 1; --j) {
    const double target = best[static_cast<size_t>(j)][static_cast<size_t>(s)];
    for (int u = s + min_size; u + (j - 1) * min_size <= n; ++u) {
      const double v = cost(static_cast<size_t>(s), static_cast<size_t>(u)) +
                       best[static_cast<size_t>(j - 1)][static_cast<size_t>(u)];
      if (v == target) {
        cps.push_back(u);
        s = u;
        break;
      }
    }
  }
  return cps;
}

// Exact penalized segmentation: minimizes total cost + penalty per change
// point. Same suffix dynamic program as dynp with the segment count left
// free; candidate starts are pruned as in Killick et al.'s PELT (the
// pruning argument is direction-symmetric, and L2 cost satisfies the
// required subadditivity with constant 0). A pruned candidate is strictly
// worse for every earlier start, so pruning never changes the table.
inline std::vector<int> pelt_signal(std::span<const double> xs, double penalty,
                                    int min_size) {
  if (penalty < 0.0) throw std::invalid_argument("pelt: negative penalty");
  if (min_size < 1) throw std::invalid_argument("pelt: min_size must be >= 1");
  const int n = static_cast<int>(xs.size());
  if (n < 2 * min_size)
    throw std::invalid_argument("pelt: series shorter than two minimum segments");
  const SegmentCostTable cost(xs);

  std::vector<double> suffix_best(static_cast<size_t>(n) + 1,
                                  std::numeric_limits<double>::infinity());
  std::vector<int> candidates;
  candidates.reserve(static_cast<size_t>(n));

  for (int s = n - min_size; s >= 0; --s) {
    double lowest = cost(static_cast<size_t>(s), static_cast<size_t>(n));
    for (int u : candidates) {
      if (u - s < min_size) continue;
      const double v = cost(static_cast<size_t>(s), static_cast<size_t>(u)) + penalty +
                       suffix_best[static_cast<size_t>(u)];
      if (v < lowest) lowest = v;
    }
    suffix_best[static_cast<size_t>(s)] = lowest;

    // keep ties alive (slack absorbs rounding) so reconstruction below
    // sees every optimal witness
    const double keep_below = lowest + 1e-9 * (1.0 + std::abs(lowest));
    std::erase_if(candidates, [&](int u) {
      if (u - s < min_size) return false;
      return cost(static_cast<size_t>(s), static_cast<size_t>(u)) +
                 suffix_best[static_cast<size_t>(u)] >
             keep_below;
    });
    candidates.push_back(s);
  }

  std::vector<int> cps;
  int s = 0;
  while (true) {
    const double target = suffix_best[static_cast<size_t>(s)];
    if (cost(static_cast<size_t>(s), static_cast<size_t>(n)) == target) break;
    bool advanced = false;
    for (int u = s + min_size; u + min_size <= n; ++u) {
      const double v = cost(static_cast<size_t>(s), static_cast<size_t>(u)) + penalty +
                       suffix_best[static_cast<size_t>(u)];
      if (v == target) {
        cps.push_back(u);
        s = u;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;  // defensive; the minimum always has a witness
  }
  return cps;
}

// Greedy recursive splitting: repeatedly apply the single split with the
// largest cost reduction among all current segments, ties to the smallest
// split index. May return fewer than n_bkps points when no segment can be
// split without violating min_size.
inline std::vector<int> binseg_signal(std::span<const double> xs, int n_bkps,
                                      int min_size) {
  detail::require_feasible(xs.size(), n_bkps, min_size, "binseg");
  const int n = static_cast<int>(xs.size());
  const SegmentCostTable cost(xs);

  std::vector<std::pair<int, int>> segments = {{0, n}};
  std::vector<int> cps;
  for (int step = 0; step < n_bkps; ++step) {
    double best_gain = -1.0;
    int best_u = -1;
    size_t best_seg = 0;
    for (size_t si = 0; si < segments.size(); ++si) {
      const auto [a, b] = segments[si];
      if (b - a < 2 * min_size) continue;
      // cheapest two-way split of [a, b); same expression dynp minimizes,
      // so the first step agrees with dynp(n_bkps=1) bit for bit
      double min_sum = std::numeric_limits<double>::infinity();
      int u_at = -1;
      for (int u = a + min_size; u + min_size <= b; ++u) {
        const double v = cost(static_cast<size_t>(a), static_cast<size_t>(u)) +
                         cost(static_cast<size_t>(u), static_cast<size_t>(b));
        if (v < min_sum) {
          min_sum = v;
          u_at = u;
        }
      }
      const double gain =
          cost(static_cast<size_t>(a), static_cast<size_t>(b)) - min_sum;
      if (gain > best_gain || (gain == best_gain && u_at < best_u)) {
        best_gain = gain;
        best_u = u_at;
        best_seg = si;
      }
    }
    if (best_u < 0) break;
    const auto [a, b] = segments[best_seg];
    segments[best_seg] = {a, best_u};
    segments.insert(segments.begin() + static_cast<std::ptrdiff_t>(best_seg) + 1,
                    {best_u, b});
    cps.push_back(best_u);
  }
  std::sort(cps.begin(), cps.end());
  return cps;
}

// Window-sliding discrepancy: d(c) compares the segment around c against
// its two halves of half-width w. Peaks are selected greedily in
// decreasing order with min_size spacing, ties to the smallest index.
inline std::vector<int> window_signal(std::span<const double> xs, int half_width,
                                      int n_bkps, int min_size) {
  const int n = static_cast<int>(xs.size());
  if (half_width < 1) throw std::invalid_argument("window: half width must be >= 1");
  if (n < 2 * half_width)
    throw std::invalid_argument("window: width too large for series of length " +
                                std::to_string(n));
  if (n_bkps < 1 || min_size < 1)
    throw std::invalid_argument("window: n_bkps and min_size must be >= 1");
  const SegmentCostTable cost(xs);

  const int lo = std::max(half_width, min_size);
  const int hi = std::min(n - half_width, n - min_size);
  std::vector<std::pair<double, int>> scored;
  for (int c = lo; c <= hi; ++c) {
    const auto a = static_cast<size_t>(c - half_width);
    const auto b = static_cast<size_t>(c + half_width);
    const auto m = static_cast<size_t>(c);
    const double d = cost(a, b) - cost(a, m) - cost(m, b);
    scored.emplace_back(d > 0.0 ? d : 0.0, c);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });

  std::vector<int> selected;
  for (const auto& [d, c] : scored) {
    if (static_cast<int>(selected.size()) == n_bkps) break;
    const bool spaced = std::all_of(selected.begin(), selected.end(), [&](int other) {
      return std::abs(other - c) >= min_size;
    });
    if (spaced) selected.push_back(c);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

// Robust default for PELT when no penalty is given: 2 * sigma^2 * ln(len),
// sigma^2 estimated as half the median squared first difference.
inline double default_penalty(std::span<const double> xs) {
  if (xs.size() < 4) throw std::invalid_argument("default_penalty: series too short");
  std::vector<double> sq_diffs;
  sq_diffs.reserve(xs.size() - 1);
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    const double d = xs[i + 1] - xs[i];
    sq_diffs.push_back(d * d);
  }
  const double sigma_sq = median_of(std::move(sq_diffs)) / 2.0;
  return 2.0 * sigma_sq * std::log(static_cast<double>(xs.size()));
}

// ---------------------------------------------------------------------------
// Exact verification oracles. Deliberately written without the production
// code paths: the fixed-count mode enumerates every admissible
// segmentation; the penalty mode is the plain unpruned quadratic dynamic
// program. Segment costs accumulate from the last segment backward so the
// per-segmentation totals match the dynamic programs' summation order.
// ---------------------------------------------------------------------------

inline std::vector<int> oracle_exact_nbkps(std::span<const double> xs, int n_bkps,
                                           int min_size) {
  if (xs.size() > 24)
    throw std::invalid_argument("oracle_exact_nbkps: instance too large");
  detail::require_feasible(xs.size(), n_bkps, min_size, "oracle_exact_nbkps");
  const int n = static_cast<int>(xs.size());
  const SegmentCostTable cost(xs);

  std::vector<int> current(static_cast<size_t>(n_bkps), 0);
  std::vector<int> best_cps;
  double best_total = std::numeric_limits<double>::infinity();

  // Enumerate combinations in lexicographic order; strict improvement
  // keeps the first (i.e. smallest) optimal list.
  std::function<void(int, int)> recurse = [&](int level, int lowest_start) {
    if (level == n_bkps) {
      double total = cost(static_cast<size_t>(current.back()), static_cast<size_t>(n));
      for (int i = n_bkps - 2; i >= 0; --i)
        total = cost(static_cast<size_t>(current[static_cast<size_t>(i)]),
                     static_cast<size_t>(current[static_cast<size_t>(i + 1)])) +
                total;
      total = cost(0, static_cast<size_t>(current.front())) + total;
      if (total < best_total) {
        best_total = total;
        best_cps = current;
      }
      return;
    }
    const int remaining = n_bkps - level - 1;
    for (int c = lowest_start; c + remaining * min_size + min_size <= n; ++c) {
      current[static_cast<size_t>(level)] = c;
      recurse(level + 1, c + min_size);
    }
  };
  recurse(0, min_size);
  return best_cps;
}

inline std::vector<int> oracle_exact_penalty(std::span<const double> xs, double penalty,
                                             int min_size) {
  if (xs.size() > 256)
    throw std::invalid_argument("oracle_exact_penalty: instance too large");
  if (penalty < 0.0) throw std::invalid_argument("oracle_exact_penalty: negative penalty");
  const int n = static_cast<int>(xs.size());
  if (min_size < 1 || n < 2 * min_size)
    throw std::invalid_argument("oracle_exact_penalty: infeasible min_size");
  const SegmentCostTable cost(xs);

  std::vector<double> suffix_best(static_cast<size_t>(n) + 1,
                                  std::numeric_limits<double>::infinity());
  for (int s = n - min_size; s >= 0; --s) {
    double lowest = cost(static_cast<size_t>(s), static_cast<size_t>(n));
    for (int u = s + min_size; u + min_size <= n; ++u) {
      const double v = cost(static_cast<size_t>(s), static_cast<size_t>(u)) + penalty +
                       suffix_best[static_cast<size_t>(u)];
      if (v < lowest) lowest = v;
    }
    suffix_best[static_cast<size_t>(s)] = lowest;
  }

  std::vector<int> cps;
  int s = 0;
  while (true) {
    const double target = suffix_best[static_cast<size_t>(s)];
    if (cost(static_cast<size_t>(s), static_cast<size_t>(n)) == target) break;
    bool advanced = false;
    for (int u = s + min_size; u + min_size <= n; ++u) {
      const double v = cost(static_cast<size_t>(s), static_cast<size_t>(u)) + penalty +
                       suffix_best[static_cast<size_t>(u)];
      if (v == target) {
        cps.push_back(u);
        s = u;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return cps;
}

// ---------------------------------------------------------------------------
// Series-level wrappers
// ---------------------------------------------------------------------------

enum class CpdAlgorithm { Pelt, Binseg, Window, Dynp };

inline std::string cpd_algorithm_id(CpdAlgorithm a) {
  switch (a) {
    case CpdAlgorithm::Pelt: return "pelt";
    case CpdAlgorithm::Binseg: return "binseg";
    case CpdAlgorithm::Window: return "window";
    case CpdAlgorithm::Dynp: return "dynp";
  }
  return "?";
}

inline std::optional<CpdAlgorithm> cpd_algorithm_from_id(std::string_view id) {
  if (id == "pelt") return CpdAlgorithm::Pelt;
  if (id == "binseg") return CpdAlgorithm::Binseg;
  if (id == "window") return CpdAlgorithm::Window;
  if (id == "dynp") return CpdAlgorithm::Dynp;
  return std::nullopt;
}

// Change points detected by one algorithm on one series. Each change
// point is the first bucket index of a new segment.
struct CpdResult {
  CpdAlgorithm algorithm = CpdAlgorithm::Pelt;
  std::string committee_id;
  FeatureKind kind = FeatureKind::MeetingsCount;
  Resolution resolution = Resolution::SixMonths;
  Date start_bucket;
  int series_len = 0;
  std::vector<int> change_points;
  std::vector<std::pair<std::string, std::string>> params;

  Date bucket_date(int index) const {
    return bucket_start_date(bucket_of(start_bucket, resolution) + index, resolution);
  }
};

namespace detail {
inline CpdResult make_result(const CommitteeSeries& s, CpdAlgorithm algo,
                             std::vector<int> cps,
                             std::vector<std::pair<std::string, std::string>> params) {
  CpdResult r;
  r.algorithm = algo;
  r.committee_id = s.committee_id;
  r.kind = s.kind;
  r.resolution = s.resolution;
  r.start_bucket = s.start_bucket;
  r.series_len = static_cast<int>(s.values.size());
  r.change_points = std::move(cps);
  r.params = std::move(params);
  return r;
}
}  // namespace detail

inline CpdResult dynp(const CommitteeSeries& s, int n_bkps, int min_size) {
  return detail::make_result(s, CpdAlgorithm::Dynp, dynp_signal(s.values, n_bkps, min_size),
                             {{"n_bkps", std::to_string(n_bkps)},
                              {"min_size", std::to_string(min_size)}});
}

inline CpdResult pelt(const CommitteeSeries& s, double penalty, int min_size) {
  return detail::make_result(s, CpdAlgorithm::Pelt, pelt_signal(s.values, penalty, min_size),
                             {{"penalty", format_double(penalty)},
                              {"min_size", std::to_string(min_size)}});
}

inline CpdResult binseg(const CommitteeSeries& s, int n_bkps, int min_size) {
  return detail::make_result(s, CpdAlgorithm::Binseg,
                             binseg_signal(s.values, n_bkps, min_size),
                             {{"n_bkps", std::to_string(n_bkps)},
                              {"min_size", std::to_string(min_size)}});
}

inline CpdResult window_sliding(const CommitteeSeries& s, int half_width, int n_bkps,
                                int min_size) {
  return detail::make_result(s, CpdAlgorithm::Window,
                             window_signal(s.values, half_width, n_bkps, min_size),
                             {{"width", std::to_string(half_width)},
                              {"n_bkps", std::to_string(n_bkps)},
                              {"min_size", std::to_string(min_size)}});
}

}  // namespace parlscan
