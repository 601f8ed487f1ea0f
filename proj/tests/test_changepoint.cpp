#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "parlscan/changepoint.hpp"

using namespace parlscan;

namespace {

ProtocolRecord meeting(const std::string& committee, const std::string& id,
                       const Date& date, int members = 0, std::int64_t length = 0) {
  ProtocolRecord r;
  r.country = "IL";
  r.committee_id = committee;
  r.meeting_id = id;
  r.date = date;
  for (int i = 0; i < members; ++i) r.committee_members.push_back("m" + std::to_string(i));
  r.document_length = length;
  return r;
}

std::vector<double> random_signal(std::mt19937& rng, size_t len) {
  std::uniform_real_distribution<double> dist(0.0, 10.0);
  std::vector<double> xs(len);
  for (auto& x : xs) x = dist(rng);
  return xs;
}

double total_cost(const std::vector<double>& xs, const std::vector<int>& cps) {
  const SegmentCostTable cost(xs);
  double total = 0;
  size_t prev = 0;
  for (int c : cps) {
    total += cost(prev, static_cast<size_t>(c));
    prev = static_cast<size_t>(c);
  }
  return total + cost(prev, xs.size());
}

void check_result_invariants(const std::vector<int>& cps, size_t len, int min_size) {
  int prev = 0;
  for (int c : cps) {
    CHECK(c >= min_size);
    CHECK(c <= static_cast<int>(len) - min_size);
    CHECK(c - prev >= min_size);
    prev = c;
  }
  CHECK(std::is_sorted(cps.begin(), cps.end()));
}

}  // namespace

TEST_CASE("bucket arithmetic is calendar aligned") {
  CHECK(bucket_of({2020, 1, 15}, Resolution::SixMonths) ==
        bucket_of({2020, 6, 30}, Resolution::SixMonths));
  CHECK(bucket_of({2020, 7, 1}, Resolution::SixMonths) ==
        bucket_of({2020, 1, 1}, Resolution::SixMonths) + 1);
  CHECK(bucket_start_date(bucket_of({2020, 8, 20}, Resolution::SixMonths),
                          Resolution::SixMonths)
            .iso() == "2020-07-01");
  CHECK(bucket_start_date(bucket_of({2020, 5, 20}, Resolution::ThreeMonths),
                          Resolution::ThreeMonths)
            .iso() == "2020-04-01");
  CHECK(bucket_start_date(bucket_of({2020, 5, 20}, Resolution::OneMonth),
                          Resolution::OneMonth)
            .iso() == "2020-05-01");
}

TEST_CASE("build_series: half-year counting") {
  std::vector<ProtocolRecord> corpus = {
      meeting("fin", "a", {2020, 1, 15}),
      meeting("fin", "b", {2020, 2, 10}),
      meeting("fin", "c", {2020, 8, 1}),
  };
  auto s = build_series(corpus, "fin", FeatureKind::MeetingsCount, Resolution::SixMonths);
  CHECK(s.values == std::vector<double>{2, 1});
  CHECK(s.start_bucket.iso() == "2020-01-01");
  CHECK(s.empty_buckets.empty());
  CHECK(s.bucket_date(1).iso() == "2020-07-01");
}

TEST_CASE("build_series: bucket means for member counts") {
  std::vector<ProtocolRecord> corpus = {
      meeting("fin", "a", {2020, 1, 15}, 4),
      meeting("fin", "b", {2020, 2, 10}, 6),
      meeting("fin", "c", {2020, 8, 1}, 9),
  };
  auto s = build_series(corpus, "fin", FeatureKind::AvgCommitteeMembers,
                        Resolution::SixMonths);
  CHECK(s.values == std::vector<double>{5, 9});
}

TEST_CASE("build_series: a silent recess bucket is zero and recorded") {
  std::vector<ProtocolRecord> corpus = {
      meeting("fin", "a", {2019, 3, 15}),
      meeting("fin", "b", {2020, 2, 10}),  // nothing in 2019 H2
  };
  auto s = build_series(corpus, "fin", FeatureKind::MeetingsCount, Resolution::SixMonths);
  CHECK(s.values == std::vector<double>{1, 0, 1});
  CHECK(s.empty_buckets == std::vector<int>{1});
}

TEST_CASE("build_series needs two non-empty buckets") {
  std::vector<ProtocolRecord> corpus = {
      meeting("fin", "a", {2020, 1, 15}),
      meeting("fin", "b", {2020, 2, 10}),
  };
  CHECK_THROWS_AS(
      build_series(corpus, "fin", FeatureKind::MeetingsCount, Resolution::SixMonths),
      DataError);
}

TEST_CASE("segment_cost examples") {
  CHECK(segment_cost(std::vector<double>{3, 3, 3}, 0, 3) == 0.0);
  CHECK(segment_cost(std::vector<double>{0, 10}, 0, 2) == 50.0);
  CHECK_THROWS_AS(segment_cost(std::vector<double>{1, 2}, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(segment_cost(std::vector<double>{1, 2}, 0, 3), std::invalid_argument);
}

TEST_CASE("segment cost: splitting never increases cost") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto xs = random_signal(rng, 20);
    const SegmentCostTable cost(xs);
    const size_t a = rng() % 10, c = a + 2 + rng() % 8;
    const size_t b = a + 1 + rng() % (c - a - 1);
    CHECK(cost(a, b) + cost(b, c) <= cost(a, c) + 1e-9 * (1.0 + cost(a, c)));
  }
}

TEST_CASE("dynp: single step change") {
  const std::vector<double> xs = {5, 5, 5, 5, 0, 0, 0, 0};
  CHECK(dynp_signal(xs, 1, 2) == std::vector<int>{4});
}

TEST_CASE("dynp: double change") {
  const std::vector<double> xs = {1, 1, 9, 9, 1, 1};
  CHECK(dynp_signal(xs, 2, 2) == std::vector<int>{2, 4});
}

TEST_CASE("dynp: constant signal falls back to the lexicographic tie") {
  const std::vector<double> xs(10, 3.0);
  CHECK(dynp_signal(xs, 1, 2) == std::vector<int>{2});
  CHECK(dynp_signal(xs, 1, 3) == std::vector<int>{3});
}

TEST_CASE("dynp rejects infeasible parameters") {
  CHECK_THROWS_AS(dynp_signal(std::vector<double>{1, 2, 3}, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(dynp_signal(std::vector<double>(10, 1.0), 0, 2), std::invalid_argument);
}

TEST_CASE("pelt: single step change at penalty 1") {
  const std::vector<double> xs = {5, 5, 5, 5, 0, 0, 0, 0};
  CHECK(pelt_signal(xs, 1.0, 2) == std::vector<int>{4});
}

TEST_CASE("pelt: dominant penalty yields no change points") {
  const std::vector<double> xs = {5, 5, 5, 5, 0, 0, 0, 0};
  const double whole = segment_cost(xs, 0, xs.size());
  CHECK(pelt_signal(xs, whole, 2).empty());
  CHECK(pelt_signal(xs, whole + 10.0, 2).empty());
}

TEST_CASE("pelt: constant signal never splits") {
  const std::vector<double> xs(32, 7.0);
  CHECK(pelt_signal(xs, 0.5, 2).empty());
  CHECK(pelt_signal(xs, 0.0, 2).empty());  // tie resolves to the empty list
}

TEST_CASE("pelt rejects a negative penalty") {
  CHECK_THROWS_AS(pelt_signal(std::vector<double>(8, 1.0), -1.0, 2),
                  std::invalid_argument);
}

TEST_CASE("pelt: more penalty, fewer change points") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto xs = random_signal(rng, 40);
    size_t previous = SIZE_MAX;
    for (double penalty : {0.0, 1.0, 5.0, 25.0, 125.0}) {
      const auto cps = pelt_signal(xs, penalty, 2);
      CHECK(cps.size() <= previous);
      previous = cps.size();
    }
  }
}

TEST_CASE("binseg: single step change") {
  const std::vector<double> xs = {5, 5, 5, 5, 0, 0, 0, 0};
  CHECK(binseg_signal(xs, 1, 2) == std::vector<int>{4});
}

TEST_CASE("binseg: greedy recursion finds both plateau edges") {
  const std::vector<double> xs = {1, 1, 9, 9, 1, 1};
  CHECK(binseg_signal(xs, 2, 2) == std::vector<int>{2, 4});
}

TEST_CASE("binseg first split equals dynp with one breakpoint") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto xs = random_signal(rng, 6 + rng() % 20);
    CHECK(binseg_signal(xs, 1, 2) == dynp_signal(xs, 1, 2));
  }
}

TEST_CASE("binseg total cost is never below dynp total cost") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto xs = random_signal(rng, 12 + rng() % 8);
    for (int k : {1, 2, 3}) {
      auto greedy = binseg_signal(xs, k, 2);
      if (static_cast<int>(greedy.size()) < k) continue;  // greedy got stuck
      auto exact = dynp_signal(xs, k, 2);
      CHECK(total_cost(xs, greedy) >= total_cost(xs, exact) - 1e-9);
    }
  }
}

TEST_CASE("window: single step change") {
  const std::vector<double> xs = {5, 5, 5, 5, 0, 0, 0, 0};
  CHECK(window_signal(xs, 3, 1, 2) == std::vector<int>{4});
}

TEST_CASE("window: constant signal falls to the smallest admissible index") {
  const std::vector<double> xs(12, 2.0);
  CHECK(window_signal(xs, 3, 1, 2) == std::vector<int>{3});
  CHECK(window_signal(xs, 2, 1, 4) == std::vector<int>{4});
}

TEST_CASE("window: discrepancy is non-negative and width is validated") {
  std::mt19937 rng(51);
  auto xs = random_signal(rng, 24);
  const SegmentCostTable cost(xs);
  for (int c = 4; c <= 20; ++c) {
    const double d = cost(static_cast<size_t>(c - 4), static_cast<size_t>(c + 4)) -
                     cost(static_cast<size_t>(c - 4), static_cast<size_t>(c)) -
                     cost(static_cast<size_t>(c), static_cast<size_t>(c + 4));
    CHECK(d >= -1e-9);
  }
  CHECK_THROWS_AS(window_signal(xs, 13, 1, 2), std::invalid_argument);
}

TEST_CASE("window: selections respect min_size spacing") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    auto xs = random_signal(rng, 30);
    auto cps = window_signal(xs, 4, 4, 3);
    check_result_invariants(cps, xs.size(), 3);
  }
}

TEST_CASE("default_penalty: constant series costs nothing") {
  CHECK(default_penalty(std::vector<double>(10, 4.0)) == 0.0);
}

TEST_CASE("default_penalty: alternating series matches the closed form") {
  std::vector<double> xs(16);
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = (i % 2 == 0) ? 1.0 : -1.0;
  // squared first differences are all 4 -> sigma^2 = 2 -> 4 ln 16
  CHECK(default_penalty(xs) == 4.0 * std::log(16.0));
}

TEST_CASE("default_penalty scales with the square of the signal") {
  std::mt19937 rng(71);
  auto xs = random_signal(rng, 20);
  std::vector<double> scaled(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) scaled[i] = 3.0 * xs[i];
  const double base = default_penalty(xs);
  CHECK(default_penalty(scaled) == Catch::Approx(9.0 * base).epsilon(1e-12));
  CHECK_THROWS_AS(default_penalty(std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("oracle agrees on the tiny forced instance") {
  const std::vector<double> xs = {5, 5, 0, 0};
  CHECK(oracle_exact_nbkps(xs, 1, 2) == std::vector<int>{2});
  CHECK(dynp_signal(xs, 1, 2) == std::vector<int>{2});
}

TEST_CASE("oracle equivalence spot checks") {
  std::mt19937 rng(81);
  for (int trial = 0; trial < 40; ++trial) {
    const size_t len = 8 + rng() % 9;
    auto xs = random_signal(rng, len);
    const int k = 1 + static_cast<int>(rng() % 3);
    CHECK(dynp_signal(xs, k, 2) == oracle_exact_nbkps(xs, k, 2));
  }
  for (int trial = 0; trial < 40; ++trial) {
    auto xs = random_signal(rng, 4 + rng() % 61);
    const double penalty = std::uniform_real_distribution<double>(0.0, 40.0)(rng);
    CHECK(pelt_signal(xs, penalty, 2) == oracle_exact_penalty(xs, penalty, 2));
  }
}

TEST_CASE("oracle guards its instance size") {
  CHECK_THROWS_AS(oracle_exact_nbkps(std::vector<double>(30, 1.0), 1, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle_exact_penalty(std::vector<double>(300, 1.0), 1.0, 2),
                  std::invalid_argument);
}

TEST_CASE("shift invariance: adding a constant moves no change point") {
  std::mt19937 rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    auto xs = random_signal(rng, 24);
    std::vector<double> shifted(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) shifted[i] = xs[i] + 37.0;
    CHECK(dynp_signal(xs, 2, 2) == dynp_signal(shifted, 2, 2));
    CHECK(binseg_signal(xs, 2, 2) == binseg_signal(shifted, 2, 2));
    CHECK(window_signal(xs, 4, 2, 2) == window_signal(shifted, 4, 2, 2));
    CHECK(pelt_signal(xs, 5.0, 2) == pelt_signal(shifted, 5.0, 2));
  }
}

TEST_CASE("scale invariance for fixed-count algorithms") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    auto xs = random_signal(rng, 20);
    std::vector<double> scaled(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) scaled[i] = 4.0 * xs[i];
    CHECK(dynp_signal(xs, 2, 2) == dynp_signal(scaled, 2, 2));
    CHECK(binseg_signal(xs, 2, 2) == binseg_signal(scaled, 2, 2));
    CHECK(window_signal(xs, 4, 2, 2) == window_signal(scaled, 4, 2, 2));
  }
}

TEST_CASE("all algorithms satisfy the change-point invariants") {
  std::mt19937 rng(111);
  for (int trial = 0; trial < 25; ++trial) {
    auto xs = random_signal(rng, 16 + rng() % 30);
    const int min_size = 2 + static_cast<int>(rng() % 2);
    check_result_invariants(dynp_signal(xs, 3, min_size), xs.size(), min_size);
    check_result_invariants(binseg_signal(xs, 3, min_size), xs.size(), min_size);
    check_result_invariants(window_signal(xs, 4, 3, min_size), xs.size(), min_size);
    check_result_invariants(pelt_signal(xs, 2.0, min_size), xs.size(), min_size);
  }
}

TEST_CASE("series-level wrappers carry metadata and parameters") {
  std::vector<ProtocolRecord> corpus;
  for (int year = 2010; year < 2020; ++year)
    for (int month : {2, 8}) {
      const int n = (year < 2015) ? 3 : 8;
      for (int i = 0; i < n; ++i)
        corpus.push_back(meeting("fin", std::to_string(year * 100 + month * 10 + i),
                                 {year, month, 3 + i}));
    }
  auto series = build_series(corpus, "fin", FeatureKind::MeetingsCount,
                             Resolution::SixMonths);
  REQUIRE(series.values.size() == 20);

  auto result = dynp(series, 1, 2);
  CHECK(result.change_points == std::vector<int>{10});
  CHECK(result.bucket_date(10).iso() == "2015-01-01");
  CHECK(result.params == decltype(result.params){{"n_bkps", "1"}, {"min_size", "2"}});
  CHECK(cpd_algorithm_id(result.algorithm) == "dynp");

  auto penalized = pelt(series, 6.0, 2);
  CHECK(penalized.change_points == std::vector<int>{10});
}
