#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "espider/compare.hpp"
#include "espider/stationary.hpp"

#include <cmath>
#include <sstream>

using namespace espider;
using namespace espider::cmp;

TEST_CASE("printed-value matching") {
  SignedLog v = SignedLog::from_double(0.754044);
  CHECK(match_printed(v, "0.754044", 6).ok);
  CHECK(match_printed(v, "0.754045", 6).ok);   // 1 ulp slack
  CHECK(match_printed(v, "0.754046", 6).ok == false);
  CHECK(match_printed(v, "0.75404", 6).ok);    // fewer printed digits
  CHECK(match_printed(SignedLog::from_double(7.54044e-12), "7.54044e-12", 6).ok);
  CHECK(match_printed(SignedLog::from_double(7.54044e-11), "7.54044e-12", 6).ok ==
        false);  // exponent must be exact
  // Rounding carry across a decade boundary.
  CHECK(match_printed(SignedLog::from_double(9.9999996e-3), "0.01", 6).ok);
  // Extreme magnitudes straight from log space.
  SignedLog tail = stat::rho_k(1000, 0.25, 1000);
  CHECK(match_printed(tail, "3.191157888e-1203", 6).ok);
  CHECK(match_printed(tail, "3.191157888e-1202", 6).ok == false);
}

TEST_CASE("table 1 rows and quoted cells") {
  auto rows = table1({100}, {0.25, 0.5}, {0, 20});
  REQUIRE(rows.size() == 4);
  CHECK(match_printed(rows[0].exact, "0.754044", 6).ok);
  CHECK(match_printed(rows[3].exact, "8.91315e-9", 6).ok);
  // The source table prints 0.75298 and 8.88815e-9 for these two
  // approximation cells; the displayed formula gives the values below
  // (and reproduces every N=500/1000 cell). See the decisions ledger.
  CHECK(match_printed(rows[0].approx, "0.754035", 6).ok);
  CHECK(match_printed(rows[3].approx, "8.90716e-9", 6).ok);
  CHECK_FALSE(match_printed(rows[0].approx, "0.75298", 6).ok);
  auto deep = table1({1000}, {0.25}, {1000});
  CHECK(match_printed(deep[0].exact, "3.191157888e-1203", 6).ok);
  CHECK(match_printed(deep[0].approx, "3.191157852e-1203", 6).ok);
  auto mid = table1({500}, {0.75, 0.5}, {0});
  CHECK(match_printed(mid[0].exact, "0.2596", 6).ok);
  CHECK(match_printed(mid[0].approx, "0.2593", 6).ok);
  CHECK(match_printed(mid[1].approx, "0.502939", 6).ok);
  CHECK_THROWS_AS(table1({100}, {1.5}, {0}), std::domain_error);
}

TEST_CASE("table 3 quoted cells and improvement in N") {
  auto rows = table3({5000, 10000, 15000}, 0.1, 1.0, {0, 50});
  REQUIRE(rows.size() == 6);
  CHECK(match_printed(rows[0].approx, "0.0159577", 6).ok);  // w(0) eps
  CHECK(match_printed(rows[0].exact, "0.015831", 6).ok);    // rho(0)
  CHECK(rows[0].delta == doctest::Approx(0.00800385).epsilon(1e-6));
  CHECK(match_printed(rows[5].approx, "0.00779879", 6).ok);
  CHECK(match_printed(rows[5].exact, "0.007763", 6).ok);
  CHECK(rows[5].delta == doctest::Approx(0.00460965).epsilon(1e-5));
  // Delta decreasing as N grows at fixed k.
  auto d10 = table3({5000, 10000, 15000}, 0.1, 1.0, {10});
  CHECK(d10[0].delta > d10[1].delta);
  CHECK(d10[1].delta > d10[2].delta);
}

TEST_CASE("full preset sweeps") {
  std::ostringstream log;
  TableCheck t1 = check_table1(log, 6);
  CHECK(t1.missed == 0);
  CHECK(t1.checked == 164);
  // The flagged N=100 approximation column stays inconsistent; if this
  // ever starts matching, the flags need a fresh look.
  CHECK(t1.known_bad == 34);
  CHECK(t1.known_bad_missed == 34);
  TableCheck t3 = check_table3(log, 6);
  CHECK(t3.missed == 0);
  CHECK(t3.checked == 99);
  if (!log.str().empty()) MESSAGE(log.str());
}

TEST_CASE("moment agreement under the scaling") {
  MomentAgreementReport r = moment_agreement(10000, 0.1);
  CHECK(std::fabs(r.mean_ratio - 1.0) < 0.01);
  CHECK(std::fabs(r.var_ratio - 1.0) < 0.01);
  CHECK(std::fabs(r.mean_ratio_stirling - 1.0) < 0.01);
  // Ratios drift toward 1 as N grows.
  MomentAgreementReport small = moment_agreement(1000, 0.1);
  CHECK(std::fabs(r.mean_ratio - 1.0) < std::fabs(small.mean_ratio - 1.0));
}

TEST_CASE("delta is cancellation safe") {
  ComparisonRow row;
  row.exact = SignedLog::from_log(+1, -2000.0);
  row.approx = SignedLog::from_log(+1, -2000.0 + 1e-9);
  double delta = std::expm1(row.approx.log_mag - row.exact.log_mag);
  CHECK(delta == doctest::Approx(1e-9).epsilon(1e-4));
}
