#include <algorithm>
#include <random>

#include "doctest.h"
#include "nimbus/calibration.hpp"
#include "nimbus/error.hpp"
#include "oracles.hpp"

using namespace nimbus;
using namespace std::chrono;

namespace {

Timestamp at(const std::string& hhmm) { return parse_iso8601("2015-12-11T" + hhmm + ":00+08:00"); }

// One-minute gauge from 13:00 to 16:00 raining on the given [a, b] spans.
std::vector<GaugeRecord> minute_gauge(std::initializer_list<std::pair<const char*, const char*>> rain) {
  std::vector<GaugeRecord> g;
  for (auto t = at("13:00"); t <= at("16:00"); t += minutes{1}) {
    const bool wet = std::any_of(rain.begin(), rain.end(),
                                 [&](const auto& r) { return t >= at(r.first) && t <= at(r.second); });
    g.push_back({t, wet ? 6.0 : 0.0});
  }
  return g;
}

std::vector<LabeledSample> labeled_from(const std::vector<double>& within, const std::vector<double>& outside) {
  std::vector<LabeledSample> out;
  for (double v : within) out.push_back({v, true});
  for (double v : outside) out.push_back({v, false});
  return out;
}

}  // namespace

TEST_SUITE("calibration") {
  TEST_CASE("build_events") {
    SUBCASE("single continuous run") {
      const auto ev = build_events(minute_gauge({{"14:00", "14:30"}}));
      REQUIRE(ev.size() == 1);
      CHECK(ev[0].start == at("14:00"));
      CHECK(ev[0].end == at("14:30"));
      CHECK(ev[0].peak_rate_mm_per_hr == 6.0);
    }
    SUBCASE("short gap merges") {
      const auto ev = build_events(minute_gauge({{"14:00", "14:10"}, {"14:15", "14:20"}}), minutes{10});
      REQUIRE(ev.size() == 1);
      CHECK(ev[0].start == at("14:00"));
      CHECK(ev[0].end == at("14:20"));
    }
    SUBCASE("long gap splits") {
      const auto ev = build_events(minute_gauge({{"14:00", "14:10"}, {"15:00", "15:05"}}), minutes{10});
      REQUIRE(ev.size() == 2);
      CHECK(ev[1].start == at("15:00"));
      CHECK(ev[1].end == at("15:05"));
    }
    SUBCASE("zero merge gap still keeps contiguous runs whole") {
      CHECK(build_events(minute_gauge({{"14:00", "14:30"}}), minutes{0}).size() == 1);
    }
    SUBCASE("unsorted or negative input") {
      std::vector<GaugeRecord> g{{at("14:01"), 1.0}, {at("14:00"), 1.0}};
      CHECK_THROWS_AS(build_events(g), InputError);
      std::vector<GaugeRecord> neg{{at("14:00"), -1.0}};
      CHECK_THROWS_AS(build_events(neg), InputError);
    }
    SUBCASE("peak rate is the maximum over the merged event") {
      std::vector<GaugeRecord> g{{at("14:00"), 2.0}, {at("14:05"), 9.0}, {at("14:10"), 0.0}, {at("14:12"), 3.0}};
      const auto ev = build_events(g);
      REQUIRE(ev.size() == 1);
      CHECK(ev[0].peak_rate_mm_per_hr == 9.0);
    }
  }

  TEST_CASE("build_events matches a run-length scan") {
    std::mt19937 rng(99);
    std::bernoulli_distribution wet(0.15);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<GaugeRecord> g;
      auto t = at("00:00");
      for (int i = 0; i < 600; ++i, t += minutes{1}) g.push_back({t, wet(rng) ? 1.0 + i % 5 : 0.0});
      for (int gap : {0, 3, 10}) {
        REQUIRE(build_events(g, minutes{gap}) == oracle::events(g, minutes{gap}));
      }
    }
  }

  TEST_CASE("build_events reconstructs events from an indicator gauge") {
    const std::vector<RainEvent> truth{{at("13:10"), at("13:40"), 6.0}, {at("14:30"), at("14:31"), 6.0}};
    const auto g = minute_gauge({{"13:10", "13:40"}, {"14:30", "14:31"}});
    CHECK(build_events(g) == truth);
    CHECK(build_events(g) == build_events(g));
  }

  TEST_CASE("label_samples window boundaries are closed") {
    const std::vector<RainEvent> ev{{at("14:00"), at("14:30"), 5.0}};
    const std::vector<IndexSample> s{{at("13:45"), 0.1, {}}, {at("13:44"), 0.1, {}}, {at("14:45"), 0.1, {}},
                                     {at("14:46"), 0.1, {}}, {at("14:10"), 0.1, {}}};
    const auto l = label_samples(s, ev, minutes{15});
    CHECK(l[0].within_window);
    CHECK_FALSE(l[1].within_window);
    CHECK(l[2].within_window);
    CHECK_FALSE(l[3].within_window);
    CHECK(l[4].within_window);
  }

  TEST_CASE("label_samples equals the brute-force oracle and ignores event order") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto sc = oracle::random_scenario(seed, 200);
      const auto got = label_samples(sc.samples, sc.events, minutes{15});
      const auto want = oracle::label(sc.samples, sc.events, minutes{15});
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i].within_window == want[i].within_window);

      std::reverse(sc.events.begin(), sc.events.end());
      const auto shuffled = label_samples(sc.samples, sc.events, minutes{15});
      for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(shuffled[i].within_window == got[i].within_window);
    }
  }

  TEST_CASE("empirical CDF") {
    const auto cdf = empirical_cdf({0.1, 0.2, 0.3});
    CHECK(cdf(0.2) == doctest::Approx(2.0 / 3.0));
    CHECK(cdf(0.3) == 1.0);
    CHECK(cdf(0.05) == 0.0);

    const auto one = empirical_cdf({0.5});
    CHECK(one(0.4) == 0.0);
    CHECK(one(0.5) == 1.0);

    CHECK_THROWS_AS(empirical_cdf({}), DomainError);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> v(1000);
    for (auto& x : v) x = u(rng);
    CHECK(std::abs(empirical_cdf(v)(0.5) - 0.5) < 0.05);
  }

  TEST_CASE("threshold grid") {
    const auto g = threshold_grid();
    REQUIRE(g.size() == 20);
    CHECK(g.front() == 0.01);
    CHECK(g[7] == 0.08);
    CHECK(g.back() == 0.2);
    CHECK_THROWS_AS(threshold_grid(0.1, 0.05, 0.01), ConfigError);
    CHECK_THROWS_AS(threshold_grid(0.1, 0.2, 0.0), ConfigError);
  }

  TEST_CASE("oc_curve") {
    SUBCASE("perfectly separated classes") {
      const auto curve = oc_curve(labeled_from({0.001, 0.005, 0.009}, {0.25, 0.5, 1.0}), threshold_grid());
      for (const auto& p : curve) {
        CHECK(p.pct_within_below == 100.0);
        CHECK(p.pct_outside_below == 0.0);
      }
    }
    SUBCASE("missing class") {
      CHECK_THROWS_AS(oc_curve(labeled_from({0.1}, {}), threshold_grid()), CalibrationError);
      CHECK_THROWS_AS(oc_curve(labeled_from({}, {0.1}), threshold_grid()), CalibrationError);
    }
    SUBCASE("strict inequality at the threshold") {
      const auto curve = oc_curve(labeled_from({0.08}, {0.08}), std::vector<double>{0.08, 0.09});
      CHECK(curve[0].pct_within_below == 0.0);
      CHECK(curve[1].pct_within_below == 100.0);
    }
  }

  TEST_CASE("oc_curve equals the brute-force double loop") {
    const auto grid = threshold_grid();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto sc = oracle::random_scenario(seed, 200);
      const auto labeled = oracle::label(sc.samples, sc.events, minutes{15});
      const bool both = std::any_of(labeled.begin(), labeled.end(), [](auto& s) { return s.within_window; }) &&
                        std::any_of(labeled.begin(), labeled.end(), [](auto& s) { return !s.within_window; });
      if (!both) continue;
      REQUIRE(oc_curve(labeled, grid) == oracle::oc(labeled, grid));
    }
  }

  TEST_CASE("oc percentages are monotone and equal 100 x CDF just below the threshold") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 0.3);
    std::bernoulli_distribution coin(0.4);
    const auto grid = threshold_grid();
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<LabeledSample> labeled;
      std::vector<double> w, o;
      for (int i = 0; i < 200; ++i) {
        const double v = i % 9 == 0 ? grid[static_cast<std::size_t>(i) % grid.size()] : u(rng);
        const bool in = coin(rng) || i == 0;
        labeled.push_back({v, in && i != 1});
        ((in && i != 1) ? w : o).push_back(v);
      }
      const auto curve = oc_curve(labeled, grid);
      const EmpiricalCdf cw(w), co(o);
      for (std::size_t k = 0; k < curve.size(); ++k) {
        REQUIRE(curve[k].pct_within_below == doctest::Approx(100.0 * cw.below(grid[k])).epsilon(1e-12));
        REQUIRE(curve[k].pct_outside_below == doctest::Approx(100.0 * co.below(grid[k])).epsilon(1e-12));
        if (k > 0) {
          REQUIRE(curve[k].pct_within_below >= curve[k - 1].pct_within_below);
          REQUIRE(curve[k].pct_outside_below >= curve[k - 1].pct_outside_below);
        }
      }
    }
  }

  TEST_CASE("oc_curve reproduces the reported 89.41% / 13.13% split") {
    // 10000 samples per class: 8941 within and 1313 outside lie below 0.08.
    std::vector<LabeledSample> labeled;
    for (int i = 0; i < 10000; ++i) labeled.push_back({i < 8941 ? 0.05 : 0.5, true});
    for (int i = 0; i < 10000; ++i) labeled.push_back({i < 1313 ? 0.03 : 0.9, false});
    const auto curve = oc_curve(labeled, threshold_grid());
    CHECK(curve[7].threshold == 0.08);
    CHECK(curve[7].pct_within_below == 89.41);
    CHECK(curve[7].pct_outside_below == 13.13);
  }

  TEST_CASE("select_elbow") {
    SUBCASE("right angle") {
      const std::vector<OcPoint> c{{0.01, 0, 0}, {0.02, 50, 0}, {0.03, 100, 0}, {0.04, 100, 50}, {0.05, 100, 100}};
      CHECK(select_elbow(c) == 0.03);
    }
    SUBCASE("linear curve ties to the smallest threshold") {
      std::vector<OcPoint> c;
      for (int k = 1; k <= 20; ++k) c.push_back({0.01 * k, 5.0 * k, 3.0 * k});
      CHECK(select_elbow(c) == doctest::Approx(0.01));
    }
    SUBCASE("too few points or unsorted") {
      const std::vector<OcPoint> two{{0.01, 0, 0}, {0.02, 1, 1}};
      CHECK_THROWS_AS(select_elbow(two), CalibrationError);
      const std::vector<OcPoint> unsorted{{0.02, 0, 0}, {0.01, 1, 1}, {0.03, 2, 2}};
      CHECK_THROWS_AS(select_elbow(unsorted), CalibrationError);
    }
    SUBCASE("invariant under a common rescaling of both axes") {
      std::mt19937 rng(4);
      std::uniform_real_distribution<double> step(0, 10);
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<OcPoint> c;
        double x = 0, y = 0;
        for (int k = 1; k <= 20; ++k) {
          x += step(rng);
          y += step(rng) * (k < 8 ? 3 : 0.3);
          c.push_back({0.01 * k, y, x});
        }
        const double base = select_elbow(c);
        for (double s : {0.01, 0.5, 3.0, 250.0}) {
          auto scaled = c;
          for (auto& p : scaled) {
            p.pct_within_below *= s;
            p.pct_outside_below *= s;
          }
          REQUIRE(select_elbow(scaled) == base);
        }
      }
    }
  }
}
