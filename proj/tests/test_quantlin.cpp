#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dsd/quantlin.hpp"
#include "dsd/rng.hpp"

using namespace dsd;

namespace {

// Independent route through the width rule: pick the integer exponent whose
// power best matches the continuous width in log space, larger exponent on
// ties (half away from zero for non-negative s).
std::vector<double> oracle_widths(int d, double w0, double wa, double wm) {
  std::vector<double> out;
  for (int j = 0; j < d; ++j) {
    const double u = w0 + wa * j;
    int best_k = 0;
    double best_err = 1e300;
    for (int k = 0; k <= 400; ++k) {
      const double err = std::fabs(std::log(u) - std::log(w0 * std::pow(wm, k)));
      if (err < best_err - 1e-12) {
        best_err = err;
        best_k = k;
      } else if (err <= best_err + 1e-12) {
        best_k = k;  // ties go up, matching round-half-away-from-zero
      }
    }
    out.push_back(w0 * std::pow(wm, best_k));
  }
  return out;
}

}  // namespace

TEST_CASE("hand case (4, 48, 48, 2)") {
  const auto p = quantlin::gen_block_widths(4, 48, 48, 2);
  CHECK(p.u == std::vector<double>{48, 96, 144, 192});
  CHECK(p.k == std::vector<int>{0, 1, 2, 2});
  CHECK(p.w == std::vector<double>{48, 96, 192, 192});
  CHECK(p.w == oracle_widths(4, 48, 48, 2));
}

TEST_CASE("hand case (3, 24, 36, 2.5)") {
  const auto p = quantlin::gen_block_widths(3, 24, 36, 2.5);
  CHECK(p.w == std::vector<double>{24, 60, 150});
  CHECK(p.w == oracle_widths(3, 24, 36, 2.5));
}

TEST_CASE("depth one always yields w0") {
  const auto p = quantlin::gen_block_widths(1, 17.5, 123, 2.7);
  CHECK(p.w == std::vector<double>{17.5});
}

TEST_CASE("wm at or below 1 is rejected") {
  CHECK_THROWS_AS(quantlin::gen_block_widths(4, 48, 48, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quantlin::gen_block_widths(4, 48, 48, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantlin::gen_block_widths(0, 48, 48, 2.0), std::invalid_argument);
}

TEST_CASE("oracle agreement over random generators") {
  rng::SplitMix64 g{11};
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 1 + static_cast<int>(rng::below(g, 40));
    const double w0 = 8 + 8 * static_cast<double>(rng::below(g, 31));
    const double wa = 1 + static_cast<double>(rng::below(g, 200));
    const double wm = (150 + 5 * static_cast<int>(rng::below(g, 31))) / 100.0;
    const auto p = quantlin::gen_block_widths(d, w0, wa, wm);
    const auto expect = oracle_widths(d, w0, wa, wm);
    for (int j = 0; j < d; ++j)
      CHECK(p.w[j] == doctest::Approx(expect[j]).epsilon(1e-12));
  }
}

TEST_CASE("to_stages collapses runs and applies the stage-count rejection") {
  const auto p = quantlin::gen_block_widths(4, 48, 48, 2);
  CHECK_FALSE(quantlin::to_stages(p, 8, 4).has_value());  // three stages, four wanted

  const auto st = quantlin::to_stages(p, 8, 3);
  REQUIRE(st.has_value());
  REQUIRE(st->size() == 3);
  CHECK((*st)[0].width == 48);
  CHECK((*st)[0].depth == 1);
  CHECK((*st)[1].width == 96);
  CHECK((*st)[1].depth == 1);
  CHECK((*st)[2].width == 192);
  CHECK((*st)[2].depth == 2);
}

TEST_CASE("to_stages keeps constant runs together") {
  quantlin::BlockWidthProfile p;
  p.w = {64, 64};
  p.k = {0, 0};
  const auto st = quantlin::to_stages(p, 8, 0);
  REQUIRE(st.has_value());
  REQUIRE(st->size() == 1);
  CHECK((*st)[0].width == 64);
  CHECK((*st)[0].depth == 2);
}

TEST_CASE("to_stages rounds stage widths to the channel multiple") {
  const auto p = quantlin::gen_block_widths(3, 24, 36, 2.5);  // 24, 60, 150
  const auto st = quantlin::to_stages(p, 8, 3);
  REQUIRE(st.has_value());
  CHECK((*st)[0].width == 24);
  CHECK((*st)[1].width == 64);   // 60 ties up to 64
  CHECK((*st)[2].width == 152);  // nearest multiple of 8 to 150
}

TEST_CASE("efit is zero for the generating candidate and ln 2 for doubled widths") {
  const auto p = quantlin::gen_block_widths(8, 40, 24, 2);
  CHECK(quantlin::efit(40, 24, 2, p.w) == 0.0);

  auto doubled = p.w;
  for (auto& w : doubled) w *= 2;
  CHECK(quantlin::efit(40, 24, 2, doubled) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("fit_linear recovers an on-grid generator exactly") {
  const auto p = quantlin::gen_block_widths(8, 40, 24, 2);
  const auto fit = quantlin::fit_linear(p.w);
  CHECK(fit.e_fit == 0.0);
  const auto regen = quantlin::gen_block_widths(8, fit.w0, fit.wa, fit.wm);
  CHECK(regen.w == p.w);
}

TEST_CASE("fit of the 48*(j+1) line recovers slope and intercept 48") {
  const auto p = quantlin::gen_block_widths(21, 48, 48, 2);
  const auto fit = quantlin::fit_linear(p.w);
  CHECK(fit.e_fit == 0.0);
  CHECK(fit.w0 == 48);
  CHECK(fit.wa == doctest::Approx(48).epsilon(0.25));
  const auto regen = quantlin::gen_block_widths(21, fit.w0, fit.wa, fit.wm);
  CHECK(regen.w == p.w);
}

TEST_CASE("constant widths fit exactly with the smallest grid slope") {
  const std::vector<double> observed(8, 64.0);
  const auto fit = quantlin::fit_linear(observed);
  CHECK(fit.e_fit == 0.0);
  CHECK(fit.w0 == 64);
  CHECK(fit.wa == 1);  // first minimum in grid order selects the smallest wa
}

TEST_CASE("single observation fits without failure") {
  const std::vector<double> observed{100.0};
  const auto fit = quantlin::fit_linear(observed);
  CHECK(fit.e_fit == doctest::Approx(std::fabs(std::log(fit.w0 / 100.0))));
  CHECK(std::isfinite(fit.e_fit));
}

TEST_CASE("fit dominance: exhaustive check on a coarse grid") {
  quantlin::FitGrid grid;
  for (int w = 8; w <= 64; w += 8) grid.w0_values.push_back(w);
  for (int a = 1; a <= 8; ++a) grid.wa_values.push_back(a);
  for (int h = 150; h <= 300; h += 25) grid.wm_hundredths.push_back(h);

  rng::SplitMix64 g{99};
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> observed;
    const int d = 3 + static_cast<int>(rng::below(g, 10));
    for (int j = 0; j < d; ++j) observed.push_back(8 + rng::u01(g) * 120);

    const auto fit = quantlin::fit_linear(observed, grid);
    for (double w0 : grid.w0_values)
      for (double wa : grid.wa_values)
        for (int h : grid.wm_hundredths)
          CHECK(fit.e_fit <= quantlin::efit(w0, wa, h / 100.0, observed) + 1e-15);
  }
}

TEST_CASE("quantized widths are monotone and within half a multiplier step") {
  rng::SplitMix64 g{5};
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 1 + static_cast<int>(rng::below(g, 64));
    const double w0 = 1 + rng::u01(g) * 255;
    const double wa = rng::u01(g) * 255;
    const double wm = 1.5 + rng::u01(g) * 1.5;
    const auto p = quantlin::gen_block_widths(d, w0, wa, wm);
    for (int j = 0; j < d; ++j) {
      if (j > 0) CHECK(p.w[j] >= p.w[j - 1]);
      const double ratio = p.w[j] / p.u[j];
      CHECK(ratio >= std::pow(wm, -0.5) * (1 - 1e-12));
      CHECK(ratio <= std::pow(wm, 0.5) * (1 + 1e-12));
    }
  }
}

TEST_CASE("grid-aligned roundtrips keep e_fit at exactly zero") {
  rng::SplitMix64 g{2024};
  const auto& grid = quantlin::FitGrid::standard();
  int done = 0;
  while (done < 100) {
    const int d = 4 + static_cast<int>(rng::below(g, 60));
    const double w0 = grid.w0_values[rng::below(g, grid.w0_values.size() - 1)];  // keep < 256
    const double wa = grid.wa_values[rng::below(g, grid.wa_values.size())];
    const double wm = grid.wm_hundredths[9 + rng::below(g, grid.wm_hundredths.size() - 9)] / 100.0;
    const auto p = quantlin::gen_block_widths(d, w0, wa, wm);
    const auto stages = quantlin::to_stages(p, 0, 4);
    if (!stages) continue;
    ++done;
    const auto expanded = quantlin::expand_stages(*stages);
    CHECK(expanded == p.w);
    const auto fit = quantlin::fit_linear(expanded);
    CHECK(fit.e_fit == 0.0);
    const auto regen =
        quantlin::gen_block_widths(static_cast<int>(expanded.size()), fit.w0, fit.wa, fit.wm);
    CHECK(regen.w == expanded);
  }
}
