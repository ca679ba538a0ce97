#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <cmath>

#include "sdc/forecast.hpp"
#include "sdc/json_io.hpp"

using sdc::ConfigError;
using sdc::Json;
using sdc::ValidationError;
using sdc::CalibrationError;
using sdc::parse_json_text;
using namespace sdc::forecast;

namespace {

SdcDesign design(int year, double power, Destination d = Destination::leo) {
  return SdcDesign{year, power, ComputeType::gpu_equivalent, d, 1.0};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Curve, ValueAndRange) {
  const RoadmapCurve c{Metric::launch_cost_eur_per_kg, 2032, 100.0, 0.5};
  EXPECT_DOUBLE_EQ(c.value(2032), 100.0);
  EXPECT_DOUBLE_EQ(c.value(2034), 25.0);
  EXPECT_DOUBLE_EQ(c.value(2031), 200.0);
  EXPECT_THROW(c.value(2023), RoadmapRangeError);
  EXPECT_THROW(c.value(2061), RoadmapRangeError);
  EXPECT_NO_THROW(c.value(2024));
  EXPECT_NO_THROW(c.value(2060));
}

TEST(Curve, FitRecoversExponentialExactly) {
  const RoadmapCurve truth{Metric::hardware_cost_eur_per_TFLOPS, 2030, 3.5, 0.8};
  std::vector<std::pair<int, double>> pts;
  for (int y : {2026, 2031, 2040, 2055}) pts.emplace_back(y, truth.value(y));
  const auto fit = fit_curve(truth.metric, pts, 2030);
  EXPECT_NEAR(fit.ref_value, 3.5, 1e-12);
  EXPECT_NEAR(fit.annual_factor, 0.8, 1e-12);
  EXPECT_THROW(fit_curve(truth.metric, {{2030, 1.0}}, 2030), ConfigError);
  EXPECT_THROW(fit_curve(truth.metric, {{2030, 1.0}, {2030, 2.0}}, 2030), ConfigError);
  EXPECT_THROW(fit_curve(truth.metric, {{2030, 1.0}, {2031, -2.0}}, 2030), ConfigError);
}

TEST(Sizing, CostIdentityHolds) {
  const auto& rm = default_roadmaps();
  for (const auto& d : {design(2032, 500), design(2032, 2000), design(2040, 300, Destination::lunar_surface),
                        design(2045, 1234, Destination::geo)}) {
    const auto f = forecast(d, 0.0, rm);
    ASSERT_TRUE(f.cost_of_power_eur_per_W && f.cost_of_compute_eur_per_TFLOPS);
    EXPECT_NEAR(*f.cost_of_power_eur_per_W * d.total_power_W,
                *f.cost_of_compute_eur_per_TFLOPS * f.available_compute_TFLOPS, 1e-9 * f.total_cost_eur);
    EXPECT_NEAR(*f.cost_of_compute_reported, 1000.0 * *f.cost_of_compute_eur_per_TFLOPS, 1e-9 * *f.cost_of_compute_reported);
  }
}

TEST(Sizing, ComputeLinearInPowerWithoutEnvelopeTerm) {
  RoadmapSet rm = default_roadmaps();
  rm.compute[ComputeType::gpu_equivalent].efficiency.power_exponent = 0.0;
  const double base = forecast(design(2032, 500), 0.0, rm).available_compute_TFLOPS;
  EXPECT_NEAR(forecast(design(2032, 1000), 0.0, rm).available_compute_TFLOPS, 2.0 * base, 1e-9 * base);
  EXPECT_NEAR(forecast(design(2032, 2000), 0.0, rm).available_compute_TFLOPS, 4.0 * base, 1e-9 * base);
}

TEST(Sizing, ComputeGrowsSublinearlyWithEnvelopeTerm) {
  const auto& rm = default_roadmaps();
  const double g = rm.compute_for(ComputeType::gpu_equivalent).efficiency.power_exponent;
  ASSERT_GT(g, 0.0);
  double prev = 0.0;
  for (double p : {250.0, 500.0, 1000.0, 2000.0, 4000.0}) {
    const double c = forecast(design(2032, p), 0.0, rm).available_compute_TFLOPS;
    EXPECT_GT(c, prev);
    if (prev > 0.0) {
      EXPECT_NEAR(c / prev, std::pow(2.0, 1.0 - g), 1e-9);
    }
    prev = c;
  }
}

TEST(Sizing, EfficiencyImprovesEveryYear) {
  const auto& rm = default_roadmaps();
  double prev = 1e300;
  for (int y = 2024; y <= 2060; ++y) {
    const double e = forecast(design(y, 500), 0.0, rm).compute_efficiency_W_per_TFLOPS;
    EXPECT_LT(e, prev) << y;
    prev = e;
  }
}

TEST(Sizing, InvalidDesigns) {
  const auto& rm = default_roadmaps();
  EXPECT_THROW(forecast(design(2032, 0.0), 0.0, rm), ConfigError);
  EXPECT_THROW(forecast(design(2032, -5.0), 0.0, rm), ConfigError);
  EXPECT_THROW(forecast(design(2070, 500.0), 0.0, rm), RoadmapRangeError);
  auto d = design(2032, 500);
  d.compute_power_fraction = 0.0;
  EXPECT_THROW(forecast(d, 0.0, rm), ConfigError);
  d = design(2032, 500);
  d.compute_type = ComputeType::fpga;
  EXPECT_THROW(forecast(d, 0.0, rm), ConfigError);
}

TEST(Sizing, ShortfallComparesReportedCompute) {
  const auto& rm = default_roadmaps();
  const auto ok = forecast(design(2032, 500), 0.2283315, rm);
  EXPECT_FALSE(ok.shortfall);
  const auto short_ = forecast(design(2032, 500), 5.0, rm);
  EXPECT_TRUE(short_.shortfall);
  EXPECT_DOUBLE_EQ(short_.required_compute_TFLOPS, 5.0);
}

TEST(Sizing, ComputeFractionScalesCompute) {
  const auto& rm = default_roadmaps();
  auto d = design(2032, 500);
  const double full = forecast(d, 0.0, rm).available_compute_TFLOPS;
  d.compute_power_fraction = 0.25;
  EXPECT_NEAR(forecast(d, 0.0, rm).available_compute_TFLOPS, 0.25 * full, 1e-9 * full);
}

TEST(Calibration, ReproducesReferenceTableWithinFivePercent) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = calibrate(reference_design_targets(), prior_roadmaps());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 1.0);
  ASSERT_EQ(result.cells.size(), 15u);
  for (const auto& c : result.cells) EXPECT_LE(std::abs(c.rel_error), 0.05) << c.cell;
  EXPECT_LE(result.max_rel_error, 0.05);
}

TEST(Calibration, FittedParametersAreFrozen) {
  const auto& rm = default_roadmaps();
  const auto& gpu = rm.compute_for(ComputeType::gpu_equivalent);
  EXPECT_NEAR(gpu.efficiency.curve.ref_value, 0.43930, 5e-5);
  EXPECT_EQ(gpu.efficiency.curve.ref_year, 2032);
  EXPECT_NEAR(rel(gpu.efficiency.curve.ref_value, 0.44), 0.0, 0.01);
  EXPECT_NEAR(gpu.efficiency.curve.annual_factor, 0.68536, 5e-5);
  EXPECT_NEAR(gpu.efficiency.power_exponent, 0.09790, 5e-5);
  EXPECT_NEAR(rm.launch_for(Destination::leo).ref_value, 3089.20, 0.05);
  EXPECT_NEAR(rm.launch_for(Destination::lunar_surface).ref_value, 144878.04, 0.05);
  EXPECT_DOUBLE_EQ(rm.launch_for(Destination::geo).ref_value, 15000.0);
  EXPECT_DOUBLE_EQ(rm.bus_for(Destination::geo), 5.0);
  EXPECT_DOUBLE_EQ(rm.integration_cost_eur, 0.0);
}

TEST(Calibration, NeedsTwoRows) {
  auto targets = reference_design_targets();
  targets.resize(1);
  EXPECT_THROW(calibrate(targets, prior_roadmaps()), ConfigError);
  targets = reference_design_targets();
  targets[0].mass_kg = 0.0;
  EXPECT_THROW(calibrate(targets, prior_roadmaps()), ConfigError);
}

TEST(Calibration, NonPhysicalFitReportsCells) {
  auto targets = reference_design_targets();
  // A 2 kW design lighter than a 500 W one forces negative mass terms.
  targets[1].mass_kg = 2.0;
  try {
    calibrate(targets, prior_roadmaps());
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& e) {
    EXPECT_FALSE(e.offending_cells().empty());
    bool mentions_mass = false;
    for (const auto& c : e.offending_cells()) mentions_mass |= c.find("mass") != std::string::npos;
    EXPECT_TRUE(mentions_mass);
  }
}

TEST(Calibration, ResidualsOfDefaultsMatchFit) {
  const auto a = residuals(reference_design_targets(), default_roadmaps());
  const auto b = calibrate(reference_design_targets(), prior_roadmaps()).cells;
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i].model, b[i].model);
}

TEST(Serialization, RoadmapsRoundTrip) {
  const auto& rm = default_roadmaps();
  const Json j = to_json(rm);
  const auto back = roadmaps_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  const auto d = design(2036, 800);
  EXPECT_EQ(to_json(forecast(d, 1.0, back)).dump(), to_json(forecast(d, 1.0, rm)).dump());
}

TEST(Serialization, RoadmapsRejectUnknownKeys) {
  Json j = to_json(default_roadmaps());
  j["surprise"] = 1;
  EXPECT_THROW(roadmaps_from_json(j), ValidationError);
}

TEST(Serialization, ShippedRoadmapFileMatchesCalibration) {
  const auto text = [] {
    std::ifstream in(std::string(SDC_SOURCE_DIR) + "/data/roadmaps.json");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }();
  ASSERT_FALSE(text.empty());
  const auto shipped = roadmaps_from_json(parse_json_text(text, "roadmaps.json"));
  for (const auto& t : reference_design_targets()) {
    const auto a = forecast(t.design, 0.0, shipped);
    const auto b = forecast(t.design, 0.0, default_roadmaps());
    EXPECT_NEAR(rel(a.available_compute_TFLOPS, b.available_compute_TFLOPS), 0.0, 1e-12);
    EXPECT_NEAR(rel(a.total_cost_eur, b.total_cost_eur), 0.0, 1e-12);
  }
}

TEST(Names, ParseRoundTrip) {
  for (auto d : {Destination::leo, Destination::geo, Destination::lunar_surface})
    EXPECT_EQ(parse_destination(to_string(d)), d);
  EXPECT_THROW(parse_destination("mars"), ConfigError);
  EXPECT_EQ(parse_compute_type("gpu_equivalent"), ComputeType::gpu_equivalent);
}
