#include <gtest/gtest.h>

#include "sdc/workload.hpp"

using namespace sdc;
using namespace sdc::workload;

TEST(Imaging, Uc1ScoutRate) {
  // 2900 x 2900 px, 3 bytes each, every 40 s.
  EXPECT_NEAR(image_data_rate(uc1_workload()), 2900.0 * 2900.0 * 3.0 / 1e6 / 40.0, 1e-12);
  EXPECT_NEAR(image_data_rate(uc1_workload()), 0.63075, 1e-12);
}

TEST(Imaging, RateScalesWithInverseSquareResolution) {
  const double coarse = imaging_rate(290.0, 100.0, 3, 8, 40.0);
  EXPECT_NEAR(imaging_rate(290.0, 10.0, 3, 8, 40.0), 100.0 * coarse, 1e-9);
  EXPECT_NEAR(imaging_rate(290.0, 100.0, 3, 8, 20.0), 2.0 * coarse, 1e-12);
  EXPECT_NEAR(imaging_rate(290.0, 100.0, 1, 16, 40.0), 2.0 / 3.0 * coarse, 1e-12);
}

TEST(Imaging, InvalidGeometry) {
  EXPECT_THROW(imaging_rate(0.1, 200.0, 3, 8, 40.0), std::domain_error);
  EXPECT_THROW(imaging_rate(290.0, 0.0, 3, 8, 40.0), std::domain_error);
  EXPECT_THROW(imaging_rate(290.0, 100.0, 3, 8, 0.0), std::domain_error);
  EXPECT_THROW(image_data_rate(uc2_workload()), std::domain_error);
  EXPECT_THROW(object_stream_rate(uc1_workload()), std::domain_error);
}

TEST(Intensity, SegmentationBounds) {
  const auto r = segmentation_intensity();
  EXPECT_NEAR(r.min, 272.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.max, 1900.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.mean, 362.0, 1e-12);
  EXPECT_THROW(intensity_from_per_pixel_cost(0.0, 3, 8), std::domain_error);
  // Two bytes per pixel doubles the per-MB cost relative to one.
  EXPECT_NEAR(intensity_from_per_pixel_cost(100.0, 1, 8), 2.0 * intensity_from_per_pixel_cost(100.0, 2, 8), 1e-12);
}

TEST(Demand, UseCases) {
  const auto uc1 = evaluate(uc1_workload());
  EXPECT_NEAR(uc1.primary.compute_GFLOPS, 0.63075 * 362.0, 1e-9);
  EXPECT_NEAR(uc1.required_compute_TFLOPS, 0.2283315, 1e-12);

  const auto uc2 = evaluate(uc2_workload());
  EXPECT_DOUBLE_EQ(uc2.primary.data_rate_MBps, 2.5);
  EXPECT_NEAR(uc2.primary.compute_GFLOPS, 905.0, 1e-9);
  EXPECT_NEAR(uc2.required_compute_TFLOPS, 3.62, 1e-12);

  const auto uc3 = evaluate(uc3_workload());
  EXPECT_NEAR(uc3.primary.aggregate_data_rate_MBps, 1.0, 1e-12);
  EXPECT_NEAR(uc3.required_compute_TFLOPS, 0.362, 1e-12);
  EXPECT_FALSE(uc3.detail.has_value());
}

TEST(Demand, MothershipDetailMatchesScout) {
  const auto s = evaluate(uc1_workload());
  ASSERT_TRUE(s.detail.has_value());
  EXPECT_NEAR(s.detail->data_rate_MBps, s.primary.data_rate_MBps, 1e-12);
  EXPECT_NEAR(s.combined_compute_GFLOPS, 2.0 * s.primary.compute_GFLOPS, 1e-9);
}

TEST(Demand, LinearInSourcesAndRate) {
  for (int n : {1, 2, 7}) {
    const auto d = compute_demand(1.5, 100.0, n);
    EXPECT_DOUBLE_EQ(d.aggregate_compute_GFLOPS, n * 150.0);
    EXPECT_DOUBLE_EQ(d.aggregate_data_rate_MBps, n * 1.5);
  }
  EXPECT_DOUBLE_EQ(compute_demand(0.0, 100.0, 3).aggregate_compute_GFLOPS, 0.0);
  EXPECT_THROW(compute_demand(-1.0, 100.0, 1), std::domain_error);
}

TEST(Validation, RejectsBadWorkloads) {
  auto w = uc1_workload();
  w.swath_km = 0.0;
  EXPECT_THROW(w.validate(), ConfigError);
  w = uc2_workload();
  w.n_sources = 0;
  EXPECT_THROW(evaluate(w), ConfigError);
  w = uc2_workload();
  w.intensity.min = 1000.0;
  EXPECT_THROW(w.validate(), ConfigError);
  w = uc1_workload();
  w.roi_fraction = 1.5;
  EXPECT_THROW(w.validate(), ConfigError);
}

TEST(Presets, Lookup) {
  EXPECT_TRUE(workload_preset("uc1").has_value());
  EXPECT_TRUE(workload_preset("uc3").has_value());
  EXPECT_FALSE(workload_preset("uc9").has_value());
}
