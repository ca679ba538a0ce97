#pragma once

// Imaging data-rate and compute-demand models for the three use cases.
// MB is 10^6 bytes throughout.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sdc/errors.hpp"

namespace sdc::workload {

inline constexpr double kBytesPerMB = 1e6;

struct IntensityRange {
  double min = 0.0;   // GFLOP per MB of input
  double mean = 0.0;
  double max = 0.0;
};

struct ImagingWorkload {
  double swath_km = 0.0;
  double ground_resolution_m = 0.0;
  int channels = 3;
  int bits_per_channel = 8;
  double acquisition_or_recurrence_s = 0.0;
  IntensityRange intensity;
  int n_sources = 1;
  std::optional<double> object_size_MB;  // overrides the imaging formula
  // Optional detail stream (mothership scans of regions of interest).
  std::optional<double> detail_resolution_m;
  double roi_fraction = 0.0;

  void validate() const {
    const bool imaging = !object_size_MB.has_value();
    if (imaging && !(swath_km > 0.0)) throw ConfigError("swath_km must be > 0");
    if (imaging && !(ground_resolution_m > 0.0)) throw ConfigError("ground_resolution_m must be > 0");
    if (channels <= 0 || bits_per_channel <= 0) throw ConfigError("channels and bits_per_channel must be > 0");
    if (!(acquisition_or_recurrence_s > 0.0)) throw ConfigError("acquisition_or_recurrence_s must be > 0");
    if (n_sources <= 0) throw ConfigError("n_sources must be > 0");
    if (object_size_MB && !(*object_size_MB >= 0.0)) throw ConfigError("object_size_MB must be >= 0");
    if (!(intensity.min > 0.0) || intensity.min > intensity.mean || intensity.mean > intensity.max)
      throw ConfigError("intensity must satisfy 0 < min <= mean <= max");
    if (detail_resolution_m && !(*detail_resolution_m > 0.0)) throw ConfigError("detail_resolution_m must be > 0");
    if (roi_fraction < 0.0 || roi_fraction > 1.0) throw ConfigError("roi_fraction must lie in [0, 1]");
  }
};

struct WorkloadDemand {
  double data_rate_MBps = 0.0;
  double aggregate_data_rate_MBps = 0.0;
  double compute_GFLOPS = 0.0;
  double aggregate_compute_GFLOPS = 0.0;
};

inline double bytes_per_pixel(int channels, int bits_per_channel) {
  return static_cast<double>(channels) * bits_per_channel / 8.0;
}

inline double imaging_rate(double swath_km, double resolution_m, int channels, int bits, double acquisition_s) {
  if (!(resolution_m > 0.0) || !(swath_km > 0.0)) throw std::domain_error("swath and resolution must be > 0");
  if (resolution_m > swath_km * 1000.0) throw std::domain_error("resolution coarser than the swath");
  if (!(acquisition_s > 0.0)) throw std::domain_error("acquisition time must be > 0");
  const double side_px = swath_km * 1000.0 / resolution_m;
  const double bytes = side_px * side_px * bytes_per_pixel(channels, bits);
  return bytes / kBytesPerMB / acquisition_s;
}

// Square-swath image every acquisition period.
inline double image_data_rate(const ImagingWorkload& w) {
  if (w.object_size_MB) throw std::domain_error("workload uses a fixed object size");
  return imaging_rate(w.swath_km, w.ground_resolution_m, w.channels, w.bits_per_channel,
                      w.acquisition_or_recurrence_s);
}

inline double object_stream_rate(const ImagingWorkload& w) {
  if (!w.object_size_MB) throw std::domain_error("workload has no object size");
  if (!(w.acquisition_or_recurrence_s > 0.0)) throw std::domain_error("recurrence must be > 0");
  return *w.object_size_MB / w.acquisition_or_recurrence_s;
}

// Per-source stream rate, whichever way the workload is specified.
inline double source_data_rate(const ImagingWorkload& w) {
  return w.object_size_MB ? object_stream_rate(w) : image_data_rate(w);
}

inline WorkloadDemand compute_demand(double rate_MBps, double intensity_GFLOP_per_MB, int n_sources) {
  if (!(rate_MBps >= 0.0) || !(intensity_GFLOP_per_MB >= 0.0) || n_sources < 0)
    throw std::domain_error("compute demand inputs must be non-negative");
  WorkloadDemand d;
  d.data_rate_MBps = rate_MBps;
  d.aggregate_data_rate_MBps = rate_MBps * n_sources;
  d.compute_GFLOPS = rate_MBps * intensity_GFLOP_per_MB;
  d.aggregate_compute_GFLOPS = d.compute_GFLOPS * n_sources;
  return d;
}

// kFLOP per pixel divided by bytes per pixel is numerically GFLOP per MB.
inline double intensity_from_per_pixel_cost(double kflop_per_pixel, int channels, int bits_per_channel) {
  if (!(kflop_per_pixel > 0.0) || channels <= 0 || bits_per_channel <= 0)
    throw std::domain_error("per-pixel cost inputs must be positive");
  return kflop_per_pixel / bytes_per_pixel(channels, bits_per_channel);
}

// U-Net segmentation cost bounds for 3-channel 8-bit input.
inline constexpr double kSegmentationMinKflopPerPixel = 272.0;
inline constexpr double kSegmentationMaxKflopPerPixel = 1900.0;

inline IntensityRange segmentation_intensity(int channels = 3, int bits_per_channel = 8) {
  IntensityRange r;
  r.min = intensity_from_per_pixel_cost(kSegmentationMinKflopPerPixel, channels, bits_per_channel);
  r.max = intensity_from_per_pixel_cost(kSegmentationMaxKflopPerPixel, channels, bits_per_channel);
  r.mean = 0.5 * (r.min + r.max);
  return r;
}

// Scout (100 m) streaming to a mothership, which also processes its own 10 m
// scans of a region-of-interest fraction chosen so both streams cost the same.
inline ImagingWorkload uc1_workload() {
  ImagingWorkload w;
  w.swath_km = 290.0;
  w.ground_resolution_m = 100.0;
  w.channels = 3;
  w.bits_per_channel = 8;
  w.acquisition_or_recurrence_s = 40.0;
  w.intensity = segmentation_intensity();
  w.n_sources = 1;
  w.detail_resolution_m = 10.0;
  w.roi_fraction = 0.01;
  return w;
}

// Four client satellites, 50 MB images every 20 s each.
inline ImagingWorkload uc2_workload() {
  ImagingWorkload w;
  w.acquisition_or_recurrence_s = 20.0;
  w.intensity = segmentation_intensity();
  w.n_sources = 4;
  w.object_size_MB = 50.0;
  return w;
}

// Twenty lunar rovers, 3 MB per minute each.
inline ImagingWorkload uc3_workload() {
  ImagingWorkload w;
  w.acquisition_or_recurrence_s = 60.0;
  w.intensity = segmentation_intensity();
  w.n_sources = 20;
  w.object_size_MB = 3.0;
  return w;
}

inline std::optional<ImagingWorkload> workload_preset(std::string_view name) {
  if (name == "uc1") return uc1_workload();
  if (name == "uc2") return uc2_workload();
  if (name == "uc3") return uc3_workload();
  return std::nullopt;
}

struct WorkloadSummary {
  WorkloadDemand primary;                 // the client/source stream(s)
  std::optional<WorkloadDemand> detail;   // mothership ROI stream, when modeled
  double combined_compute_GFLOPS = 0.0;   // primary aggregate + detail aggregate
  double required_compute_TFLOPS = 0.0;   // sizing target: primary aggregate
};

inline WorkloadSummary evaluate(const ImagingWorkload& w) {
  w.validate();
  WorkloadSummary s;
  s.primary = compute_demand(source_data_rate(w), w.intensity.mean, w.n_sources);
  s.combined_compute_GFLOPS = s.primary.aggregate_compute_GFLOPS;
  if (w.detail_resolution_m && w.roi_fraction > 0.0 && !w.object_size_MB) {
    const double rate = w.roi_fraction * imaging_rate(w.swath_km, *w.detail_resolution_m, w.channels,
                                                      w.bits_per_channel, w.acquisition_or_recurrence_s);
    s.detail = compute_demand(rate, w.intensity.mean, 1);
    s.combined_compute_GFLOPS += s.detail->aggregate_compute_GFLOPS;
  }
  s.required_compute_TFLOPS = s.primary.aggregate_compute_GFLOPS / 1000.0;
  return s;
}

}  // namespace sdc::workload
