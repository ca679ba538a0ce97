#pragma once

// Roadmap-driven sizing of an SDC node: available compute within a power
// envelope, satellite mass and cost figures of merit, plus the calibration
// that fits the roadmap and coefficient set to published design points.
//
// Unit convention: available compute is total power over efficiency
// (W / (W/TFLOPS)). The reported compute figure and the reported cost of
// compute use that quantity divided by kReportedComputeScale, the column
// convention of the reference design table, whose requirement figures are
// plain TFLOPS.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdc/errors.hpp"

namespace sdc::forecast {

inline constexpr int kFirstRoadmapYear = 2024;
inline constexpr int kLastRoadmapYear = 2060;
inline constexpr double kReportedComputeScale = 1000.0;

// Year outside the roadmap validity range.
class RoadmapRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

enum class Metric {
  compute_efficiency_W_per_TFLOPS,
  compute_density_TFLOPS_per_kg,
  power_system_specific_mass_kg_per_W,
  launch_cost_eur_per_kg,
  hardware_cost_eur_per_TFLOPS,
};

enum class ComputeType { gpu_equivalent, cpu, fpga, asic };
enum class Destination { leo, geo, lunar_surface };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::compute_efficiency_W_per_TFLOPS: return "compute_efficiency_W_per_TFLOPS";
    case Metric::compute_density_TFLOPS_per_kg: return "compute_density_TFLOPS_per_kg";
    case Metric::power_system_specific_mass_kg_per_W: return "power_system_specific_mass_kg_per_W";
    case Metric::launch_cost_eur_per_kg: return "launch_cost_eur_per_kg";
    case Metric::hardware_cost_eur_per_TFLOPS: return "hardware_cost_eur_per_TFLOPS";
  }
  return "";
}

inline Metric parse_metric(std::string_view s) {
  for (auto m : {Metric::compute_efficiency_W_per_TFLOPS, Metric::compute_density_TFLOPS_per_kg,
                 Metric::power_system_specific_mass_kg_per_W, Metric::launch_cost_eur_per_kg,
                 Metric::hardware_cost_eur_per_TFLOPS})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown roadmap metric '" + std::string(s) + "'");
}

inline std::string_view to_string(ComputeType t) {
  switch (t) {
    case ComputeType::gpu_equivalent: return "gpu_equivalent";
    case ComputeType::cpu: return "cpu";
    case ComputeType::fpga: return "fpga";
    case ComputeType::asic: return "asic";
  }
  return "";
}

inline ComputeType parse_compute_type(std::string_view s) {
  for (auto t : {ComputeType::gpu_equivalent, ComputeType::cpu, ComputeType::fpga, ComputeType::asic})
    if (to_string(t) == s) return t;
  throw ConfigError("unknown compute type '" + std::string(s) + "'");
}

inline std::string_view to_string(Destination d) {
  switch (d) {
    case Destination::leo: return "leo";
    case Destination::geo: return "geo";
    case Destination::lunar_surface: return "lunar_surface";
  }
  return "";
}

inline Destination parse_destination(std::string_view s) {
  for (auto d : {Destination::leo, Destination::geo, Destination::lunar_surface})
    if (to_string(d) == s) return d;
  throw ConfigError("unknown destination '" + std::string(s) + "'");
}

inline void check_year(int year) {
  if (year < kFirstRoadmapYear || year > kLastRoadmapYear)
    throw RoadmapRangeError("year " + std::to_string(year) + " outside roadmap range [" +
                            std::to_string(kFirstRoadmapYear) + ", " + std::to_string(kLastRoadmapYear) + "]");
}

// Constant annual improvement: value(year) = ref_value * annual_factor^(year - ref_year).
struct RoadmapCurve {
  Metric metric = Metric::compute_efficiency_W_per_TFLOPS;
  int ref_year = 2032;
  double ref_value = 1.0;
  double annual_factor = 1.0;

  double value(int year) const {
    check_year(year);
    return ref_value * std::pow(annual_factor, year - ref_year);
  }
  double factor_at(int year) const { return std::pow(annual_factor, year - ref_year); }
};

// Log-linear least-squares fit through (year, value) points; exact for two.
inline RoadmapCurve fit_curve(Metric metric, const std::vector<std::pair<int, double>>& points, int ref_year) {
  if (points.size() < 2) throw ConfigError("curve fit needs at least two points");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(points.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].second > 0.0)) throw ConfigError("curve fit needs positive values");
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0;
    a(r, 1) = points[i].first - ref_year;
    b(r) = std::log(points[i].second);
  }
  if (a.col(1).maxCoeff() == a.col(1).minCoeff()) throw ConfigError("curve fit needs two distinct years");
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  return RoadmapCurve{metric, ref_year, std::exp(x(0)), std::exp(x(1))};
}

// Efficiency roadmap with a power-envelope scaling term: larger envelopes
// carry more thermal and communication overhead per TFLOPS.
struct EfficiencyModel {
  RoadmapCurve curve{Metric::compute_efficiency_W_per_TFLOPS, 2032, 0.44, 0.68};
  double power_exponent = 0.0;
  double ref_power_W = 500.0;

  double at(int year, double power_W) const {
    return curve.value(year) * std::pow(power_W / ref_power_W, power_exponent);
  }
};

struct ComputeRoadmaps {
  EfficiencyModel efficiency;
  RoadmapCurve density{Metric::compute_density_TFLOPS_per_kg, 2032, 1000.0, 1.25};
  RoadmapCurve hardware_cost{Metric::hardware_cost_eur_per_TFLOPS, 2032, 2.0, 0.85};
};

struct RoadmapSet {
  std::map<ComputeType, ComputeRoadmaps> compute;
  RoadmapCurve power_specific_mass{Metric::power_system_specific_mass_kg_per_W, 2032, 0.03, 0.97};
  std::map<Destination, RoadmapCurve> launch_cost;
  std::map<Destination, double> bus_mass_kg;
  double integration_cost_eur = 0.0;

  const ComputeRoadmaps& compute_for(ComputeType t) const {
    auto it = compute.find(t);
    if (it == compute.end())
      throw ConfigError("no roadmap curves for compute type '" + std::string(to_string(t)) + "'");
    return it->second;
  }
  const RoadmapCurve& launch_for(Destination d) const {
    auto it = launch_cost.find(d);
    if (it == launch_cost.end())
      throw ConfigError("no launch cost curve for destination '" + std::string(to_string(d)) + "'");
    return it->second;
  }
  double bus_for(Destination d) const {
    auto it = bus_mass_kg.find(d);
    if (it == bus_mass_kg.end())
      throw ConfigError("no bus mass for destination '" + std::string(to_string(d)) + "'");
    return it->second;
  }
};

struct SdcDesign {
  int year = 2032;
  double total_power_W = 500.0;
  ComputeType compute_type = ComputeType::gpu_equivalent;
  Destination destination = Destination::leo;
  double compute_power_fraction = 1.0;

  void validate() const {
    check_year(year);
    if (!(total_power_W > 0.0) || !std::isfinite(total_power_W)) throw ConfigError("total_power_W must be > 0");
    if (!(compute_power_fraction > 0.0) || compute_power_fraction > 1.0)
      throw ConfigError("compute_power_fraction must lie in (0, 1]");
  }
};

inline double efficiency(const SdcDesign& d, const RoadmapSet& rm) {
  return rm.compute_for(d.compute_type).efficiency.at(d.year, d.total_power_W);
}

struct ComputeSizing {
  double efficiency_W_per_TFLOPS = 0.0;
  double available_TFLOPS = 0.0;  // fraction * power / efficiency
  double reported = 0.0;          // available / kReportedComputeScale
};

inline ComputeSizing size_compute(const SdcDesign& d, const RoadmapSet& rm) {
  ComputeSizing s;
  s.efficiency_W_per_TFLOPS = efficiency(d, rm);
  s.available_TFLOPS = d.compute_power_fraction * d.total_power_W / s.efficiency_W_per_TFLOPS;
  s.reported = s.available_TFLOPS / kReportedComputeScale;
  return s;
}

inline double size_mass(const SdcDesign& d, double available_TFLOPS, const RoadmapSet& rm) {
  const auto& c = rm.compute_for(d.compute_type);
  return rm.power_specific_mass.value(d.year) * d.total_power_W + available_TFLOPS / c.density.value(d.year) +
         rm.bus_for(d.destination);
}

struct CostBreakdown {
  double total_eur = 0.0;
  std::optional<double> cost_of_power_eur_per_W;        // undefined at zero power
  std::optional<double> cost_of_compute_eur_per_TFLOPS; // undefined at zero compute
  std::optional<double> cost_of_compute_reported;
};

inline CostBreakdown size_cost(const SdcDesign& d, double mass_kg, double available_TFLOPS, const RoadmapSet& rm) {
  const auto& c = rm.compute_for(d.compute_type);
  CostBreakdown out;
  out.total_eur = mass_kg * rm.launch_for(d.destination).value(d.year) +
                  c.hardware_cost.value(d.year) * available_TFLOPS + rm.integration_cost_eur;
  if (d.total_power_W > 0.0) out.cost_of_power_eur_per_W = out.total_eur / d.total_power_W;
  if (available_TFLOPS > 0.0) {
    out.cost_of_compute_eur_per_TFLOPS = out.total_eur / available_TFLOPS;
    out.cost_of_compute_reported = out.total_eur / (available_TFLOPS / kReportedComputeScale);
  }
  return out;
}

struct FiguresOfMerit {
  double available_compute_TFLOPS = 0.0;
  double available_compute_reported = 0.0;
  double required_compute_TFLOPS = 0.0;
  double satellite_mass_kg = 0.0;
  double compute_efficiency_W_per_TFLOPS = 0.0;
  std::optional<double> cost_of_power_eur_per_W;
  std::optional<double> cost_of_compute_eur_per_TFLOPS;
  std::optional<double> cost_of_compute_reported;
  double total_cost_eur = 0.0;
  // Reported compute falls below the workload requirement.
  bool shortfall = false;
};

inline FiguresOfMerit forecast(const SdcDesign& d, double required_TFLOPS, const RoadmapSet& rm) {
  d.validate();
  const auto compute = size_compute(d, rm);
  FiguresOfMerit f;
  f.available_compute_TFLOPS = compute.available_TFLOPS;
  f.available_compute_reported = compute.reported;
  f.required_compute_TFLOPS = required_TFLOPS;
  f.compute_efficiency_W_per_TFLOPS = compute.efficiency_W_per_TFLOPS;
  f.satellite_mass_kg = size_mass(d, compute.available_TFLOPS, rm);
  const auto cost = size_cost(d, f.satellite_mass_kg, compute.available_TFLOPS, rm);
  f.total_cost_eur = cost.total_eur;
  f.cost_of_power_eur_per_W = cost.cost_of_power_eur_per_W;
  f.cost_of_compute_eur_per_TFLOPS = cost.cost_of_compute_eur_per_TFLOPS;
  f.cost_of_compute_reported = cost.cost_of_compute_reported;
  f.shortfall = compute.reported < required_TFLOPS;
  return f;
}

// ---------------------------------------------------------------------------
// Calibration

// One published design point and its five figures of merit.
struct CalibrationTarget {
  std::string label;
  SdcDesign design;
  double compute_reported = 0.0;
  double mass_kg = 0.0;
  double efficiency_W_per_TFLOPS = 0.0;
  double cost_of_power_eur_per_W = 0.0;
  double cost_of_compute_reported = 0.0;
};

inline std::vector<CalibrationTarget> reference_design_targets() {
  using CT = ComputeType;
  using D = Destination;
  return {
      {"uc1", SdcDesign{2032, 500.0, CT::gpu_equivalent, D::leo, 1.0}, 1.14, 16.0, 0.44, 99.0, 43504.0},
      {"uc2", SdcDesign{2032, 2000.0, CT::gpu_equivalent, D::leo, 1.0}, 3.95, 63.0, 0.5, 97.0, 49276.0},
      {"uc3", SdcDesign{2040, 300.0, CT::gpu_equivalent, D::lunar_surface, 1.0}, 14.5, 68.0, 0.02, 21606.0, 447000.0},
  };
}

// Starting point and regularisation anchor for calibration. Annual factors
// of every curve except efficiency are taken from here unchanged.
inline RoadmapSet prior_roadmaps() {
  RoadmapSet rm;
  ComputeRoadmaps gpu;
  gpu.efficiency = EfficiencyModel{RoadmapCurve{Metric::compute_efficiency_W_per_TFLOPS, 2032, 0.44, 0.68}, 0.09, 500.0};
  gpu.density = RoadmapCurve{Metric::compute_density_TFLOPS_per_kg, 2032, 1000.0, 1.25};
  gpu.hardware_cost = RoadmapCurve{Metric::hardware_cost_eur_per_TFLOPS, 2032, 2.0, 0.85};
  rm.compute[ComputeType::gpu_equivalent] = gpu;
  rm.power_specific_mass = RoadmapCurve{Metric::power_system_specific_mass_kg_per_W, 2032, 0.03, 0.97};
  rm.launch_cost[Destination::leo] = RoadmapCurve{Metric::launch_cost_eur_per_kg, 2032, 3000.0, 0.95};
  rm.launch_cost[Destination::geo] = RoadmapCurve{Metric::launch_cost_eur_per_kg, 2032, 15000.0, 0.95};
  rm.launch_cost[Destination::lunar_surface] = RoadmapCurve{Metric::launch_cost_eur_per_kg, 2032, 150000.0, 0.95};
  rm.bus_mass_kg = {{Destination::leo, 0.5}, {Destination::geo, 5.0}, {Destination::lunar_surface, 50.0}};
  rm.integration_cost_eur = 0.0;
  return rm;
}

struct CellResidual {
  std::string cell;  // "<label>.<figure>"
  double target = 0.0;
  double model = 0.0;
  double rel_error = 0.0;
};

struct CalibrationResult {
  RoadmapSet roadmaps;
  std::vector<CellResidual> cells;
  double max_rel_error = 0.0;
};

namespace detail {

// Least squares on the fit rows, plus `lambda * (x - prior) / scale` rows
// that pin directions the data leave undetermined.
inline Eigen::VectorXd regularized_lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                         const Eigen::VectorXd& prior, const Eigen::VectorXd& scale, double lambda) {
  const auto m = a.rows();
  const auto n = a.cols();
  Eigen::MatrixXd aa(m + n, n);
  Eigen::VectorXd bb(m + n);
  aa.topRows(m) = a;
  bb.head(m) = b;
  aa.bottomRows(n).setZero();
  for (Eigen::Index j = 0; j < n; ++j) {
    aa(m + j, j) = lambda / scale(j);
    bb(m + j) = lambda * prior(j) / scale(j);
  }
  return aa.colPivHouseholderQr().solve(bb);
}

inline double rel_error(double model, double target) { return std::abs(model - target) / std::abs(target); }

}  // namespace detail

inline std::vector<CellResidual> residuals(const std::vector<CalibrationTarget>& targets, const RoadmapSet& rm) {
  std::vector<CellResidual> cells;
  for (const auto& t : targets) {
    const auto f = forecast(t.design, 0.0, rm);
    auto add = [&](const char* name, double target, double model) {
      cells.push_back({t.label + "." + name, target, model, detail::rel_error(model, target)});
    };
    add("compute", t.compute_reported, f.available_compute_reported);
    add("mass", t.mass_kg, f.satellite_mass_kg);
    add("efficiency", t.efficiency_W_per_TFLOPS, f.compute_efficiency_W_per_TFLOPS);
    add("cost_of_power", t.cost_of_power_eur_per_W, f.cost_of_power_eur_per_W.value_or(0.0));
    add("cost_of_compute", t.cost_of_compute_reported, f.cost_of_compute_reported.value_or(0.0));
  }
  return cells;
}

// Fits, in order: the efficiency curve and power exponent (log space, using
// both the efficiency and the compute cells); the power-system specific mass,
// compute density and per-destination bus mass (relative mass residuals);
// the per-destination launch cost and hardware cost (relative residuals of
// both cost cells). Each stage is linear in its
// unknowns once the previous stage is fixed.
inline CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets, const RoadmapSet& priors,
                                   double lambda = 1e-3) {
  if (targets.size() < 2) throw ConfigError("calibration needs at least two target rows");
  for (const auto& t : targets) {
    t.design.validate();
    if (!(t.compute_reported > 0.0 && t.mass_kg > 0.0 && t.efficiency_W_per_TFLOPS > 0.0 &&
          t.cost_of_power_eur_per_W > 0.0 && t.cost_of_compute_reported > 0.0))
      throw ConfigError("calibration target '" + t.label + "' has non-positive cells");
  }

  RoadmapSet rm = priors;
  std::vector<std::string> offending;
  auto flag = [&](bool bad, const std::vector<std::string>& cells) {
    if (bad) offending.insert(offending.end(), cells.begin(), cells.end());
  };
  auto cells_where = [&](auto pred, std::initializer_list<const char*> names) {
    std::vector<std::string> out;
    for (const auto& t : targets)
      if (pred(t))
        for (const char* n : names) out.push_back(t.label + "." + n);
    return out;
  };

  // Stage 1: efficiency per compute type.
  std::map<ComputeType, std::vector<const CalibrationTarget*>> by_type;
  for (const auto& t : targets) by_type[t.design.compute_type].push_back(&t);
  for (const auto& [type, rows] : by_type) {
    auto& model = rm.compute[type].efficiency;
    if (priors.compute.count(type) == 0) throw ConfigError("no prior curves for compute type " + std::string(to_string(type)));
    const auto m = static_cast<Eigen::Index>(rows.size() * 2);
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd b(m);
    Eigen::Index r = 0;
    for (const auto* t : rows) {
      const double dy = t->design.year - model.curve.ref_year;
      const double lp = std::log(t->design.total_power_W / model.ref_power_W);
      a.row(r) << 1.0, dy, lp;
      b(r++) = std::log(t->efficiency_W_per_TFLOPS);
      a.row(r) << 1.0, dy, lp;
      b(r++) = std::log(t->design.compute_power_fraction * t->design.total_power_W /
                        (t->compute_reported * kReportedComputeScale));
    }
    Eigen::Vector3d prior(std::log(model.curve.ref_value), std::log(model.curve.annual_factor), model.power_exponent);
    const auto x = detail::regularized_lstsq(a, b, prior, Eigen::Vector3d::Ones(), lambda);
    model.curve.ref_value = std::exp(x(0));
    model.curve.annual_factor = std::exp(x(1));
    model.power_exponent = x(2);
  }

  // Destinations present in the targets, in enum order.
  std::vector<Destination> dests;
  for (const auto& t : targets)
    if (std::find(dests.begin(), dests.end(), t.design.destination) == dests.end())
      dests.push_back(t.design.destination);
  std::sort(dests.begin(), dests.end());
  auto dest_col = [&](Destination d) {
    return static_cast<Eigen::Index>(std::find(dests.begin(), dests.end(), d) - dests.begin());
  };
  const auto n_dest = static_cast<Eigen::Index>(dests.size());

  // Stage 2: mass. Unknowns [specific mass ref, 1/density ref (per type), bus(dest)...].
  std::vector<ComputeType> types;
  for (const auto& [type, rows] : by_type) types.push_back(type);
  const auto n_types = static_cast<Eigen::Index>(types.size());
  auto type_col = [&](ComputeType t) {
    return static_cast<Eigen::Index>(std::find(types.begin(), types.end(), t) - types.begin());
  };
  std::vector<double> model_compute;
  for (const auto& t : targets) model_compute.push_back(size_compute(t.design, rm).available_TFLOPS);
  {
    const auto n = 1 + n_types + n_dest;
    const auto m = static_cast<Eigen::Index>(targets.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& t = targets[static_cast<std::size_t>(i)];
      const auto& c = rm.compute.at(t.design.compute_type);
      a(i, 0) = rm.power_specific_mass.factor_at(t.design.year) * t.design.total_power_W / t.mass_kg;
      a(i, 1 + type_col(t.design.compute_type)) =
          model_compute[static_cast<std::size_t>(i)] / c.density.factor_at(t.design.year) / t.mass_kg;
      a(i, 1 + n_types + dest_col(t.design.destination)) = 1.0 / t.mass_kg;
    }
    Eigen::VectorXd prior(n);
    prior(0) = rm.power_specific_mass.ref_value;
    for (std::size_t k = 0; k < types.size(); ++k)
      prior(1 + static_cast<Eigen::Index>(k)) = 1.0 / rm.compute.at(types[k]).density.ref_value;
    for (std::size_t k = 0; k < dests.size(); ++k)
      prior(1 + n_types + static_cast<Eigen::Index>(k)) = priors.bus_for(dests[k]);
    const auto x = detail::regularized_lstsq(a, b, prior, prior.cwiseAbs(), lambda);

    flag(x(0) <= 0.0, cells_where([](const auto&) { return true; }, {"mass"}));
    rm.power_specific_mass.ref_value = x(0);
    for (std::size_t k = 0; k < types.size(); ++k) {
      const double inv = x(1 + static_cast<Eigen::Index>(k));
      flag(inv <= 0.0, cells_where([&](const auto& t) { return t.design.compute_type == types[k]; }, {"mass"}));
      rm.compute.at(types[k]).density.ref_value = 1.0 / inv;
    }
    for (std::size_t k = 0; k < dests.size(); ++k) {
      const double bus = x(1 + n_types + static_cast<Eigen::Index>(k));
      flag(bus < 0.0, cells_where([&](const auto& t) { return t.design.destination == dests[k]; }, {"mass"}));
      rm.bus_mass_kg[dests[k]] = bus;
    }
  }

  // Stage 3: cost. Unknowns [launch ref(dest)..., hardware ref (per type)...];
  // the integration cost is a fixed input.
  {
    const auto n = n_dest + n_types;
    const auto m = static_cast<Eigen::Index>(targets.size() * 2);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b(m);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& t = targets[i];
      const double mass = size_mass(t.design, model_compute[i], rm);
      const double compute = model_compute[i];
      const double launch_col = mass * priors.launch_for(t.design.destination).factor_at(t.design.year);
      const double hw_col = compute * rm.compute.at(t.design.compute_type).hardware_cost.factor_at(t.design.year);
      const double totals[2] = {t.cost_of_power_eur_per_W * t.design.total_power_W,
                                t.cost_of_compute_reported * compute / kReportedComputeScale};
      for (int k = 0; k < 2; ++k) {
        const auto r = static_cast<Eigen::Index>(2 * i + static_cast<std::size_t>(k));
        a(r, dest_col(t.design.destination)) = launch_col / totals[k];
        a(r, n_dest + type_col(t.design.compute_type)) = hw_col / totals[k];
        b(r) = 1.0 - rm.integration_cost_eur / totals[k];
      }
    }
    Eigen::VectorXd prior(n);
    for (std::size_t k = 0; k < dests.size(); ++k)
      prior(static_cast<Eigen::Index>(k)) = priors.launch_for(dests[k]).ref_value;
    for (std::size_t k = 0; k < types.size(); ++k)
      prior(n_dest + static_cast<Eigen::Index>(k)) = rm.compute.at(types[k]).hardware_cost.ref_value;
    const auto x = detail::regularized_lstsq(a, b, prior, prior.cwiseAbs(), lambda);

    for (std::size_t k = 0; k < dests.size(); ++k) {
      const double v = x(static_cast<Eigen::Index>(k));
      flag(v <= 0.0, cells_where([&](const auto& t) { return t.design.destination == dests[k]; },
                                 {"cost_of_power", "cost_of_compute"}));
      rm.launch_cost[dests[k]].ref_value = v;
    }
    for (std::size_t k = 0; k < types.size(); ++k) {
      const double v = x(n_dest + static_cast<Eigen::Index>(k));
      flag(v <= 0.0, cells_where([&](const auto& t) { return t.design.compute_type == types[k]; },
                                 {"cost_of_power", "cost_of_compute"}));
      rm.compute.at(types[k]).hardware_cost.ref_value = v;
    }
  }

  if (!offending.empty()) {
    std::sort(offending.begin(), offending.end());
    offending.erase(std::unique(offending.begin(), offending.end()), offending.end());
    std::string msg = "calibration produced non-physical parameters; offending cells:";
    for (const auto& c : offending) msg += " " + c;
    throw CalibrationError(msg, offending);
  }

  CalibrationResult out;
  out.roadmaps = rm;
  out.cells = residuals(targets, rm);
  for (const auto& c : out.cells) out.max_rel_error = std::max(out.max_rel_error, c.rel_error);
  return out;
}

// Defaults shipped with the library: the prior set calibrated to the
// reference design table.
inline const RoadmapSet& default_roadmaps() {
  static const RoadmapSet rm = calibrate(reference_design_targets(), prior_roadmaps()).roadmaps;
  return rm;
}

}  // namespace sdc::forecast
