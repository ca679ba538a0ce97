#pragma once

// Scenario schema, run orchestration, parameter sweeps and report emission.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sdc/astro.hpp"
#include "sdc/errors.hpp"
#include "sdc/forecast.hpp"
#include "sdc/isl.hpp"
#include "sdc/json_io.hpp"
#include "sdc/netsim.hpp"
#include "sdc/workload.hpp"

#ifndef SDC_PRESET_DIR
#define SDC_PRESET_DIR "data/presets"
#endif

namespace sdc::scenario {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kPresetDirEnv = "SDC_PRESET_DIR";

// Declaration order is run order.
enum class Analysis { topology, outage, routing, workload, forecast };

inline constexpr Analysis kAllAnalyses[] = {Analysis::topology, Analysis::outage, Analysis::routing,
                                            Analysis::workload, Analysis::forecast};

inline std::string_view to_string(Analysis a) {
  switch (a) {
    case Analysis::topology: return "topology";
    case Analysis::outage: return "outage";
    case Analysis::routing: return "routing";
    case Analysis::workload: return "workload";
    case Analysis::forecast: return "forecast";
  }
  return "";
}

inline Analysis parse_analysis(std::string_view s) {
  for (auto a : kAllAnalyses)
    if (to_string(a) == s) return a;
  throw ConfigError("unknown analysis '" + std::string(s) + "'");
}

struct SunConfig {
  enum class Model { ecliptic, fixed, in_plane, plane_normal };
  Model model = Model::ecliptic;
  astro::Vec3 direction = astro::Vec3::UnitX();  // fixed
  int plane = 0;                                 // in_plane, plane_normal
  double anomaly_deg = 0.0;                      // in_plane
};

inline std::string_view to_string(SunConfig::Model m) {
  switch (m) {
    case SunConfig::Model::ecliptic: return "ecliptic";
    case SunConfig::Model::fixed: return "fixed";
    case SunConfig::Model::in_plane: return "in_plane";
    case SunConfig::Model::plane_normal: return "plane_normal";
  }
  return "";
}

inline SunConfig::Model parse_sun_model(std::string_view s) {
  for (auto m : {SunConfig::Model::ecliptic, SunConfig::Model::fixed, SunConfig::Model::in_plane,
                 SunConfig::Model::plane_normal})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown sun model '" + std::string(s) + "'");
}

inline astro::SunModel resolve_sun(const SunConfig& cfg, const astro::Constellation& sdc) {
  using M = SunConfig::Model;
  switch (cfg.model) {
    case M::ecliptic: return astro::SunModel::ecliptic();
    case M::fixed: return astro::SunModel::fixed_direction(cfg.direction);
    case M::in_plane:
      return astro::SunModel::fixed_direction(astro::in_plane_direction(
          sdc.planes.at(static_cast<std::size_t>(cfg.plane)), astro::deg2rad(cfg.anomaly_deg)));
    case M::plane_normal:
      return astro::SunModel::fixed_direction(astro::plane_normal(sdc.planes.at(static_cast<std::size_t>(cfg.plane))));
  }
  return astro::SunModel::ecliptic();
}

struct RoutePair {
  astro::SatId src;
  astro::SatId dst;
};

struct OutputConfig {
  std::string dir = "out";
  std::string format = "json";
};

struct Scenario {
  std::string name = "custom";
  std::string description;
  astro::SdcConstellationConfig constellation;
  astro::ClientConfig clients;
  astro::TimeGrid time_grid;
  SunConfig sun;
  isl::LinkParams links;
  double per_hop_delay_s = 0.0;
  std::string workload_preset = "uc1";
  workload::ImagingWorkload workload = workload::uc1_workload();
  forecast::SdcDesign design;
  std::vector<RoutePair> route_pairs;
  double persistence_threshold = 0.9;
  std::optional<double> stream_MBps;  // outage buffer sizing; defaults to the workload source rate
  std::string roadmaps_file;          // empty: shipped defaults
  std::vector<Analysis> analyses{std::begin(kAllAnalyses), std::end(kAllAnalyses)};
  OutputConfig output;

  bool wants(Analysis a) const { return std::find(analyses.begin(), analyses.end(), a) != analyses.end(); }

  astro::Fleet fleet() const {
    return astro::Fleet{astro::build_sdc_constellation(constellation), astro::build_client(clients)};
  }
};

// ---------------------------------------------------------------------------
// Schema

inline Json to_json(const Scenario& s) {
  Json pairs = Json::array();
  for (const auto& p : s.route_pairs) pairs.push_back(Json{{"src", astro::to_string(p.src)}, {"dst", astro::to_string(p.dst)}});
  Json analyses = Json::array();
  for (auto a : s.analyses) analyses.push_back(std::string(to_string(a)));
  return Json{
      {"name", s.name},
      {"description", s.description},
      {"constellation",
       Json{{"planes", s.constellation.planes},
            {"sats_per_plane", s.constellation.sats_per_plane},
            {"inclination_deg", s.constellation.inclination_deg},
            {"altitude_km", s.constellation.altitude_km},
            {"raan_spread_deg", s.constellation.raan_spread_deg},
            {"walker_phasing", s.constellation.walker_phasing}}},
      {"clients",
       Json{{"kind", std::string(astro::to_string(s.clients.kind))},
            {"count", s.clients.count},
            {"altitude_km", s.clients.altitude_km},
            {"inclination_deg", s.clients.inclination_deg},
            {"raan_deg", s.clients.raan_deg},
            {"separation_deg", s.clients.separation_deg},
            {"lunar_distance_km", s.clients.lunar_distance_km}}},
      {"time_grid",
       Json{{"start_day_of_year", s.time_grid.start_day_of_year},
            {"horizon_s", s.time_grid.horizon_s},
            {"step_s", s.time_grid.step_s}}},
      {"sun",
       Json{{"model", std::string(to_string(s.sun.model))},
            {"direction", Json::array({s.sun.direction.x(), s.sun.direction.y(), s.sun.direction.z()})},
            {"plane", s.sun.plane},
            {"anomaly_deg", s.sun.anomaly_deg}}},
      {"links",
       Json{{"policy", std::string(isl::to_string(s.links.policy))},
            {"exclusion_angle_deg", s.links.exclusion_angle_deg},
            {"max_range_km", s.links.max_range_km},
            {"grazing_margin_km", s.links.grazing_margin_km},
            {"inter_ring_per_side", s.links.inter_ring_per_side},
            {"client_access_max_range_km", s.links.client_access_max_range_km},
            {"per_hop_delay_s", s.per_hop_delay_s}}},
      {"workload", workload::to_json(s.workload, s.workload_preset)},
      {"design", forecast::to_json(s.design)},
      {"routing", Json{{"pairs", pairs}, {"persistence_threshold", s.persistence_threshold}}},
      {"outage", Json{{"stream_MBps", optional_json(s.stream_MBps)}}},
      {"roadmaps_file", s.roadmaps_file},
      {"analyses", analyses},
      {"output", Json{{"dir", s.output.dir}, {"format", s.output.format}}},
  };
}

namespace detail {

inline bool node_exists(const astro::Fleet& fleet, const astro::SatId& id) {
  const auto& c = id.role == astro::NodeRole::sdc ? fleet.sdc : fleet.clients;
  if (id.plane < 0) return id.slot >= 0 && id.slot < static_cast<int>(c.fixed.size());
  if (id.plane >= static_cast<int>(c.planes.size())) return false;
  return id.slot >= 0 && id.slot < c.planes[static_cast<std::size_t>(id.plane)].n_sats;
}

}  // namespace detail

// Reads a scenario document, fills every default and validates it. Throws
// ValidationError listing every violation.
inline Scenario scenario_from_json(const Json& j) {
  std::vector<FieldError> errors;
  Scenario s;
  ObjectReader top(j, "", errors);
  if (!top.valid()) throw ValidationError(errors);

  auto pos = [](double x) { return x > 0.0; };
  auto nonneg = [](double x) { return x >= 0.0; };
  auto finite = [](double x) { return std::isfinite(x); };

  top.string("name", s.name);
  top.string("description", s.description);

  if (const Json* c = top.child("constellation")) {
    ObjectReader r(*c, "/constellation", errors);
    r.integer("planes", s.constellation.planes, [](int x) { return x > 0; }, "> 0");
    r.integer("sats_per_plane", s.constellation.sats_per_plane, [](int x) { return x > 0; }, "> 0");
    r.number("inclination_deg", s.constellation.inclination_deg, [](double x) { return x >= 0.0 && x <= 180.0; },
             "in [0, 180]");
    r.number("altitude_km", s.constellation.altitude_km, pos, "> 0");
    r.number("raan_spread_deg", s.constellation.raan_spread_deg, [](double x) { return x > 0.0 && x <= 360.0; },
             "in (0, 360]");
    r.integer("walker_phasing", s.constellation.walker_phasing, [](int x) { return x >= 0; }, ">= 0");
    r.finish();
  }

  if (const Json* c = top.child("clients")) {
    ObjectReader r(*c, "/clients", errors);
    r.tag("kind", s.clients.kind, [](const std::string& t) { return astro::parse_client_kind(t); });
    r.integer("count", s.clients.count, [](int x) { return x >= 0; }, ">= 0");
    r.number("altitude_km", s.clients.altitude_km, pos, "> 0");
    r.number("inclination_deg", s.clients.inclination_deg, [](double x) { return x >= 0.0 && x <= 180.0; },
             "in [0, 180]");
    r.number("raan_deg", s.clients.raan_deg, [](double x) { return x >= 0.0 && x < 360.0; }, "in [0, 360)");
    r.number("separation_deg", s.clients.separation_deg, finite, "finite");
    r.number("lunar_distance_km", s.clients.lunar_distance_km, pos, "> 0");
    r.finish();
  }
  using astro::ClientKind;
  if (s.clients.kind == ClientKind::leo_pair) s.clients.count = 2;
  if (s.clients.kind == ClientKind::none) s.clients.count = 0;
  if ((s.clients.kind == ClientKind::leo_ring || s.clients.kind == ClientKind::geo ||
       s.clients.kind == ClientKind::lunar_surface) &&
      s.clients.count <= 0)
    errors.push_back({"/clients/count", "must be > 0 for this client kind"});

  if (const Json* c = top.child("time_grid")) {
    ObjectReader r(*c, "/time_grid", errors);
    r.integer("start_day_of_year", s.time_grid.start_day_of_year, [](int x) { return x >= 1 && x <= 365; },
              "in [1, 365]");
    r.number("horizon_s", s.time_grid.horizon_s, pos, "> 0");
    r.number("step_s", s.time_grid.step_s, pos, "> 0");
    r.finish();
  }
  if (s.time_grid.horizon_s < s.time_grid.step_s) errors.push_back({"/time_grid/horizon_s", "must be >= step_s"});

  if (const Json* c = top.child("sun")) {
    ObjectReader r(*c, "/sun", errors);
    r.tag("model", s.sun.model, [](const std::string& t) { return parse_sun_model(t); });
    if (const Json* d = r.child("direction")) {
      if (!d->is_array() || d->size() != 3 || !std::all_of(d->begin(), d->end(), [](const Json& v) { return v.is_number(); }))
        r.error("/sun/direction", "expected an array of three numbers");
      else {
        astro::Vec3 v((*d)[0].get<double>(), (*d)[1].get<double>(), (*d)[2].get<double>());
        if (!(v.norm() > 0.0)) r.error("/sun/direction", "must be non-zero");
        else s.sun.direction = v.normalized();
      }
    }
    r.integer("plane", s.sun.plane, [](int x) { return x >= 0; }, ">= 0");
    r.number("anomaly_deg", s.sun.anomaly_deg, finite, "finite");
    r.finish();
  }
  if ((s.sun.model == SunConfig::Model::in_plane || s.sun.model == SunConfig::Model::plane_normal) &&
      s.sun.plane >= s.constellation.planes)
    errors.push_back({"/sun/plane", "plane index outside the constellation"});

  if (const Json* c = top.child("links")) {
    ObjectReader r(*c, "/links", errors);
    r.tag("policy", s.links.policy, [](const std::string& t) { return isl::parse_policy(t); });
    r.number("exclusion_angle_deg", s.links.exclusion_angle_deg, [](double x) { return x >= 0.0 && x <= 180.0; },
             "in [0, 180]");
    r.number("max_range_km", s.links.max_range_km, pos, "> 0");
    r.number("grazing_margin_km", s.links.grazing_margin_km, nonneg, ">= 0");
    r.integer("inter_ring_per_side", s.links.inter_ring_per_side, [](int x) { return x >= 0; }, ">= 0");
    r.number("client_access_max_range_km", s.links.client_access_max_range_km, pos, "> 0");
    r.number("per_hop_delay_s", s.per_hop_delay_s, nonneg, ">= 0");
    r.finish();
  }

  if (const Json* c = top.child("workload")) {
    ObjectReader r(*c, "/workload", errors);
    if (r.valid()) s.workload = workload::read_workload(r, s.workload_preset, errors);
    try {
      s.workload.validate();
    } catch (const ConfigError& e) {
      errors.push_back({"/workload", e.what()});
    }
  }

  if (const Json* c = top.child("design")) {
    ObjectReader r(*c, "/design", errors);
    forecast::read_design(r, s.design);
  }
  if (s.design.year < forecast::kFirstRoadmapYear || s.design.year > forecast::kLastRoadmapYear)
    errors.push_back({"/design/year", "outside roadmap range [2024, 2060]"});

  bool pairs_given = false;
  if (const Json* c = top.child("routing")) {
    ObjectReader r(*c, "/routing", errors);
    if (const Json* p = r.child("pairs")) {
      pairs_given = true;
      if (!p->is_array()) r.error("/routing/pairs", "expected an array");
      else
        for (std::size_t i = 0; i < p->size(); ++i) {
          const std::string path = "/routing/pairs/" + std::to_string(i);
          ObjectReader rp((*p)[i], path, errors);
          std::string src, dst;
          rp.string("src", src);
          rp.string("dst", dst);
          rp.finish();
          try {
            s.route_pairs.push_back({astro::parse_sat_id(src), astro::parse_sat_id(dst)});
          } catch (const ConfigError& e) {
            errors.push_back({path, e.what()});
          }
        }
    }
    r.number("persistence_threshold", s.persistence_threshold, [](double x) { return x >= 0.0 && x <= 1.0; },
             "in [0, 1]");
    r.finish();
  }

  if (const Json* c = top.child("outage")) {
    ObjectReader r(*c, "/outage", errors);
    r.optional_number("stream_MBps", s.stream_MBps, nonneg, ">= 0");
    r.finish();
  }

  top.string("roadmaps_file", s.roadmaps_file);

  if (const Json* c = top.child("analyses")) {
    if (!c->is_array()) top.error("/analyses", "expected an array");
    else {
      s.analyses.clear();
      for (std::size_t i = 0; i < c->size(); ++i) {
        const auto& v = (*c)[i];
        try {
          if (!v.is_string()) throw ConfigError("expected a string");
          const auto a = parse_analysis(v.get<std::string>());
          if (!s.wants(a)) s.analyses.push_back(a);
        } catch (const ConfigError& e) {
          errors.push_back({"/analyses/" + std::to_string(i), e.what()});
        }
      }
      std::sort(s.analyses.begin(), s.analyses.end());
    }
  }

  if (const Json* c = top.child("output")) {
    ObjectReader r(*c, "/output", errors);
    r.string("dir", s.output.dir);
    r.string("format", s.output.format);
    r.finish();
  }
  if (s.output.format != "json" && s.output.format != "csv")
    errors.push_back({"/output/format", "must be 'json' or 'csv'"});

  top.finish();

  if (errors.empty()) {
    astro::Fleet fleet;
    try {
      fleet = s.fleet();
    } catch (const ConfigError& e) {
      errors.push_back({"/constellation", e.what()});
    }
    if (errors.empty()) {
      if (!pairs_given && !fleet.sdc.planes.empty() && fleet.sdc.planes[0].n_sats >= 2)
        s.route_pairs.push_back({astro::SatId{astro::NodeRole::sdc, 0, 0}, astro::SatId{astro::NodeRole::sdc, 0, 1}});
      for (std::size_t i = 0; i < s.route_pairs.size(); ++i) {
        const std::string path = "/routing/pairs/" + std::to_string(i);
        if (!detail::node_exists(fleet, s.route_pairs[i].src)) errors.push_back({path + "/src", "no such node"});
        if (!detail::node_exists(fleet, s.route_pairs[i].dst)) errors.push_back({path + "/dst", "no such node"});
      }
    }
  }

  if (!s.stream_MBps && errors.empty()) s.stream_MBps = workload::source_data_rate(s.workload);
  if (!errors.empty()) throw ValidationError(errors);
  return s;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  const auto text = read_file(path);
  return scenario_from_json(parse_json_text(text, path.string()));
}

inline std::filesystem::path preset_directory() {
  if (const char* env = std::getenv(kPresetDirEnv); env != nullptr && *env != '\0') return env;
  return SDC_PRESET_DIR;
}

inline std::vector<std::string> list_presets() {
  std::vector<std::string> names;
  const auto dir = preset_directory();
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

inline std::filesystem::path preset_path(const std::string& name) {
  const auto p = preset_directory() / (name + ".json");
  if (!std::filesystem::is_regular_file(p)) throw ConfigError("unknown preset '" + name + "'");
  return p;
}

// A path to a scenario file, or the name of a shipped preset.
inline Scenario resolve_scenario(const std::string& ref) {
  if (std::filesystem::is_regular_file(ref)) return load_scenario(ref);
  return load_scenario(preset_path(ref));
}

inline forecast::RoadmapSet roadmaps_for(const Scenario& s) {
  if (s.roadmaps_file.empty()) return forecast::default_roadmaps();
  return forecast::roadmaps_from_json(parse_json_text(read_file(s.roadmaps_file), s.roadmaps_file));
}

// ---------------------------------------------------------------------------
// Analyses

inline Json forecast_section(const forecast::SdcDesign& design, const workload::ImagingWorkload& w,
                             const forecast::RoadmapSet& rm) {
  const auto demand = workload::evaluate(w);
  const auto fom = forecast::forecast(design, demand.required_compute_TFLOPS, rm);
  Json j = forecast::to_json(fom);
  j["design"] = forecast::to_json(design);
  return j;
}

inline Json workload_section(const workload::ImagingWorkload& w) {
  Json j = workload::to_json(workload::evaluate(w));
  j["source_stream_MBps"] = workload::source_data_rate(w);
  j["n_sources"] = w.n_sources;
  j["intensity_GFLOP_per_MB"] = w.intensity.mean;
  return j;
}

inline Json outage_section(const astro::Fleet& fleet, const astro::TimeGrid& grid, const astro::SunModel& sun,
                           const isl::LinkParams& params, double stream_MBps, bool with_intervals = false) {
  std::vector<isl::ContactIntervals> contacts;
  for (const auto& link : isl::neighbor_topology(fleet, grid.epoch(0), params))
    if (link.kind == isl::LinkKind::intra_ring) contacts.push_back(isl::contact_intervals(fleet, link, grid, sun, params));
  const auto rep = netsim::buffer_requirements(contacts, stream_MBps);
  Json rows = Json::array();
  double max_frac = 0.0, sum_frac = 0.0, max_outage = 0.0, max_buffer = 0.0;
  for (std::size_t i = 0; i < rep.links.size(); ++i) {
    const auto& o = rep.links[i];
    rows.push_back(Json{{"link_id", isl::link_id(o.link)},
                        {"kind", std::string(isl::to_string(o.link.kind))},
                        {"max_outage_s", o.max_contiguous_outage_s},
                        {"outage_fraction", o.outage_fraction},
                        {"buffer_MB", o.required_buffer_MB}});
    if (with_intervals) {
      Json up = Json::array();
      for (const auto& iv : contacts[i].intervals) up.push_back(Json::array({iv.t_start, iv.t_end}));
      rows.back()["up_intervals"] = up;
    }
    max_frac = std::max(max_frac, o.outage_fraction);
    sum_frac += o.outage_fraction;
    max_outage = std::max(max_outage, o.max_contiguous_outage_s);
    max_buffer = std::max(max_buffer, o.required_buffer_MB);
  }
  return Json{{"stream_MBps", stream_MBps},
              {"link_count", rep.links.size()},
              {"max_outage_fraction", max_frac},
              {"mean_outage_fraction", rep.links.empty() ? 0.0 : sum_frac / static_cast<double>(rep.links.size())},
              {"max_outage_s", max_outage},
              {"max_buffer_MB", max_buffer},
              {"links", rows}};
}

inline std::string join_path(const std::vector<astro::SatId>& path) {
  std::string out;
  for (const auto& id : path) {
    if (!out.empty()) out += ' ';
    out += astro::to_string(id);
  }
  return out;
}

inline Json latency_row(const astro::SatId& src, const astro::SatId& dst, const netsim::LatencyStats& st) {
  return Json{{"src", astro::to_string(src)},
              {"dst", astro::to_string(dst)},
              {"max_latency_s", st.max_latency_s},
              {"min_latency_s", st.min_latency_s},
              {"mean_latency_s", st.mean_latency_s},
              {"unreachable_fraction", st.unreachable_fraction},
              {"worst_epoch_s", st.worst_epoch_t},
              {"worst_hops", st.worst_route.hop_count},
              {"worst_path", join_path(st.worst_route.path)},
              {"blocked_detour", st.worst_route.blocked_detour}};
}

struct RunCounters {
  std::size_t snapshots = 0;
};

inline Json topology_section(const astro::Fleet& fleet, const Scenario& s, const astro::SunModel& sun,
                             RunCounters& counters) {
  const auto& grid = s.time_grid;
  const auto snap0 = netsim::snapshot(fleet, grid.epoch(0), sun, s.links, s.per_hop_delay_s);
  ++counters.snapshots;
  std::map<std::string, std::size_t> by_kind;
  std::size_t up = 0;
  std::map<astro::SatId, int> out_degree;
  for (const auto& id : snap0.nodes)
    if (id.role == astro::NodeRole::sdc) out_degree[id] = 0;
  for (const auto& e : snap0.edges) {
    ++by_kind[std::string(isl::to_string(e.link.kind))];
    if (e.routable()) ++up;
    if (e.link.tx.role == astro::NodeRole::sdc && e.link.rx.role == astro::NodeRole::sdc && e.geometric())
      ++out_degree[e.link.tx];
  }
  int min_deg = 0, max_deg = 0;
  if (!out_degree.empty()) {
    min_deg = out_degree.begin()->second;
    max_deg = min_deg;
    for (const auto& [id, d] : out_degree) {
      min_deg = std::min(min_deg, d);
      max_deg = std::max(max_deg, d);
    }
  }
  Json kinds = Json::object();
  for (const auto& [k, n] : by_kind) kinds[k] = n;

  const astro::Fleet sdc_only{fleet.sdc, {}};
  std::size_t connected = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto snap = netsim::snapshot(sdc_only, grid.epoch(k), sun, s.links, s.per_hop_delay_s);
    ++counters.snapshots;
    if (netsim::strongly_connected(snap)) ++connected;
  }

  const auto roles = netsim::classify_routers(fleet, grid, s.links, s.persistence_threshold);
  counters.snapshots += grid.size();
  Json routers = Json::array();
  int quasi_nodes = 0, dynamic_nodes = 0;
  for (const auto& r : roles) {
    routers.push_back(Json{{"node", astro::to_string(r.node)},
                           {"quasi_static_degree", r.quasi_static_degree},
                           {"dynamic_degree", r.dynamic_degree}});
    if (r.quasi_static_degree > 0) ++quasi_nodes;
    if (r.dynamic_degree > 0) ++dynamic_nodes;
  }

  return Json{{"node_count", snap0.nodes.size()},
              {"edge_count", snap0.edges.size()},
              {"up_edge_count", up},
              {"edges_by_kind", kinds},
              {"min_sdc_out_degree", min_deg},
              {"max_sdc_out_degree", max_deg},
              {"connected_fraction", grid.size() ? static_cast<double>(connected) / static_cast<double>(grid.size()) : 0.0},
              {"nodes_with_quasi_static_links", quasi_nodes},
              {"nodes_with_dynamic_links", dynamic_nodes},
              {"routers", routers}};
}

// Executes the requested analyses in fixed order. Failures of one analysis
// are recorded under "errors" with the analysis tag; the others still run.
inline Json run(const Scenario& s) {
  Json results = Json::object();
  Json errors = Json::array();
  RunCounters counters;

  const bool orbital = s.wants(Analysis::topology) || s.wants(Analysis::outage) || s.wants(Analysis::routing);
  std::optional<astro::Fleet> fleet;
  std::optional<astro::SunModel> sun;
  if (orbital) {
    try {
      fleet = s.fleet();
      sun = resolve_sun(s.sun, fleet->sdc);
      s.time_grid.validate();
    } catch (const std::exception& e) {
      errors.push_back(Json{{"analysis", "setup"}, {"message", e.what()}});
      fleet.reset();
    }
  }

  for (auto a : s.analyses) {
    const std::string tag(to_string(a));
    try {
      switch (a) {
        case Analysis::topology:
          if (fleet) results[tag] = topology_section(*fleet, s, *sun, counters);
          break;
        case Analysis::outage:
          if (fleet) results[tag] = outage_section(*fleet, s.time_grid, *sun, s.links, s.stream_MBps.value_or(0.0));
          break;
        case Analysis::routing:
          if (fleet) {
            Json rows = Json::array();
            for (const auto& p : s.route_pairs) {
              const auto st = netsim::worst_case_latency(*fleet, p.src, p.dst, s.time_grid, *sun, s.links,
                                                         s.per_hop_delay_s);
              counters.snapshots += st.epochs;
              rows.push_back(latency_row(p.src, p.dst, st));
            }
            results[tag] = Json{{"pairs", rows}};
          }
          break;
        case Analysis::workload:
          results[tag] = workload_section(s.workload);
          break;
        case Analysis::forecast:
          results[tag] = forecast_section(s.design, s.workload, roadmaps_for(s));
          break;
      }
    } catch (const std::exception& e) {
      errors.push_back(Json{{"analysis", tag}, {"message", e.what()}});
    }
  }

  Json report{{"tool", "sdc"},
              {"version", kToolVersion},
              {"scenario", to_json(s)},
              {"results", results},
              {"errors", errors},
              {"stats", Json{{"epochs", orbital ? s.time_grid.size() : 0}, {"snapshots_evaluated", counters.snapshots}}}};
  report["content_hash"] = "fnv1a64:" + fnv1a64_hex(report.dump());
  return report;
}

inline bool verify_hash(const Json& report) {
  Json copy = report;
  const auto hash = copy.at("content_hash").get<std::string>();
  copy.erase("content_hash");
  return hash == "fnv1a64:" + fnv1a64_hex(copy.dump());
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<Json> reports;
  Json summary = Json::array();
};

inline Json::json_pointer axis_pointer(const std::string& axis) {
  std::string p = axis;
  if (p.empty()) throw ValidationError("axis", "empty parameter path");
  if (p.front() != '/') {
    std::replace(p.begin(), p.end(), '.', '/');
    p = "/" + p;
  }
  try {
    return Json::json_pointer(p);
  } catch (const Json::exception&) {
    throw ValidationError("axis", "malformed parameter path '" + axis + "'");
  }
}

inline Json summary_row(double value, const Json& report) {
  Json row{{"value", value}};
  const auto& r = report.at("results");
  if (r.contains("forecast")) {
    const auto& f = r.at("forecast");
    for (const char* k : {"available_compute_TFLOPS", "available_compute_reported", "compute_efficiency_W_per_TFLOPS",
                          "satellite_mass_kg", "cost_of_power_eur_per_W", "cost_of_compute_reported", "total_cost_eur",
                          "shortfall"})
      row[k] = f.at(k);
  }
  if (r.contains("outage")) {
    row["mean_outage_fraction"] = r.at("outage").at("mean_outage_fraction");
    row["max_outage_fraction"] = r.at("outage").at("max_outage_fraction");
    row["max_buffer_MB"] = r.at("outage").at("max_buffer_MB");
  }
  if (r.contains("routing")) {
    double worst = 0.0;
    for (const auto& p : r.at("routing").at("pairs")) worst = std::max(worst, p.at("max_latency_s").get<double>());
    row["max_latency_s"] = worst;
  }
  return row;
}

// One report per value, evaluated concurrently and returned in input order.
inline SweepResult sweep(const Scenario& base, const std::string& axis, const std::vector<double>& values) {
  const auto ptr = axis_pointer(axis);
  const Json resolved = to_json(base);
  if (!resolved.contains(ptr) || !resolved.at(ptr).is_number())
    throw ValidationError(axis, "sweep axis must address a numeric scalar field");
  const bool integral = resolved.at(ptr).is_number_integer();

  std::vector<Scenario> points;
  std::vector<FieldError> errors;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Json doc = resolved;
    const double v = values[i];
    if (integral) {
      if (v != std::floor(v)) {
        errors.push_back({axis, "value " + format_number(v) + " is not an integer"});
        continue;
      }
      doc[ptr] = static_cast<long long>(v);
    } else {
      doc[ptr] = v;
    }
    // A stream rate equal to the workload source rate is taken as derived and
    // must follow the swept workload.
    if (ptr.to_string().rfind("/workload", 0) == 0 &&
        (!base.stream_MBps || *base.stream_MBps == workload::source_data_rate(base.workload)))
      doc["outage"]["stream_MBps"] = nullptr;
    try {
      points.push_back(scenario_from_json(doc));
    } catch (const ValidationError& e) {
      for (const auto& fe : e.errors()) errors.push_back({fe.path, fe.message + " (value " + format_number(v) + ")"});
    }
  }
  if (!errors.empty()) throw ValidationError(errors);

  std::vector<std::future<Json>> jobs;
  jobs.reserve(points.size());
  for (const auto& p : points) jobs.push_back(std::async(std::launch::async, [&p] { return run(p); }));

  SweepResult out;
  out.axis = axis;
  out.values = values;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.reports.push_back(jobs[i].get());
    out.summary.push_back(summary_row(values[i], out.reports.back()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission

inline std::string csv_field(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

// RFC 4180 table; `columns` empty means the keys of the first row.
inline std::string to_csv(const Json& rows, std::vector<std::string> columns = {}) {
  if (columns.empty() && !rows.empty())
    for (auto it = rows.front().begin(); it != rows.front().end(); ++it) columns.push_back(it.key());
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(Json(columns[i]));
  out += "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += row.contains(columns[i]) ? csv_field(row.at(columns[i])) : "";
    }
    out += "\r\n";
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Flattens one object into a single-row table, skipping nested values.
inline Json single_row(const Json& obj) {
  Json row = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!it.value().is_structured()) row[it.key()] = it.value();
  return Json::array({row});
}

inline const std::vector<std::string>& outage_csv_columns() {
  static const std::vector<std::string> cols{"link_id", "max_outage_s", "outage_fraction", "buffer_MB"};
  return cols;
}

// JSON: one file with the whole report. CSV: one file per result table.
inline std::vector<std::filesystem::path> emit(const Json& report, const std::filesystem::path& dir,
                                               const std::string& format) {
  std::vector<std::filesystem::path> written;
  if (format == "json") {
    const auto name = report.at("scenario").at("name").get<std::string>();
    const auto p = dir / (name + ".report.json");
    write_file(p, report.dump(2) + "\n");
    written.push_back(p);
    return written;
  }
  if (format != "csv") throw ConfigError("unknown output format '" + format + "'");
  const auto& r = report.at("results");
  auto put = [&](const std::string& file, const std::string& content) {
    write_file(dir / file, content);
    written.push_back(dir / file);
  };
  if (r.contains("topology")) put("routers.csv", to_csv(r.at("topology").at("routers")));
  if (r.contains("outage")) put("outage.csv", to_csv(r.at("outage").at("links"), outage_csv_columns()));
  if (r.contains("routing")) put("routing.csv", to_csv(r.at("routing").at("pairs")));
  if (r.contains("workload")) {
    Json rows = Json::array();
    const auto& w = r.at("workload");
    Json primary = w.at("primary");
    primary["stream"] = "primary";
    rows.push_back(primary);
    if (!w.at("detail").is_null()) {
      Json d = w.at("detail");
      d["stream"] = "detail";
      rows.push_back(d);
    }
    put("workload.csv",
        to_csv(rows, {"stream", "data_rate_MBps", "aggregate_data_rate_MBps", "compute_GFLOPS", "aggregate_compute_GFLOPS"}));
  }
  if (r.contains("forecast")) put("forecast.csv", to_csv(single_row(r.at("forecast"))));
  return written;
}

inline std::vector<std::filesystem::path> emit_sweep(const SweepResult& sw, const std::filesystem::path& dir,
                                                     const std::string& format) {
  std::vector<std::filesystem::path> written;
  if (format == "csv") {
    write_file(dir / "sweep.csv", to_csv(sw.summary));
    written.push_back(dir / "sweep.csv");
  } else {
    Json doc{{"axis", sw.axis}, {"values", sw.values}, {"summary", sw.summary}, {"reports", sw.reports}};
    write_file(dir / "sweep.json", doc.dump(2) + "\n");
    written.push_back(dir / "sweep.json");
  }
  return written;
}

}  // namespace sdc::scenario
