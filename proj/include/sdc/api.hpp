#pragma once

// Stateless HTTP/JSON service. `Service::handle` is a pure function of the
// request; api_server.hpp adapts it to cpp-httplib.

#include <string>
#include <vector>

#include "sdc/astro.hpp"
#include "sdc/errors.hpp"
#include "sdc/forecast.hpp"
#include "sdc/json_io.hpp"
#include "sdc/netsim.hpp"
#include "sdc/scenario.hpp"
#include "sdc/workload.hpp"

namespace sdc::api {

struct Response {
  int status = 200;
  std::string body;
};

struct ApiConfig {
  double horizon_cap_periods = 2.0;  // network summary horizon bound, in SDC orbital periods
};

namespace detail {

inline Response json_response(int status, const Json& body) { return Response{status, body.dump()}; }

inline Json error_array(const std::vector<FieldError>& errors) {
  Json arr = Json::array();
  for (const auto& e : errors) arr.push_back(Json{{"path", e.path}, {"message", e.message}});
  return arr;
}

inline Response fail(int status, const std::vector<FieldError>& errors) {
  return json_response(status, Json{{"errors", error_array(errors)}});
}

}  // namespace detail

class Service {
 public:
  explicit Service(ApiConfig cfg = {}) : cfg_(cfg) {}

  Response handle(const std::string& method, const std::string& path, const std::string& body) const {
    try {
      if (path == "/api/forecast") return method == "POST" ? post_forecast(body) : not_allowed(method, path);
      if (path == "/api/network/summary") return method == "POST" ? post_network(body) : not_allowed(method, path);
      if (path == "/api/presets") return method == "GET" ? get_presets() : not_allowed(method, path);
      if (path == "/api/roadmaps") return method == "GET" ? get_roadmaps() : not_allowed(method, path);
      return detail::fail(404, {{path, "no such endpoint"}});
    } catch (const ValidationError& e) {
      return detail::fail(400, e.errors());
    } catch (const ParseError& e) {
      return detail::fail(400, {{"", e.what()}});
    } catch (const forecast::RoadmapRangeError& e) {
      return detail::fail(422, {{"/design/year", e.what()}});
    } catch (const ConfigError& e) {
      return detail::fail(400, {{"", e.what()}});
    } catch (const std::exception& e) {
      return detail::fail(500, {{"", e.what()}});
    }
  }

  const ApiConfig& config() const { return cfg_; }

 private:
  static Response not_allowed(const std::string& method, const std::string& path) {
    return detail::fail(405, {{path, "method " + method + " not allowed"}});
  }

  static Json parse_body(const std::string& body) {
    if (body.empty()) return Json::object();
    return parse_json_text(body, "request body");
  }

  // Body: {"design": {...}, "workload": "uc2" | {...}}. Design year range is
  // checked at evaluation so that it surfaces as 422.
  static Response post_forecast(const std::string& body) {
    const Json j = parse_body(body);
    std::vector<FieldError> errors;
    ObjectReader top(j, "", errors);
    if (!top.valid()) throw ValidationError(errors);

    forecast::SdcDesign design;
    if (const Json* d = top.child("design")) {
      ObjectReader r(*d, "/design", errors);
      if (r.valid()) forecast::read_design(r, design);
    }
    std::string preset = "uc1";
    workload::ImagingWorkload w = workload::uc1_workload();
    if (const Json* wj = top.child("workload")) {
      if (wj->is_string()) {
        preset = wj->get<std::string>();
        if (auto p = workload::workload_preset(preset)) w = *p;
        else errors.push_back({"/workload", "unknown workload preset '" + preset + "'"});
      } else {
        ObjectReader r(*wj, "/workload", errors);
        if (r.valid()) w = workload::read_workload(r, preset, errors);
        try {
          w.validate();
        } catch (const ConfigError& e) {
          errors.push_back({"/workload", e.what()});
        }
      }
    }
    top.finish();
    if (!errors.empty()) throw ValidationError(errors);

    Json out = scenario::forecast_section(design, w, forecast::default_roadmaps());
    out["errors"] = Json::array();
    return detail::json_response(200, out);
  }

  // Body: a scenario fragment (constellation, clients, time_grid, sun, links,
  // workload, outage, routing).
  Response post_network(const std::string& body) const {
    Json j = parse_body(body);
    if (!j.is_object()) throw ValidationError("", "expected an object");
    std::vector<FieldError> errors;
    for (auto it = j.begin(); it != j.end(); ++it) {
      static const std::vector<std::string> allowed{"constellation", "clients", "time_grid", "sun",
                                                    "links",         "workload", "outage",   "routing"};
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
        errors.push_back({"/" + it.key(), "unknown key"});
    }
    if (!errors.empty()) throw ValidationError(errors);
    const auto s = scenario::scenario_from_json(j);

    const double period = astro::orbital_period(s.constellation.altitude_km);
    const double cap = cfg_.horizon_cap_periods * period;
    if (s.time_grid.horizon_s > cap)
      throw ValidationError("/time_grid/horizon_s", "exceeds the cap of " + format_number(cap) + " s (" +
                                                          format_number(cfg_.horizon_cap_periods) +
                                                          " orbital periods)");

    const auto fleet = s.fleet();
    const auto sun = scenario::resolve_sun(s.sun, fleet.sdc);
    const auto snap0 = netsim::snapshot(fleet, s.time_grid.epoch(0), sun, s.links, s.per_hop_delay_s);

    Json routes = Json::array();
    Json worst = nullptr;
    double worst_latency = -1.0;
    for (const auto& p : s.route_pairs) {
      const auto st = netsim::worst_case_latency(fleet, p.src, p.dst, s.time_grid, sun, s.links, s.per_hop_delay_s);
      routes.push_back(scenario::latency_row(p.src, p.dst, st));
      if (st.max_latency_s > worst_latency) {
        worst_latency = st.max_latency_s;
        worst = routes.back();
      }
    }

    Json out{{"snapshots",
              Json{{"epochs", s.time_grid.size()},
                   {"step_s", s.time_grid.step_s},
                   {"horizon_s", s.time_grid.horizon_s},
                   {"start_day_of_year", s.time_grid.start_day_of_year},
                   {"orbital_period_s", period},
                   {"node_count", snap0.nodes.size()},
                   {"edge_count", snap0.edges.size()}}},
             {"outage", scenario::outage_section(fleet, s.time_grid, sun, s.links, s.stream_MBps.value_or(0.0), true)},
             {"routes", routes},
             {"max_detour_route", worst},
             {"errors", Json::array()}};
    return detail::json_response(200, out);
  }

  static Response get_presets() {
    Json list = Json::array();
    for (const auto& name : scenario::list_presets()) {
      Json entry{{"name", name}};
      try {
        const auto s = scenario::load_scenario(scenario::preset_path(name));
        entry["description"] = s.description;
        entry["scenario"] = scenario::to_json(s);
      } catch (const std::exception& e) {
        entry["error"] = e.what();
      }
      list.push_back(entry);
    }
    return detail::json_response(200, Json{{"presets", list}, {"errors", Json::array()}});
  }

  static Response get_roadmaps() {
    const auto& rm = forecast::default_roadmaps();
    return detail::json_response(
        200, Json{{"curves", forecast::roadmap_listing(rm)}, {"roadmaps", forecast::to_json(rm)}, {"errors", Json::array()}});
  }

  ApiConfig cfg_;
};

}  // namespace sdc::api
