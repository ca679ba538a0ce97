#pragma once

// JSON conversions shared by the scenario runner, the CLI and the HTTP
// service, plus a strict object reader that collects every field error.

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdc/errors.hpp"
#include "sdc/forecast.hpp"
#include "sdc/workload.hpp"

namespace sdc {

using Json = nlohmann::ordered_json;

// Strict reader over one JSON object: typed field access, range checks and
// rejection of keys that were never read.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string path, std::vector<FieldError>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) {
      error(path_, "expected an object");
      valid_ = false;
    }
  }

  ~ObjectReader() = default;
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  bool valid() const { return valid_; }
  bool has(const std::string& key) const { return valid_ && obj_.contains(key); }
  std::string child_path(const std::string& key) const { return path_ + "/" + key; }

  const Json* child(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  void number(const std::string& key, double& out, std::function<bool(double)> ok = {}, const char* constraint = "") {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_number()) return error(child_path(key), "expected a number");
    const double x = v->get<double>();
    if (ok && !ok(x)) return error(child_path(key), std::string("must be ") + constraint);
    out = x;
  }

  void optional_number(const std::string& key, std::optional<double>& out, std::function<bool(double)> ok = {},
                       const char* constraint = "") {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    if (!v->is_number()) return error(child_path(key), "expected a number or null");
    const double x = v->get<double>();
    if (ok && !ok(x)) return error(child_path(key), std::string("must be ") + constraint);
    out = x;
  }

  void integer(const std::string& key, int& out, std::function<bool(int)> ok = {}, const char* constraint = "") {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_number_integer()) return error(child_path(key), "expected an integer");
    const auto x = v->get<std::int64_t>();
    if (x < INT32_MIN || x > INT32_MAX) return error(child_path(key), "integer out of range");
    if (ok && !ok(static_cast<int>(x))) return error(child_path(key), std::string("must be ") + constraint);
    out = static_cast<int>(x);
  }

  void string(const std::string& key, std::string& out) {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_string()) return error(child_path(key), "expected a string");
    out = v->get<std::string>();
  }

  // Parses an enum tag with `parse`, which throws ConfigError on unknown tags.
  template <typename E, typename Parse>
  void tag(const std::string& key, E& out, Parse parse) {
    std::string s;
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_string()) return error(child_path(key), "expected a string");
    try {
      out = parse(v->get<std::string>());
    } catch (const ConfigError& e) {
      error(child_path(key), e.what());
    }
  }

  void error(const std::string& path, const std::string& message) { errors_.push_back({path, message}); }

  // Flags every key that no accessor asked for.
  void finish() {
    if (!valid_) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) error(child_path(it.key()), "unknown key");
  }

 private:
  const Json& obj_;
  std::string path_;
  std::vector<FieldError>& errors_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

// Shortest round-trip decimal form; locale independent.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

inline std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// ---------------------------------------------------------------------------
// forecast

namespace forecast {

inline Json to_json(const RoadmapCurve& c) {
  return Json{{"metric", std::string(to_string(c.metric))},
              {"ref_year", c.ref_year},
              {"ref_value", c.ref_value},
              {"annual_factor", c.annual_factor}};
}

inline Json to_json(const SdcDesign& d) {
  return Json{{"year", d.year},
              {"total_power_W", d.total_power_W},
              {"compute_type", std::string(to_string(d.compute_type))},
              {"destination", std::string(to_string(d.destination))},
              {"compute_power_fraction", d.compute_power_fraction}};
}

inline void read_design(ObjectReader& r, SdcDesign& d) {
  r.integer("year", d.year);
  r.number("total_power_W", d.total_power_W, [](double x) { return x > 0.0; }, "> 0");
  r.tag("compute_type", d.compute_type, [](const std::string& s) { return parse_compute_type(s); });
  r.tag("destination", d.destination, [](const std::string& s) { return parse_destination(s); });
  r.number("compute_power_fraction", d.compute_power_fraction, [](double x) { return x > 0.0 && x <= 1.0; },
           "in (0, 1]");
  r.finish();
}

inline Json to_json(const FiguresOfMerit& f) {
  return Json{{"available_compute_TFLOPS", f.available_compute_TFLOPS},
              {"available_compute_reported", f.available_compute_reported},
              {"required_compute_TFLOPS", f.required_compute_TFLOPS},
              {"satellite_mass_kg", f.satellite_mass_kg},
              {"compute_efficiency_W_per_TFLOPS", f.compute_efficiency_W_per_TFLOPS},
              {"cost_of_power_eur_per_W", optional_json(f.cost_of_power_eur_per_W)},
              {"cost_of_compute_eur_per_TFLOPS", optional_json(f.cost_of_compute_eur_per_TFLOPS)},
              {"cost_of_compute_reported", optional_json(f.cost_of_compute_reported)},
              {"total_cost_eur", f.total_cost_eur},
              {"shortfall", f.shortfall}};
}

inline Json to_json(const RoadmapSet& rm) {
  Json compute = Json::object();
  for (const auto& [type, c] : rm.compute) {
    Json eff = to_json(c.efficiency.curve);
    eff["power_exponent"] = c.efficiency.power_exponent;
    eff["ref_power_W"] = c.efficiency.ref_power_W;
    compute[std::string(to_string(type))] =
        Json{{"efficiency", eff}, {"density", to_json(c.density)}, {"hardware_cost", to_json(c.hardware_cost)}};
  }
  Json launch = Json::object();
  for (const auto& [d, c] : rm.launch_cost) launch[std::string(to_string(d))] = to_json(c);
  Json bus = Json::object();
  for (const auto& [d, m] : rm.bus_mass_kg) bus[std::string(to_string(d))] = m;
  return Json{{"format", "sdc-roadmaps/1"},
              {"valid_years", Json::array({kFirstRoadmapYear, kLastRoadmapYear})},
              {"compute", compute},
              {"power_specific_mass", to_json(rm.power_specific_mass)},
              {"launch_cost", launch},
              {"bus_mass_kg", bus},
              {"integration_cost_eur", rm.integration_cost_eur}};
}

namespace detail {

inline void read_curve(ObjectReader& r, RoadmapCurve& c, Metric expected, bool allow_extra_efficiency_keys,
                       EfficiencyModel* eff = nullptr) {
  c.metric = expected;
  Metric m = expected;
  r.tag("metric", m, [](const std::string& s) { return parse_metric(s); });
  if (m != expected) r.error(r.child_path("metric"), "expected " + std::string(to_string(expected)));
  r.integer("ref_year", c.ref_year);
  r.number("ref_value", c.ref_value, [](double x) { return x > 0.0; }, "> 0");
  r.number("annual_factor", c.annual_factor, [](double x) { return x > 0.0; }, "> 0");
  if (allow_extra_efficiency_keys && eff != nullptr) {
    r.number("power_exponent", eff->power_exponent);
    r.number("ref_power_W", eff->ref_power_W, [](double x) { return x > 0.0; }, "> 0");
  }
  r.finish();
}

}  // namespace detail

inline RoadmapSet roadmaps_from_json(const Json& j, const std::string& path = "") {
  std::vector<FieldError> errors;
  RoadmapSet rm;
  ObjectReader top(j, path, errors);
  std::string format;
  top.string("format", format);
  if (top.has("format") && format != "sdc-roadmaps/1") top.error(top.child_path("format"), "unsupported format");
  top.child("valid_years");
  if (const Json* c = top.child("compute")) {
    if (!c->is_object()) top.error(top.child_path("compute"), "expected an object");
    else
      for (auto it = c->begin(); it != c->end(); ++it) {
        const std::string p = top.child_path("compute") + "/" + it.key();
        ComputeType type{};
        try {
          type = parse_compute_type(it.key());
        } catch (const ConfigError& e) {
          errors.push_back({p, e.what()});
          continue;
        }
        ComputeRoadmaps cr;
        ObjectReader rc(it.value(), p, errors);
        if (const Json* e = rc.child("efficiency")) {
          ObjectReader re(*e, rc.child_path("efficiency"), errors);
          detail::read_curve(re, cr.efficiency.curve, Metric::compute_efficiency_W_per_TFLOPS, true, &cr.efficiency);
        }
        if (const Json* e = rc.child("density")) {
          ObjectReader re(*e, rc.child_path("density"), errors);
          detail::read_curve(re, cr.density, Metric::compute_density_TFLOPS_per_kg, false);
        }
        if (const Json* e = rc.child("hardware_cost")) {
          ObjectReader re(*e, rc.child_path("hardware_cost"), errors);
          detail::read_curve(re, cr.hardware_cost, Metric::hardware_cost_eur_per_TFLOPS, false);
        }
        rc.finish();
        rm.compute[type] = cr;
      }
  }
  if (const Json* c = top.child("power_specific_mass")) {
    ObjectReader r(*c, top.child_path("power_specific_mass"), errors);
    detail::read_curve(r, rm.power_specific_mass, Metric::power_system_specific_mass_kg_per_W, false);
  }
  auto per_destination = [&](const char* key, auto&& fn) {
    const Json* c = top.child(key);
    if (c == nullptr) return;
    if (!c->is_object()) return top.error(top.child_path(key), "expected an object");
    for (auto it = c->begin(); it != c->end(); ++it) {
      const std::string p = top.child_path(key) + "/" + it.key();
      try {
        fn(parse_destination(it.key()), it.value(), p);
      } catch (const ConfigError& e) {
        errors.push_back({p, e.what()});
      }
    }
  };
  per_destination("launch_cost", [&](Destination d, const Json& v, const std::string& p) {
    RoadmapCurve curve;
    ObjectReader r(v, p, errors);
    detail::read_curve(r, curve, Metric::launch_cost_eur_per_kg, false);
    rm.launch_cost[d] = curve;
  });
  per_destination("bus_mass_kg", [&](Destination d, const Json& v, const std::string& p) {
    if (!v.is_number() || v.get<double>() < 0.0) return errors.push_back({p, "expected a number >= 0"});
    rm.bus_mass_kg[d] = v.get<double>();
  });
  top.number("integration_cost_eur", rm.integration_cost_eur, [](double x) { return x >= 0.0; }, ">= 0");
  top.finish();
  if (!errors.empty()) throw ValidationError(errors);
  return rm;
}

// Flat listing used by the HTTP service.
inline Json roadmap_listing(const RoadmapSet& rm) {
  Json curves = Json::array();
  for (const auto& [type, c] : rm.compute) {
    const std::string t(to_string(type));
    Json eff = to_json(c.efficiency.curve);
    eff["name"] = t + ".efficiency";
    eff["power_exponent"] = c.efficiency.power_exponent;
    eff["ref_power_W"] = c.efficiency.ref_power_W;
    curves.push_back(eff);
    Json den = to_json(c.density);
    den["name"] = t + ".density";
    curves.push_back(den);
    Json hw = to_json(c.hardware_cost);
    hw["name"] = t + ".hardware_cost";
    curves.push_back(hw);
  }
  Json psm = to_json(rm.power_specific_mass);
  psm["name"] = "power_specific_mass";
  curves.push_back(psm);
  for (const auto& [d, c] : rm.launch_cost) {
    Json l = to_json(c);
    l["name"] = "launch_cost." + std::string(to_string(d));
    curves.push_back(l);
  }
  return curves;
}

}  // namespace forecast

// ---------------------------------------------------------------------------
// workload

namespace workload {

inline Json to_json(const WorkloadDemand& d) {
  return Json{{"data_rate_MBps", d.data_rate_MBps},
              {"aggregate_data_rate_MBps", d.aggregate_data_rate_MBps},
              {"compute_GFLOPS", d.compute_GFLOPS},
              {"aggregate_compute_GFLOPS", d.aggregate_compute_GFLOPS}};
}

inline Json to_json(const WorkloadSummary& s) {
  return Json{{"primary", to_json(s.primary)},
              {"detail", s.detail ? to_json(*s.detail) : Json(nullptr)},
              {"combined_compute_GFLOPS", s.combined_compute_GFLOPS},
              {"required_compute_TFLOPS", s.required_compute_TFLOPS}};
}

// Object-sized workloads have no imaging geometry; those keys are omitted.
inline Json to_json(const ImagingWorkload& w, const std::string& preset) {
  Json j{{"preset", preset},
         {"swath_km", w.swath_km},
         {"ground_resolution_m", w.ground_resolution_m},
         {"channels", w.channels},
         {"bits_per_channel", w.bits_per_channel},
         {"acquisition_or_recurrence_s", w.acquisition_or_recurrence_s},
         {"intensity", Json{{"min", w.intensity.min}, {"mean", w.intensity.mean}, {"max", w.intensity.max}}},
         {"n_sources", w.n_sources},
         {"object_size_MB", optional_json(w.object_size_MB)},
         {"detail_resolution_m", optional_json(w.detail_resolution_m)},
         {"roi_fraction", w.roi_fraction}};
  if (!(w.swath_km > 0.0)) j.erase("swath_km");
  if (!(w.ground_resolution_m > 0.0)) j.erase("ground_resolution_m");
  return j;
}

// A "preset" key seeds every field from the named preset; explicit keys
// override it.
inline ImagingWorkload read_workload(ObjectReader& r, std::string& preset, std::vector<FieldError>& errors) {
  ImagingWorkload w;
  preset.clear();
  r.string("preset", preset);
  if (!preset.empty()) {
    if (auto p = workload_preset(preset))
      w = *p;
    else
      r.error(r.child_path("preset"), "unknown workload preset '" + preset + "'");
  }
  auto pos = [](double x) { return x > 0.0; };
  r.number("swath_km", w.swath_km, pos, "> 0");
  r.number("ground_resolution_m", w.ground_resolution_m, pos, "> 0");
  r.integer("channels", w.channels, [](int x) { return x > 0; }, "> 0");
  r.integer("bits_per_channel", w.bits_per_channel, [](int x) { return x > 0; }, "> 0");
  r.number("acquisition_or_recurrence_s", w.acquisition_or_recurrence_s, pos, "> 0");
  if (const Json* in = r.child("intensity")) {
    ObjectReader ri(*in, r.child_path("intensity"), errors);
    ri.number("min", w.intensity.min, pos, "> 0");
    ri.number("mean", w.intensity.mean, pos, "> 0");
    ri.number("max", w.intensity.max, pos, "> 0");
    ri.finish();
    if (!(w.intensity.min <= w.intensity.mean && w.intensity.mean <= w.intensity.max))
      r.error(r.child_path("intensity"), "must satisfy min <= mean <= max");
  }
  r.integer("n_sources", w.n_sources, [](int x) { return x > 0; }, "> 0");
  r.optional_number("object_size_MB", w.object_size_MB, [](double x) { return x >= 0.0; }, ">= 0");
  r.optional_number("detail_resolution_m", w.detail_resolution_m, pos, "> 0");
  r.number("roi_fraction", w.roi_fraction, [](double x) { return x >= 0.0 && x <= 1.0; }, "in [0, 1]");
  r.finish();
  return w;
}

}  // namespace workload

}  // namespace sdc
