#pragma once

// Time handling, Sun direction, circular two-body propagation and
// constellation construction. All geometry is in an Earth-centred inertial
// frame with kilometres and seconds.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/errors.hpp"

namespace sdc::astro {

using Vec3 = Eigen::Vector3d;

inline constexpr double kMuEarth = 398600.4418;       // km^3/s^2
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kObliquityDeg = 23.44;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerYear = 365.25;
inline constexpr double kEquinoxDayOfYear = 80.0;
inline constexpr double kGeoRadiusKm = 42164.0;
inline constexpr double kLunarDistanceKm = 384400.0;

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct Epoch {
  double t = 0.0;            // seconds since scenario epoch
  int day_of_year = 80;      // anchors the Sun model

  void validate() const {
    if (!std::isfinite(t)) throw std::domain_error("epoch time must be finite");
    if (day_of_year < 1 || day_of_year > 365)
      throw std::domain_error("day_of_year must lie in [1, 365]");
  }
};

// Fixed-step sampling grid. Sample k sits at t = k * step and stands for the
// half-open span [t, t + step), so a grid with step == horizon has one epoch.
struct TimeGrid {
  int start_day_of_year = 80;
  double horizon_s = 5730.0;
  double step_s = 10.0;

  void validate() const {
    if (!(step_s > 0.0) || !std::isfinite(step_s)) throw std::domain_error("time grid step must be > 0");
    if (!(horizon_s >= step_s) || !std::isfinite(horizon_s))
      throw std::domain_error("time grid horizon must be >= step");
    if (start_day_of_year < 1 || start_day_of_year > 365)
      throw std::domain_error("start_day_of_year must lie in [1, 365]");
  }

  std::size_t size() const {
    if (!(step_s > 0.0) || horizon_s <= 0.0) return 0;
    auto n = static_cast<std::size_t>(std::ceil(horizon_s / step_s - 1e-9));
    return n == 0 ? 1 : n;
  }
  double time(std::size_t k) const { return static_cast<double>(k) * step_s; }
  Epoch epoch(std::size_t k) const { return Epoch{time(k), start_day_of_year}; }
  // Duration covered by sample k (the last one may be clipped by the horizon).
  double span(std::size_t k) const { return std::min(step_s, horizon_s - time(k)); }
};

struct OrbitPlane {
  double altitude_km = 550.0;
  double inclination_deg = 53.0;
  double raan_deg = 0.0;
  int n_sats = 10;
};

struct FixedNode {
  std::string name;
  Vec3 position_km = Vec3::Zero();
};

struct Constellation {
  std::vector<OrbitPlane> planes;
  std::vector<double> phase_offsets_deg;  // one per plane
  std::vector<FixedNode> fixed;           // non-orbiting placeholders

  std::size_t size() const {
    std::size_t n = fixed.size();
    for (const auto& p : planes) n += static_cast<std::size_t>(p.n_sats);
    return n;
  }
  bool empty() const { return size() == 0; }

  void validate() const {
    if (phase_offsets_deg.size() != planes.size())
      throw ConfigError("phase_offsets_deg must have one entry per plane");
    for (const auto& p : planes) {
      if (!(p.altitude_km > 0.0)) throw ConfigError("plane altitude must be > 0");
      if (p.inclination_deg < 0.0 || p.inclination_deg > 180.0)
        throw ConfigError("plane inclination must lie in [0, 180]");
      if (p.raan_deg < 0.0 || p.raan_deg >= 360.0) throw ConfigError("plane raan must lie in [0, 360)");
      if (p.n_sats <= 0) throw ConfigError("plane must hold at least one satellite");
    }
  }
};

enum class NodeRole { sdc, client };

// plane == -1 addresses a FixedNode by its index in `slot`.
struct SatId {
  NodeRole role = NodeRole::sdc;
  int plane = 0;
  int slot = 0;

  auto operator<=>(const SatId&) const = default;
};

inline std::string to_string(const SatId& id) {
  char buf[32];
  const char prefix = id.role == NodeRole::sdc ? 'S' : 'C';
  if (id.plane < 0)
    std::snprintf(buf, sizeof buf, "%cF.%02d", prefix, id.slot);
  else
    std::snprintf(buf, sizeof buf, "%c%02d.%02d", prefix, id.plane, id.slot);
  return buf;
}

// Inverse of to_string: "S03.07", "C00.01", "CF.02".
inline SatId parse_sat_id(std::string_view text) {
  auto fail = [&] { return ConfigError("malformed node id '" + std::string(text) + "'"); };
  if (text.size() < 4 || (text[0] != 'S' && text[0] != 'C')) throw fail();
  SatId id;
  id.role = text[0] == 'S' ? NodeRole::sdc : NodeRole::client;
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot + 1 >= text.size()) throw fail();
  auto to_int = [&](std::string_view s) {
    if (s.empty()) throw fail();
    int v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') throw fail();
      v = v * 10 + (c - '0');
    }
    return v;
  };
  const auto plane_part = text.substr(1, dot - 1);
  id.plane = plane_part == "F" ? -1 : to_int(plane_part);
  id.slot = to_int(text.substr(dot + 1));
  return id;
}

struct SatelliteState {
  SatId id;
  Vec3 position_eci_km = Vec3::Zero();
  Vec3 velocity_eci_kms = Vec3::Zero();
};

inline double orbit_radius(double altitude_km) {
  if (!(altitude_km > 0.0) || !std::isfinite(altitude_km))
    throw std::domain_error("altitude must be positive");
  return kEarthRadiusKm + altitude_km;
}

inline double period_for_radius(double radius_km) {
  return 2.0 * std::numbers::pi * std::sqrt(radius_km * radius_km * radius_km / kMuEarth);
}

inline double orbital_period(double altitude_km) { return period_for_radius(orbit_radius(altitude_km)); }

inline double orbital_speed(double altitude_km) { return std::sqrt(kMuEarth / orbit_radius(altitude_km)); }

// Argument of latitude (radians, in [0, 2pi)) of a slot at time t.
inline double argument_of_latitude(const Constellation& c, int plane, int slot, double t) {
  const auto& p = c.planes.at(static_cast<std::size_t>(plane));
  const double period = orbital_period(p.altitude_km);
  const double revs = std::fmod(t, period) / period;
  const double deg = c.phase_offsets_deg.at(static_cast<std::size_t>(plane)) +
                     360.0 * static_cast<double>(slot) / p.n_sats + 360.0 * revs;
  double rad = deg2rad(std::fmod(deg, 360.0));
  if (rad < 0.0) rad += 2.0 * std::numbers::pi;
  return rad;
}

// Unit vector of a circular orbit plane at argument of latitude u.
inline Vec3 in_plane_direction(const OrbitPlane& p, double u) {
  const double raan = deg2rad(p.raan_deg);
  const double inc = deg2rad(p.inclination_deg);
  const double cO = std::cos(raan), sO = std::sin(raan);
  const double ci = std::cos(inc), si = std::sin(inc);
  const double cu = std::cos(u), su = std::sin(u);
  return {cO * cu - sO * su * ci, sO * cu + cO * su * ci, su * si};
}

inline Vec3 plane_normal(const OrbitPlane& p) {
  const double raan = deg2rad(p.raan_deg);
  const double inc = deg2rad(p.inclination_deg);
  return {std::sin(inc) * std::sin(raan), -std::sin(inc) * std::cos(raan), std::cos(inc)};
}

inline SatelliteState state_of(const Constellation& c, const SatId& id, const Epoch& epoch) {
  SatelliteState s;
  s.id = id;
  if (id.plane < 0) {
    s.position_eci_km = c.fixed.at(static_cast<std::size_t>(id.slot)).position_km;
    return s;
  }
  const auto& p = c.planes.at(static_cast<std::size_t>(id.plane));
  const double a = orbit_radius(p.altitude_km);
  const double v = std::sqrt(kMuEarth / a);
  const double u = argument_of_latitude(c, id.plane, id.slot, epoch.t);
  s.position_eci_km = a * in_plane_direction(p, u);
  s.velocity_eci_kms = v * in_plane_direction(p, u + std::numbers::pi / 2.0);
  return s;
}

// States of every node, plane-major then fixed nodes.
inline std::vector<SatelliteState> propagate(const Constellation& c, const Epoch& epoch,
                                             NodeRole role = NodeRole::sdc) {
  epoch.validate();
  std::vector<SatelliteState> out;
  out.reserve(c.size());
  for (int pi = 0; pi < static_cast<int>(c.planes.size()); ++pi)
    for (int s = 0; s < c.planes[static_cast<std::size_t>(pi)].n_sats; ++s)
      out.push_back(state_of(c, SatId{role, pi, s}, epoch));
  for (int f = 0; f < static_cast<int>(c.fixed.size()); ++f) out.push_back(state_of(c, SatId{role, -1, f}, epoch));
  return out;
}

// Circular-ecliptic Sun model.
inline Vec3 sun_direction(const Epoch& epoch) {
  const double days = epoch.day_of_year + epoch.t / kSecondsPerDay - kEquinoxDayOfYear;
  const double lon = 2.0 * std::numbers::pi * days / kDaysPerYear;
  const double eps = deg2rad(kObliquityDeg);
  Vec3 v{std::cos(lon), std::cos(eps) * std::sin(lon), std::sin(eps) * std::sin(lon)};
  return v.normalized();
}

// Either the ecliptic model or a frozen direction (for controlled geometry).
struct SunModel {
  enum class Kind { ecliptic, fixed };
  Kind kind = Kind::ecliptic;
  Vec3 direction = Vec3::UnitX();

  static SunModel ecliptic() { return {}; }
  static SunModel fixed_direction(const Vec3& d) {
    if (!(d.norm() > 0.0)) throw ConfigError("fixed Sun direction must be non-zero");
    return {Kind::fixed, d.normalized()};
  }

  Vec3 at(const Epoch& epoch) const { return kind == Kind::ecliptic ? sun_direction(epoch) : direction; }
};

struct SdcConstellationConfig {
  int planes = 20;
  int sats_per_plane = 10;
  double inclination_deg = 53.0;
  double altitude_km = 550.0;
  double raan_spread_deg = 360.0;
  int walker_phasing = 0;  // Walker F: plane p is advanced by 360 F p / total
};

inline Constellation build_sdc_constellation(const SdcConstellationConfig& cfg) {
  if (cfg.planes <= 0) throw ConfigError("constellation needs at least one plane");
  if (cfg.sats_per_plane <= 0) throw ConfigError("constellation needs at least one satellite per plane");
  if (!(cfg.altitude_km > 0.0)) throw ConfigError("constellation altitude must be > 0");
  if (!(cfg.raan_spread_deg > 0.0) || cfg.raan_spread_deg > 360.0)
    throw ConfigError("raan_spread_deg must lie in (0, 360]");
  Constellation c;
  const double total = static_cast<double>(cfg.planes) * cfg.sats_per_plane;
  for (int p = 0; p < cfg.planes; ++p) {
    const double raan = std::fmod(cfg.raan_spread_deg * p / cfg.planes, 360.0);
    c.planes.push_back(OrbitPlane{cfg.altitude_km, cfg.inclination_deg, raan, cfg.sats_per_plane});
    c.phase_offsets_deg.push_back(std::fmod(360.0 * cfg.walker_phasing * p / total, 360.0));
  }
  c.validate();
  return c;
}

enum class ClientKind { none, leo_pair, leo_ring, geo, lunar_surface };

inline ClientKind parse_client_kind(std::string_view tag) {
  if (tag == "none") return ClientKind::none;
  if (tag == "leo_pair") return ClientKind::leo_pair;
  if (tag == "leo_ring") return ClientKind::leo_ring;
  if (tag == "geo") return ClientKind::geo;
  if (tag == "lunar_surface") return ClientKind::lunar_surface;
  throw ConfigError("unsupported client destination '" + std::string(tag) + "'");
}

inline std::string_view to_string(ClientKind k) {
  switch (k) {
    case ClientKind::none: return "none";
    case ClientKind::leo_pair: return "leo_pair";
    case ClientKind::leo_ring: return "leo_ring";
    case ClientKind::geo: return "geo";
    case ClientKind::lunar_surface: return "lunar_surface";
  }
  return "none";
}

struct ClientConfig {
  ClientKind kind = ClientKind::none;
  int count = 0;
  double altitude_km = 800.0;
  double inclination_deg = 98.6;
  double raan_deg = 0.0;
  double separation_deg = 2.0;  // leo_pair: lead of the scout over the mothership
  double lunar_distance_km = kLunarDistanceKm;
};

// Client satellites. A leo_pair is two single-slot planes sharing one orbit,
// offset in anomaly by `separation_deg` (slot of plane 0 = scout).
inline Constellation build_client(const ClientConfig& cfg) {
  Constellation c;
  switch (cfg.kind) {
    case ClientKind::none:
      break;
    case ClientKind::leo_pair: {
      const OrbitPlane p{cfg.altitude_km, cfg.inclination_deg, cfg.raan_deg, 1};
      c.planes = {p, p};
      c.phase_offsets_deg = {cfg.separation_deg, 0.0};
      break;
    }
    case ClientKind::leo_ring:
      if (cfg.count <= 0) throw ConfigError("leo_ring clients need count > 0");
      c.planes = {OrbitPlane{cfg.altitude_km, cfg.inclination_deg, cfg.raan_deg, cfg.count}};
      c.phase_offsets_deg = {0.0};
      break;
    case ClientKind::geo:
      if (cfg.count <= 0) throw ConfigError("geo clients need count > 0");
      c.planes = {OrbitPlane{kGeoRadiusKm - kEarthRadiusKm, 0.0, cfg.raan_deg, cfg.count}};
      c.phase_offsets_deg = {0.0};
      break;
    case ClientKind::lunar_surface:
      if (cfg.count <= 0) throw ConfigError("lunar_surface clients need count > 0");
      if (!(cfg.lunar_distance_km > 0.0)) throw ConfigError("lunar distance must be > 0");
      for (int i = 0; i < cfg.count; ++i)
        c.fixed.push_back(FixedNode{"rover" + std::to_string(i), Vec3(cfg.lunar_distance_km, 0.0, 0.0)});
      break;
  }
  c.validate();
  return c;
}

// SDC nodes plus their clients.
struct Fleet {
  Constellation sdc;
  Constellation clients;

  SatelliteState state(const SatId& id, const Epoch& epoch) const {
    return state_of(id.role == NodeRole::sdc ? sdc : clients, id, epoch);
  }
  std::vector<SatelliteState> propagate(const Epoch& epoch) const {
    auto out = astro::propagate(sdc, epoch, NodeRole::sdc);
    auto cl = astro::propagate(clients, epoch, NodeRole::client);
    out.insert(out.end(), cl.begin(), cl.end());
    return out;
  }
};

}  // namespace sdc::astro
