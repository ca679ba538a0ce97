#pragma once

// Directed free-space optical link geometry, solar stray-light blocking and
// contact-interval extraction.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/astro.hpp"

namespace sdc::isl {

using astro::SatId;
using astro::Vec3;

enum class LinkKind { intra_ring, inter_ring, client_access, ground };
enum class LinkStatus { up, sun_blocked, out_of_range, occluded };

// receiver_only: only the receiving terminal is checked against the Sun.
// sda_strict: both terminals must clear the exclusion cone.
enum class BlockingPolicy { receiver_only, sda_strict };

inline std::string_view to_string(LinkKind k) {
  switch (k) {
    case LinkKind::intra_ring: return "intra_ring";
    case LinkKind::inter_ring: return "inter_ring";
    case LinkKind::client_access: return "client_access";
    case LinkKind::ground: return "ground";
  }
  return "intra_ring";
}

inline std::string_view to_string(LinkStatus s) {
  switch (s) {
    case LinkStatus::up: return "up";
    case LinkStatus::sun_blocked: return "sun_blocked";
    case LinkStatus::out_of_range: return "out_of_range";
    case LinkStatus::occluded: return "occluded";
  }
  return "up";
}

inline std::string_view to_string(BlockingPolicy p) {
  return p == BlockingPolicy::receiver_only ? "receiver_only" : "sda_strict";
}

inline BlockingPolicy parse_policy(std::string_view tag) {
  if (tag == "receiver_only") return BlockingPolicy::receiver_only;
  if (tag == "sda_strict") return BlockingPolicy::sda_strict;
  throw ConfigError("unknown link policy '" + std::string(tag) + "'");
}

struct LinkParams {
  BlockingPolicy policy = BlockingPolicy::receiver_only;
  double exclusion_angle_deg = 30.0;
  double max_range_km = 6000.0;
  double grazing_margin_km = 100.0;
  int inter_ring_per_side = 1;
  double client_access_max_range_km = 6000.0;
};

struct DirectedLink {
  SatId tx;
  SatId rx;
  LinkKind kind = LinkKind::intra_ring;

  bool operator==(const DirectedLink&) const = default;
};

inline std::string link_id(const DirectedLink& l) { return to_string(l.tx) + "->" + to_string(l.rx); }

struct DirectedLinkSample {
  double t = 0.0;
  double range_km = 0.0;
  double rx_boresight_sun_angle_deg = 0.0;
  double tx_boresight_sun_angle_deg = 0.0;
  bool occluded = false;
  LinkStatus status = LinkStatus::up;
};

// Distance from the geocentre to the closest point of segment [a, b].
inline double segment_closest_approach(const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return a.norm();
  const double s = std::clamp(-a.dot(d) / len2, 0.0, 1.0);
  return (a + s * d).norm();
}

inline double angle_between_deg(const Vec3& u, const Vec3& v) {
  return astro::rad2deg(std::acos(std::clamp(u.dot(v), -1.0, 1.0)));
}

// Open cone: an angle of exactly the threshold is not blocked.
inline bool is_sun_blocked(const DirectedLinkSample& s, BlockingPolicy policy, double threshold_deg = 30.0) {
  if (policy == BlockingPolicy::receiver_only) return s.rx_boresight_sun_angle_deg < threshold_deg;
  return std::min(s.rx_boresight_sun_angle_deg, s.tx_boresight_sun_angle_deg) < threshold_deg;
}

inline DirectedLinkSample link_geometry(const Vec3& tx_pos, const Vec3& rx_pos, const Vec3& sun,
                                        const LinkParams& params = {}, double max_range_km = -1.0) {
  const Vec3 d = rx_pos - tx_pos;
  const double range = d.norm();
  if (!(range > 0.0)) throw std::domain_error("link endpoints coincide");
  const Vec3 tx_boresight = d / range;
  const Vec3 rx_boresight = -tx_boresight;
  const Vec3 sun_unit = sun.normalized();

  DirectedLinkSample s;
  s.range_km = range;
  s.rx_boresight_sun_angle_deg = angle_between_deg(rx_boresight, sun_unit);
  s.tx_boresight_sun_angle_deg = angle_between_deg(tx_boresight, sun_unit);
  s.occluded = segment_closest_approach(tx_pos, rx_pos) < astro::kEarthRadiusKm + params.grazing_margin_km;
  const double limit = max_range_km > 0.0 ? max_range_km : params.max_range_km;
  if (s.occluded)
    s.status = LinkStatus::occluded;
  else if (range > limit)
    s.status = LinkStatus::out_of_range;
  else if (is_sun_blocked(s, params.policy, params.exclusion_angle_deg))
    s.status = LinkStatus::sun_blocked;
  else
    s.status = LinkStatus::up;
  return s;
}

inline double range_limit(LinkKind kind, const LinkParams& params) {
  return kind == LinkKind::client_access ? params.client_access_max_range_km : params.max_range_km;
}

inline DirectedLinkSample sample_link(const astro::Fleet& fleet, const DirectedLink& link,
                                      const astro::Epoch& epoch, const astro::SunModel& sun,
                                      const LinkParams& params) {
  auto s = link_geometry(fleet.state(link.tx, epoch).position_eci_km, fleet.state(link.rx, epoch).position_eci_km,
                         sun.at(epoch), params, range_limit(link.kind, params));
  s.t = epoch.t;
  return s;
}

// Links available at one epoch from pure geometry (the Sun plays no part in
// selection). Intra-ring links are structural and always listed; inter-ring
// and client-access links go to the nearest visible in-range partner.
inline std::vector<DirectedLink> neighbor_topology(const astro::Fleet& fleet, const astro::Epoch& epoch,
                                                   const LinkParams& params) {
  std::vector<DirectedLink> links;
  const auto& sdc = fleet.sdc;
  const int n_planes = static_cast<int>(sdc.planes.size());
  using astro::NodeRole;

  for (int p = 0; p < n_planes; ++p) {
    const int n = sdc.planes[static_cast<std::size_t>(p)].n_sats;
    if (n < 2) continue;
    for (int s = 0; s < n; ++s) {
      const int next = (s + 1) % n;
      if (n == 2 && s == 1) break;
      links.push_back({SatId{NodeRole::sdc, p, s}, SatId{NodeRole::sdc, p, next}, LinkKind::intra_ring});
      links.push_back({SatId{NodeRole::sdc, p, next}, SatId{NodeRole::sdc, p, s}, LinkKind::intra_ring});
    }
  }

  const auto states = astro::propagate(sdc, epoch, NodeRole::sdc);
  std::vector<std::size_t> plane_start(static_cast<std::size_t>(n_planes) + 1, 0);
  for (int p = 0; p < n_planes; ++p)
    plane_start[static_cast<std::size_t>(p) + 1] =
        plane_start[static_cast<std::size_t>(p)] + static_cast<std::size_t>(sdc.planes[static_cast<std::size_t>(p)].n_sats);

  auto visible = [&](const Vec3& a, const Vec3& b, double limit) {
    const double r = (b - a).norm();
    return r > 0.0 && r <= limit &&
           segment_closest_approach(a, b) >= astro::kEarthRadiusKm + params.grazing_margin_km;
  };

  if (n_planes >= 2 && params.inter_ring_per_side > 0) {
    for (int p = 0; p < n_planes; ++p) {
      std::vector<int> sides{(p + n_planes - 1) % n_planes, (p + 1) % n_planes};
      std::sort(sides.begin(), sides.end());
      sides.erase(std::unique(sides.begin(), sides.end()), sides.end());
      for (std::size_t i = plane_start[static_cast<std::size_t>(p)]; i < plane_start[static_cast<std::size_t>(p) + 1]; ++i) {
        for (int q : sides) {
          std::vector<std::pair<double, std::size_t>> candidates;
          for (std::size_t j = plane_start[static_cast<std::size_t>(q)]; j < plane_start[static_cast<std::size_t>(q) + 1]; ++j) {
            const auto& a = states[i].position_eci_km;
            const auto& b = states[j].position_eci_km;
            if (visible(a, b, params.max_range_km)) candidates.emplace_back((b - a).norm(), j);
          }
          std::sort(candidates.begin(), candidates.end());
          const auto take = std::min(candidates.size(), static_cast<std::size_t>(params.inter_ring_per_side));
          for (std::size_t k = 0; k < take; ++k)
            links.push_back({states[i].id, states[candidates[k].second].id, LinkKind::inter_ring});
        }
      }
    }
  }

  if (!fleet.clients.empty() && !states.empty()) {
    const auto clients = astro::propagate(fleet.clients, epoch, NodeRole::client);
    for (const auto& c : clients) {
      double best = 0.0;
      const astro::SatelliteState* best_state = nullptr;
      for (const auto& s : states) {
        if (!visible(c.position_eci_km, s.position_eci_km, params.client_access_max_range_km)) continue;
        const double r = (s.position_eci_km - c.position_eci_km).norm();
        if (best_state == nullptr || r < best) {
          best = r;
          best_state = &s;
        }
      }
      if (best_state != nullptr) {
        links.push_back({c.id, best_state->id, LinkKind::client_access});
        links.push_back({best_state->id, c.id, LinkKind::client_access});
      }
    }
  }
  return links;
}

// Up spans are half-open [t_start, t_end) at grid resolution.
struct Interval {
  double t_start = 0.0;
  double t_end = 0.0;
};

struct ContactIntervals {
  DirectedLink link;
  double horizon_s = 0.0;
  std::vector<Interval> intervals;
  double up_time_s = 0.0;

  double outage_fraction() const { return horizon_s > 0.0 ? 1.0 - up_time_s / horizon_s : 0.0; }

  // Longest down span, counting the stretches before the first and after the
  // last up interval.
  double max_contiguous_outage_s() const {
    if (intervals.empty()) return horizon_s;
    double worst = intervals.front().t_start;
    for (std::size_t i = 1; i < intervals.size(); ++i)
      worst = std::max(worst, intervals[i].t_start - intervals[i - 1].t_end);
    return std::max(worst, horizon_s - intervals.back().t_end);
  }
};

// Merges per-sample up/down flags into intervals.
inline ContactIntervals merge_samples(const DirectedLink& link, const astro::TimeGrid& grid,
                                      const std::vector<bool>& up) {
  if (grid.size() == 0 || up.size() != grid.size()) throw std::invalid_argument("contact sweep needs a non-empty grid");
  ContactIntervals ci;
  ci.link = link;
  ci.horizon_s = grid.horizon_s;
  for (std::size_t k = 0; k < up.size(); ++k) {
    if (!up[k]) continue;
    const double t0 = grid.time(k);
    const double t1 = t0 + grid.span(k);
    ci.up_time_s += t1 - t0;
    if (!ci.intervals.empty() && ci.intervals.back().t_end == t0)
      ci.intervals.back().t_end = t1;
    else
      ci.intervals.push_back({t0, t1});
  }
  return ci;
}

inline ContactIntervals contact_intervals(const astro::Fleet& fleet, const DirectedLink& link,
                                          const astro::TimeGrid& grid, const astro::SunModel& sun,
                                          const LinkParams& params) {
  const std::size_t n = grid.size();
  if (n == 0) throw std::invalid_argument("contact sweep needs a non-empty grid");
  std::vector<bool> up(n);
  for (std::size_t k = 0; k < n; ++k)
    up[k] = sample_link(fleet, link, grid.epoch(k), sun, params).status == LinkStatus::up;
  return merge_samples(link, grid, up);
}

}  // namespace sdc::isl
