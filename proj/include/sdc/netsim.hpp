#pragma once

// Time-varying network graph built from per-epoch snapshots, minimum-latency
// routing over links that are up, outage/buffer accounting and router roles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sdc/astro.hpp"
#include "sdc/isl.hpp"

namespace sdc::netsim {

using astro::SatId;
using isl::DirectedLink;
using isl::LinkStatus;

inline constexpr double kSpeedOfLightKms = 299792.458;

struct Edge {
  int from = 0;
  int to = 0;
  DirectedLink link;
  double range_km = 0.0;
  double weight_s = 0.0;  // propagation delay plus per-hop processing delay
  LinkStatus status = LinkStatus::up;

  bool routable() const { return status == LinkStatus::up; }
  // Feasible from geometry alone, i.e. blocked by nothing but the Sun.
  bool geometric() const { return status == LinkStatus::up || status == LinkStatus::sun_blocked; }
};

struct TopologySnapshot {
  astro::Epoch epoch;
  std::vector<SatId> nodes;  // sorted
  std::vector<Edge> edges;

  int index_of(const SatId& id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) return -1;
    return static_cast<int>(it - nodes.begin());
  }

  Edge* find_edge(const SatId& tx, const SatId& rx) {
    for (auto& e : edges)
      if (e.link.tx == tx && e.link.rx == rx) return &e;
    return nullptr;
  }

  // Overrides the status of one directed edge; used to inject outages.
  void set_status(const SatId& tx, const SatId& rx, LinkStatus status) {
    Edge* e = find_edge(tx, rx);
    if (e == nullptr) throw std::out_of_range("no edge " + astro::to_string(tx) + "->" + astro::to_string(rx));
    e->status = status;
  }
};

inline TopologySnapshot snapshot(const astro::Fleet& fleet, const astro::Epoch& epoch, const astro::SunModel& sun,
                                 const isl::LinkParams& params, double per_hop_delay_s = 0.0) {
  TopologySnapshot snap;
  snap.epoch = epoch;
  for (const auto& s : fleet.propagate(epoch)) snap.nodes.push_back(s.id);
  std::sort(snap.nodes.begin(), snap.nodes.end());
  for (const auto& link : isl::neighbor_topology(fleet, epoch, params)) {
    const auto sample = isl::sample_link(fleet, link, epoch, sun, params);
    Edge e;
    e.from = snap.index_of(link.tx);
    e.to = snap.index_of(link.rx);
    e.link = link;
    e.range_km = sample.range_km;
    e.weight_s = sample.range_km / kSpeedOfLightKms + per_hop_delay_s;
    e.status = sample.status;
    snap.edges.push_back(e);
  }
  return snap;
}

struct RouteResult {
  bool reachable = false;
  std::vector<SatId> path;
  double total_latency_s = 0.0;
  int hop_count = 0;
  bool blocked_detour = false;
  // Sun-blocked edges on the geometry-only shortest path.
  std::vector<DirectedLink> blocked_edges;
};

namespace detail {

inline constexpr double kLatencyTieTolerance = 1e-12;

struct PathLabel {
  double latency = std::numeric_limits<double>::infinity();
  std::vector<int> path;
  bool settled = false;
};

// True when (la, pa) beats (lb, pb): lower latency, ties broken by the
// lexicographically smaller node sequence.
inline bool better(double la, const std::vector<int>& pa, double lb, const std::vector<int>& pb) {
  if (la < lb - kLatencyTieTolerance) return true;
  if (lb < la - kLatencyTieTolerance) return false;
  return pa < pb;
}

template <typename EdgeFilter>
std::optional<std::pair<double, std::vector<int>>> shortest_path(const TopologySnapshot& snap, int src, int dst,
                                                                 EdgeFilter usable) {
  const std::size_t n = snap.nodes.size();
  std::vector<std::vector<const Edge*>> out(n);
  for (const auto& e : snap.edges)
    if (usable(e)) out[static_cast<std::size_t>(e.from)].push_back(&e);

  std::vector<PathLabel> label(n);
  label[static_cast<std::size_t>(src)].latency = 0.0;
  label[static_cast<std::size_t>(src)].path = {src};
  for (;;) {
    int u = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& l = label[i];
      if (l.settled || !std::isfinite(l.latency)) continue;
      if (u < 0 || better(l.latency, l.path, label[static_cast<std::size_t>(u)].latency,
                          label[static_cast<std::size_t>(u)].path))
        u = static_cast<int>(i);
    }
    if (u < 0) break;
    auto& lu = label[static_cast<std::size_t>(u)];
    lu.settled = true;
    if (u == dst) return std::make_pair(lu.latency, lu.path);
    for (const Edge* e : out[static_cast<std::size_t>(u)]) {
      auto& lv = label[static_cast<std::size_t>(e->to)];
      if (lv.settled) continue;
      const double cand = lu.latency + e->weight_s;
      auto cand_path = lu.path;
      cand_path.push_back(e->to);
      if (better(cand, cand_path, lv.latency, lv.path)) {
        lv.latency = cand;
        lv.path = std::move(cand_path);
      }
    }
  }
  return std::nullopt;
}

inline const Edge* edge_between(const TopologySnapshot& snap, int from, int to, bool geometric_only) {
  const Edge* best = nullptr;
  for (const auto& e : snap.edges) {
    if (e.from != from || e.to != to) continue;
    if (geometric_only ? !e.geometric() : !e.routable()) continue;
    if (best == nullptr || e.weight_s < best->weight_s) best = &e;
  }
  return best;
}

}  // namespace detail

// Minimum-latency route over up edges. An unreachable destination is a result,
// not an error.
inline RouteResult route(const TopologySnapshot& snap, const SatId& src, const SatId& dst) {
  const int s = snap.index_of(src);
  const int d = snap.index_of(dst);
  if (s < 0 || d < 0) throw std::out_of_range("route endpoint not in snapshot");
  RouteResult r;
  if (s == d) {
    r.reachable = true;
    return r;
  }

  const auto best = detail::shortest_path(snap, s, d, [](const Edge& e) { return e.routable(); });
  const auto geo = detail::shortest_path(snap, s, d, [](const Edge& e) { return e.geometric(); });

  if (geo) {
    const auto& gp = geo->second;
    for (std::size_t i = 0; i + 1 < gp.size(); ++i) {
      if (detail::edge_between(snap, gp[i], gp[i + 1], false) == nullptr) {
        const Edge* e = detail::edge_between(snap, gp[i], gp[i + 1], true);
        r.blocked_edges.push_back(e->link);
      }
    }
  }
  if (!best) return r;

  r.reachable = true;
  r.total_latency_s = best->first;
  for (int i : best->second) r.path.push_back(snap.nodes[static_cast<std::size_t>(i)]);
  r.hop_count = static_cast<int>(r.path.size()) - 1;
  r.blocked_detour = !r.blocked_edges.empty();
  return r;
}

// Every node reaches every other over up edges.
inline bool strongly_connected(const TopologySnapshot& snap) {
  const std::size_t n = snap.nodes.size();
  if (n <= 1) return true;
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (const auto& e : snap.edges) {
    if (!e.routable()) continue;
    fwd[static_cast<std::size_t>(e.from)].push_back(e.to);
    rev[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  auto reach_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[static_cast<std::size_t>(u)])
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          ++count;
          stack.push_back(v);
        }
    }
    return count == n;
  };
  return reach_all(fwd) && reach_all(rev);
}

struct LatencyStats {
  double max_latency_s = 0.0;
  double min_latency_s = 0.0;
  double mean_latency_s = 0.0;
  double unreachable_fraction = 0.0;
  std::size_t epochs = 0;
  double worst_epoch_t = 0.0;
  RouteResult worst_route;
};

inline LatencyStats worst_case_latency(const astro::Fleet& fleet, const SatId& src, const SatId& dst,
                                       const astro::TimeGrid& grid, const astro::SunModel& sun,
                                       const isl::LinkParams& params, double per_hop_delay_s = 0.0) {
  const std::size_t n = grid.size();
  if (n == 0) throw std::invalid_argument("latency sweep needs a non-empty grid");
  LatencyStats st;
  st.epochs = n;
  std::size_t reachable = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto snap = snapshot(fleet, grid.epoch(k), sun, params, per_hop_delay_s);
    auto r = route(snap, src, dst);
    if (!r.reachable) continue;
    if (reachable == 0 || r.total_latency_s > st.max_latency_s) {
      st.max_latency_s = r.total_latency_s;
      st.worst_epoch_t = grid.time(k);
      st.worst_route = r;
    }
    st.min_latency_s = reachable == 0 ? r.total_latency_s : std::min(st.min_latency_s, r.total_latency_s);
    sum += r.total_latency_s;
    ++reachable;
  }
  st.unreachable_fraction = static_cast<double>(n - reachable) / static_cast<double>(n);
  st.mean_latency_s = reachable > 0 ? sum / static_cast<double>(reachable) : 0.0;
  return st;
}

struct LinkOutage {
  DirectedLink link;
  double max_contiguous_outage_s = 0.0;
  double outage_fraction = 0.0;
  double required_buffer_MB = 0.0;
};

struct OutageReport {
  double stream_rate_MBps = 0.0;
  std::vector<LinkOutage> links;
};

// Buffer needed to ride out the longest outage of each link at a given rate.
inline OutageReport buffer_requirements(const std::vector<isl::ContactIntervals>& contacts, double stream_rate_MBps) {
  if (!(stream_rate_MBps >= 0.0)) throw std::invalid_argument("stream rate must be >= 0");
  OutageReport rep;
  rep.stream_rate_MBps = stream_rate_MBps;
  rep.links.reserve(contacts.size());
  for (const auto& c : contacts) {
    LinkOutage o;
    o.link = c.link;
    o.max_contiguous_outage_s = c.max_contiguous_outage_s();
    o.outage_fraction = std::clamp(c.outage_fraction(), 0.0, 1.0);
    o.required_buffer_MB = stream_rate_MBps * o.max_contiguous_outage_s;
    rep.links.push_back(o);
  }
  return rep;
}

struct RouterRole {
  SatId node;
  int quasi_static_degree = 0;
  int dynamic_degree = 0;
};

// Outgoing edges that persist (ignoring Sun outages) for at least
// `persistence_threshold` of the horizon are quasi-static, others dynamic.
inline std::vector<RouterRole> classify_routers(const astro::Fleet& fleet, const astro::TimeGrid& grid,
                                                const isl::LinkParams& params, double persistence_threshold = 0.9) {
  const std::size_t n = grid.size();
  if (n == 0) throw std::invalid_argument("router classification needs a non-empty grid");
  const astro::SunModel no_sun = astro::SunModel::fixed_direction(astro::Vec3::UnitX());
  isl::LinkParams geometric = params;
  geometric.exclusion_angle_deg = 0.0;

  std::map<std::pair<SatId, SatId>, double> present_s;
  for (std::size_t k = 0; k < n; ++k) {
    const auto epoch = grid.epoch(k);
    for (const auto& link : isl::neighbor_topology(fleet, epoch, params)) {
      const auto s = isl::sample_link(fleet, link, epoch, no_sun, geometric);
      if (s.status == LinkStatus::up) present_s[{link.tx, link.rx}] += grid.span(k);
    }
  }

  std::map<SatId, RouterRole> roles;
  for (const auto& s : fleet.propagate(grid.epoch(0))) roles[s.id].node = s.id;
  for (const auto& [key, t] : present_s) {
    auto& role = roles[key.first];
    role.node = key.first;
    if (t / grid.horizon_s >= persistence_threshold - 1e-12)
      ++role.quasi_static_degree;
    else
      ++role.dynamic_degree;
  }
  std::vector<RouterRole> out;
  out.reserve(roles.size());
  for (auto& [id, r] : roles) out.push_back(r);
  return out;
}

}  // namespace sdc::netsim
