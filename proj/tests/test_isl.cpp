#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "sdc/isl.hpp"

using namespace sdc;
using namespace sdc::astro;
using namespace sdc::isl;

namespace {

// Dense sampling of the segment; exact enough to check the closed form.
double brute_closest(const Vec3& a, const Vec3& b) {
  double best = a.norm();
  const int n = 20000;
  for (int i = 0; i <= n; ++i) best = std::min(best, (a + (b - a) * (static_cast<double>(i) / n)).norm());
  return best;
}

Fleet default_fleet() { return Fleet{build_sdc_constellation({}), {}}; }

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

}  // namespace

TEST(Geometry, ClosestApproachMatchesSampling) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(6500.0, 8000.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 a = r(rng) * random_unit(rng);
    const Vec3 b = r(rng) * random_unit(rng);
    EXPECT_NEAR(segment_closest_approach(a, b), brute_closest(a, b), 0.5) << i;
  }
}

TEST(Geometry, ClosestApproachEndpointCases) {
  EXPECT_DOUBLE_EQ(segment_closest_approach(Vec3(7000, 0, 0), Vec3(8000, 0, 0)), 7000.0);
  EXPECT_DOUBLE_EQ(segment_closest_approach(Vec3(7000, -10, 0), Vec3(7000, 10, 0)), 7000.0);
  EXPECT_DOUBLE_EQ(segment_closest_approach(Vec3(7000, 0, 0), Vec3(7000, 0, 0)), 7000.0);
}

TEST(Geometry, OcclusionThresholdIncludesGrazingMargin) {
  // Chord between two points at radius r separated by angle 2*phi passes at r*cos(phi).
  const double r = 6921.0;
  const double limit = kEarthRadiusKm + 100.0;
  const double phi_edge = std::acos(limit / r);
  auto chord = [&](double phi) {
    return link_geometry(r * Vec3(std::cos(phi), std::sin(phi), 0), r * Vec3(std::cos(phi), -std::sin(phi), 0),
                         Vec3::UnitZ(), LinkParams{.max_range_km = 1e9});
  };
  EXPECT_FALSE(chord(phi_edge * 0.999).occluded);
  EXPECT_TRUE(chord(phi_edge * 1.001).occluded);
}

TEST(Blocking, ThresholdIsStrict) {
  DirectedLinkSample s;
  s.rx_boresight_sun_angle_deg = 30.0;
  s.tx_boresight_sun_angle_deg = 150.0;
  EXPECT_FALSE(is_sun_blocked(s, BlockingPolicy::receiver_only));
  s.rx_boresight_sun_angle_deg = 29.999;
  EXPECT_TRUE(is_sun_blocked(s, BlockingPolicy::receiver_only));
}

TEST(Blocking, StrictPolicyChecksTransmitterToo) {
  DirectedLinkSample s;
  s.rx_boresight_sun_angle_deg = 170.0;
  s.tx_boresight_sun_angle_deg = 10.0;
  EXPECT_FALSE(is_sun_blocked(s, BlockingPolicy::receiver_only));
  EXPECT_TRUE(is_sun_blocked(s, BlockingPolicy::sda_strict));
}

TEST(Blocking, ReceiverLookingIntoSun) {
  // Receiver at origin side looks back toward the transmitter at +x; the Sun is at +x.
  const auto s = link_geometry(Vec3(7000, 1000, 0), Vec3(7000, 0, 0), Vec3(0, 1, 0));
  EXPECT_NEAR(s.rx_boresight_sun_angle_deg, 0.0, 1e-9);
  EXPECT_NEAR(s.tx_boresight_sun_angle_deg, 180.0, 1e-9);
  EXPECT_EQ(s.status, LinkStatus::sun_blocked);
  const auto rev = link_geometry(Vec3(7000, 0, 0), Vec3(7000, 1000, 0), Vec3(0, 1, 0));
  EXPECT_EQ(rev.status, LinkStatus::up);
}

// A direction and its reverse have receiver angles summing to 180 degrees, so
// with any threshold at most 90 degrees they are never blocked together.
TEST(Blocking, AntiParallelNeverBothBlocked) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(0.0, 90.0);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 a = 7000.0 * random_unit(rng), b = 7000.0 * random_unit(rng), sun = random_unit(rng);
    if ((a - b).norm() < 1.0) continue;
    LinkParams p;
    p.exclusion_angle_deg = th(rng);
    const auto f = link_geometry(a, b, sun, p, 1e9);
    const auto r = link_geometry(b, a, sun, p, 1e9);
    EXPECT_NEAR(f.rx_boresight_sun_angle_deg + r.rx_boresight_sun_angle_deg, 180.0, 1e-9);
    EXPECT_FALSE(f.status == LinkStatus::sun_blocked && r.status == LinkStatus::sun_blocked) << i;
  }
}

TEST(Status, Precedence) {
  const Vec3 sun = Vec3::UnitX();
  // Antipodal: occluded even though also far out of range and looking into the Sun.
  EXPECT_EQ(link_geometry(Vec3(-7000, 0, 0), Vec3(7000, 0, 0), sun).status, LinkStatus::occluded);
  // Out of range beats Sun blocking.
  const auto far = link_geometry(Vec3(30000, 0, 20000), Vec3(30000, 0, 0), Vec3(0, 0, 1));
  EXPECT_LT(far.rx_boresight_sun_angle_deg, 30.0);
  EXPECT_EQ(far.status, LinkStatus::out_of_range);
  EXPECT_THROW(link_geometry(Vec3(7000, 0, 0), Vec3(7000, 0, 0), sun), std::domain_error);
}

TEST(Status, Names) {
  EXPECT_EQ(to_string(LinkStatus::sun_blocked), "sun_blocked");
  EXPECT_EQ(parse_policy("sda_strict"), BlockingPolicy::sda_strict);
  EXPECT_THROW(parse_policy("loose"), ConfigError);
}

TEST(Topology, DefaultCounts) {
  const auto links = neighbor_topology(default_fleet(), Epoch{}, LinkParams{});
  std::size_t intra = 0, inter = 0;
  std::set<std::pair<SatId, SatId>> seen;
  for (const auto& l : links) {
    EXPECT_TRUE(seen.insert({l.tx, l.rx}).second) << link_id(l);
    if (l.kind == LinkKind::intra_ring) {
      ++intra;
      EXPECT_EQ(l.tx.plane, l.rx.plane);
    } else if (l.kind == LinkKind::inter_ring) {
      ++inter;
      const int d = (l.rx.plane - l.tx.plane + 20) % 20;
      EXPECT_TRUE(d == 1 || d == 19) << link_id(l);
    }
  }
  EXPECT_EQ(intra, 400u);
  EXPECT_EQ(inter, 400u);
}

TEST(Topology, InterRingPartnerIsNearestVisible) {
  const auto fleet = default_fleet();
  const Epoch e{777.0, 80};
  LinkParams params;
  for (const auto& l : neighbor_topology(fleet, e, params)) {
    if (l.kind != LinkKind::inter_ring) continue;
    const Vec3 a = fleet.state(l.tx, e).position_eci_km;
    const double chosen = (fleet.state(l.rx, e).position_eci_km - a).norm();
    for (int s = 0; s < 10; ++s) {
      const Vec3 b = fleet.state(SatId{NodeRole::sdc, l.rx.plane, s}, e).position_eci_km;
      const auto g = link_geometry(a, b, Vec3::UnitX(), params);
      if (g.status == LinkStatus::occluded || g.status == LinkStatus::out_of_range) continue;
      EXPECT_LE(chosen, g.range_km + 1e-9);
    }
  }
}

TEST(Topology, SmallRings) {
  SdcConstellationConfig cfg;
  cfg.planes = 1;
  cfg.sats_per_plane = 2;
  EXPECT_EQ(neighbor_topology(Fleet{build_sdc_constellation(cfg), {}}, Epoch{}, {}).size(), 2u);
  cfg.sats_per_plane = 1;
  EXPECT_TRUE(neighbor_topology(Fleet{build_sdc_constellation(cfg), {}}, Epoch{}, {}).empty());
  cfg.sats_per_plane = 3;
  EXPECT_EQ(neighbor_topology(Fleet{build_sdc_constellation(cfg), {}}, Epoch{}, {}).size(), 6u);
}

TEST(Topology, InterRingKnob) {
  LinkParams p;
  p.inter_ring_per_side = 0;
  for (const auto& l : neighbor_topology(default_fleet(), Epoch{}, p)) EXPECT_NE(l.kind, LinkKind::inter_ring);
  p.inter_ring_per_side = 2;
  std::size_t inter = 0;
  for (const auto& l : neighbor_topology(default_fleet(), Epoch{}, p)) inter += l.kind == LinkKind::inter_ring;
  EXPECT_GT(inter, 400u);
}

TEST(Topology, ClientAccessIsBidirectionalToNearestNode) {
  Fleet fleet = default_fleet();
  ClientConfig cc;
  cc.kind = ClientKind::leo_ring;
  cc.count = 4;
  fleet.clients = build_client(cc);
  const Epoch e{0.0, 80};
  std::vector<DirectedLink> access;
  for (const auto& l : neighbor_topology(fleet, e, {}))
    if (l.kind == LinkKind::client_access) access.push_back(l);
  ASSERT_FALSE(access.empty());
  EXPECT_EQ(access.size() % 2, 0u);
  for (const auto& l : access) {
    const bool reversed = std::any_of(access.begin(), access.end(), [&](const auto& o) { return o.tx == l.rx && o.rx == l.tx; });
    EXPECT_TRUE(reversed) << link_id(l);
  }
}

TEST(Topology, LunarClientsHaveNoAccess) {
  Fleet fleet = default_fleet();
  ClientConfig cc;
  cc.kind = ClientKind::lunar_surface;
  cc.count = 2;
  fleet.clients = build_client(cc);
  for (const auto& l : neighbor_topology(fleet, Epoch{}, {})) EXPECT_NE(l.kind, LinkKind::client_access);
}

TEST(Contacts, MergeSamples) {
  TimeGrid g;
  g.horizon_s = 100.0;
  g.step_s = 10.0;
  const DirectedLink l{};
  auto ci = merge_samples(l, g, {false, true, true, false, false, false, true, true, true, false});
  ASSERT_EQ(ci.intervals.size(), 2u);
  EXPECT_DOUBLE_EQ(ci.intervals[0].t_start, 10.0);
  EXPECT_DOUBLE_EQ(ci.intervals[0].t_end, 30.0);
  EXPECT_DOUBLE_EQ(ci.up_time_s, 50.0);
  EXPECT_DOUBLE_EQ(ci.outage_fraction(), 0.5);
  EXPECT_DOUBLE_EQ(ci.max_contiguous_outage_s(), 30.0);

  ci = merge_samples(l, g, std::vector<bool>(10, false));
  EXPECT_DOUBLE_EQ(ci.max_contiguous_outage_s(), 100.0);
  EXPECT_DOUBLE_EQ(ci.outage_fraction(), 1.0);

  EXPECT_THROW(merge_samples(l, g, {}), std::invalid_argument);
  g.horizon_s = 0.0;
  EXPECT_THROW(contact_intervals(default_fleet(), l, g, SunModel::ecliptic(), {}), std::invalid_argument);
}

TEST(Contacts, SunNormalToPlaneGivesNoOutage) {
  const auto fleet = default_fleet();
  const auto sun = SunModel::fixed_direction(plane_normal(fleet.sdc.planes[0]));
  TimeGrid g;
  for (int s = 0; s < 10; ++s) {
    const DirectedLink l{SatId{NodeRole::sdc, 0, s}, SatId{NodeRole::sdc, 0, (s + 1) % 10}, LinkKind::intra_ring};
    EXPECT_DOUBLE_EQ(contact_intervals(fleet, l, g, sun, {}).outage_fraction(), 0.0);
  }
}

TEST(Contacts, OutageNonDecreasingInExclusionAngle) {
  const auto fleet = default_fleet();
  const auto sun = SunModel::fixed_direction(in_plane_direction(fleet.sdc.planes[0], 0.3));
  TimeGrid g;
  g.step_s = 20.0;
  const DirectedLink l{SatId{NodeRole::sdc, 0, 0}, SatId{NodeRole::sdc, 0, 1}, LinkKind::intra_ring};
  double prev = -1.0;
  for (double angle : {0.0, 10.0, 30.0, 50.0, 80.0}) {
    LinkParams p;
    p.exclusion_angle_deg = angle;
    const double f = contact_intervals(fleet, l, g, sun, p).outage_fraction();
    EXPECT_GE(f, prev) << angle;
    prev = f;
  }
}
