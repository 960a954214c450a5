// Per-node cluster state machine: hello processing, neighbor tables, the
// received-power mobility metric and the two cluster-head election rules.
//
// Both election rules share one structure and differ only in how nodes are
// ranked: original CBRP ranks by id alone (lowest-ID with least-cluster-change
// maintenance); Cross-CBRP ranks by (aggregate mobility, id). Lower rank wins.

#ifndef CBRPSIM_CLUSTERING_H
#define CBRPSIM_CLUSTERING_H

#include "cbrpsim/packet.h"
#include "cbrpsim/types.h"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace cbrpsim
{

/// 10 * log10(prNew / prOld) in dB. Positive means the neighbor is
/// approaching. Throws std::domain_error for non-positive powers.
double RelativeMobility(double prNew, double prOld);

/// Mean of squares of the samples (variance about zero), 0 for no samples.
double AggregateMobility(std::span<const double> samples);

struct ClusteringParams
{
    Protocol protocol = Protocol::CrossCbrp;
    Time neighbor_timeout = 6.0;
    /// No election before this time, so first decisions see populated tables.
    Time warmup = 2.0;
};

struct NeighborEntry
{
    NodeId id = 0;
    LinkState link = LinkState::UniFromNeighbor;
    Role role = Role::Undecided;
    /// Infinity until the neighbor has advertised a value.
    double advertised_mobility = kForever;
    std::optional<double> prev_rx_power;
    std::optional<double> last_rx_power;
    std::optional<double> rel_mobility;
    Time last_heard = 0.0;
    Time expires_at = 0.0;
    /// Heads the neighbor reported belonging to.
    std::vector<NodeId> heads;
    /// The neighbor's own neighbor table from its last hello.
    std::vector<HelloNeighbor> reported;

    bool IsBidirectional() const { return link == LinkState::Bidirectional; }
};

struct RoleDecision
{
    Role role = Role::Undecided;
    std::set<NodeId> heads;
};

/// What changed as a result of one protocol step.
struct ClusterUpdate
{
    Role old_role = Role::Undecided;
    Role new_role = Role::Undecided;
    bool heads_changed = false;
    /// The node should broadcast a hello immediately.
    bool trigger_hello = false;
    std::vector<NodeId> expired;

    bool RoleChanged() const { return old_role != new_role; }
};

class NodeClusterState
{
  public:
    NodeClusterState(NodeId id, ClusteringParams params);

    NodeId Id() const { return m_id; }
    Role GetRole() const { return m_role; }
    const ClusteringParams& Params() const { return m_params; }
    /// Own aggregate mobility (dB^2).
    double Mobility() const { return m_mobility; }
    /// Mobility carried by the most recent hello; +inf before the first one.
    double AdvertisedMobility() const { return m_advertisedMobility; }
    const std::set<NodeId>& Heads() const { return m_heads; }
    /// Time the node last entered the undecided role (0 at start).
    Time UndecidedSince() const { return m_undecidedSince; }
    const std::map<NodeId, NeighborEntry>& Neighbors() const { return m_neighbors; }

    const NeighborEntry* FindNeighbor(NodeId id) const;
    bool IsBidirectionalNeighbor(NodeId id) const;
    std::vector<NodeId> BidirectionalNeighbors() const;

    HelloPacket BuildHello();

    /// Updates the sender's entry and own mobility, then runs the election.
    ClusterUpdate OnHelloReceived(const HelloPacket& hello, double rxPower, Time now);

    /// Removes entries with expires_at < now, then runs the election.
    ClusterUpdate ExpireNeighbors(Time now);

    /// For a head: members with a bidirectional link into another cluster.
    /// Empty for non-heads.
    std::set<NodeId> GatewaySet() const;

    /// Head lists only itself; a member's heads are bidirectional
    /// neighbors advertising the head role; relative mobility exists iff two
    /// power samples exist.
    bool InvariantsHold() const;

  private:
    ClusterUpdate RunElection(Role oldRole, Time now);
    void RecomputeMobility();

    NodeId m_id;
    ClusteringParams m_params;
    Role m_role = Role::Undecided;
    double m_mobility = 0.0;
    double m_advertisedMobility = kForever;
    Time m_undecidedSince = 0.0;
    std::set<NodeId> m_heads;
    std::map<NodeId, NeighborEntry> m_neighbors;
};

/// Lowest-ID election with least-cluster-change maintenance.
RoleDecision ElectLowestId(const NodeClusterState& state, Time now);

/// Lowest aggregate mobility election, id breaking exact ties, with the same
/// least-cluster-change damping.
RoleDecision ElectLowestMobility(const NodeClusterState& state, Time now);

} // namespace cbrpsim

#endif // CBRPSIM_CLUSTERING_H
