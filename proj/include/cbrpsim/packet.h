// Packet formats and byte-size accounting.

#ifndef CBRPSIM_PACKET_H
#define CBRPSIM_PACKET_H

#include "cbrpsim/types.h"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace cbrpsim
{

enum class LinkState : std::uint8_t
{
    UniFromNeighbor,
    Bidirectional,
};

enum class PacketKind : std::uint8_t
{
    Hello,
    RouteRequest,
    RouteReply,
    Data,
};

/// One row of the sender's neighbor table as advertised in its hello.
struct HelloNeighbor
{
    NodeId id = 0;
    LinkState link = LinkState::UniFromNeighbor;
    Role role = Role::Undecided;
    std::vector<NodeId> heads;

    friend bool operator==(const HelloNeighbor&, const HelloNeighbor&) = default;
};

struct HelloPacket
{
    NodeId sender = 0;
    Role role = Role::Undecided;
    /// Aggregate local mobility; only present for the mobility-aware variant.
    std::optional<double> mobility;
    std::vector<NodeId> heads;
    std::vector<HelloNeighbor> neighbors;

    /// 20 + 8 per neighbor entry, plus 4 when the mobility field is carried.
    std::uint32_t SizeBytes() const;
};

struct RequestId
{
    NodeId source = 0;
    std::uint32_t sequence = 0;

    friend auto operator<=>(const RequestId&, const RequestId&) = default;
};

struct RouteRequest
{
    RequestId id;
    NodeId target = 0;
    /// Source first; every processing node appends itself.
    std::vector<NodeId> recorded_route;
    /// Explicit hops still to traverse before the next cluster head (the
    /// last element is that head). Empty once it arrives.
    std::vector<NodeId> forward_path;

    /// 24 + 4 per recorded hop.
    std::uint32_t SizeBytes() const;
};

struct RouteReply
{
    RequestId id;
    NodeId target = 0;
    /// Complete route source -> target.
    std::vector<NodeId> route;
    /// Index in `route` of the node this copy is addressed to.
    std::size_t hop_index = 0;

    std::uint32_t SizeBytes() const;
};

struct DataPayload
{
    std::uint64_t uid = 0;
    std::uint32_t flow_id = 0;
    std::vector<NodeId> route;
    std::size_t hop_index = 0;
};

struct Packet
{
    PacketKind kind = PacketKind::Data;
    NodeId src = 0;
    NodeId dst = 0;
    /// Link-layer receiver, or kBroadcast.
    NodeId next_hop = kBroadcast;
    std::uint32_t size_bytes = 0;
    Time created_at = 0.0;
    std::variant<HelloPacket, RouteRequest, RouteReply, DataPayload> payload;

    bool IsControl() const { return kind != PacketKind::Data; }

    static Packet MakeHello(HelloPacket hello, Time now);
    static Packet MakeRequest(RouteRequest rreq, NodeId nextHop, Time now);
    static Packet MakeReply(RouteReply rrep, NodeId nextHop, Time now);
    static Packet MakeData(NodeId src, NodeId dst, std::uint32_t sizeBytes, Time now,
                           DataPayload data);
};

} // namespace cbrpsim

#endif // CBRPSIM_PACKET_H
