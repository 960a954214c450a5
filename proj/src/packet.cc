#include "cbrpsim/packet.h"

namespace cbrpsim
{

std::uint32_t
HelloPacket::SizeBytes() const
{
    const auto entries = static_cast<std::uint32_t>(neighbors.size());
    return 20 + 8 * entries + (mobility ? 4 : 0);
}

std::uint32_t
RouteRequest::SizeBytes() const
{
    return 24 + 4 * static_cast<std::uint32_t>(recorded_route.size());
}

std::uint32_t
RouteReply::SizeBytes() const
{
    return 24 + 4 * static_cast<std::uint32_t>(route.size());
}

Packet
Packet::MakeHello(HelloPacket hello, Time now)
{
    Packet p;
    p.kind = PacketKind::Hello;
    p.src = hello.sender;
    p.dst = kBroadcast;
    p.next_hop = kBroadcast;
    p.size_bytes = hello.SizeBytes();
    p.created_at = now;
    p.payload = std::move(hello);
    return p;
}

Packet
Packet::MakeRequest(RouteRequest rreq, NodeId nextHop, Time now)
{
    Packet p;
    p.kind = PacketKind::RouteRequest;
    p.src = rreq.id.source;
    p.dst = rreq.target;
    p.next_hop = nextHop;
    p.size_bytes = rreq.SizeBytes();
    p.created_at = now;
    p.payload = std::move(rreq);
    return p;
}

Packet
Packet::MakeReply(RouteReply rrep, NodeId nextHop, Time now)
{
    Packet p;
    p.kind = PacketKind::RouteReply;
    p.src = rrep.target;
    p.dst = rrep.id.source;
    p.next_hop = nextHop;
    p.size_bytes = rrep.SizeBytes();
    p.created_at = now;
    p.payload = std::move(rrep);
    return p;
}

Packet
Packet::MakeData(NodeId src, NodeId dst, std::uint32_t sizeBytes, Time now, DataPayload data)
{
    Packet p;
    p.kind = PacketKind::Data;
    p.src = src;
    p.dst = dst;
    p.size_bytes = sizeBytes;
    p.created_at = now;
    p.payload = std::move(data);
    return p;
}

} // namespace cbrpsim
