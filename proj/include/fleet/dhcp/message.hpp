#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fleet/net/addr.hpp"
#include "fleet/net/packet.hpp"

namespace fleet::dhcp {

using net::Bytes;
using net::Ipv4Addr;
using net::MacAddr;

inline constexpr std::uint16_t kServerPort = 67;
inline constexpr std::uint16_t kClientPort = 68;

// op, xid, ciaddr, yiaddr, siaddr, chaddr
inline constexpr std::size_t kHeaderLen = 1 + 4 + 4 + 4 + 4 + 6;

inline constexpr std::uint8_t kOpRequest = 1;
inline constexpr std::uint8_t kOpReply = 2;

enum class MessageType : std::uint8_t {
    discover = 1,
    offer = 2,
    request = 3,
    ack = 5,
    nak = 6,
};

namespace option {
inline constexpr std::uint8_t pad = 0;
inline constexpr std::uint8_t subnet_mask = 1;
inline constexpr std::uint8_t router = 3;
inline constexpr std::uint8_t requested_ip = 50;
inline constexpr std::uint8_t lease_seconds = 51;
inline constexpr std::uint8_t message_type = 53;
inline constexpr std::uint8_t server_id = 54;
inline constexpr std::uint8_t end = 255;
}  // namespace option

struct DhcpOption {
    std::uint8_t tag = 0;
    Bytes value;

    bool operator==(const DhcpOption&) const = default;
};

// Compact BOOTP layout: a fixed 23-byte header followed by TLV options and a
// terminating 255. The end tag is implicit in `options`.
struct DhcpMessage {
    std::uint8_t op = kOpRequest;
    std::uint32_t xid = 0;
    Ipv4Addr ciaddr;
    Ipv4Addr yiaddr;
    Ipv4Addr siaddr;
    MacAddr chaddr;
    std::vector<DhcpOption> options;

    std::optional<MessageType> type() const;
    const DhcpOption* find(std::uint8_t tag) const;
    std::optional<Ipv4Addr> ip_option(std::uint8_t tag) const;
    std::optional<std::uint32_t> u32_option(std::uint8_t tag) const;

    DhcpMessage& add(std::uint8_t tag, Bytes value);
    DhcpMessage& add_ip(std::uint8_t tag, Ipv4Addr ip);
    DhcpMessage& add_u32(std::uint8_t tag, std::uint32_t value);

    bool operator==(const DhcpMessage&) const = default;
};

// Builds a request-side message carrying option 53.
DhcpMessage make_client_message(MessageType type, std::uint32_t xid, MacAddr chaddr);

// Throws PreconditionViolated unless option 53 appears exactly once.
Bytes encode_dhcp(const DhcpMessage& msg);

// Throws MalformedPacket on truncation, a missing end tag, or a message-type
// option count other than one.
DhcpMessage decode_dhcp(std::span<const std::uint8_t> bytes);

}  // namespace fleet::dhcp
