#include "fleet/dhcp/message.hpp"

#include <algorithm>

#include "fleet/error.hpp"

namespace fleet::dhcp {

namespace {

std::size_t count_type_options(const std::vector<DhcpOption>& options)
{
    return static_cast<std::size_t>(std::count_if(options.begin(), options.end(), [](const DhcpOption& o) {
        return o.tag == option::message_type;
    }));
}

void put_ip(Bytes& out, const Ipv4Addr& ip)
{
    out.insert(out.end(), ip.octets.begin(), ip.octets.end());
}

Ipv4Addr get_ip(std::span<const std::uint8_t> b, std::size_t at)
{
    return Ipv4Addr{{b[at], b[at + 1], b[at + 2], b[at + 3]}};
}

}  // namespace

std::optional<MessageType> DhcpMessage::type() const
{
    const auto* opt = find(option::message_type);
    if (!opt || opt->value.size() != 1) return std::nullopt;
    switch (opt->value[0]) {
    case 1:
    case 2:
    case 3:
    case 5:
    case 6:
        return static_cast<MessageType>(opt->value[0]);
    default:
        return std::nullopt;
    }
}

const DhcpOption* DhcpMessage::find(std::uint8_t tag) const
{
    auto it = std::find_if(options.begin(), options.end(), [tag](const DhcpOption& o) { return o.tag == tag; });
    return it == options.end() ? nullptr : &*it;
}

std::optional<Ipv4Addr> DhcpMessage::ip_option(std::uint8_t tag) const
{
    const auto* opt = find(tag);
    if (!opt || opt->value.size() != 4) return std::nullopt;
    return get_ip(opt->value, 0);
}

std::optional<std::uint32_t> DhcpMessage::u32_option(std::uint8_t tag) const
{
    const auto* opt = find(tag);
    if (!opt || opt->value.size() != 4) return std::nullopt;
    const auto& v = opt->value;
    return (std::uint32_t{v[0]} << 24) | (std::uint32_t{v[1]} << 16) | (std::uint32_t{v[2]} << 8) | v[3];
}

DhcpMessage& DhcpMessage::add(std::uint8_t tag, Bytes value)
{
    options.push_back(DhcpOption{tag, std::move(value)});
    return *this;
}

DhcpMessage& DhcpMessage::add_ip(std::uint8_t tag, Ipv4Addr ip)
{
    return add(tag, Bytes(ip.octets.begin(), ip.octets.end()));
}

DhcpMessage& DhcpMessage::add_u32(std::uint8_t tag, std::uint32_t value)
{
    return add(tag, Bytes{static_cast<std::uint8_t>(value >> 24), static_cast<std::uint8_t>(value >> 16),
                          static_cast<std::uint8_t>(value >> 8), static_cast<std::uint8_t>(value)});
}

DhcpMessage make_client_message(MessageType type, std::uint32_t xid, MacAddr chaddr)
{
    DhcpMessage msg;
    msg.op = kOpRequest;
    msg.xid = xid;
    msg.chaddr = chaddr;
    msg.add(option::message_type, Bytes{static_cast<std::uint8_t>(type)});
    return msg;
}

Bytes encode_dhcp(const DhcpMessage& msg)
{
    if (count_type_options(msg.options) != 1) {
        throw PreconditionViolated("dhcp message must carry exactly one message-type option");
    }
    Bytes out;
    out.reserve(kHeaderLen + 32);
    out.push_back(msg.op);
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(msg.xid >> shift));
    put_ip(out, msg.ciaddr);
    put_ip(out, msg.yiaddr);
    put_ip(out, msg.siaddr);
    out.insert(out.end(), msg.chaddr.octets.begin(), msg.chaddr.octets.end());
    for (const auto& opt : msg.options) {
        if (opt.tag == option::end || opt.tag == option::pad) {
            throw PreconditionViolated("pad/end tags are implicit in the option list");
        }
        if (opt.value.size() > 255) throw PreconditionViolated("dhcp option value exceeds 255 bytes");
        out.push_back(opt.tag);
        out.push_back(static_cast<std::uint8_t>(opt.value.size()));
        out.insert(out.end(), opt.value.begin(), opt.value.end());
    }
    out.push_back(option::end);
    return out;
}

DhcpMessage decode_dhcp(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kHeaderLen + 1) throw net::MalformedPacket("truncated dhcp message");
    DhcpMessage msg;
    msg.op = bytes[0];
    msg.xid = (std::uint32_t{bytes[1]} << 24) | (std::uint32_t{bytes[2]} << 16) | (std::uint32_t{bytes[3]} << 8) |
              bytes[4];
    msg.ciaddr = get_ip(bytes, 5);
    msg.yiaddr = get_ip(bytes, 9);
    msg.siaddr = get_ip(bytes, 13);
    std::copy_n(bytes.begin() + 17, 6, msg.chaddr.octets.begin());

    std::size_t at = kHeaderLen;
    bool terminated = false;
    while (at < bytes.size()) {
        const std::uint8_t tag = bytes[at++];
        if (tag == option::end) {
            terminated = true;
            break;
        }
        if (tag == option::pad) continue;
        if (at >= bytes.size()) throw net::MalformedPacket("truncated dhcp option length");
        const std::size_t len = bytes[at++];
        if (at + len > bytes.size()) throw net::MalformedPacket("truncated dhcp option value");
        msg.options.push_back(DhcpOption{tag, Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                                                    bytes.begin() + static_cast<std::ptrdiff_t>(at + len))});
        at += len;
    }
    if (!terminated) throw net::MalformedPacket("dhcp options not terminated");
    if (count_type_options(msg.options) != 1) throw net::MalformedPacket("dhcp message-type option count != 1");
    return msg;
}

}  // namespace fleet::dhcp
