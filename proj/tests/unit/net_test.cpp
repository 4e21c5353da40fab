#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "fleet/error.hpp"
#include "fleet/net/addr.hpp"
#include "fleet/net/bridge.hpp"
#include "fleet/net/clock.hpp"
#include "fleet/net/fabric.hpp"
#include "fleet/net/frame.hpp"
#include "fleet/net/packet.hpp"

using namespace fleet::net;

namespace {

Ipv4Addr ip(const char* text)
{
    return *Ipv4Addr::parse(text);
}

Frame frame_between(MacAddr src, MacAddr dst)
{
    return Frame{dst, src, 0x88b5, Bytes{1, 2, 3}};
}

}  // namespace

TEST_CASE("addresses print and parse")
{
    CHECK(MacAddr::local(1).to_string() == "02:00:00:00:00:01");
    CHECK(MacAddr::local(0x1ab).to_string() == "02:00:00:00:01:ab");
    CHECK(MacAddr::parse("02:00:00:00:00:0A") == MacAddr::local(10));
    CHECK_FALSE(MacAddr::parse("02:00:00:00:00"));
    CHECK_FALSE(MacAddr::parse("02-00-00-00-00-01"));

    CHECK(ip("10.0.2.100").to_string() == "10.0.2.100");
    CHECK(ip("10.0.2.100").to_u32() == 0x0a000264u);
    CHECK_FALSE(Ipv4Addr::parse("10.0.2"));
    CHECK_FALSE(Ipv4Addr::parse("10.0.2.256"));
    CHECK_FALSE(Ipv4Addr::parse("10.0.2.1 "));
    CHECK_FALSE(Ipv4Addr::parse("banana"));
}

TEST_CASE("attach_port assigns dense ids and rejects duplicates")
{
    Bridge bridge;
    CHECK(bridge.attach_port(MacAddr::local(1)) == 0);
    CHECK_THROWS_AS(bridge.attach_port(MacAddr::local(1)), DuplicateEndpoint);

    Bridge big;
    // 100 devices + driver + router.
    for (std::uint16_t i = 0; i < 102; ++i) CHECK(big.attach_port(MacAddr::local(i)) == i);
    CHECK(big.port_count() == 102);
}

TEST_CASE("forward floods broadcast and unknown unicast, then learns")
{
    Bridge bridge;
    const MacAddr a = MacAddr::local(1), b = MacAddr::local(2), c = MacAddr::local(3);
    bridge.attach_port(a);
    bridge.attach_port(b);
    bridge.attach_port(c);

    SUBCASE("broadcast from port 0")
    {
        CHECK(bridge.forward(0, frame_between(a, MacAddr::broadcast())) == std::vector<PortId>{1, 2});
    }
    SUBCASE("learning narrows delivery")
    {
        CHECK(bridge.forward(0, frame_between(a, b)) == std::vector<PortId>{1, 2});
        CHECK(bridge.forward(1, frame_between(b, a)) == std::vector<PortId>{0});
        CHECK(bridge.forward(0, frame_between(a, b)) == std::vector<PortId>{1});
    }
    SUBCASE("unlearned unicast floods")
    {
        CHECK(bridge.forward(2, frame_between(c, MacAddr::local(9))) == std::vector<PortId>{0, 1});
    }
    SUBCASE("table holds only observed sources")
    {
        bridge.forward(0, frame_between(a, b));
        CHECK(bridge.learning_table().size() == 1);
        CHECK(bridge.lookup(a) == PortId{0});
        CHECK_FALSE(bridge.lookup(b));
    }
    CHECK_THROWS_AS(bridge.forward(7, frame_between(a, b)), fleet::PreconditionViolated);
}

TEST_CASE("frame conservation against a reference table")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t ports = 2 + rng() % 6;
        Bridge bridge;
        std::vector<MacAddr> macs;
        for (std::size_t i = 0; i < ports; ++i) {
            macs.push_back(MacAddr::local(static_cast<std::uint16_t>(i + 1)));
            bridge.attach_port(macs.back());
        }
        std::map<MacAddr, PortId> reference;
        for (int n = 0; n < 200; ++n) {
            const PortId ingress = rng() % ports;
            const MacAddr dst = rng() % 5 == 0 ? MacAddr::broadcast() : MacAddr::local(static_cast<std::uint16_t>(1 + rng() % (ports + 2)));
            const auto got = bridge.forward(ingress, frame_between(macs[ingress], dst));
            reference[macs[ingress]] = ingress;
            std::vector<PortId> expected;
            if (!dst.is_broadcast() && reference.contains(dst)) {
                expected = {reference[dst]};
            } else {
                for (PortId p = 0; p < ports; ++p)
                    if (p != ingress) expected.push_back(p);
            }
            REQUIRE(got == expected);
        }
    }
}

TEST_CASE("clock orders by time then insertion")
{
    SimClock clock;
    std::vector<std::string> fired;
    clock.schedule(5, [&] { fired.push_back("t5"); });
    clock.schedule(3, [&] { fired.push_back("t3"); });
    clock.schedule(7, [&] { fired.push_back("e1"); });
    clock.schedule(7, [&] { fired.push_back("e2"); });

    auto first = clock.step();
    REQUIRE(first);
    CHECK(first->time == 3);
    CHECK(clock.now() == 3);
    while (clock.step()) {
    }
    CHECK(fired == std::vector<std::string>{"t3", "t5", "e1", "e2"});
    CHECK(clock.now() == 7);
    CHECK_FALSE(clock.step());
    CHECK_THROWS_AS(clock.schedule(6, [] {}), SchedulingInPast);
}

TEST_CASE("clock cancel and run_until")
{
    SimClock clock;
    int hits = 0;
    const auto id = clock.schedule(10, [&] { ++hits; });
    clock.schedule(20, [&] { ++hits; });
    clock.schedule(30, [&] { ++hits; });
    CHECK(clock.cancel(id));
    CHECK_FALSE(clock.cancel(id));
    clock.run_until(30);
    CHECK(hits == 1);
    CHECK(clock.now() == 30);
    CHECK(clock.pending() == 1);
}

TEST_CASE("clock monotonicity under random self-scheduling")
{
    std::mt19937_64 rng(3);
    SimClock clock;
    std::vector<SimTime> times;
    std::function<void()> spawn = [&] {
        times.push_back(clock.now());
        if (times.size() < 5000) {
            clock.schedule_in(static_cast<SimTime>(rng() % 50), spawn);
            if (rng() % 3 == 0) clock.schedule_in(static_cast<SimTime>(rng() % 50), spawn);
        }
    };
    clock.schedule(0, spawn);
    while (clock.step()) {
    }
    CHECK(std::is_sorted(times.begin(), times.end()));
}

TEST_CASE("packet codec round trip")
{
    const auto dhcp = make_udp(ip("10.0.2.100"), 68, ip("10.0.2.1"), 67, Bytes{1, 2, 3, 4});
    const auto bytes = encode_packet(dhcp);
    CHECK(bytes.size() == 20 + 8 + 4);
    CHECK(decode_packet(bytes) == dhcp);
    // big-endian total length and ports
    CHECK(bytes[2] == 0);
    CHECK(bytes[3] == 32);
    CHECK(bytes[20] == 0);
    CHECK(bytes[21] == 68);

    auto tcp = make_tcp(ip("10.0.2.100"), 49152, ip("198.51.100.30"), 443,
                        tcp_flags::syn | tcp_flags::ack, 0xdeadbeef, Bytes{'h', 'i'});
    tcp.ip.ttl = 3;
    tcp.ip.tos = kTosExpedited;
    CHECK(decode_packet(encode_packet(tcp)) == tcp);
}

TEST_CASE("packet decode errors")
{
    const Bytes three{0x45, 0, 0};
    CHECK_THROWS_AS(decode_packet(three), MalformedPacket);

    auto bytes = encode_packet(make_udp(ip("10.0.0.1"), 1, ip("10.0.0.2"), 2, {}));
    bytes[9] = 47;
    CHECK_THROWS_AS(decode_packet(bytes), UnsupportedProtocol);

    bytes[9] = kProtoUdp;
    bytes.push_back(0);
    CHECK_THROWS_AS(decode_packet(bytes), MalformedPacket);
}

TEST_CASE("codec totality on random headers")
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 2000; ++i) {
        const auto src = Ipv4Addr::from_u32(static_cast<std::uint32_t>(rng()));
        const auto dst = Ipv4Addr::from_u32(static_cast<std::uint32_t>(rng()));
        Bytes payload(rng() % 1400);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
        Packet p = rng() % 2 ? make_udp(src, static_cast<std::uint16_t>(rng()), dst,
                                        static_cast<std::uint16_t>(rng()), payload)
                             : make_tcp(src, static_cast<std::uint16_t>(rng()), dst,
                                        static_cast<std::uint16_t>(rng()), static_cast<std::uint8_t>(rng()),
                                        static_cast<std::uint32_t>(rng()), payload);
        p.ip.ttl = static_cast<std::uint8_t>(rng());
        p.ip.id = static_cast<std::uint16_t>(rng());
        REQUIRE(decode_packet(encode_packet(p)) == p);
    }
}

TEST_CASE("decode of random bytes never escapes the typed errors")
{
    std::mt19937_64 rng(5);
    int ok = 0;
    for (int i = 0; i < 20000; ++i) {
        Bytes buf(rng() % 80);
        for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
        if (!buf.empty() && rng() % 2) buf[0] = 0x45;
        try {
            decode_packet(buf);
            ++ok;
        } catch (const MalformedPacket&) {
        } catch (const UnsupportedProtocol&) {
        }
    }
    CHECK(ok >= 0);
}

TEST_CASE("frame codec")
{
    const auto pkt = make_udp(ip("0.0.0.0"), 68, Ipv4Addr::broadcast(), 67, Bytes(10, 7));
    const auto frame = make_ipv4_frame(MacAddr::local(1), MacAddr::broadcast(), pkt);
    CHECK(decode_frame(encode_frame(frame)) == frame);
    CHECK_THROWS_AS(decode_frame(Bytes(5, 0)), MalformedPacket);
    CHECK_THROWS_AS(make_ipv4_frame(MacAddr::local(1), MacAddr::local(2),
                                    make_udp(ip("1.1.1.1"), 1, ip("2.2.2.2"), 2, Bytes(1500))),
                    MalformedPacket);
}

TEST_CASE("fabric delivers through the clock with per-link FIFO")
{
    SimClock clock;
    Fabric fabric(clock);
    std::vector<std::pair<int, std::uint8_t>> received;
    const MacAddr a = MacAddr::local(1), b = MacAddr::local(2);
    const auto pa = fabric.attach(a, [&](const Frame& f) { received.emplace_back(0, f.payload[0]); });
    fabric.attach(b, [&](const Frame& f) { received.emplace_back(1, f.payload[0]); });
    std::vector<std::string> log;
    fabric.set_observer([&](const FrameRecord& r) { log.push_back(format_frame_record(r)); });

    for (std::uint8_t i = 0; i < 20; ++i) fabric.transmit(pa, Frame{b, a, 0x88b5, Bytes{i}});
    while (clock.step()) {
    }
    REQUIRE(received.size() == 20);
    for (std::uint8_t i = 0; i < 20; ++i) {
        CHECK(received[i].first == 1);
        CHECK(received[i].second == i);
    }
    CHECK(log.front() == "0\t02:00:00:00:00:01\t02:00:00:00:00:02\t0x88b5\t15");
    CHECK(fabric.frames_delivered() == 20);
}

TEST_CASE("mac directory")
{
    MacDirectory dir;
    dir.publish(ip("10.0.2.100"), MacAddr::local(1));
    CHECK(dir.lookup(ip("10.0.2.100")) == MacAddr::local(1));
    dir.withdraw(ip("10.0.2.100"));
    CHECK_FALSE(dir.lookup(ip("10.0.2.100")));
}
