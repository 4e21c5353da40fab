#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

namespace fleet::net {

// Milliseconds since simulation epoch.
using SimTime = std::int64_t;
using EventId = std::uint64_t;

// Virtual clock and event queue. Events fire in (time, insertion order).
class SimClock {
public:
    using Action = std::function<void()>;

    struct Fired {
        EventId id;
        SimTime time;
    };

    SimTime now() const { return now_; }

    // Throws SchedulingInPast when at < now().
    EventId schedule(SimTime at, Action action);
    EventId schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

    // Returns false when the event already fired or was cancelled.
    bool cancel(EventId id);

    // Dispatches exactly one event; nullopt means the simulation is idle.
    std::optional<Fired> step();

    // Fires every event with time < limit, then advances now() to limit.
    void run_until(SimTime limit);

    std::optional<SimTime> next_time();
    std::size_t pending() const { return actions_.size(); }
    std::uint64_t dispatched() const { return dispatched_; }

private:
    struct Entry {
        SimTime time;
        EventId id;
        bool operator>(const Entry& other) const
        {
            return time != other.time ? time > other.time : id > other.id;
        }
    };

    void drop_cancelled();

    SimTime now_ = 0;
    EventId next_id_ = 0;
    std::uint64_t dispatched_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    std::unordered_map<EventId, Action> actions_;
};

}  // namespace fleet::net
