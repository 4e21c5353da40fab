#include "fleet/net/clock.hpp"

#include <string>

#include "fleet/error.hpp"

namespace fleet::net {

EventId SimClock::schedule(SimTime at, Action action)
{
    if (at < now_) {
        throw SchedulingInPast("event at " + std::to_string(at) + " ms is before now (" +
                               std::to_string(now_) + " ms)");
    }
    const EventId id = next_id_++;
    queue_.push(Entry{at, id});
    actions_.emplace(id, std::move(action));
    return id;
}

bool SimClock::cancel(EventId id)
{
    return actions_.erase(id) > 0;
}

void SimClock::drop_cancelled()
{
    while (!queue_.empty() && !actions_.contains(queue_.top().id)) queue_.pop();
}

std::optional<SimTime> SimClock::next_time()
{
    drop_cancelled();
    if (queue_.empty()) return std::nullopt;
    return queue_.top().time;
}

std::optional<SimClock::Fired> SimClock::step()
{
    drop_cancelled();
    if (queue_.empty()) return std::nullopt;
    const Entry entry = queue_.top();
    queue_.pop();
    auto node = actions_.extract(entry.id);
    now_ = entry.time;
    ++dispatched_;
    node.mapped()();
    return Fired{entry.id, entry.time};
}

void SimClock::run_until(SimTime limit)
{
    while (true) {
        const auto next = next_time();
        if (!next || *next >= limit) break;
        step();
    }
    if (limit > now_) now_ = limit;
}

}  // namespace fleet::net
