#include "bbn/engine.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bbn {

Scheduler::Scheduler(double horizon) : horizon_(horizon) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("scheduler horizon must be non-negative");
}

EventHandle Scheduler::schedule(double fire_time, EntityId target, const char* kind,
                                std::function<void()> action) {
    if (!(fire_time >= now_)) {
        throw std::logic_error("event '" + std::string(kind) + "' scheduled in the past (t=" +
                               std::to_string(fire_time) + " < now=" + std::to_string(now_) + ")");
    }
    const std::uint64_t seq = next_sequence_++;
    queue_.push(Event{fire_time, seq, target, kind, std::move(action)});
    status_.push_back(Status::live);
    return EventHandle{seq};
}

bool Scheduler::cancel(EventHandle handle) {
    if (!handle.valid()) return false;
    if (handle.sequence > status_.size()) return false;
    Status& st = status_[handle.sequence - 1];
    if (st != Status::live) return false;
    st = Status::cancelled;
    ++cancelled_pending_;
    return true;
}

std::size_t Scheduler::run_until(double t_end) {
    if (t_end < now_) throw std::logic_error("run_until target precedes the clock");
    std::size_t count = 0;
    while (!queue_.empty() && queue_.top().fire_time <= t_end) {
        // priority_queue::top is const; the event is moved out before pop.
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        Status& st = status_[ev.sequence - 1];
        if (st == Status::cancelled) {
            st = Status::done;
            --cancelled_pending_;
            continue;
        }
        st = Status::done;
        now_ = ev.fire_time;
        if (log_ != nullptr) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9f", ev.fire_time);
            *log_ << buf << '\t';
            if (ev.target == kWorldEntity) {
                *log_ << "world";
            } else {
                *log_ << ev.target;
            }
            *log_ << '\t' << ev.kind << '\n';
        }
        ++count;
        ++dispatched_;
        ev.action();
    }
    now_ = t_end;
    return count;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, const StreamId& id) {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ id.iteration);
    h = splitmix64(h ^ id.entity);
    h = splitmix64(h ^ static_cast<std::uint64_t>(id.purpose));
    return h;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(engine_());
    const std::uint64_t n = span + 1;
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n + 1) % n;
    std::uint64_t x = engine_();
    while (x > limit) x = engine_();
    return lo + static_cast<std::int64_t>(x % n);
}

double RngStream::gaussian(double mean, double stddev) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

}  // namespace bbn
