#ifndef BBN_ENGINE_HPP
#define BBN_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <vector>

namespace bbn {

using EntityId = std::uint32_t;

/// Entity id used for events that belong to no particular node (run control).
inline constexpr EntityId kWorldEntity = 0xffffffffu;

/// Opaque handle returned by Scheduler::schedule; usable for cancellation.
struct EventHandle {
    std::uint64_t sequence = 0;
    bool valid() const { return sequence != 0; }
};

/// A queued event. The payload is whatever the action closure captured.
/// `kind` must point at a string with static storage duration; it is only
/// used for the event log.
struct Event {
    double fire_time = 0.0;
    std::uint64_t sequence = 0;
    EntityId target = kWorldEntity;
    const char* kind = "";
    std::function<void()> action;
};

/// Deterministic discrete-event scheduler over virtual time in seconds.
///
/// Events with equal fire time dispatch in insertion order. The scheduler
/// knows nothing about layers: every component registers closures against
/// its own entity id.
class Scheduler {
public:
    explicit Scheduler(double horizon = 100.0);

    Scheduler(const Scheduler&) = delete;
    Scheduler& operator=(const Scheduler&) = delete;

    /// Throws std::logic_error when fire_time precedes the clock.
    EventHandle schedule(double fire_time, EntityId target, const char* kind,
                         std::function<void()> action);

    EventHandle schedule_in(double delay, EntityId target, const char* kind,
                            std::function<void()> action) {
        return schedule(now_ + delay, target, kind, std::move(action));
    }

    /// Returns false if the event already fired or was cancelled.
    bool cancel(EventHandle handle);

    /// Dispatches every event with fire_time <= t_end, then sets now = t_end.
    std::size_t run_until(double t_end);

    double now() const { return now_; }
    double horizon() const { return horizon_; }
    std::size_t pending() const { return queue_.size() - cancelled_pending_; }
    std::uint64_t dispatched() const { return dispatched_; }

    /// When set, one `time<TAB>entity<TAB>kind` line is written per dispatch.
    void set_event_log(std::ostream* log) { log_ = log; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    enum class Status : std::uint8_t { live, cancelled, done };
    /// Indexed by sequence number - 1.
    std::vector<Status> status_;
    std::size_t cancelled_pending_ = 0;
    double now_ = 0.0;
    double horizon_;
    std::uint64_t next_sequence_ = 1;
    std::uint64_t dispatched_ = 0;
    std::ostream* log_ = nullptr;
};

enum class StreamPurpose : std::uint32_t {
    mobility = 1,
    mac = 2,
    routing = 3,
    application = 4,
    position_noise = 5,
    world = 6,
};

struct StreamId {
    std::uint64_t iteration = 0;
    std::uint64_t entity = 0;
    StreamPurpose purpose = StreamPurpose::world;
};

/// SplitMix64 finalizer; the basis of stream splitting.
std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based derivation of an independent stream seed.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, const StreamId& id);

/// Reproducible pseudo-random stream. The bit generator is mt19937_64 (its
/// output sequence is fixed by the standard); the distribution helpers are
/// implemented here so draws are identical across standard libraries.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, const StreamId& id)
        : engine_(derive_stream_seed(master_seed, id)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    double gaussian(double mean, double stddev);

private:
    std::mt19937_64 engine_;
};

}  // namespace bbn

#endif
