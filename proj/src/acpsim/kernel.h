#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace acpsim {

// Simulation time is integer picoseconds from run start.
using SimTime = std::int64_t;

constexpr SimTime kPsPerSecond = 1'000'000'000'000LL;
constexpr SimTime kPsPerMillisecond = 1'000'000'000LL;
constexpr SimTime kPsPerMicrosecond = 1'000'000LL;

SimTime seconds_to_ps(double s);
double ps_to_seconds(SimTime t);
double ps_to_ms(SimTime t);

std::uint64_t splitmix64(std::uint64_t x);

// Stable per-purpose seed derivation from a master seed and a label such as
// "node:n3/acp_tick". Same (master, label) always yields the same stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

// Deterministic random stream. The uniform mappings are implemented locally
// so that sequences do not depend on the standard library's distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(splitmix64(seed ^ 0x9e3779b97f4a7c15ULL)) {}

  std::uint64_t next_u64();
  double uniform01();                               // [0, 1)
  double uniform(double a, double b);               // [a, b)
  std::uint64_t uniform_index(std::uint64_t n);     // [0, n), n > 0
  bool bernoulli(double p);

 private:
  std::uint64_t state_;
};

struct RunStats {
  std::uint64_t dispatched = 0;
  std::uint64_t cancelled = 0;
};

// Single-threaded discrete event engine. Events fire in (time, seq) order;
// seq is the global schedule order, so ties dispatch FIFO. Cancellation is
// lazy: cancelled entries are skipped at pop time.
class EventQueue {
 public:
  using Handler = std::function<void()>;

  class Handle {
   public:
    Handle() = default;
    void cancel();
    bool pending() const;

   private:
    friend class EventQueue;
    struct Entry;
    explicit Handle(std::shared_ptr<Entry> e) : entry_(std::move(e)) {}
    std::shared_ptr<Entry> entry_;
  };

  // Throws std::logic_error if `at` is before now(): scheduling into the
  // past is a contract violation and aborts the run.
  Handle schedule(SimTime at, Handler fn, const char* tag = "", std::uint64_t tag_id = 0);

  SimTime now() const { return now_; }
  bool empty() const { return live_count_ == 0; }
  std::uint64_t pending_count() const { return live_count_; }

  // Dispatches every event with fire time <= t_end, then sets now() = t_end.
  RunStats run_until(SimTime t_end);

  // Order-sensitive digest of the dispatched trace: folds (time, seq, tag,
  // tag_id) per event. Equal digests mean equal traces.
  std::uint64_t trace_digest() const { return digest_; }
  std::uint64_t dispatched_total() const { return dispatched_total_; }

  void clear();

 private:
  struct Handle::Entry {
    SimTime at = 0;
    std::uint64_t seq = 0;
    Handler fn;
    const char* tag = "";
    std::uint64_t tag_id = 0;
    bool cancelled = false;
    bool dispatched = false;
  };
  using EntryPtr = std::shared_ptr<Handle::Entry>;

  struct Later {
    bool operator()(const EntryPtr& a, const EntryPtr& b) const {
      if (a->at != b->at) return a->at > b->at;
      return a->seq > b->seq;
    }
  };

  std::priority_queue<EntryPtr, std::vector<EntryPtr>, Later> queue_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t live_count_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::uint64_t dispatched_total_ = 0;
};

}  // namespace acpsim
