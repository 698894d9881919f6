#include "acpsim/kernel.h"

#include <cmath>

namespace acpsim {

SimTime seconds_to_ps(double s) {
  return static_cast<SimTime>(std::llround(s * static_cast<double>(kPsPerSecond)));
}

double ps_to_seconds(SimTime t) { return static_cast<double>(t) / static_cast<double>(kPsPerSecond); }

double ps_to_ms(SimTime t) { return static_cast<double>(t) / static_cast<double>(kPsPerMillisecond); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return splitmix64(splitmix64(master) ^ fnv1a(label));
}

std::uint64_t RngStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform01(); }

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::logic_error("uniform_index: n must be positive");
  // Rejection sampling over the top multiple of n keeps the mapping unbiased.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

void EventQueue::Handle::cancel() {
  if (entry_ && !entry_->dispatched) entry_->cancelled = true;
}

bool EventQueue::Handle::pending() const {
  return entry_ && !entry_->dispatched && !entry_->cancelled;
}

EventQueue::Handle EventQueue::schedule(SimTime at, Handler fn, const char* tag, std::uint64_t tag_id) {
  if (at < now_) {
    throw std::logic_error("EventQueue::schedule: fire time " + std::to_string(at) +
                           " is before now " + std::to_string(now_));
  }
  auto e = std::make_shared<Handle::Entry>();
  e->at = at;
  e->seq = next_seq_++;
  e->fn = std::move(fn);
  e->tag = tag;
  e->tag_id = tag_id;
  queue_.push(e);
  ++live_count_;
  return Handle(std::move(e));
}

RunStats EventQueue::run_until(SimTime t_end) {
  RunStats stats;
  while (!queue_.empty()) {
    const EntryPtr& top = queue_.top();
    if (top->at > t_end) break;
    EntryPtr e = top;
    queue_.pop();
    --live_count_;
    if (e->cancelled) {
      ++stats.cancelled;
      continue;
    }
    now_ = e->at;
    e->dispatched = true;
    digest_ = splitmix64(digest_ ^ static_cast<std::uint64_t>(e->at));
    digest_ = splitmix64(digest_ ^ e->seq);
    digest_ = splitmix64(digest_ ^ fnv1a(e->tag));
    digest_ = splitmix64(digest_ ^ e->tag_id);
    Handler fn = std::move(e->fn);
    fn();
    ++stats.dispatched;
    ++dispatched_total_;
  }
  now_ = t_end;
  return stats;
}

void EventQueue::clear() {
  while (!queue_.empty()) queue_.pop();
  live_count_ = 0;
}

}  // namespace acpsim
