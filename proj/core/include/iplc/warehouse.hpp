#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iplc/context.hpp"
#include "iplc/value.hpp"

namespace iplc {

/// An identifier-context pair, scoped to one compiled program. The context
/// is already restricted to the subject's rank.
struct DemandKey {
  std::string programId;
  std::string subject;
  Context context;

  /// `<programId>:"<subject>"@<context>`; unambiguous and parseable.
  std::string text() const;
  static DemandKey parse(std::string_view text);

  friend bool operator==(const DemandKey&, const DemandKey&) = default;
  friend bool operator<(const DemandKey& a, const DemandKey& b) { return a.text() < b.text(); }
};

/// Key for the procedural demand `name(args)`.
DemandKey procedureKey(const std::string& programId, const std::string& name,
                       const std::vector<Value>& args);

/// Memo table of the eduction engine. A key goes absent -> pending ->
/// computed; the first claimant computes, later demands are hits. Safe to
/// share between threads.
class Warehouse {
 public:
  struct Stats {
    std::uint64_t issued = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t computed = 0;
    std::uint64_t recomputations = 0;
  };

  /// Outcome of claimOrGet: either the stored value, or ownership of the
  /// computation (then fulfill or release must follow).
  struct Claim {
    std::optional<Value> value;
    bool owner() const noexcept { return !value.has_value(); }
  };

  /// `owner` identifies one sequential evaluation path. Re-demanding a key
  /// that the same owner holds pending throws CyclicDemand; a key pending
  /// under another owner is waited for.
  Claim claimOrGet(const DemandKey& key, const void* owner);
  void fulfill(const DemandKey& key, const Value& v);
  /// Abandons a pending claim (the computation threw).
  void release(const DemandKey& key);
  /// Stores a value computed elsewhere. Throws ConflictingResult if a
  /// different value is already stored.
  void insert(const DemandKey& key, const Value& v);

  std::optional<Value> peek(const DemandKey& key) const;
  std::size_t size() const;
  Stats stats() const;
  /// Computed entries in key order.
  std::vector<std::pair<DemandKey, Value>> entries() const;

 private:
  struct Slot {
    bool pending = true;
    const void* owner = nullptr;
    std::optional<Value> value;
  };

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::pair<DemandKey, Slot>> slots_;
  std::set<std::string> everComputed_;
  Stats stats_;
};

/// Ordered record of demand traffic.
class DemandTrace {
 public:
  enum class Event : std::uint8_t { Issued, Hit, Computed };

  struct Record {
    DemandKey key;
    Event event;
    std::int64_t ns;  // monotonic clock
  };

  void record(const DemandKey& key, Event event);
  const std::vector<Record>& records() const noexcept { return records_; }
  std::size_t count(Event event) const;
  /// One `<event> <key> <ns>` line per record.
  std::string exportText() const;

 private:
  std::vector<Record> records_;
};

std::string_view eventName(DemandTrace::Event e) noexcept;

}  // namespace iplc
