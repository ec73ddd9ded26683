#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "iplc/error.hpp"
#include "iplc/tiers/message.hpp"

namespace iplc {

enum class TierKind : std::uint8_t { DGT, DST, DWT, GIM };

std::string_view tierKindName(TierKind kind) noexcept;
/// Case-insensitive.
std::optional<TierKind> tierKindFromName(std::string_view name) noexcept;

/// Time budgets, in the transport's clock unit (simulated ticks or ms).
struct Timing {
  /// A dispatched demand not answered by then is re-dispatched.
  std::int64_t deadline = 500;
  /// How long a fan-out store lookup or a ping waits for a peer.
  std::int64_t peerTimeout = 50;
  /// Time a worker spends on one procedural demand.
  std::int64_t workTime = 2;

  static Timing simulated() { return {}; }
  static Timing wallClock() { return {5000, 1000, 0}; }
  /// `base` with the deadline taken from IPLC_DEADLINE_MS when set.
  static Timing fromEnv(Timing base);
};

/// What a tier sees of the network it runs on.
class TierEnv {
 public:
  virtual ~TierEnv() = default;
  virtual const std::string& self() const = 0;
  virtual std::int64_t now() const = 0;
  /// Sets `from` and queues `m` for delivery. A message to an unreachable
  /// address comes back to the sender as ERR with `error` Unreachable and
  /// `bounced` naming the original kind.
  virtual void send(const std::string& to, Message m) = 0;
};

/// Anything with an address: tier instances and node controllers. Each one
/// is a single-threaded state machine fed one message at a time.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual void start(TierEnv&) {}
  virtual void receive(const Message& m, TierEnv& env) = 0;
  /// Called as the clock advances.
  virtual void tick(TierEnv&) {}
  /// True after a Shutdown; the transport then detaches the endpoint.
  bool stopped() const noexcept { return stopped_; }

  using Stats = std::map<std::string, std::uint64_t>;
  const Stats& stats() const noexcept { return stats_; }

 protected:
  void stop() noexcept { stopped_ = true; }
  void count(const std::string& what, std::uint64_t n = 1) { stats_[what] += n; }

 private:
  bool stopped_ = false;
  Stats stats_;
};

class Tier : public Endpoint {
 public:
  virtual TierKind kind() const noexcept = 0;
};

/// Hosts endpoints at addresses.
class Network {
 public:
  virtual ~Network() = default;
  /// Gives `ep` an address derived from `name` and starts it.
  virtual std::string attach(std::unique_ptr<Endpoint> ep, const std::string& name) = 0;
  /// Stops delivering to and from `address`, as if its process died.
  virtual void kill(const std::string& address) = 0;
};

/// Reply skeleton: same id, addressed back to the sender.
Message replyTo(const Message& request, MsgKind kind);
Message errorReply(const Message& request, ErrorCode code, const std::string& message);

}  // namespace iplc
