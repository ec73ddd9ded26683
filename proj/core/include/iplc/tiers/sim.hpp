#pragma once

// In-process transport with a seeded scheduler: every step delivers the head
// of one randomly chosen (sender, receiver) channel, so per-pair order is
// kept while the global interleaving varies with the seed.

#include <deque>
#include <functional>
#include <random>

#include "iplc/tiers/tier.hpp"

namespace iplc {

class SimNetwork final : public Network {
 public:
  explicit SimNetwork(std::uint64_t seed = 1);
  ~SimNetwork() override;
  SimNetwork(const SimNetwork&) = delete;
  SimNetwork& operator=(const SimNetwork&) = delete;

  /// Address `sim:<name>`; throws SpawnFailed when taken.
  std::string attach(std::unique_ptr<Endpoint> ep, const std::string& name) override;
  void kill(const std::string& address) override;
  bool alive(const std::string& address) const;

  /// Advances the clock one tick, delivers at most one message and ticks
  /// every endpoint. Returns whether a message was delivered.
  bool step();
  /// Steps until `done` holds or `maxTicks` pass; returns `done()`.
  bool runUntil(const std::function<bool()>& done, std::int64_t maxTicks);

  std::int64_t now() const noexcept { return now_; }
  std::size_t inFlight() const noexcept;
  std::uint64_t delivered() const noexcept { return delivered_; }

  /// The endpoint at `address`, dead or alive; nullptr if never attached.
  Endpoint* find(const std::string& address) const;
  template <class T>
  T* as(const std::string& address) const {
    return dynamic_cast<T*>(find(address));
  }
  std::vector<std::string> addresses() const;

  /// Runs before each delivery; it may kill endpoints (the message is then
  /// dropped if its receiver is gone).
  using DeliveryHook = std::function<void(const std::string& to, const Message& m)>;
  void onDeliver(DeliveryHook hook) { hook_ = std::move(hook); }

 private:
  class Env;
  struct Slot {
    std::unique_ptr<Endpoint> endpoint;
    std::unique_ptr<Env> env;
    bool alive = true;
  };

  void post(const std::string& from, const std::string& to, Message m);
  void bounce(const std::string& deadTo, Message m);
  void reap(const std::string& address);

  std::mt19937_64 rng_;
  std::int64_t now_ = 0;
  std::uint64_t delivered_ = 0;
  std::map<std::string, Slot> slots_;
  std::vector<std::string> order_;  // attach order, for ticking
  std::map<std::pair<std::string, std::string>, std::deque<Message>> channels_;
  DeliveryHook hook_;
};

/// An endpoint that keeps every message it receives, for tests and drivers.
class Mailbox final : public Endpoint {
 public:
  void start(TierEnv& env) override { env_ = &env; }
  void receive(const Message& m, TierEnv&) override { inbox_.push_back(m); }

  /// Sends `m` from this mailbox, giving it a fresh id unless it has one.
  std::string post(const std::string& to, Message m);
  /// Removes and returns the reply to `id`, if it arrived.
  std::optional<Message> take(const std::string& id);
  const std::vector<Message>& inbox() const noexcept { return inbox_; }
  const std::string& address() const { return env_->self(); }

 private:
  TierEnv* env_ = nullptr;
  std::vector<Message> inbox_;
  std::uint64_t next_ = 0;
};

}  // namespace iplc
