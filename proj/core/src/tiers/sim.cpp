#include "iplc/tiers/sim.hpp"

#include <algorithm>

namespace iplc {

class SimNetwork::Env final : public TierEnv {
 public:
  Env(SimNetwork& net, std::string self) : net_(net), self_(std::move(self)) {}
  const std::string& self() const override { return self_; }
  std::int64_t now() const override { return net_.now_; }
  void send(const std::string& to, Message m) override { net_.post(self_, to, std::move(m)); }

 private:
  SimNetwork& net_;
  std::string self_;
};

SimNetwork::SimNetwork(std::uint64_t seed) : rng_(seed) {}
SimNetwork::~SimNetwork() = default;

std::string SimNetwork::attach(std::unique_ptr<Endpoint> ep, const std::string& name) {
  std::string address = "sim:" + name;
  if (slots_.contains(address)) throw Error(ErrorCode::SpawnFailed, "address " + address + " is taken");
  Slot& slot = slots_[address];
  slot.endpoint = std::move(ep);
  slot.env = std::make_unique<Env>(*this, address);
  order_.push_back(address);
  slot.endpoint->start(*slot.env);
  return address;
}

void SimNetwork::kill(const std::string& address) {
  auto it = slots_.find(address);
  if (it == slots_.end() || !it->second.alive) return;
  it->second.alive = false;
  // Whatever was on its way there is lost with it.
  for (auto& [route, queue] : channels_) {
    if (route.second == address) queue.clear();
  }
}

bool SimNetwork::alive(const std::string& address) const {
  auto it = slots_.find(address);
  return it != slots_.end() && it->second.alive;
}

Endpoint* SimNetwork::find(const std::string& address) const {
  auto it = slots_.find(address);
  return it == slots_.end() ? nullptr : it->second.endpoint.get();
}

std::vector<std::string> SimNetwork::addresses() const { return order_; }

std::size_t SimNetwork::inFlight() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, q] : channels_) n += q.size();
  return n;
}

void SimNetwork::post(const std::string& from, const std::string& to, Message m) {
  m.set("from", from);
  channels_[{from, to}].push_back(std::move(m));
}

void SimNetwork::bounce(const std::string& deadTo, Message m) {
  const std::string sender = m.from();
  if (!alive(sender) || m.has("bounced")) return;
  std::string kind(msgKindName(m.kind));
  m.kind = MsgKind::Err;
  m.set("error", std::string(errorName(ErrorCode::Unreachable)));
  m.set("message", "no endpoint at " + deadTo);
  m.set("bounced", kind);
  post(deadTo, sender, std::move(m));
}

void SimNetwork::reap(const std::string& address) {
  auto it = slots_.find(address);
  if (it != slots_.end() && it->second.alive && it->second.endpoint->stopped()) kill(address);
}

bool SimNetwork::step() {
  ++now_;
  std::vector<std::pair<std::string, std::string>> ready;
  for (const auto& [route, q] : channels_) {
    if (!q.empty()) ready.push_back(route);
  }
  bool delivered = false;
  if (!ready.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
    auto route = ready[pick(rng_)];
    auto& q = channels_[route];
    Message m = std::move(q.front());
    q.pop_front();
    const std::string& to = route.second;
    if (hook_) hook_(to, m);
    if (!slots_.contains(to)) {
      bounce(to, std::move(m));
    } else if (alive(to)) {
      Slot& slot = slots_.at(to);
      slot.endpoint->receive(m, *slot.env);
      ++delivered_;
      delivered = true;
      reap(to);
    } else if (!m.has("bounced")) {
      bounce(to, std::move(m));
    }
  }
  // Endpoints may be attached while ticking; iterate over a snapshot.
  std::vector<std::string> current = order_;
  for (const auto& address : current) {
    if (!alive(address)) continue;
    Slot& slot = slots_.at(address);
    slot.endpoint->tick(*slot.env);
    reap(address);
  }
  return delivered;
}

bool SimNetwork::runUntil(const std::function<bool()>& done, std::int64_t maxTicks) {
  std::int64_t end = now_ + maxTicks;
  while (!done()) {
    if (now_ >= end) return false;
    step();
  }
  return true;
}

std::string Mailbox::post(const std::string& to, Message m) {
  if (!env_) throw Error(ErrorCode::Stopped, "mailbox is not attached");
  if (!m.has("id")) m.set("id", env_->self() + "#" + std::to_string(++next_));
  std::string id = m.id();
  env_->send(to, std::move(m));
  return id;
}

std::optional<Message> Mailbox::take(const std::string& id) {
  auto it = std::find_if(inbox_.begin(), inbox_.end(), [&](const Message& m) { return m.find("id") == id; });
  if (it == inbox_.end()) return std::nullopt;
  Message m = std::move(*it);
  inbox_.erase(it);
  return m;
}

}  // namespace iplc
