#include "iplc/tiers/cluster.hpp"

#include <charconv>

namespace iplc {

Topology Topology::parse(std::string_view spec) {
  Topology t;
  std::set<std::string> seen;
  while (!spec.empty()) {
    auto comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    auto colon = item.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorCode::UsageError, "topology item '" + std::string(item) + "' is not kind:count");
    std::string kind(item.substr(0, colon));
    std::string_view digits = item.substr(colon + 1);
    int n = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || end != digits.data() + digits.size() || n < 0) {
      throw Error(ErrorCode::UsageError, "bad count in topology item '" + std::string(item) + "'");
    }
    if (!seen.insert(kind).second) throw Error(ErrorCode::UsageError, "topology names " + kind + " twice");
    if (n == 0) throw Error(ErrorCode::UsageError, "topology needs at least one " + kind);
    if (kind == "nodes") {
      t.nodes = n;
      continue;
    }
    auto k = tierKindFromName(kind);
    if (!k) throw Error(ErrorCode::UsageError, "unknown tier kind '" + kind + "' in topology");
    switch (*k) {
      case TierKind::GIM: t.gim = n; break;
      case TierKind::DGT: t.dgt = n; break;
      case TierKind::DST: t.dst = n; break;
      case TierKind::DWT: t.dwt = n; break;
    }
  }
  return t;
}

int Topology::count(TierKind kind) const {
  switch (kind) {
    case TierKind::GIM: return gim;
    case TierKind::DGT: return dgt;
    case TierKind::DST: return dst;
    case TierKind::DWT: return dwt;
  }
  return 0;
}

std::string Topology::text() const {
  return "gim:" + std::to_string(gim) + ",dgt:" + std::to_string(dgt) + ",dst:" + std::to_string(dst) +
         ",dwt:" + std::to_string(dwt) + ",nodes:" + std::to_string(nodes);
}

namespace {

/// The reply, or the error it carries.
Message acked(const std::optional<Message>& reply, const std::string& what) {
  if (!reply) throw Error(ErrorCode::Timeout, what + ": no answer");
  if (reply->kind == MsgKind::Err) resultValue(*reply);  // throws
  return *reply;
}

}  // namespace

Value executeDistributed(const Exchange& exchange, const std::string& gim, const Geer& g, const Context& at) {
  acked(exchange(gim, systemCommand("", "AddGeer").set("geer", geerSerialize(g))), "publishing the GEER");
  Message topo = acked(exchange(gim, systemCommand("", "Heartbeat")), "asking the GIM for its tiers");
  std::vector<std::string> dsts = splitList(topo.get("dst"));
  if (dsts.empty()) throw Error(ErrorCode::Unreachable, "the GIM knows no DST");

  DemandKey key = demandKeyOf(g, Geer::kRootSubject, startingPoint(g, at));
  std::string lastProblem = "no DST answered";
  for (std::size_t attempt = 0; attempt < 2 * dsts.size(); ++attempt) {
    const std::string& dst = dsts[attempt % dsts.size()];
    auto reply = exchange(dst, intensionalDemand("", key));
    if (!reply) {
      lastProblem = "DST " + dst + " did not answer";
      continue;
    }
    if (reply->kind == MsgKind::Err && reply->has("bounced")) {
      lastProblem = "DST " + dst + " is unreachable";
      continue;
    }
    return resultValue(*reply);
  }
  throw Error(ErrorCode::Timeout, lastProblem);
}

SimCluster::SimCluster(Options options) : options_(std::move(options)), net_(options_.seed) {
  const Topology& t = options_.topology;
  if (!options_.library) {
    ownLibrary_ = standardProcedures();
    options_.library = &ownLibrary_;
  }
  for (int i = 1; i <= t.gim; ++i) gims_.push_back("sim:gim" + std::to_string(i));
  for (const auto& address : gims_) {
    std::vector<std::string> peers;
    for (const auto& other : gims_) {
      if (other != address) peers.push_back(other);
    }
    net_.attach(std::make_unique<Gim>(peers, options_.timing), address.substr(4));
  }
  auto mailbox = std::make_unique<Mailbox>();
  client_ = mailbox.get();
  net_.attach(std::move(mailbox), "client");

  std::vector<NodeController*> controllers;
  for (int i = 1; i <= t.nodes; ++i) {
    NodeConfig config{gim(), options_.timing, options_.library, options_.logDir, true, std::nullopt};
    auto node = std::make_unique<NodeController>(config, net_);
    controllers.push_back(node.get());
    nodes_.push_back(net_.attach(std::move(node), "node" + std::to_string(i)));
  }
  bool settled = net_.runUntil(
      [&] {
        for (auto* c : controllers) {
          if (c->state() == NodeController::State::Starting) return false;
        }
        return true;
      },
      10 * options_.timing.deadline);
  for (auto* c : controllers) {
    if (!settled || c->state() != NodeController::State::Registered) {
      throw Error(ErrorCode::Unreachable, "node did not register: " + c->failure());
    }
  }

  std::size_t spread = 0;
  for (TierKind kind : {TierKind::DST, TierKind::DWT, TierKind::DGT}) {
    for (int i = 0; i < t.count(kind); ++i) {
      const std::string& node = nodes_[spread++ % nodes_.size()];
      std::string id = client_->post(
          gim(), systemCommand("", "SpawnTier").set("node", node).set("tier", std::string(tierKindName(kind))));
      std::optional<Message> reply;
      net_.runUntil([&] { return (reply = client_->take(id)).has_value(); }, 10 * options_.timing.deadline);
      tiers_.emplace_back(kind, acked(reply, "spawning a tier").get("address"));
    }
  }
  // Let every tier hear the final topology.
  net_.runUntil([&] { return net_.inFlight() == 0; }, 10 * options_.timing.deadline);
}

Value SimCluster::execute(const Geer& g, const Context& at) {
  Exchange exchange = [&](const std::string& to, Message m) -> std::optional<Message> {
    std::string id = client_->post(to, std::move(m));
    std::optional<Message> reply;
    net_.runUntil([&] { return (reply = client_->take(id)).has_value(); }, options_.clientTimeout);
    return reply;
  };
  return executeDistributed(exchange, gim(), g, at);
}

std::vector<std::string> SimCluster::tiers(TierKind kind) const {
  std::vector<std::string> out;
  for (const auto& [k, address] : tiers_) {
    if (k == kind) out.push_back(address);
  }
  return out;
}

std::shared_ptr<std::string> SimCluster::killBusyWorkerAfter(std::uint64_t afterProcessed) {
  auto victim = std::make_shared<std::string>();
  net_.onDeliver([this, victim, afterProcessed](const std::string&, const Message&) {
    if (!victim->empty() || stat(TierKind::DWT, "processed") < afterProcessed) return;
    // A worker with a demand queued, or one a store is waiting on.
    std::set<std::string> busy;
    for (const auto& w : tiers(TierKind::DWT)) {
      if (auto* dwt = net_.as<Dwt>(w); dwt && net_.alive(w) && dwt->queued() > 0) busy.insert(w);
    }
    for (const auto& s : tiers(TierKind::DST)) {
      if (auto* dst = net_.as<Dst>(s)) {
        for (const auto& [_, a] : dst->assignments()) {
          if (net_.alive(a.worker) && net_.as<Dwt>(a.worker)) busy.insert(a.worker);
        }
      }
    }
    if (busy.empty()) return;
    *victim = *busy.begin();
    net_.kill(*victim);
  });
  return victim;
}

std::map<std::string, std::uint64_t> SimCluster::stats() const {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [kind, address] : tiers_) {
    if (auto* ep = net_.find(address)) {
      for (const auto& [name, n] : ep->stats()) out[std::string(tierKindName(kind)) + "." + name] += n;
    }
  }
  for (const auto& address : gims_) {
    if (auto* ep = net_.find(address)) {
      for (const auto& [name, n] : ep->stats()) out["GIM." + name] += n;
    }
  }
  return out;
}

std::uint64_t SimCluster::stat(TierKind kind, const std::string& counter) const {
  std::uint64_t n = 0;
  for (const auto& [k, address] : tiers_) {
    if (k != kind) continue;
    if (auto* ep = net_.find(address)) {
      if (auto it = ep->stats().find(counter); it != ep->stats().end()) n += it->second;
    }
  }
  return n;
}

}  // namespace iplc
