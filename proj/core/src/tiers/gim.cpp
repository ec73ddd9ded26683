#include "iplc/tiers/tiers.hpp"

namespace iplc {

Gim::Gim(std::vector<std::string> peers, Timing timing) : peers_(std::move(peers)), timing_(timing) {}

std::vector<std::string> Gim::tiersOf(TierKind kind) const {
  std::vector<std::string> out;
  for (const auto& [_, node] : nodes_) {
    for (const auto& [k, address] : node.tiers) {
      if (k == kind) out.push_back(address);
    }
  }
  return out;
}

Message Gim::topology() const {
  Message m(MsgKind::PeerAnnounce);
  m.set("dst", joinList(tiersOf(TierKind::DST)));
  m.set("dwt", joinList(tiersOf(TierKind::DWT)));
  m.set("dgt", joinList(tiersOf(TierKind::DGT)));
  std::vector<std::string> nodes;
  for (const auto& [address, _] : nodes_) nodes.push_back(address);
  m.set("nodes", joinList(nodes));
  return m;
}

void Gim::announce(TierEnv& env) {
  Message m = topology();
  m.set("gim", env.self());
  for (TierKind k : {TierKind::DST, TierKind::DWT, TierKind::DGT}) {
    for (const auto& address : tiersOf(k)) {
      env.send(address, Message(m).set("id", env.self() + "#" + std::to_string(++next_)));
    }
  }
}

void Gim::receive(const Message& m, TierEnv& env) {
  switch (m.kind) {
    case MsgKind::Sys: return system(m, env);
    case MsgKind::Ack:
    case MsgKind::Err: return reply(m, env);
    case MsgKind::PeerAnnounce:
      // Another GIM learned of a node.
      if (auto node = m.find("node"); node && !nodes_.contains(*node)) {
        nodes_[*node] = NodeInfo{*node, {}};
        count("nodes");
      }
      return;
    default:
      env.send(m.from(), errorReply(m, ErrorCode::ProtocolError,
                                    "a GIM does not handle " + std::string(msgKindName(m.kind))));
  }
}

void Gim::system(const Message& m, TierEnv& env) {
  const std::string& cmd = m.get("cmd");
  auto fresh = [&] { return env.self() + "#" + std::to_string(++next_); };
  if (cmd == "RegisterNode") {
    const std::string& address = m.get("address");
    bool registering = false;
    for (const auto& [_, p] : pending_) registering = registering || (p.what == Pending::What::Register && p.node == address);
    if (nodes_.contains(address) || registering) {
      env.send(m.from(), errorReply(m, ErrorCode::DuplicateNode, "node " + address + " is already registered"));
      return;
    }
    // Only a node that answers gets listed.
    std::string id = fresh();
    pending_[id] = Pending{Pending::What::Register, m, address, env.now() + timing_.peerTimeout};
    env.send(address, systemCommand(id, "Heartbeat"));
  } else if (cmd == "SpawnTier") {
    const std::string& node = m.get("node");
    if (!nodes_.contains(node)) {
      env.send(m.from(), errorReply(m, ErrorCode::UnknownNode, "no node " + node + " is registered"));
      return;
    }
    auto kind = tierKindFromName(m.get("tier"));
    if (!kind) {
      env.send(m.from(), errorReply(m, ErrorCode::SpawnFailed, "no tier kind " + m.get("tier")));
      return;
    }
    std::string id = fresh();
    pending_[id] = Pending{Pending::What::Spawn, m, node, env.now() + timing_.deadline};
    env.send(node, systemCommand(id, "SpawnTier").set("tier", std::string(tierKindName(*kind))));
  } else if (cmd == "AddGeer") {
    if (auto bytes = m.find("geer")) {
      try {
        Geer g = geerParse(*bytes);
        programs_[g.programId] = *bytes;
        env.send(m.from(), replyTo(m, MsgKind::Ack).set("program", g.programId));
      } catch (const Error& e) {
        env.send(m.from(), errorReply(m, e.code(), e.what()));
      }
      return;
    }
    const std::string& pid = m.get("program");
    auto it = programs_.find(pid);
    if (it == programs_.end()) {
      env.send(m.from(), errorReply(m, ErrorCode::ProgramUnavailable, "no GEER for program " + pid));
      return;
    }
    count("geers served");
    env.send(m.from(), replyTo(m, MsgKind::Ack).set("program", pid).set("geer", it->second));
  } else if (cmd == "Heartbeat") {
    Message ack = topology();
    ack.kind = MsgKind::Ack;
    ack.set("id", m.id());
    env.send(m.from(), std::move(ack));
  } else if (cmd == "Shutdown") {
    env.send(m.from(), replyTo(m, MsgKind::Ack));
    stop();
  } else {
    env.send(m.from(), errorReply(m, ErrorCode::ProtocolError, "unknown system command " + cmd));
  }
}

void Gim::reply(const Message& m, TierEnv& env) {
  auto it = pending_.find(m.id());
  if (it == pending_.end()) return;
  Pending p = std::move(it->second);
  pending_.erase(it);
  const Message& req = p.request;
  bool ok = m.kind == MsgKind::Ack;
  if (p.what == Pending::What::Register) {
    if (!ok) {
      env.send(req.from(), errorReply(req, ErrorCode::Unreachable, "node " + p.node + " did not answer"));
      return;
    }
    nodes_[p.node] = NodeInfo{p.node, {}};
    count("nodes");
    env.send(req.from(), replyTo(req, MsgKind::Ack).set("node", p.node));
    for (const auto& peer : peers_) {
      Message note(MsgKind::PeerAnnounce);
      note.set("id", env.self() + "#" + std::to_string(++next_)).set("node", p.node);
      env.send(peer, std::move(note));
    }
    return;
  }
  if (!ok) {
    env.send(req.from(), errorReply(req, ErrorCode::SpawnFailed, m.find("message").value_or("spawn failed")));
    return;
  }
  auto kind = tierKindFromName(m.get("tier"));
  const std::string& address = m.get("address");
  nodes_[p.node].tiers.emplace_back(*kind, address);
  count("spawns");
  env.send(req.from(), replyTo(req, MsgKind::Ack).set("address", address).set("tier", m.get("tier")).set("node", p.node));
  announce(env);
}

void Gim::tick(TierEnv& env) {
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->second.deadline > env.now()) {
      ++it;
      continue;
    }
    const Message& req = it->second.request;
    if (it->second.what == Pending::What::Register) {
      env.send(req.from(), errorReply(req, ErrorCode::Unreachable, "node " + it->second.node + " did not answer"));
    } else {
      env.send(req.from(), errorReply(req, ErrorCode::SpawnFailed, "node " + it->second.node + " did not answer"));
    }
    it = pending_.erase(it);
  }
}

}  // namespace iplc
