#include <algorithm>
#include <cctype>

#include "iplc/tiers/tiers.hpp"

namespace iplc {

namespace {

/// `sim:n1` -> `n1`, `127.0.0.1:7000` -> `127.0.0.1-7000`.
std::string baseName(const std::string& address) {
  std::string s = address.starts_with("sim:") ? address.substr(4) : address;
  std::replace_if(s.begin(), s.end(), [](unsigned char c) { return !std::isalnum(c) && c != '.' && c != '_'; }, '-');
  return s;
}

}  // namespace

NodeController::NodeController(NodeConfig config, Network& net) : config_(std::move(config)), net_(net) {}

void NodeController::start(TierEnv& env) {
  if (!config_.registerOnStart) {
    state_ = State::Registered;
    return;
  }
  registerDeadline_ = env.now() + config_.timing.deadline;
  env.send(config_.gim, systemCommand(env.self() + "#register", "RegisterNode").set("address", env.self()));
}

std::unique_ptr<Tier> NodeController::make(TierKind kind, const std::string& name, const std::string& node) {
  switch (kind) {
    case TierKind::DGT: return std::make_unique<Dgt>(config_.gim, config_.timing);
    case TierKind::DWT: return std::make_unique<Dwt>(node, config_.library, config_.timing);
    case TierKind::GIM: return std::make_unique<Gim>(std::vector<std::string>{}, config_.timing);
    case TierKind::DST: {
      Dst::Options options{config_.timing, std::nullopt, false};
      if (config_.logDir) options.log = *config_.logDir / (name + ".log");
      return std::make_unique<Dst>(std::move(options));
    }
  }
  throw Error(ErrorCode::SpawnFailed, "unknown tier kind");
}

void NodeController::receive(const Message& m, TierEnv& env) {
  switch (m.kind) {
    case MsgKind::Sys: {
      const std::string& cmd = m.get("cmd");
      if (cmd == "Heartbeat") {
        env.send(m.from(), replyTo(m, MsgKind::Ack).set("tiers", std::to_string(tiers_.size())));
      } else if (cmd == "SpawnTier") {
        auto kind = tierKindFromName(m.get("tier"));
        if (!kind) {
          env.send(m.from(), errorReply(m, ErrorCode::SpawnFailed, "no tier kind " + m.get("tier")));
          return;
        }
        try {
          std::string lower(tierKindName(*kind));
          std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
          std::string name = baseName(env.self()) + "." + lower + std::to_string(++next_);
          std::string address = net_.attach(make(*kind, name, env.self()), name);
          tiers_.emplace_back(*kind, address);
          count("spawned");
          env.send(m.from(), replyTo(m, MsgKind::Ack).set("address", address).set("tier", std::string(tierKindName(*kind))));
        } catch (const Error& e) {
          env.send(m.from(), errorReply(m, ErrorCode::SpawnFailed, e.what()));
        }
      } else if (cmd == "AddProcedure") {
        const std::string& name = m.get("name");
        if (config_.library && config_.library->contains(name)) {
          env.send(m.from(), replyTo(m, MsgKind::Ack).set("name", name));
        } else {
          env.send(m.from(), errorReply(m, ErrorCode::UnknownProcedure, "node library has no procedure " + name));
        }
      } else if (cmd == "Shutdown") {
        for (const auto& [_, address] : tiers_) net_.kill(address);
        env.send(m.from(), replyTo(m, MsgKind::Ack));
        stop();
      } else {
        env.send(m.from(), errorReply(m, ErrorCode::ProtocolError, "a node does not handle " + cmd));
      }
      return;
    }
    case MsgKind::Ack:
      if (m.id() == env.self() + "#register") {
        state_ = State::Registered;
        if (config_.spawnOnStart) {
          env.send(config_.gim, systemCommand(env.self() + "#spawn", "SpawnTier")
                                    .set("node", env.self())
                                    .set("tier", std::string(tierKindName(*config_.spawnOnStart))));
        }
      }
      return;
    case MsgKind::Err:
      if (m.id() == env.self() + "#register" || m.id() == env.self() + "#spawn") {
        state_ = State::Failed;
        failure_ = m.find("error").value_or("Error") + ": " + m.find("message").value_or("");
      }
      return;
    default:
      env.send(m.from(), errorReply(m, ErrorCode::ProtocolError,
                                    "a node does not handle " + std::string(msgKindName(m.kind))));
  }
}

void NodeController::tick(TierEnv& env) {
  if (state_ == State::Starting && env.now() > registerDeadline_) {
    state_ = State::Failed;
    failure_ = "Unreachable: GIM " + config_.gim + " did not answer the registration";
  }
}

}  // namespace iplc
