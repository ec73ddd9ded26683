#include <algorithm>

#include "iplc/tiers/tiers.hpp"

namespace iplc {

namespace {

constexpr std::string_view kAddProcedure = "addproc:";

}  // namespace

Dwt::Dwt(std::string node, const ProcedureRegistry* library, Timing timing)
    : node_(std::move(node)), library_(library), timing_(timing) {}

void Dwt::receive(const Message& m, TierEnv& env) {
  switch (m.kind) {
    case MsgKind::Demand:
      if (m.find("demand") != "procedural") {
        env.send(m.from(), failedResult(m.id(), m.find("key").value_or(""), ErrorCode::ProtocolError,
                                        "a DWT only runs procedural demands"));
        return;
      }
      return accept(m, env);
    case MsgKind::Ack:
    case MsgKind::Err: {
      const std::string& id = m.id();
      if (!id.starts_with(kAddProcedure)) return;
      std::string name = id.substr(kAddProcedure.size());
      auto waiting = std::move(awaitingProcedure_[name]);
      awaitingProcedure_.erase(name);
      const ProcedureRegistry::Entry* entry = library_ ? library_->find(name) : nullptr;
      if (m.kind == MsgKind::Ack && entry) {
        pool_.add(name, entry->arity, entry->fn);
        count("procedures loaded");
        for (const auto& d : waiting) accept(d, env);
      } else {
        for (const auto& d : waiting) {
          env.send(d.from(), failedResult(d.id(), d.get("key"), ErrorCode::UnknownProcedure,
                                          "no procedure " + name + " on node " + node_));
        }
      }
      return;
    }
    case MsgKind::PeerAnnounce: return;
    case MsgKind::Sys:
      if (m.get("cmd") == "Shutdown") stop();
      env.send(m.from(), replyTo(m, MsgKind::Ack).set("queued", std::to_string(queue_.size())));
      return;
    default:
      env.send(m.from(), errorReply(m, ErrorCode::ProtocolError,
                                    "a DWT does not handle " + std::string(msgKindName(m.kind))));
  }
}

void Dwt::accept(const Message& m, TierEnv& env) {
  const std::string& name = m.get("proc");
  if (pool_.contains(name)) {
    if (timing_.workTime <= 0) return process(m, env);
    // One demand at a time: each starts when the previous one is done.
    std::int64_t begin = queue_.empty() ? env.now() : std::max(env.now(), queue_.back().first);
    queue_.emplace_back(begin + timing_.workTime, m);
    return;
  }
  auto& waiting = awaitingProcedure_[name];
  waiting.push_back(m);
  if (waiting.size() > 1) return;
  env.send(node_, systemCommand(std::string(kAddProcedure) + name, "AddProcedure").set("name", name));
}

void Dwt::process(const Message& m, TierEnv& env) {
  const std::string& key = m.get("key");
  try {
    std::vector<Value> args;
    for (const auto& text : splitList(m.get("args"))) args.push_back(parseValue(text));
    Value v = pool_.call(m.get("proc"), args);
    count("processed");
    env.send(m.from(), resultOf(m.id(), key, v));
  } catch (const Error& e) {
    count("failed");
    env.send(m.from(), failedResult(m.id(), key, e.code(), e.what()));
  }
}

void Dwt::tick(TierEnv& env) {
  while (!queue_.empty() && queue_.front().first <= env.now()) {
    Message m = std::move(queue_.front().second);
    queue_.pop_front();
    process(m, env);
  }
}

}  // namespace iplc
