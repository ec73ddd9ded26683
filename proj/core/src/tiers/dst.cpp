#include <unistd.h>

#include <algorithm>
#include <fstream>

#include "iplc/text.hpp"
#include "iplc/tiers/tiers.hpp"

namespace iplc {

namespace {

/// Splits a `PUT <key> <value>` log record.
std::pair<DemandKey, Value> parseRecord(std::string_view line) {
  if (!line.starts_with("PUT ")) throw Error(ErrorCode::ProtocolError, "bad store log record");
  line.remove_prefix(4);
  TextCursor cur(line);
  cur.readAtom("():\"@");
  cur.expect(':');
  cur.readQuoted();
  cur.expect('@');
  cur.readContext();
  std::size_t end = cur.position();
  return {DemandKey::parse(line.substr(0, end)), parseValue(line.substr(end))};
}

}  // namespace

Dst::Dst(Options options) : options_(std::move(options)) {
  if (!options_.log) return;
  if (std::ifstream in(*options_.log); in) {
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      auto [key, value] = parseRecord(line);
      store_.insert(key, value);
      count("replayed");
    }
  }
  log_ = std::fopen(options_.log->c_str(), "a");
  if (!log_) throw Error(ErrorCode::IoError, "cannot open store log " + options_.log->string());
}

Dst::~Dst() {
  if (log_) std::fclose(log_);
}

void Dst::put(const DemandKey& key, const Value& v) {
  if (store_.peek(key)) {
    store_.insert(key, v);  // equal: no-op; different: ConflictingResult
    return;
  }
  store_.insert(key, v);
  count("stored");
  if (log_) {
    std::string record = "PUT " + key.text() + " " + v.text() + "\n";
    std::fputs(record.c_str(), log_);
    std::fflush(log_);
    if (options_.fsync) ::fsync(::fileno(log_));
  }
}

void Dst::receive(const Message& m, TierEnv& env) {
  if (auto job = m.find("job")) {
    // Generator progress on a root demand keeps its assignment alive.
    if (auto it = assigned_.find(*job); it != assigned_.end()) {
      it->second.deadline = env.now() + options_.timing.deadline;
    }
  }
  switch (m.kind) {
    case MsgKind::StorePut: {
      count("puts");
      try {
        put(DemandKey::parse(m.get("key")), parseValue(m.get("value")));
        env.send(m.from(), replyTo(m, MsgKind::Ack));
      } catch (const Error& e) {
        env.send(m.from(), errorReply(m, e.code(), e.what()));
      }
      return;
    }
    case MsgKind::StoreGet: return get(m, env);
    case MsgKind::StoreHit: {
      auto it = lookups_.find(m.id());
      if (it != lookups_.end()) finishLookup(m.id(), parseValue(m.get("value")), env);
      return;
    }
    case MsgKind::StoreMiss: {
      auto it = lookups_.find(m.id());
      if (it == lookups_.end()) return;
      it->second.waiting.erase(m.from());
      if (it->second.waiting.empty()) finishLookup(m.id(), std::nullopt, env);
      return;
    }
    case MsgKind::Err: return bounced(m, env);
    case MsgKind::Demand: return demand(m, env);
    case MsgKind::Result: return result(m, env);
    case MsgKind::PeerAnnounce: {
      peers_.clear();
      for (auto& a : splitList(m.get("dst"))) {
        if (a != env.self()) peers_.push_back(std::move(a));
      }
      workers_ = splitList(m.get("dwt"));
      generators_ = splitList(m.get("dgt"));
      return;
    }
    case MsgKind::Sys: {
      const std::string& cmd = m.get("cmd");
      if (cmd == "Heartbeat") {
        env.send(m.from(), replyTo(m, MsgKind::Ack).set("size", std::to_string(store_.size())));
      } else if (cmd == "Shutdown") {
        env.send(m.from(), replyTo(m, MsgKind::Ack));
        stop();
      } else {
        env.send(m.from(), errorReply(m, ErrorCode::ProtocolError, "a DST does not handle " + cmd));
      }
      return;
    }
    case MsgKind::Ack: return;
  }
}

void Dst::get(const Message& m, TierEnv& env) {
  count("gets");
  DemandKey key = DemandKey::parse(m.get("key"));
  if (auto v = store_.peek(key)) {
    count("hits");
    env.send(m.from(), replyTo(m, MsgKind::StoreHit).set("key", m.get("key")).set("value", v->text()));
    return;
  }
  std::set<std::string> live;
  for (const auto& p : peers_) {
    if (!dead_.contains(p)) live.insert(p);
  }
  if (m.find("scope") == "local" || live.empty()) {
    count("misses");
    env.send(m.from(), replyTo(m, MsgKind::StoreMiss).set("key", m.get("key")));
    return;
  }
  std::string id = env.self() + "#" + std::to_string(++next_);
  for (const auto& p : live) {
    count("peer queries");
    env.send(p, Message(MsgKind::StoreGet).set("id", id).set("key", m.get("key")).set("scope", "local"));
  }
  lookups_.emplace(id, Lookup{m.from(), m.id(), std::move(key), std::move(live), env.now() + options_.timing.peerTimeout});
}

void Dst::finishLookup(const std::string& id, std::optional<Value> v, TierEnv& env) {
  auto it = lookups_.find(id);
  Lookup l = std::move(it->second);
  lookups_.erase(it);
  Message reply(v ? MsgKind::StoreHit : MsgKind::StoreMiss);
  reply.set("id", l.requestId).set("key", l.key.text());
  if (v) {
    count("peer hits");
    reply.set("value", v->text());
  } else {
    count("misses");
  }
  env.send(l.requester, std::move(reply));
}

std::vector<std::string>& Dst::poolFor(const Assignment& a) {
  return a.demand.get("demand") == "procedural" ? workers_ : generators_;
}

bool Dst::dispatch(Assignment& a, const std::string& id, TierEnv& env, bool again) {
  auto& pool = poolFor(a);
  std::size_t& rr = &pool == &workers_ ? rrWorker_ : rrGenerator_;
  std::vector<std::string> live;
  for (const auto& w : pool) {
    if (!dead_.contains(w)) live.push_back(w);
  }
  if (live.empty()) {
    for (const auto& [address, theirId] : a.requesters) {
      env.send(address, failedResult(theirId, a.demand.get("key"), ErrorCode::Unreachable,
                                     "no live " + std::string(&pool == &workers_ ? "DWT" : "DGT") + " to run the demand"));
    }
    return false;
  }
  std::string chosen = live[rr++ % live.size()];
  if (again && chosen == a.worker && live.size() > 1) chosen = live[rr++ % live.size()];
  a.worker = chosen;
  a.deadline = env.now() + options_.timing.deadline;
  count(again ? "redispatched" : "dispatched");
  Message out = a.demand;
  out.set("id", id);
  env.send(chosen, std::move(out));
  return true;
}

void Dst::demand(const Message& m, TierEnv& env) {
  const std::string& keyText = m.get("key");
  count("demands");
  DemandKey key = DemandKey::parse(keyText);
  if (auto v = store_.peek(key)) {
    count("answered from store");
    env.send(m.from(), resultOf(m.id(), keyText, *v));
    return;
  }
  if (auto it = byKey_.find(keyText); it != byKey_.end()) {
    auto& reqs = assigned_.at(it->second).requesters;
    std::pair<std::string, std::string> who{m.from(), m.id()};
    if (std::find(reqs.begin(), reqs.end(), who) == reqs.end()) reqs.push_back(std::move(who));
    return;
  }
  std::string id = env.self() + "#" + std::to_string(++next_);
  Assignment a{m, "", 0, {{m.from(), m.id()}}};
  if (!dispatch(a, id, env, false)) return;
  byKey_[keyText] = id;
  assigned_.emplace(id, std::move(a));
}

void Dst::result(const Message& m, TierEnv& env) {
  auto it = assigned_.find(m.id());
  if (it == assigned_.end()) {
    // A late answer to work that was re-dispatched and already finished.
    count("late results");
    return;
  }
  Assignment a = std::move(it->second);
  assigned_.erase(it);
  byKey_.erase(a.demand.get("key"));
  Message out = m;
  if (auto value = m.find("value")) {
    try {
      put(DemandKey::parse(m.get("key")), parseValue(*value));
    } catch (const Error& e) {
      out = failedResult(m.id(), m.get("key"), e.code(), e.what());
    }
  }
  count("results");
  for (const auto& [address, theirId] : a.requesters) {
    Message copy = out;
    copy.set("id", theirId);
    env.send(address, std::move(copy));
  }
}

void Dst::bounced(const Message& m, TierEnv& env) {
  auto kind = m.find("bounced");
  if (!kind) return;
  dead_.insert(m.from());
  if (*kind == msgKindName(MsgKind::StoreGet)) {
    auto it = lookups_.find(m.id());
    if (it == lookups_.end()) return;
    it->second.waiting.erase(m.from());
    if (it->second.waiting.empty()) finishLookup(m.id(), std::nullopt, env);
  } else if (*kind == msgKindName(MsgKind::Demand)) {
    auto it = assigned_.find(m.id());
    if (it == assigned_.end()) return;
    if (!dispatch(it->second, it->first, env, true)) {
      byKey_.erase(it->second.demand.get("key"));
      assigned_.erase(it);
    }
  }
}

std::uint64_t Dst::reissueExpired(TierEnv& env) {
  std::uint64_t n = 0;
  for (auto it = assigned_.begin(); it != assigned_.end();) {
    if (it->second.deadline > env.now()) {
      ++it;
      continue;
    }
    ++n;
    if (dispatch(it->second, it->first, env, true)) {
      ++it;
    } else {
      byKey_.erase(it->second.demand.get("key"));
      it = assigned_.erase(it);
    }
  }
  return n;
}

void Dst::tick(TierEnv& env) {
  std::vector<std::string> expired;
  for (const auto& [id, l] : lookups_) {
    if (l.deadline <= env.now()) expired.push_back(id);
  }
  // A slow peer is not presumed dead: only a bounce marks it so.
  for (const auto& id : expired) finishLookup(id, std::nullopt, env);
  reissueExpired(env);
}

}  // namespace iplc
