#include "iplc/tiers/tiers.hpp"

namespace iplc {

class Dgt::Hooks final : public DemandHooks {
 public:
  Hooks(Dgt& dgt, const std::string& jobId, Job& job, TierEnv& env)
      : dgt_(dgt), jobId_(jobId), job_(job), env_(env) {}

  std::optional<Value> fetch(const DemandKey& key) override {
    std::string k = key.text();
    if (auto it = job_.fetched.find(k); it != job_.fetched.end()) return it->second;
    if (job_.missed.contains(k)) return std::nullopt;
    dgt_.count("store gets");
    dgt_.request(jobId_, Message(MsgKind::StoreGet).set("key", k), env_);
    throw Suspended(key);
  }

  void computed(const DemandKey& key, const Value& v) override {
    dgt_.count("store puts");
    Message put(MsgKind::StorePut);
    put.set("id", env_.self() + "#" + std::to_string(++dgt_.next_)).set("key", key.text()).set("value", v.text());
    env_.send(job_.dst, std::move(put.set("job", jobId_)));
  }

  Value procedure(const DemandKey& key, const std::string& name, const std::vector<Value>& args) override {
    std::string k = key.text();
    if (auto it = job_.fetched.find(k); it != job_.fetched.end()) return it->second;
    if (auto it = job_.failures.find(k); it != job_.failures.end()) return resultValue(it->second);
    dgt_.count("procedural demands");
    dgt_.request(jobId_, proceduralDemand("", key, name, args), env_);
    throw Suspended(key);
  }

 private:
  Dgt& dgt_;
  const std::string& jobId_;
  Job& job_;
  TierEnv& env_;
};

Dgt::Dgt(std::string gim, Timing timing, EvalLimits limits)
    : gim_(std::move(gim)), timing_(timing), limits_(limits) {}

void Dgt::receive(const Message& m, TierEnv& env) {
  switch (m.kind) {
    case MsgKind::Demand: {
      if (jobs_.contains(m.id())) return;  // re-dispatched to us while still running
      count("jobs");
      Job job;
      job.demand = m;
      job.dst = m.from();
      // The store dispatched this demand because it had no value for it.
      job.missed.insert(m.get("key"));
      jobs_.emplace(m.id(), std::move(job));
      return start(m.id(), env);
    }
    case MsgKind::StoreHit:
    case MsgKind::StoreMiss:
    case MsgKind::Result:
    case MsgKind::Ack:
    case MsgKind::Err: return answer(m, env);
    case MsgKind::PeerAnnounce:
      dsts_ = splitList(m.get("dst"));
      if (auto gim = m.find("gim")) gim_ = *gim;
      return;
    case MsgKind::Sys:
      if (m.get("cmd") == "Shutdown") stop();
      env.send(m.from(), replyTo(m, MsgKind::Ack).set("jobs", std::to_string(jobs_.size())));
      return;
    default:
      env.send(m.from(), errorReply(m, ErrorCode::ProtocolError,
                                    "a DGT does not handle " + std::string(msgKindName(m.kind))));
  }
}

void Dgt::start(const std::string& jobId, TierEnv& env) {
  const std::string& pid = jobs_.at(jobId).demand.get("program");
  if (programs_.contains(pid)) return run(jobId, env);
  auto& waiting = awaitingProgram_[pid];
  waiting.push_back(jobId);
  if (waiting.size() > 1) return;
  // Fetch the GEER from the GIM.
  count("geer requests");
  std::string id = env.self() + "#" + std::to_string(++next_);
  Message m = systemCommand(id, "AddGeer").set("program", pid);
  requests_[id] = Request{"", m, env.now() + timing_.deadline};
  env.send(gim_, std::move(m));
}

void Dgt::request(const std::string& jobId, Message m, TierEnv& env) {
  Job& job = jobs_.at(jobId);
  std::string id = env.self() + "#" + std::to_string(++next_);
  m.set("id", id).set("job", jobId);
  // Procedural demands wait on a worker, which the store re-dispatches
  // itself; allow it several of its deadlines before asking again.
  std::int64_t wait = m.kind == MsgKind::Demand ? 3 * timing_.deadline : timing_.deadline;
  requests_[id] = Request{jobId, m, env.now() + wait};
  job.waitingFor = id;
  env.send(job.dst, std::move(m));
}

void Dgt::run(const std::string& jobId, TierEnv& env) {
  Job& job = jobs_.at(jobId);
  const std::string& keyText = job.demand.get("key");
  count("runs");
  try {
    const Geer& g = programs_.at(job.demand.get("program"));
    DemandKey key = DemandKey::parse(keyText);
    Hooks hooks(*this, jobId, job, env);
    EductiveEngine engine(g, *job.wh, hooks, limits_);
    engine.setTracing(false);
    Value v = engine.demand(key.subject, key.context);
    finish(jobId, resultOf(jobId, keyText, v), env);
  } catch (const Suspended&) {
    // A request is out; the answer replays the job.
  } catch (const Error& e) {
    finish(jobId, failedResult(jobId, keyText, e.code(), e.what()), env);
  }
}

void Dgt::answer(const Message& m, TierEnv& env) {
  auto it = requests_.find(m.id());
  if (it == requests_.end()) return;
  Request r = std::move(it->second);
  requests_.erase(it);

  if (r.job.empty()) {
    // GEER fetch.
    const std::string& pid = r.message.get("program");
    auto waiting = std::move(awaitingProgram_[pid]);
    awaitingProgram_.erase(pid);
    std::optional<Error> failure;
    if (m.kind == MsgKind::Ack) {
      try {
        Geer g = geerParse(m.get("geer"));
        if (g.programId != pid) throw Error(ErrorCode::ProgramUnavailable, "GIM sent a different program");
        programs_.emplace(pid, std::move(g));
      } catch (const Error& e) {
        failure = Error(ErrorCode::ProgramUnavailable, std::string("GEER for ") + pid + " unusable: " + e.what());
      }
    } else {
      failure = Error(ErrorCode::ProgramUnavailable, m.find("message").value_or("no GEER for " + pid));
    }
    for (const auto& jobId : waiting) {
      if (!jobs_.contains(jobId)) continue;
      if (failure) {
        finish(jobId, failedResult(jobId, jobs_.at(jobId).demand.get("key"), failure->code(), failure->what()), env);
      } else {
        run(jobId, env);
      }
    }
    return;
  }

  auto jt = jobs_.find(r.job);
  if (jt == jobs_.end()) return;
  Job& job = jt->second;
  switch (m.kind) {
    case MsgKind::StoreHit: job.fetched[m.get("key")] = parseValue(m.get("value")); break;
    case MsgKind::StoreMiss: job.missed.insert(m.get("key")); break;
    case MsgKind::Result:
      if (m.has("error")) {
        job.failures[m.get("key")] = m;
      } else {
        job.fetched[m.get("key")] = parseValue(m.get("value"));
      }
      break;
    case MsgKind::Err:
      if (m.has("bounced")) {
        // Our store is gone; carry on with another one.
        job.dst = otherDst(job.dst);
        r.deadline = env.now() + timing_.deadline;
        ++r.attempts;
        count("store failovers");
        requests_[m.id()] = r;
        env.send(job.dst, r.message);
        return;
      }
      finish(r.job, failedResult(r.job, job.demand.get("key"), ErrorCode::StoreUnavailable,
                                 m.find("message").value_or("store refused the request")),
             env);
      return;
    default: return;
  }
  run(r.job, env);
}

std::string Dgt::otherDst(const std::string& avoid) const {
  for (const auto& d : dsts_) {
    if (d != avoid) return d;
  }
  return avoid;
}

void Dgt::finish(const std::string& jobId, Message result, TierEnv& env) {
  auto it = jobs_.find(jobId);
  if (it == jobs_.end()) return;
  count(result.has("error") ? "failed" : "completed");
  env.send(it->second.dst, std::move(result));
  jobs_.erase(it);
  std::erase_if(requests_, [&](const auto& entry) { return entry.second.job == jobId; });
}

void Dgt::tick(TierEnv& env) {
  std::vector<std::string> expired;
  for (const auto& [id, r] : requests_) {
    if (r.deadline <= env.now()) expired.push_back(id);
  }
  for (const auto& id : expired) {
    auto it = requests_.find(id);
    if (it == requests_.end()) continue;
    Request& r = it->second;
    if (r.job.empty()) {
      Message err = errorReply(r.message, ErrorCode::ProgramUnavailable, "GIM did not answer");
      answer(err, env);
      continue;
    }
    Job& job = jobs_.at(r.job);
    if (r.attempts >= 3) {
      finish(r.job, failedResult(r.job, job.demand.get("key"), ErrorCode::Timeout,
                                 "no answer from the store after " + std::to_string(r.attempts) + " attempts"),
             env);
      continue;
    }
    ++r.attempts;
    r.deadline = env.now() + (r.message.kind == MsgKind::Demand ? 3 : 1) * timing_.deadline;
    count("retries");
    if (r.attempts == 3) job.dst = otherDst(job.dst);
    env.send(job.dst, r.message);
  }
}

}  // namespace iplc
