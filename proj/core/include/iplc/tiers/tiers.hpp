#pragma once

// The four tier kinds and the node controller that hosts them. All of them
// talk only through Messages:
//
//   client --DEMAND--> DST --DEMAND--> DGT   (root demand, re-dispatched on deadline)
//   DGT --STORE_GET/STORE_PUT--> DST --STORE_GET--> DST peers
//   DGT --DEMAND(procedural)--> DST --DEMAND--> DWT --RESULT--> DST --RESULT--> DGT
//   DGT --SYS AddGeer--> GIM,  DWT --SYS AddProcedure--> node
//
// Field names used on the wire: id, from, demand (intensional|procedural),
// program, key, proc, args, value, error, message, cmd, tier, node,
// address, geer, scope, job, dst, dwt, dgt, gim, nodes, bounced.

#include <deque>
#include <filesystem>
#include <map>
#include <set>
#include <vector>

#include "iplc/eval.hpp"
#include "iplc/geer.hpp"
#include "iplc/procedures.hpp"
#include "iplc/tiers/tier.hpp"
#include "iplc/warehouse.hpp"

namespace iplc {

Message intensionalDemand(const std::string& id, const DemandKey& key);
Message proceduralDemand(const std::string& id, const DemandKey& key, const std::string& name,
                         const std::vector<Value>& args);
Message systemCommand(const std::string& id, const std::string& cmd);

/// RESULT carrying either `value` or `error` + `message`.
Message resultOf(const std::string& id, const std::string& key, const Value& v);
Message failedResult(const std::string& id, const std::string& key, ErrorCode code, const std::string& message);
/// The value of a RESULT or STORE_HIT; throws the carried error.
Value resultValue(const Message& m);

/// Instance manager: registers nodes, spawns tiers through them, keeps the
/// GEER pool, and tells every tier who its peers are.
class Gim final : public Tier {
 public:
  struct NodeInfo {
    std::string address;
    std::vector<std::pair<TierKind, std::string>> tiers;
  };

  Gim(std::vector<std::string> peers, Timing timing);

  TierKind kind() const noexcept override { return TierKind::GIM; }
  void receive(const Message& m, TierEnv& env) override;
  void tick(TierEnv& env) override;

  const std::map<std::string, NodeInfo>& nodes() const noexcept { return nodes_; }
  std::vector<std::string> tiersOf(TierKind kind) const;
  bool hasProgram(const std::string& programId) const { return programs_.contains(programId); }

 private:
  struct Pending {
    enum class What : std::uint8_t { Register, Spawn } what;
    Message request;
    std::string node;
    std::int64_t deadline;
  };

  void system(const Message& m, TierEnv& env);
  void reply(const Message& m, TierEnv& env);
  void announce(TierEnv& env);
  Message topology() const;

  std::vector<std::string> peers_;
  Timing timing_;
  std::map<std::string, NodeInfo> nodes_;
  std::map<std::string, std::string> programs_;  // programId -> GEER bytes
  std::map<std::string, Pending> pending_;
  std::uint64_t next_ = 0;
};

/// Demand store. Holds computed values (single assignment), answers lookups
/// from its own table or by asking each peer once, and dispatches root
/// demands to generators and procedural demands to workers, re-dispatching
/// any that miss their deadline.
class Dst final : public Tier {
 public:
  struct Options {
    Timing timing;
    /// Append-only `PUT <key> <value>` log, replayed on construction.
    std::optional<std::filesystem::path> log;
    bool fsync = false;
  };

  struct Assignment {
    Message demand;
    std::string worker;
    std::int64_t deadline;
    std::vector<std::pair<std::string, std::string>> requesters;  // (address, their id)
  };

  explicit Dst(Options options);
  ~Dst() override;

  TierKind kind() const noexcept override { return TierKind::DST; }
  void receive(const Message& m, TierEnv& env) override;
  void tick(TierEnv& env) override;

  std::optional<Value> local(const DemandKey& key) const { return store_.peek(key); }
  std::size_t size() const { return store_.size(); }
  const std::map<std::string, Assignment>& assignments() const noexcept { return assigned_; }
  const std::vector<std::string>& peers() const noexcept { return peers_; }

  /// Re-dispatches every assignment past its deadline; returns how many.
  std::uint64_t reissueExpired(TierEnv& env);

 private:
  struct Lookup {
    std::string requester;
    std::string requestId;
    DemandKey key;
    std::set<std::string> waiting;
    std::int64_t deadline;
  };

  void put(const DemandKey& key, const Value& v);
  void get(const Message& m, TierEnv& env);
  void finishLookup(const std::string& id, std::optional<Value> v, TierEnv& env);
  void demand(const Message& m, TierEnv& env);
  void result(const Message& m, TierEnv& env);
  void bounced(const Message& m, TierEnv& env);
  bool dispatch(Assignment& a, const std::string& id, TierEnv& env, bool again);
  std::vector<std::string>& poolFor(const Assignment& a);

  Options options_;
  Warehouse store_;
  std::FILE* log_ = nullptr;
  std::vector<std::string> peers_, generators_, workers_;
  std::set<std::string> dead_;
  std::map<std::string, Lookup> lookups_;
  std::map<std::string, Assignment> assigned_;  // by our dispatch id
  std::map<std::string, std::string> byKey_;   // demand key -> dispatch id
  std::size_t rrGenerator_ = 0, rrWorker_ = 0;
  std::uint64_t next_ = 0;
};

/// Demand generator: runs the eduction engine for root demands, with every
/// warehouse miss looked up in the DST first and every procedure call sent
/// out as a procedural demand. An evaluation that must wait is abandoned
/// and replayed from the root when the answer arrives; values already
/// known stay in the job's warehouse, so replays only walk cached paths.
class Dgt final : public Tier {
 public:
  Dgt(std::string gim, Timing timing, EvalLimits limits = {});

  TierKind kind() const noexcept override { return TierKind::DGT; }
  void receive(const Message& m, TierEnv& env) override;
  void tick(TierEnv& env) override;

  bool hasProgram(const std::string& programId) const { return programs_.contains(programId); }
  std::size_t activeJobs() const noexcept { return jobs_.size(); }

 private:
  struct Job {
    Message demand;
    std::string dst;
    std::unique_ptr<Warehouse> wh = std::make_unique<Warehouse>();
    std::map<std::string, Value> fetched;       // DST hits and procedure results
    std::map<std::string, Message> failures;    // procedure error results
    std::set<std::string> missed;               // DST misses: compute locally
    std::string waitingFor;                     // request id
  };
  struct Request {
    std::string job;
    Message message;
    std::int64_t deadline;
    int attempts = 1;
  };

  class Hooks;
  void start(const std::string& jobId, TierEnv& env);
  void run(const std::string& jobId, TierEnv& env);
  void request(const std::string& jobId, Message m, TierEnv& env);
  void answer(const Message& m, TierEnv& env);
  void finish(const std::string& jobId, Message result, TierEnv& env);
  std::string otherDst(const std::string& avoid) const;

  std::string gim_;
  Timing timing_;
  EvalLimits limits_;
  std::map<std::string, Geer> programs_;
  std::map<std::string, std::vector<std::string>> awaitingProgram_;  // programId -> jobs
  std::map<std::string, Job> jobs_;
  std::map<std::string, Request> requests_;
  std::vector<std::string> dsts_;
  std::uint64_t next_ = 0;
};

/// Demand worker: applies native procedures to ground arguments. Its pool
/// starts empty; a missing procedure is requested from the hosting node's
/// library with an AddProcedure system demand.
class Dwt final : public Tier {
 public:
  Dwt(std::string node, const ProcedureRegistry* library, Timing timing);

  TierKind kind() const noexcept override { return TierKind::DWT; }
  void receive(const Message& m, TierEnv& env) override;
  void tick(TierEnv& env) override;

  std::vector<std::string> pool() const { return pool_.names(); }
  std::size_t queued() const noexcept { return queue_.size(); }

 private:
  void accept(const Message& m, TierEnv& env);
  void process(const Message& m, TierEnv& env);

  std::string node_;
  const ProcedureRegistry* library_;
  Timing timing_;
  ProcedureRegistry pool_;
  std::deque<std::pair<std::int64_t, Message>> queue_;  // (ready at, demand)
  std::map<std::string, std::vector<Message>> awaitingProcedure_;
  std::uint64_t next_ = 0;
};

struct NodeConfig {
  std::string gim;
  Timing timing;
  const ProcedureRegistry* library = nullptr;
  /// DST logs go here as `<address>.log` when set.
  std::optional<std::filesystem::path> logDir;
  /// Register with the GIM on start.
  bool registerOnStart = true;
  /// After registering, ask the GIM to spawn one tier of this kind here.
  std::optional<TierKind> spawnOnStart;
};

/// Host-level controller with one tier factory per kind.
class NodeController final : public Endpoint {
 public:
  enum class State : std::uint8_t { Starting, Registered, Failed };

  NodeController(NodeConfig config, Network& net);

  void start(TierEnv& env) override;
  void receive(const Message& m, TierEnv& env) override;
  void tick(TierEnv& env) override;

  State state() const noexcept { return state_; }
  const std::string& failure() const noexcept { return failure_; }
  const std::vector<std::pair<TierKind, std::string>>& tiers() const noexcept { return tiers_; }

 private:
  std::unique_ptr<Tier> make(TierKind kind, const std::string& name, const std::string& node);

  NodeConfig config_;
  Network& net_;
  State state_ = State::Starting;
  std::string failure_;
  std::int64_t registerDeadline_ = 0;
  std::vector<std::pair<TierKind, std::string>> tiers_;
  std::uint64_t next_ = 0;
};

}  // namespace iplc
