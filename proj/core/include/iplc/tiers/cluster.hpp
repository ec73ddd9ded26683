#pragma once

#include <functional>

#include "iplc/tiers/sim.hpp"
#include "iplc/tiers/tiers.hpp"

namespace iplc {

/// Tier counts, written `gim:1,dgt:2,dst:2,dwt:2`. Kinds left out get one
/// instance; an explicit zero is a UsageError.
struct Topology {
  int gim = 1, dgt = 1, dst = 1, dwt = 1;
  /// Hosting nodes; tiers are spread over them round-robin.
  int nodes = 2;

  static Topology parse(std::string_view spec);
  int count(TierKind kind) const;
  std::string text() const;
};

/// Sends one request and returns the message answering its id, or nullopt
/// when none came in time.
using Exchange = std::function<std::optional<Message>(const std::string& to, Message m)>;

/// Publishes `g` to the GIM, then demands its root value at `at` through
/// one of the DSTs the GIM knows, moving to the next DST when one does not
/// answer. Throws the error a tier reported, or Timeout.
Value executeDistributed(const Exchange& exchange, const std::string& gim, const Geer& g, const Context& at);

/// A whole topology on one SimNetwork.
class SimCluster {
 public:
  struct Options {
    Topology topology;
    std::uint64_t seed = 1;
    Timing timing = Timing::simulated();
    /// Procedures the nodes offer; standardProcedures() when null.
    const ProcedureRegistry* library = nullptr;
    std::optional<std::filesystem::path> logDir;
    /// Simulated ticks a client waits for one answer.
    std::int64_t clientTimeout = 2'000'000;
  };

  explicit SimCluster(Options options);

  Value execute(const Geer& g, const Context& at);

  SimNetwork& net() noexcept { return net_; }
  const std::string& gim() const noexcept { return gims_.front(); }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  std::vector<std::string> tiers(TierKind kind) const;
  void kill(const std::string& address) { net_.kill(address); }

  /// Once workers have finished `afterProcessed` procedural demands, kills
  /// a worker that holds unfinished work. Returns the victim's address
  /// slot, filled in when it happens.
  std::shared_ptr<std::string> killBusyWorkerAfter(std::uint64_t afterProcessed);

  /// Every tier's counters, as `<KIND>.<counter>` summed over instances.
  std::map<std::string, std::uint64_t> stats() const;
  std::uint64_t stat(TierKind kind, const std::string& counter) const;

 private:
  Options options_;
  ProcedureRegistry ownLibrary_;
  SimNetwork net_;
  Mailbox* client_ = nullptr;
  std::vector<std::string> gims_, nodes_;
  std::vector<std::pair<TierKind, std::string>> tiers_;
  std::set<std::string> published_;
};

}  // namespace iplc
