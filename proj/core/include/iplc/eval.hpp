#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iplc/geer.hpp"
#include "iplc/procedures.hpp"
#include "iplc/value.hpp"
#include "iplc/warehouse.hpp"

namespace iplc {

/// Inference rules of the two operational semantics, for coverage tracking.
enum class Rule : std::uint8_t {
  // GIPL
  Cid, Opid, Did, Fid, Vid, CondTrue, CondFalse, Tag, At, Where, QDim, QId, QQ, Op, Fct,
  // Lucx
  Hash, Dot, Tuple, Select, AtContext, AtSet, Context, Box, Set, ContextOp, SetOp,
};

inline constexpr std::size_t kRuleCount = 26;

std::string_view ruleName(Rule r) noexcept;

class RuleCoverage {
 public:
  void mark(Rule r) noexcept { hits_[static_cast<std::size_t>(r)] = true; }
  bool covered(Rule r) const noexcept { return hits_[static_cast<std::size_t>(r)]; }
  void merge(const RuleCoverage& other) noexcept;
  std::vector<Rule> missing() const;

 private:
  std::array<bool, kRuleCount> hits_{};
};

struct EvalLimits {
  /// Nested evaluation steps before DepthExceeded.
  std::size_t maxDepth = 3000;
  /// Tags a direct wvr/asa search may inspect.
  std::int64_t maxScan = 10000;
};

/// The program's initial point (every dimension at 0, rule Q_dim)
/// overridden by `at`.
Context startingPoint(const Geer& g, const Context& at);

/// Declared finite domain of a dimension, if it has one.
std::optional<TagDomain> declaredDomain(const Geer& g, const DimensionName& d);

/// Reference big-step interpreter. Every identifier is re-evaluated on each
/// use; surface operators (fby, wvr, ...) are interpreted directly rather
/// than through their lowered forms.
class NaiveEvaluator {
 public:
  NaiveEvaluator(const Geer& g, const ProcedureRegistry& procedures, EvalLimits limits = {});

  Value eval(const ExprPtr& e, const Context& point);
  /// Value of the program at startingPoint(g, at).
  Value evalRoot(const Context& at);

  const RuleCoverage& coverage() const noexcept { return coverage_; }

 private:
  const Geer& g_;
  const ProcedureRegistry& procs_;
  EvalLimits limits_;
  RuleCoverage coverage_;
};

/// Rank-restricted warehouse key for `subject` (a var entry or the root
/// subject) at `point`. Throws UnresolvedIdentifier.
DemandKey demandKeyOf(const Geer& g, std::string_view subject, const Context& point);

/// Thrown by DemandHooks to abandon an evaluation that must wait for a
/// remote answer; the caller replays it later.
class Suspended : public std::exception {
 public:
  explicit Suspended(DemandKey key) : key_(std::move(key)) {}
  const DemandKey& key() const noexcept { return key_; }
  const char* what() const noexcept override { return "evaluation suspended"; }

 private:
  DemandKey key_;
};

/// Lets a caller route warehouse misses and procedure calls elsewhere.
class DemandHooks {
 public:
  virtual ~DemandHooks() = default;
  /// On a local miss, before computing: a value already known elsewhere.
  virtual std::optional<Value> fetch(const DemandKey&) { return std::nullopt; }
  /// After a key was computed locally.
  virtual void computed(const DemandKey&, const Value&) {}
  /// Runs a procedural demand with ground arguments.
  virtual Value procedure(const DemandKey& key, const std::string& name, const std::vector<Value>& args) = 0;
};

/// Demand-driven evaluator: each identifier demand is keyed by its subject
/// and rank-restricted context and computed at most once per warehouse.
class EductiveEngine {
 public:
  struct Counters {
    std::uint64_t demands = 0;            // intensional demands issued
    std::uint64_t proceduralDemands = 0;  // procedure calls issued
  };

  EductiveEngine(const Geer& g, Warehouse& wh, const ProcedureRegistry& procedures,
                 EvalLimits limits = {});
  EductiveEngine(const Geer& g, Warehouse& wh, DemandHooks& hooks, EvalLimits limits = {});

  /// Value of `subject` (a var entry, or Geer::kRootSubject) at
  /// startingPoint(g, at).
  Value demand(std::string_view subject, const Context& at);
  Value evalRoot(const Context& at) { return demand(Geer::kRootSubject, at); }
  /// An arbitrary expression over the program's entries, at `point` as is.
  Value eval(const ExprPtr& e, const Context& point);

  const DemandTrace& trace() const noexcept { return trace_; }
  const Counters& counters() const noexcept { return counters_; }
  /// When false, no trace records are kept (large runs).
  void setTracing(bool on) noexcept { tracing_ = on; }

 private:
  friend class EductiveInterpreter;

  const Geer& g_;
  Warehouse& wh_;
  const ProcedureRegistry* procs_ = nullptr;
  DemandHooks* hooks_ = nullptr;
  EvalLimits limits_;
  DemandTrace trace_;
  Counters counters_;
  bool tracing_ = true;
};

}  // namespace iplc
