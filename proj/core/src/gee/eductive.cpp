#include "interpreter.hpp"
#include "iplc/error.hpp"

namespace iplc {

DemandKey demandKeyOf(const Geer& g, std::string_view subject, const Context& point) {
  return DemandKey{g.programId, std::string(subject), project(point, g.rankOf(subject))};
}

class EductiveInterpreter final : public detail::Interpreter {
 public:
  EductiveInterpreter(EductiveEngine& engine)
      : Interpreter(engine.g_, engine.limits_, nullptr), engine_(engine) {}

  Value demand(const std::string& subject, const ExprPtr& body, const Context& point) {
    EductiveEngine& en = engine_;
    DemandKey key = demandKeyOf(g_, subject, point);
    ++en.counters_.demands;
    record(key, DemandTrace::Event::Issued);
    Warehouse::Claim claim = en.wh_.claimOrGet(key, &en);
    if (!claim.owner()) {
      record(key, DemandTrace::Event::Hit);
      return *claim.value;
    }
    ClaimGuard guard{en.wh_, key};
    if (en.hooks_) {
      if (auto known = en.hooks_->fetch(key)) {
        en.wh_.insert(key, *known);
        guard.done = true;
        record(key, DemandTrace::Event::Hit);
        return *known;
      }
    }
    // Off-rank dimensions cannot change the value, so computing at the full
    // point gives the same answer as at the restricted key.
    Value v = eval(body, point);
    en.wh_.fulfill(key, v);
    guard.done = true;
    record(key, DemandTrace::Event::Computed);
    if (en.hooks_) en.hooks_->computed(key, v);
    return v;
  }

 protected:
  Value variable(const std::string& name, const GeerEntry& entry, const Context& point) override {
    return demand(name, entry.ast, point);
  }

  Value procedure(const std::string& name, std::vector<Value> args) override {
    EductiveEngine& en = engine_;
    DemandKey key = procedureKey(g_.programId, name, args);
    ++en.counters_.proceduralDemands;
    if (en.hooks_) return en.hooks_->procedure(key, name, args);
    Warehouse::Claim claim = en.wh_.claimOrGet(key, &en);
    if (!claim.owner()) return *claim.value;
    ClaimGuard guard{en.wh_, key};
    Value v = en.procs_->call(name, args);
    en.wh_.fulfill(key, v);
    guard.done = true;
    return v;
  }

 private:
  struct ClaimGuard {
    Warehouse& wh;
    const DemandKey& key;
    bool done = false;
    ~ClaimGuard() {
      if (!done) wh.release(key);
    }
  };

  void record(const DemandKey& key, DemandTrace::Event e) {
    if (engine_.tracing_) engine_.trace_.record(key, e);
  }

  EductiveEngine& engine_;
};

EductiveEngine::EductiveEngine(const Geer& g, Warehouse& wh, const ProcedureRegistry& procedures,
                               EvalLimits limits)
    : g_(g), wh_(wh), procs_(&procedures), limits_(limits) {}

EductiveEngine::EductiveEngine(const Geer& g, Warehouse& wh, DemandHooks& hooks, EvalLimits limits)
    : g_(g), wh_(wh), hooks_(&hooks), limits_(limits) {}

Value EductiveEngine::eval(const ExprPtr& e, const Context& point) {
  EductiveInterpreter interp(*this);
  return interp.eval(e, point);
}

Value EductiveEngine::demand(std::string_view subject, const Context& at) {
  EductiveInterpreter interp(*this);
  Context point = startingPoint(g_, at);
  if (subject == Geer::kRootSubject) return interp.demand(std::string(subject), g_.root, point);
  const GeerEntry* e = g_.find(subject);
  if (!e) throw Error(ErrorCode::UnresolvedIdentifier, "no entry named '" + std::string(subject) + "'");
  if (e->kind != EntryKind::Var) {
    return interp.eval(ast::id(std::string(subject)), point);
  }
  return interp.demand(std::string(subject), e->ast, point);
}

}  // namespace iplc
