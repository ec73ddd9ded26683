#include "interpreter.hpp"
#include "iplc/error.hpp"

namespace iplc {

namespace {

constexpr std::array<std::string_view, kRuleCount> kRuleNames = {
    "Cid", "Opid", "Did", "Fid", "Vid", "CondTrue", "CondFalse", "Tag", "At", "Where", "QDim", "QId", "QQ",
    "Op", "Fct", "Hash", "Dot", "Tuple", "Select", "AtContext", "AtSet", "Context", "Box", "Set",
    "ContextOp", "SetOp",
};

class NaiveInterpreter final : public detail::Interpreter {
 public:
  NaiveInterpreter(const Geer& g, const ProcedureRegistry* procs, EvalLimits limits, RuleCoverage* cov)
      : Interpreter(g, limits, cov), procs_(procs) {}

 protected:
  Value variable(const std::string&, const GeerEntry& entry, const Context& point) override {
    return eval(entry.ast, point);
  }
  Value procedure(const std::string& name, std::vector<Value> args) override {
    if (!procs_) throw Error(ErrorCode::UnknownProcedure, "no procedures available for '" + name + "'");
    return procs_->call(name, args);
  }

 private:
  const ProcedureRegistry* procs_;
};

}  // namespace

std::string_view ruleName(Rule r) noexcept { return kRuleNames[static_cast<std::size_t>(r)]; }

void RuleCoverage::merge(const RuleCoverage& other) noexcept {
  for (std::size_t i = 0; i < kRuleCount; ++i) hits_[i] = hits_[i] || other.hits_[i];
}

std::vector<Rule> RuleCoverage::missing() const {
  std::vector<Rule> out;
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    if (!hits_[i]) out.push_back(static_cast<Rule>(i));
  }
  return out;
}

Context startingPoint(const Geer& g, const Context& at) {
  Context::Bindings b;
  for (const auto& d : g.dimensions()) b.emplace(d, Tag{0});
  return override(Context{std::move(b)}, at);
}

std::optional<TagDomain> declaredDomain(const Geer& g, const DimensionName& d) {
  const GeerEntry* e = g.find(d.str());
  if (!e || e->kind != EntryKind::Dim || !e->domain) return std::nullopt;
  NaiveInterpreter interp(g, nullptr, EvalLimits{}, nullptr);
  return interp.domain(d, *e->domain, startingPoint(g, Context{}));
}

NaiveEvaluator::NaiveEvaluator(const Geer& g, const ProcedureRegistry& procedures, EvalLimits limits)
    : g_(g), procs_(procedures), limits_(limits) {}

Value NaiveEvaluator::eval(const ExprPtr& e, const Context& point) {
  NaiveInterpreter interp(g_, &procs_, limits_, &coverage_);
  return interp.eval(e, point);
}

Value NaiveEvaluator::evalRoot(const Context& at) {
  // Entering the program is one top-level `where` over the global decls.
  bool dims = false, ids = false;
  for (const auto& [_, e] : g_.entries) (e.kind == EntryKind::Dim ? dims : ids) = true;
  if (!g_.entries.empty()) coverage_.mark(Rule::Where);
  if (dims) coverage_.mark(Rule::QDim);
  if (ids) coverage_.mark(Rule::QId);
  if (g_.entries.size() >= 2) coverage_.mark(Rule::QQ);
  return eval(g_.root, startingPoint(g_, at));
}

}  // namespace iplc
