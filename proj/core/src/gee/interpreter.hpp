#pragma once

// Big-step core shared by the naive and eductive evaluators. The two differ
// only in how a global variable demand and a procedure call are answered.

#include <map>
#include <span>
#include <string>

#include "iplc/eval.hpp"

namespace iplc::detail {

/// Local names in scope: function parameters and `where` declarations that
/// stayed inside a function body.
struct Frame {
  struct Binding {
    enum class Kind : std::uint8_t { Param, Var, Fun } kind;
    ExprPtr expr;                // Param: the actual argument; Var: its body
    const Decl* decl = nullptr;  // Fun
    const Frame* env = nullptr;  // where `expr` (or the function) is closed
  };

  const Frame* parent = nullptr;
  std::map<std::string, Binding, std::less<>> names;

  const Binding* find(std::string_view name) const;
};

/// Built-in operator over already evaluated arguments.
Value applyBuiltin(std::string_view name, std::span<const Value> args);

class Interpreter {
 public:
  Interpreter(const Geer& g, EvalLimits limits, RuleCoverage* coverage)
      : g_(g), limits_(limits), coverage_(coverage) {}
  virtual ~Interpreter() = default;

  Value eval(const ExprPtr& e, const Context& point, const Frame* frame = nullptr);
  TagDomain domain(const DimensionName& d, const DomainExpr& dom, const Context& point,
                   const Frame* frame = nullptr);

 protected:
  /// E_vid for a global variable.
  virtual Value variable(const std::string& name, const GeerEntry& entry, const Context& point) = 0;
  virtual Value procedure(const std::string& name, std::vector<Value> args) = 0;

  const Geer& g_;

 private:
  void mark(Rule r) {
    if (coverage_) coverage_->mark(r);
  }

  Value node(const Expr& e, const Context& point, const Frame* frame);
  Value identifier(const std::string& name, const Context& point, const Frame* frame);
  Value apply(const Value& callee, const std::vector<ExprPtr>& args, const Context& point,
              const Frame* frame);
  Value callFunction(const std::vector<std::string>& params, const ExprPtr& body, const Frame* closure,
                     const std::vector<ExprPtr>& args, const Context& point, const Frame* frame);
  Value intensional(const Intensional& n, const Context& point, const Frame* frame);
  DimensionName dimension(const ExprPtr& e, const Context& point, const Frame* frame);
  bool truth(const ExprPtr& e, const Context& point, const Frame* frame);

  EvalLimits limits_;
  RuleCoverage* coverage_;
  std::size_t depth_ = 0;
};

}  // namespace iplc::detail
