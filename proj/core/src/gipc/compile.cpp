#include "iplc/compiler.hpp"

namespace iplc {

namespace {

/// Moves nested declarations into the global dictionary. Names are already
/// unique after analysis. Locals of function bodies stay where they are
/// since they may close over parameters; dimensions always move, leaving a
/// bare `dimension d;` behind so the body still resets it to 0.
class Hoister {
 public:
  explicit Hoister(std::vector<Decl>& globals) : globals_(globals) {}

  ExprPtr run(const ExprPtr& e, bool inFunction) {
    if (!e) return e;
    const auto* w = e->as<Where>();
    if (!w) return mapChildren(e, [&](const ExprPtr& c) { return run(c, inFunction); });
    std::vector<Decl> residual;
    for (Decl d : w->decls) {
      switch (d.kind) {
        case Decl::Kind::Dim:
          residual.push_back(ast::dimDecl(d.name, std::nullopt, d.pos));
          globals_.push_back(std::move(d));
          break;
        case Decl::Kind::Proc:
          globals_.push_back(std::move(d));
          break;
        case Decl::Kind::Var:
        case Decl::Kind::Fun:
          d.body = run(d.body, inFunction || d.kind == Decl::Kind::Fun);
          (inFunction ? residual : globals_).push_back(std::move(d));
          break;
      }
    }
    ExprPtr body = run(w->body, inFunction);
    if (residual.empty()) return body;
    return ast::where(body, std::move(residual), e->pos);
  }

 private:
  std::vector<Decl>& globals_;
};

GeerEntry entryFor(const Decl& d) {
  GeerEntry entry;
  switch (d.kind) {
    case Decl::Kind::Dim:
      entry.kind = EntryKind::Dim;
      entry.domain = d.domain;
      break;
    case Decl::Kind::Var:
      entry.kind = d.body->is<Literal>() ? EntryKind::Const : EntryKind::Var;
      entry.ast = d.body;
      break;
    case Decl::Kind::Fun:
      entry.kind = EntryKind::Func;
      entry.arity = d.params.size();
      entry.params = d.params;
      entry.ast = d.body;
      break;
    case Decl::Kind::Proc:
      entry.kind = EntryKind::Proc;
      entry.arity = d.arity;
      break;
  }
  return entry;
}

void reserveNames(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  forEachNode(e, [&](const Expr& n) {
    if (const auto* r = n.as<IdRef>()) out.insert(r->name);
    if (const auto* w = n.as<Where>()) {
      for (const auto& d : w->decls) out.insert(d.name);
    }
  });
}

}  // namespace

Geer buildGeer(const AnalyzedProgram& program, const CompileOptions& options) {
  std::set<std::string> reserved;
  reserveNames(program.root, reserved);
  for (const auto& d : program.globals) {
    reserved.insert(d.name);
    reserved.insert(d.params.begin(), d.params.end());
    reserveNames(d.body, reserved);
  }
  auto lowered = [&](const ExprPtr& e) { return options.lowerOperators && e ? lower(e, reserved) : e; };

  std::vector<Decl> globals;
  Hoister hoist(globals);
  ExprPtr root = hoist.run(lowered(program.root), false);
  for (Decl d : program.globals) {
    d.body = hoist.run(lowered(d.body), d.kind == Decl::Kind::Fun);
    globals.push_back(std::move(d));
  }

  Geer g;
  std::vector<CompileError> errors;
  for (const auto& d : globals) {
    if (!g.entries.emplace(d.name, entryFor(d)).second) {
      errors.push_back({CompilePhase::Analyze, ErrorCode::DuplicateDeclaration,
                        "duplicate declaration of '" + d.name + "'", d.pos});
    }
  }
  if (!errors.empty()) throw CompileFailure(std::move(errors));
  g.root = root;
  computeRanks(g);
  validateGeer(g);
  g.seal();
  return g;
}

Geer compile(std::string_view source, const CompileOptions& options) {
  return buildGeer(analyze(parseSource(source)), options);
}

}  // namespace iplc
