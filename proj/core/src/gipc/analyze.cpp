#include <algorithm>
#include <map>

#include "iplc/builtins.hpp"
#include "iplc/compiler.hpp"

namespace iplc {

namespace {

std::string phaseName(CompilePhase p) {
  switch (p) {
    case CompilePhase::Lex: return "lex";
    case CompilePhase::Parse: return "parse";
    case CompilePhase::Analyze: return "analyze";
  }
  return "?";
}

std::string joinErrors(const std::vector<CompileError>& errors) {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out.push_back('\n');
    out += e.text();
  }
  return out;
}

ErrorCode firstCode(const std::vector<CompileError>& errors) {
  return errors.empty() ? ErrorCode::ParseError : errors.front().code;
}

/// Every identifier spelled anywhere in the program, so fresh names can
/// avoid them.
void collectNames(const ExprPtr& e, std::set<std::string>& out) {
  forEachNode(e, [&](const Expr& n) {
    if (const auto* r = n.as<IdRef>()) out.insert(r->name);
    if (const auto* w = n.as<Where>()) {
      for (const auto& d : w->decls) {
        out.insert(d.name);
        out.insert(d.params.begin(), d.params.end());
      }
    }
  });
}

void collectNames(const std::vector<Decl>& decls, std::set<std::string>& out) {
  for (const auto& d : decls) {
    out.insert(d.name);
    out.insert(d.params.begin(), d.params.end());
    if (d.body) collectNames(d.body, out);
    if (d.domain) {
      for (const auto& item : d.domain->items) collectNames(item, out);
    }
  }
}

std::vector<const Decl*> sortedByName(const std::vector<Decl>& decls) {
  std::vector<const Decl*> out;
  for (const auto& d : decls) out.push_back(&d);
  std::stable_sort(out.begin(), out.end(),
                   [](const Decl* a, const Decl* b) { return a->name < b->name; });
  return out;
}

class Analyzer {
 public:
  AnalyzedProgram run(const ParsedProgram& p) {
    collectNames(p.root, used_);
    collectNames(p.decls, used_);
    declareImplicitDims(p);

    Scope global;
    std::vector<Decl> globals = block(p.decls, global, /*renameNames=*/false);
    for (auto& [name, d] : implicit_) {
      if (!global.names.contains(name)) {
        global.names.emplace(name, name);
        globals.push_back(d);
      }
    }
    std::sort(globals.begin(), globals.end(),
              [](const Decl& a, const Decl& b) { return a.name < b.name; });
    walkBodies(globals, global);
    ExprPtr root = walk(p.root, global);

    if (!errors_.empty()) {
      std::stable_sort(errors_.begin(), errors_.end(), [](const CompileError& a, const CompileError& b) {
        return std::pair(a.pos.line, a.pos.column) < std::pair(b.pos.line, b.pos.column);
      });
      throw CompileFailure(std::move(errors_));
    }
    return AnalyzedProgram{root, std::move(globals)};
  }

 private:
  struct Scope {
    const Scope* parent = nullptr;
    std::map<std::string, std::string> names;  // source name -> final name
  };

  void error(ErrorCode code, const std::string& msg, SourcePos pos) {
    errors_.push_back(CompileError{CompilePhase::Analyze, code, msg, pos});
  }

  std::string fresh(const std::string& base) {
    for (int k = 1;; ++k) {
      std::string candidate = base + "__" + std::to_string(k);
      if (used_.insert(candidate).second) return candidate;
    }
  }

  /// Tuple and Box dimensions that no block declares become global
  /// dimensions, as if `dimension d;` had been written at the top.
  void declareImplicitDims(const ParsedProgram& p) {
    std::set<std::string> declared;
    auto note = [&](const std::vector<Decl>& decls) {
      for (const auto& d : decls) {
        declared.insert(d.name);
        declared.insert(d.params.begin(), d.params.end());
      }
    };
    note(p.decls);
    std::vector<ExprPtr> candidates;
    auto scan = [&](const ExprPtr& e) {
      forEachNode(e, [&](const Expr& n) {
        if (const auto* w = n.as<Where>()) note(w->decls);
        if (const auto* t = n.as<TupleStream>()) candidates.push_back(t->dim);
        if (const auto* b = n.as<BoxExpr>()) {
          for (const auto& bd : b->dims) candidates.push_back(bd.dim);
        }
      });
    };
    scan(p.root);
    for (const auto& d : p.decls) {
      if (d.body) scan(d.body);
    }
    for (const auto& c : candidates) {
      const std::string* name = staticName(c);
      if (!name || declared.contains(*name) || findBuiltin(*name)) continue;
      implicit_.emplace(*name, ast::dimDecl(*name, std::nullopt, c->pos));
    }
  }

  /// Registers one declaration block in `scope`, reporting duplicates.
  /// Returns the declarations (renamed, sorted by source name) with bodies
  /// still unwalked.
  std::vector<Decl> block(const std::vector<Decl>& decls, Scope& scope, bool renameNames) {
    std::vector<Decl> out;
    std::map<std::string, SourcePos> seen;
    for (const Decl* d : sortedByName(decls)) {
      if (findBuiltin(d->name)) {
        error(ErrorCode::DuplicateDeclaration,
              "'" + d->name + "' is a built-in operator and cannot be redeclared", d->pos);
        continue;
      }
      auto [it, fresh_] = seen.emplace(d->name, d->pos);
      if (!fresh_) {
        error(ErrorCode::DuplicateDeclaration,
              "duplicate declaration of '" + d->name + "' (first declared at " +
                  std::to_string(it->second.line) + ":" + std::to_string(it->second.column) + ")",
              d->pos);
        continue;
      }
      Decl copy = *d;
      if (renameNames && d->kind != Decl::Kind::Proc) copy.name = fresh(d->name);
      scope.names.emplace(d->name, copy.name);
      out.push_back(std::move(copy));
    }
    return out;
  }

  void walkBodies(std::vector<Decl>& decls, const Scope& scope) {
    for (auto& d : decls) {
      if (d.domain) {
        for (auto& item : d.domain->items) item = walk(item, scope);
      }
      if (!d.body) continue;
      if (d.kind == Decl::Kind::Fun) {
        Scope params;
        params.parent = &scope;
        for (const auto& p : d.params) {
          if (!params.names.emplace(p, p).second) {
            error(ErrorCode::DuplicateDeclaration,
                  "parameter '" + p + "' repeated in '" + d.name + "'", d.pos);
          }
        }
        d.body = walk(d.body, params);
      } else {
        d.body = walk(d.body, scope);
      }
    }
  }

  const std::string* lookup(const std::string& name, const Scope& scope) const {
    for (const Scope* s = &scope; s; s = s->parent) {
      if (auto it = s->names.find(name); it != s->names.end()) return &it->second;
    }
    return nullptr;
  }

  ExprPtr walk(const ExprPtr& e, const Scope& scope) {
    if (!e) return e;
    if (const auto* r = e->as<IdRef>()) {
      if (const std::string* renamed = lookup(r->name, scope)) {
        return *renamed == r->name ? e : ast::id(*renamed, e->pos);
      }
      if (!findBuiltin(r->name)) {
        error(ErrorCode::UnresolvedIdentifier, "unresolved identifier '" + r->name + "'", e->pos);
      }
      return e;
    }
    if (const auto* w = e->as<Where>()) {
      Scope inner;
      inner.parent = &scope;
      std::vector<Decl> decls = block(w->decls, inner, /*renameNames=*/true);
      walkBodies(decls, inner);
      ExprPtr body = walk(w->body, inner);
      return ast::where(body, std::move(decls), e->pos);
    }
    return mapChildren(e, [&](const ExprPtr& c) { return walk(c, scope); });
  }

  std::set<std::string> used_;
  std::map<std::string, Decl> implicit_;
  std::vector<CompileError> errors_;
};

}  // namespace

std::string CompileError::text() const {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + phaseName(phase) +
         " error: " + message;
}

CompileFailure::CompileFailure(std::vector<CompileError> errors)
    : Error(firstCode(errors), joinErrors(errors)), errors_(std::move(errors)) {}

std::set<DimensionName> AnalyzedProgram::dimensions() const {
  std::set<DimensionName> out;
  for (const auto& d : globals) {
    if (d.kind == Decl::Kind::Dim) out.insert(DimensionName{d.name});
  }
  return out;
}

Context AnalyzedProgram::initialPoint() const {
  Context::Bindings b;
  for (const auto& d : dimensions()) b.emplace(d, Tag{0});
  return Context{std::move(b)};
}

AnalyzedProgram analyze(const ParsedProgram& program) { return Analyzer().run(program); }

}  // namespace iplc
