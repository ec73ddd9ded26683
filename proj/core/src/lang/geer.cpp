#include "iplc/geer.hpp"

#include <openssl/evp.h>

#include <array>

#include "iplc/ast_io.hpp"
#include "iplc/builtins.hpp"
#include "iplc/error.hpp"
#include "iplc/text.hpp"

namespace iplc {

std::string_view entryKindName(EntryKind kind) noexcept {
  switch (kind) {
    case EntryKind::Const: return "const";
    case EntryKind::Op: return "op";
    case EntryKind::Dim: return "dim";
    case EntryKind::Func: return "func";
    case EntryKind::Var: return "var";
    case EntryKind::Proc: return "proc";
  }
  return "?";
}

namespace {

std::optional<EntryKind> entryKindFromName(std::string_view name) {
  for (auto k : {EntryKind::Const, EntryKind::Op, EntryKind::Dim, EntryKind::Func, EntryKind::Var,
                 EntryKind::Proc}) {
    if (entryKindName(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

const GeerEntry* Geer::find(std::string_view name) const {
  auto it = entries.find(name);
  return it == entries.end() ? nullptr : &it->second;
}

std::set<DimensionName> Geer::dimensions() const {
  std::set<DimensionName> out;
  for (const auto& [name, e] : entries) {
    if (e.kind == EntryKind::Dim) out.insert(DimensionName{name});
  }
  return out;
}

std::vector<ProcSignature> Geer::procTable() const {
  std::vector<ProcSignature> out;
  for (const auto& [name, e] : entries) {
    if (e.kind == EntryKind::Proc) out.push_back({name, e.arity});
  }
  return out;
}

const std::set<DimensionName>& Geer::rankOf(std::string_view subject) const {
  if (subject == kRootSubject) return rootRank;
  if (const auto* e = find(subject)) return e->rank;
  throw Error(ErrorCode::UnresolvedIdentifier, "no entry named '" + std::string(subject) + "'");
}

void Geer::seal() {
  std::string bytes = geerSerialize(*this);
  programId = bytes.substr(bytes.rfind("hash ") + 5, 64);
}

std::string sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

// Serialization.

namespace {

std::string rankText(const std::set<DimensionName>& rank) {
  std::string out = "(";
  bool first = true;
  for (const auto& d : rank) {
    if (!first) out.push_back(' ');
    first = false;
    out += d.str();
  }
  return out + ")";
}

std::set<DimensionName> readRank(TextCursor& cur) {
  std::set<DimensionName> out;
  cur.expect('(');
  while (cur.peek() != ')') out.insert(DimensionName{cur.readIdentifier()});
  cur.expect(')');
  return out;
}

std::string serializeBody(const Geer& g) {
  std::string out(Geer::kFormat);
  out.push_back('\n');
  for (const auto& [name, e] : g.entries) {
    out += "(entry " + name + " " + std::string(entryKindName(e.kind)) + " " +
           std::to_string(e.arity) + " (";
    for (std::size_t i = 0; i < e.params.size(); ++i) {
      if (i) out.push_back(' ');
      out += e.params[i];
    }
    out += ") " + rankText(e.rank) + " " + toSexpr(e.domain) + " " + toSexpr(e.ast) + ")\n";
  }
  out += "(root " + rankText(g.rootRank) + " " + toSexpr(g.root) + ")\n";
  return out;
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::MalformedGeer, "malformed GEER: " + why);
}

void checkEntryShape(const std::string& name, const GeerEntry& e) {
  bool hasAst = static_cast<bool>(e.ast);
  switch (e.kind) {
    case EntryKind::Const:
      if (!hasAst || !e.ast->is<Literal>()) malformed("const '" + name + "' needs a literal");
      break;
    case EntryKind::Dim:
    case EntryKind::Proc:
    case EntryKind::Op:
      if (hasAst) malformed("'" + name + "' must not carry an AST");
      break;
    case EntryKind::Var:
    case EntryKind::Func:
      if (!hasAst) malformed("'" + name + "' needs an AST");
      break;
  }
  if (e.kind != EntryKind::Func && !e.params.empty()) malformed("'" + name + "' has parameters");
  if (e.kind != EntryKind::Dim && e.domain) malformed("'" + name + "' has a domain");
}

}  // namespace

std::string geerSerialize(const Geer& g) {
  std::string body = serializeBody(g);
  return body + "hash " + sha256Hex(body) + "\n";
}

Geer geerParse(std::string_view bytes) {
  if (!bytes.starts_with("GEER/")) malformed("missing format header");
  std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) malformed("truncated header");
  if (bytes.substr(0, eol) != Geer::kFormat) {
    throw Error(ErrorCode::VersionMismatch,
                "unsupported format '" + std::string(bytes.substr(0, eol)) + "', expected " +
                    std::string(Geer::kFormat));
  }
  std::string_view trimmed = bytes;
  if (!trimmed.ends_with('\n')) malformed("truncated (no final newline)");
  trimmed.remove_suffix(1);
  std::size_t lastLine = trimmed.rfind('\n');
  if (lastLine == std::string_view::npos) malformed("no content");
  std::string_view hashLine = trimmed.substr(lastLine + 1);
  std::string_view body = bytes.substr(0, lastLine + 1);
  if (!hashLine.starts_with("hash ") || hashLine.size() != 5 + 64) malformed("missing hash line");
  std::string stated(hashLine.substr(5));
  std::string actual = sha256Hex(body);
  if (stated != actual) {
    throw Error(ErrorCode::HashMismatch, "GEER hash " + stated + " does not match content " + actual);
  }

  Geer g;
  bool sawRoot = false;
  std::size_t pos = eol + 1;
  try {
    while (pos < body.size()) {
      std::size_t next = body.find('\n', pos);
      std::string_view line = body.substr(pos, next - pos);
      pos = next + 1;
      TextCursor cur(line);
      cur.expect('(');
      if (sawRoot) malformed("content after root");
      if (cur.consumeWord("entry")) {
        std::string name = cur.readIdentifier();
        auto kind = entryKindFromName(cur.readIdentifier());
        if (!kind) malformed("unknown entry kind for '" + name + "'");
        GeerEntry e;
        e.kind = *kind;
        Tag arity = cur.readNumber();
        if (!arity.isInt() || arity.asInt() < 0) malformed("bad arity for '" + name + "'");
        e.arity = static_cast<std::size_t>(arity.asInt());
        cur.expect('(');
        while (cur.peek() != ')') e.params.push_back(cur.readIdentifier());
        cur.expect(')');
        e.rank = readRank(cur);
        e.domain = readSexprDomain(cur);
        if (cur.peek() == '(' && cur.rest().starts_with("(none)")) {
          cur.expect('(');
          cur.consumeWord("none");
          cur.expect(')');
        } else {
          e.ast = readSexpr(cur);
        }
        cur.expect(')');
        cur.expectEnd();
        checkEntryShape(name, e);
        if (!g.entries.emplace(name, std::move(e)).second) malformed("duplicate entry '" + name + "'");
      } else if (cur.consumeWord("root")) {
        g.rootRank = readRank(cur);
        g.root = readSexpr(cur);
        cur.expect(')');
        cur.expectEnd();
        sawRoot = true;
      } else {
        cur.fail("expected entry or root");
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedGeer) throw;
    malformed(e.what());
  }
  if (!sawRoot) malformed("missing root");
  try {
    validateGeer(g);
  } catch (const Error& e) {
    malformed(e.what());
  }
  g.programId = actual;
  return g;
}

bool sameGeer(const Geer& a, const Geer& b) {
  if (a.entries.size() != b.entries.size() || a.rootRank != b.rootRank || !sameExpr(a.root, b.root)) {
    return false;
  }
  for (auto ia = a.entries.begin(), ib = b.entries.begin(); ia != a.entries.end(); ++ia, ++ib) {
    const auto& x = ia->second;
    const auto& y = ib->second;
    if (ia->first != ib->first || x.kind != y.kind || x.arity != y.arity || x.params != y.params ||
        x.rank != y.rank || !sameDomain(x.domain, y.domain) || !sameExpr(x.ast, y.ast)) {
      return false;
    }
  }
  return true;
}

// Scoped name resolution shared by validation and rank analysis.

namespace {

struct LocalScope {
  const LocalScope* parent = nullptr;
  const std::vector<std::string>* params = nullptr;
  std::map<std::string_view, const Decl*> decls;
};

struct Resolution {
  enum class Kind : std::uint8_t { None, Param, Local, Entry, Builtin };
  Kind kind = Kind::None;
  const Decl* decl = nullptr;          // Local
  const LocalScope* home = nullptr;    // Local: the scope the decl lives in
  const GeerEntry* entry = nullptr;    // Entry
};

Resolution resolve(std::string_view name, const LocalScope* scope, const Geer& g) {
  for (const LocalScope* s = scope; s; s = s->parent) {
    if (s->params) {
      for (const auto& p : *s->params) {
        if (p == name) return {Resolution::Kind::Param, nullptr, s, nullptr};
      }
    }
    if (auto it = s->decls.find(name); it != s->decls.end()) {
      return {Resolution::Kind::Local, it->second, s, nullptr};
    }
  }
  if (const auto* e = g.find(name)) return {Resolution::Kind::Entry, nullptr, nullptr, e};
  if (findBuiltin(name)) return {Resolution::Kind::Builtin, nullptr, nullptr, nullptr};
  return {};
}

LocalScope whereScope(const Where& w, const LocalScope* parent) {
  LocalScope s;
  s.parent = parent;
  for (const auto& d : w.decls) s.decls.emplace(d.name, &d);
  return s;
}

[[noreturn]] void unresolved(const std::string& name, SourcePos pos) {
  std::string where;
  if (pos.line > 0) where = " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
  throw Error(ErrorCode::UnresolvedIdentifier, "unresolved identifier '" + name + "'" + where);
}

void validateExpr(const ExprPtr& e, const LocalScope* scope, const Geer& g) {
  if (!e) return;
  if (const auto* r = e->as<IdRef>()) {
    if (resolve(r->name, scope, g).kind == Resolution::Kind::None) unresolved(r->name, e->pos);
    return;
  }
  if (const auto* w = e->as<Where>()) {
    LocalScope inner = whereScope(*w, scope);
    validateExpr(w->body, &inner, g);
    for (const auto& d : w->decls) {
      if (d.domain) {
        for (const auto& item : d.domain->items) validateExpr(item, &inner, g);
      }
      if (!d.body) continue;
      if (d.kind == Decl::Kind::Fun) {
        LocalScope fn;
        fn.parent = &inner;
        fn.params = &d.params;
        validateExpr(d.body, &fn, g);
      } else {
        validateExpr(d.body, &inner, g);
      }
    }
    return;
  }
  forEachChild(*e, [&](const ExprPtr& c) { validateExpr(c, scope, g); });
}

class DimCollector {
 public:
  explicit DimCollector(const Geer& g) : g_(g), declared_(g.dimensions()) {}

  std::set<DimensionName> run(const ExprPtr& e, const LocalScope* scope) {
    out_.clear();
    visit(e, scope);
    return std::move(out_);
  }

 private:
  void everything(const LocalScope* scope) {
    out_.insert(declared_.begin(), declared_.end());
    for (const LocalScope* s = scope; s; s = s->parent) {
      for (const auto& [name, d] : s->decls) {
        if (d->kind == Decl::Kind::Dim) out_.insert(DimensionName{d->name});
      }
    }
  }

  bool isDim(const Resolution& r) const {
    if (r.kind == Resolution::Kind::Local) return r.decl->kind == Decl::Kind::Dim;
    if (r.kind == Resolution::Kind::Entry) return r.entry->kind == EntryKind::Dim;
    return false;
  }

  /// Contribution of a dimension operand: the dimension itself when named
  /// statically, otherwise whatever computing it touches plus `dynamic`.
  void dimOperand(const ExprPtr& d, const LocalScope* scope, bool dynamicMeansAll) {
    if (const std::string* name = staticName(d)) {
      Resolution r = resolve(*name, scope, g_);
      if (r.kind == Resolution::Kind::None) unresolved(*name, d->pos);
      if (isDim(r)) {
        out_.insert(DimensionName{*name});
        return;
      }
    }
    visit(d, scope);
    if (dynamicMeansAll) everything(scope);
  }

  void visitLocal(const Decl* decl, const LocalScope* home, const std::vector<ExprPtr>* args,
                  const LocalScope* scope) {
    if (args) {
      for (const auto& a : *args) visit(a, scope);
    }
    if (!active_.insert(decl).second) return;
    if (decl->kind == Decl::Kind::Var) {
      visit(decl->body, home);
    } else if (decl->kind == Decl::Kind::Fun && args) {
      LocalScope fn;
      fn.parent = home;
      fn.params = &decl->params;
      visit(decl->body, &fn);
    }
    active_.erase(decl);
  }

  void visit(const ExprPtr& e, const LocalScope* scope) {
    if (!e) return;
    if (const auto* r = e->as<IdRef>()) {
      Resolution res = resolve(r->name, scope, g_);
      switch (res.kind) {
        case Resolution::Kind::None: unresolved(r->name, e->pos);
        case Resolution::Kind::Local: visitLocal(res.decl, res.home, nullptr, scope); break;
        case Resolution::Kind::Entry:
          if (res.entry->kind == EntryKind::Var) out_.insert(res.entry->rank.begin(), res.entry->rank.end());
          break;
        default: break;
      }
      return;
    }
    if (e->is<HashNullary>()) {
      everything(scope);
      return;
    }
    if (const auto* n = e->as<TagQuery>()) {
      dimOperand(n->dim, scope, true);
      return;
    }
    if (const auto* n = e->as<At3>()) {
      visit(n->body, scope);
      visit(n->tag, scope);
      dimOperand(n->dim, scope, false);
      return;
    }
    if (const auto* n = e->as<TupleStream>()) {
      for (const auto& x : n->elems) visit(x, scope);
      dimOperand(n->dim, scope, true);
      return;
    }
    if (const auto* n = e->as<Intensional>()) {
      for (const auto& x : n->args) visit(x, scope);
      dimOperand(n->dim, scope, true);
      return;
    }
    if (const auto* n = e->as<FunCall>()) {
      if (const std::string* name = staticName(n->fn)) {
        Resolution res = resolve(*name, scope, g_);
        if (res.kind == Resolution::Kind::None) unresolved(*name, n->fn->pos);
        if (res.kind == Resolution::Kind::Local && res.decl->kind == Decl::Kind::Fun) {
          visitLocal(res.decl, res.home, &n->args, scope);
          return;
        }
        if (res.kind == Resolution::Kind::Entry &&
            (res.entry->kind == EntryKind::Func || res.entry->kind == EntryKind::Proc)) {
          out_.insert(res.entry->rank.begin(), res.entry->rank.end());
          for (const auto& a : n->args) visit(a, scope);
          return;
        }
        if (res.kind == Resolution::Kind::Builtin) {
          for (const auto& a : n->args) visit(a, scope);
          return;
        }
      }
      // Callee computed at run time: anything could be called.
      visit(n->fn, scope);
      for (const auto& a : n->args) visit(a, scope);
      everything(scope);
      return;
    }
    if (const auto* w = e->as<Where>()) {
      // A dimension declared here is reset to 0 on entry, so the block's
      // value cannot depend on the caller's tag for it.
      LocalScope inner = whereScope(*w, scope);
      std::set<DimensionName> outer = std::exchange(out_, {});
      visit(w->body, &inner);
      for (const auto& d : w->decls) {
        if (d.kind == Decl::Kind::Dim) out_.erase(DimensionName{d.name});
      }
      for (const auto& d : w->decls) {
        if (d.domain) {
          for (const auto& item : d.domain->items) visit(item, &inner);
        }
      }
      out_.merge(outer);
      return;
    }
    forEachChild(*e, [&](const ExprPtr& c) { visit(c, scope); });
  }

  const Geer& g_;
  std::set<DimensionName> declared_;
  std::set<DimensionName> out_;
  std::set<const Decl*> active_;
};

}  // namespace

void validateGeer(const Geer& g) {
  for (const auto& [name, e] : g.entries) {
    if (e.domain) {
      for (const auto& item : e.domain->items) validateExpr(item, nullptr, g);
    }
    if (!e.ast) continue;
    if (e.kind == EntryKind::Func) {
      LocalScope fn;
      fn.params = &e.params;
      validateExpr(e.ast, &fn, g);
    } else {
      validateExpr(e.ast, nullptr, g);
    }
  }
  if (!g.root) throw Error(ErrorCode::MalformedGeer, "program has no root expression");
  validateExpr(g.root, nullptr, g);
}

std::set<DimensionName> freeDims(const ExprPtr& e, const Geer& env) {
  return DimCollector(env).run(e, nullptr);
}

void computeRanks(Geer& g) {
  for (auto& [name, e] : g.entries) e.rank.clear();
  DimCollector collect(g);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [name, e] : g.entries) {
      if (e.kind != EntryKind::Var && e.kind != EntryKind::Func) continue;
      std::set<DimensionName> r;
      if (e.kind == EntryKind::Func) {
        LocalScope fn;
        fn.params = &e.params;
        r = collect.run(e.ast, &fn);
      } else {
        r = collect.run(e.ast, nullptr);
      }
      if (r != e.rank) {
        e.rank = std::move(r);
        changed = true;
      }
    }
  }
  g.rootRank = collect.run(g.root, nullptr);
}

}  // namespace iplc
