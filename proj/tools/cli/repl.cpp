#include <iostream>

#include "cli.hpp"
#include "iplc/compiler.hpp"
#include "iplc/eval.hpp"

namespace iplc::cli {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string program(const std::string& root, const std::vector<std::string>& decls) {
  if (decls.empty()) return root;
  std::string src = root + "\nwhere\n";
  for (const auto& d : decls) src += d + "\n";
  return src + "end\n";
}

void report(std::ostream& err, const Error& e) {
  if (const auto* cf = dynamic_cast<const CompileFailure*>(&e)) {
    for (const auto& d : cf->errors()) err << d.text() << "\n";
  } else {
    err << "error: " << e.name() << ": " << e.what() << "\n";
  }
}

}  // namespace

int repl(std::istream& in, std::ostream& out, std::ostream& err) {
  const ProcedureRegistry procedures = standardProcedures();
  std::vector<std::string> decls;
  Context at;
  for (std::string line; (out << "> " << std::flush, std::getline(in, line));) {
    line = trim(line);
    if (line.empty() || line.starts_with("//")) continue;
    try {
      if (line == ":quit" || line == ":q") break;
      if (line.starts_with(":ctx")) {
        at = parseContext(trim(line.substr(4)));
        out << at.text() << "\n";
        continue;
      }
      if (line == ":decls") {
        for (const auto& d : decls) out << d << "\n";
        continue;
      }
      if (line.starts_with(":")) throw Error(ErrorCode::UsageError, "unknown command " + line);

      std::string decl = line.ends_with(";") ? line : line + ";";
      bool isDecl = false;
      try {
        isDecl = !parseDeclarations(decl).empty();
      } catch (const Error&) {
      }
      if (isDecl) {
        auto next = decls;
        next.push_back(decl);
        compile(program("0", next));  // rejects duplicates and dangling names now
        decls = std::move(next);
        continue;
      }
      Geer g = compile(program(line, decls));
      Warehouse wh;
      out << EductiveEngine(g, wh, procedures).evalRoot(at).text() << "\n";
    } catch (const Error& e) {
      report(err, e);
    }
  }
  return Ok;
}

}  // namespace iplc::cli
