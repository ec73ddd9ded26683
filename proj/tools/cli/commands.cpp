#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "iplc/compiler.hpp"
#include "iplc/eval.hpp"
#include "iplc/tiers/cluster.hpp"
#include "iplc/tiers/tcp.hpp"

namespace iplc::cli {

int exitCodeFor(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoError: return Io;
    case ErrorCode::UsageError:
    case ErrorCode::SyntaxError:
    case ErrorCode::LexError:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateDeclaration:
    case ErrorCode::UnresolvedIdentifier:
    case ErrorCode::MalformedGeer:
    case ErrorCode::VersionMismatch:
    case ErrorCode::HashMismatch: return Usage;
    case ErrorCode::DuplicateNode:
    case ErrorCode::Unreachable:
    case ErrorCode::UnknownNode:
    case ErrorCode::SpawnFailed:
    case ErrorCode::ProgramUnavailable:
    case ErrorCode::Timeout:
    case ErrorCode::StoreUnavailable:
    case ErrorCode::ConflictingResult:
    case ErrorCode::NotFound:
    case ErrorCode::ProtocolError:
    case ErrorCode::Stopped: return Distributed;
    default: return Eval;
  }
}

namespace {

std::atomic<bool> interrupted{false};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void writeFile(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw Error(ErrorCode::IoError, "cannot write " + path);
  }
}

/// A `.geer` file, or source compiled on the spot.
Geer load(const std::string& path) {
  std::string bytes = readFile(path);
  if (bytes.starts_with(Geer::kFormat)) return geerParse(bytes);
  return compile(bytes);
}

Context contextArg(const std::string& text) {
  try {
    return parseContext(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::UsageError, "--ctx '" + text + "': " + e.what());
  }
}

int fail(std::ostream& err, const Error& e) {
  if (const auto* cf = dynamic_cast<const CompileFailure*>(&e)) {
    for (const auto& d : cf->errors()) err << d.text() << "\n";
  } else {
    err << "iplc: " << e.name() << ": " << e.what() << "\n";
  }
  return exitCodeFor(e.code());
}

struct Options {
  std::string input, output, ctx = "[]", traceOut, gim, tier, listen, logDir;
  std::string topology = "gim:1,dgt:2,dst:2,dwt:2", kill;
  bool trace = false, naive = false;
  std::uint64_t seed = 1;
};

int compileCmd(const Options& o, std::ostream& out) {
  Geer g = compile(readFile(o.input));
  std::string target = o.output;
  if (target.empty()) {
    auto dot = o.input.rfind('.');
    target = (dot == std::string::npos ? o.input : o.input.substr(0, dot)) + ".geer";
  }
  writeFile(target, geerSerialize(g));
  out << target << " " << g.programId << "\n";
  return Ok;
}

int runCmd(const Options& o, std::ostream& out) {
  Context at = contextArg(o.ctx);
  Geer g = load(o.input);
  if (!o.gim.empty()) {
    TcpNetwork net;
    auto wait = std::chrono::milliseconds(std::max<std::int64_t>(Timing::fromEnv(Timing::wallClock()).deadline * 12, 60'000));
    Exchange exchange = [&](const std::string& to, Message m) { return net.request(to, std::move(m), wait); };
    out << executeDistributed(exchange, o.gim, g, at).text() << "\n";
    return Ok;
  }
  const ProcedureRegistry procedures = standardProcedures();
  if (o.naive) {
    out << NaiveEvaluator(g, procedures).evalRoot(at).text() << "\n";
    return Ok;
  }
  Warehouse wh;
  EductiveEngine engine(g, wh, procedures);
  auto writeTrace = [&] {
    if (!o.trace && o.traceOut.empty()) return;
    std::string path = o.traceOut.empty() ? o.input + ".trace" : o.traceOut;
    writeFile(path, engine.trace().exportText());
  };
  try {
    Value v = engine.evalRoot(at);
    writeTrace();
    out << v.text() << "\n";
  } catch (const Error&) {
    writeTrace();  // the trace up to the failure is still useful
    throw;
  }
  return Ok;
}

int serveCmd(const Options& o, std::ostream& out, std::ostream& err) {
  auto kind = tierKindFromName(o.tier);
  if (!kind) throw Error(ErrorCode::UsageError, "--tier must be one of dgt, dst, dwt, gim");
  Timing timing = Timing::fromEnv(Timing::wallClock());
  TcpNetwork net;
  interrupted = false;
  std::signal(SIGINT, [](int) { interrupted = true; });
  std::signal(SIGTERM, [](int) { interrupted = true; });

  std::string address;
  if (*kind == TierKind::GIM) {
    address = net.attachAt(std::make_unique<Gim>(std::vector<std::string>{}, timing), o.listen);
    out << "GIM listening on " << address << std::endl;
  } else {
    if (o.gim.empty()) throw Error(ErrorCode::UsageError, "--gim is required for a " + o.tier + " node");
    static const ProcedureRegistry library = standardProcedures();
    NodeConfig config{o.gim, timing, &library, std::nullopt, true, *kind};
    if (!o.logDir.empty()) config.logDir = o.logDir;
    address = net.attachAt(std::make_unique<NodeController>(config, net), o.listen);
    NodeController::State state = NodeController::State::Starting;
    std::string failure;
    std::size_t spawned = 0;
    while (!interrupted) {
      net.inspect(address, [&](Endpoint& ep) {
        auto& node = static_cast<NodeController&>(ep);
        state = node.state();
        failure = node.failure();
        spawned = node.tiers().size();
      });
      if (state == NodeController::State::Failed || spawned > 0) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (state == NodeController::State::Failed) {
      err << "iplc: node failed to start: " << failure << "\n";
      return Distributed;
    }
    out << "node " << address << " serving a " << tierKindName(*kind) << std::endl;
  }
  while (!interrupted && !net.wait(std::chrono::milliseconds(100))) {
  }
  return Ok;
}

int demoCmd(const Options& o, std::ostream& out) {
  Context at = contextArg(o.ctx);
  Geer g = load(o.input);
  SimCluster::Options options;
  options.topology = Topology::parse(o.topology);
  options.seed = o.seed;
  options.timing = Timing::fromEnv(Timing::simulated());
  SimCluster cluster(options);

  std::shared_ptr<std::string> victim;
  if (!o.kill.empty()) {
    // dwt@<percent>%: once that share of the procedural demands is done.
    auto at_ = o.kill.find('@');
    if (o.kill.substr(0, at_) != "dwt" || at_ == std::string::npos || !o.kill.ends_with("%")) {
      throw Error(ErrorCode::UsageError, "--kill takes dwt@<percent>%");
    }
    double percent = 0;
    try {
      percent = std::stod(o.kill.substr(at_ + 1, o.kill.size() - at_ - 2));
    } catch (const std::exception&) {
      throw Error(ErrorCode::UsageError, "--kill takes dwt@<percent>%");
    }
    const ProcedureRegistry procedures = standardProcedures();
    Warehouse wh;
    EductiveEngine probe(g, wh, procedures);
    probe.setTracing(false);
    try {
      probe.evalRoot(at);
    } catch (const Error&) {
    }
    auto total = probe.counters().proceduralDemands;
    victim = cluster.killBusyWorkerAfter(static_cast<std::uint64_t>(std::ceil(total * percent / 100.0)));
  }

  Value v = cluster.execute(g, at);
  out << v.text() << "\n";
  auto stats = cluster.stats();
  auto get = [&](const std::string& k) { return stats.contains(k) ? stats.at(k) : 0; };
  out << "topology: " << options.topology.text() << "\n";
  out << "demands issued: " << get("DGT.store gets") + get("DGT.procedural demands") << "\n";
  out << "demands migrated: " << get("DST.dispatched") << "\n";
  out << "values stored: " << get("DST.stored") << "\n";
  out << "procedural demands processed: " << get("DWT.processed") << "\n";
  out << "re-dispatched: " << get("DST.redispatched") << "\n";
  if (victim) out << "killed: " << (victim->empty() ? "(nothing was busy)" : *victim) << "\n";
  for (const auto& [k, n] : stats) out << "  " << k << " = " << n << "\n";
  return Ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compiler and distributed eduction engine for GIPL+Lucx programs", "iplc"};
  app.require_subcommand(1);
  Options o;

  auto* compileSub = app.add_subcommand("compile", "Compile a source file to a GEER");
  compileSub->add_option("source", o.input, "Program source (.ipl)")->required();
  compileSub->add_option("-o,--output", o.output, "GEER file (default: source with .geer)");

  auto* runSub = app.add_subcommand("run", "Evaluate a program's root at a context");
  runSub->add_option("program", o.input, ".ipl source or .geer file")->required();
  runSub->add_option("--ctx", o.ctx, "Context literal, e.g. [t:5]");
  runSub->add_flag("--trace", o.trace, "Write the demand trace");
  runSub->add_option("--trace-out", o.traceOut, "Trace file (default: <program>.trace)");
  runSub->add_flag("--naive", o.naive, "Use the reference interpreter");
  runSub->add_option("--gim", o.gim, "Run on the tiers registered with this GIM (host:port)");

  auto* replSub = app.add_subcommand("repl", "Interactive session");

  auto* serveSub = app.add_subcommand("serve", "Host a GIM, or a node running one tier");
  serveSub->add_option("--tier", o.tier, "dgt, dst, dwt or gim")->required();
  serveSub->add_option("--listen", o.listen, "host:port to listen on")->required();
  serveSub->add_option("--gim", o.gim, "GIM to register with (host:port)");
  serveSub->add_option("--log-dir", o.logDir, "Directory for DST logs");

  auto* demoSub = app.add_subcommand("demo", "Run a program on an in-process cluster");
  demoSub->add_option("program", o.input, ".ipl source or .geer file")->required();
  demoSub->add_option("--topology", o.topology, "e.g. gim:1,dgt:2,dst:2,dwt:2");
  demoSub->add_option("--ctx", o.ctx, "Context literal");
  demoSub->add_option("--kill", o.kill, "Fault injection, e.g. dwt@50%");
  demoSub->add_option("--seed", o.seed, "Scheduler seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (*compileSub) return compileCmd(o, out);
    if (*runSub) return runCmd(o, out);
    if (*replSub) return repl(in, out, err);
    if (*serveSub) return serveCmd(o, out, err);
    if (*demoSub) return demoCmd(o, out);
  } catch (const Error& e) {
    return fail(err, e);
  }
  return Usage;
}

}  // namespace iplc::cli
