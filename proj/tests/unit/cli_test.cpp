#include <doctest.h>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "corpus.hpp"
#include "iplc/compiler.hpp"
#include "iplc/eval.hpp"
#include "iplc/tiers/tcp.hpp"
#include "iplc/tiers/tiers.hpp"

using namespace iplc;
using iplc::testing::corpus;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome iplc_cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string corpusFile(const std::string& name) { return std::string(IPLC_CORPUS_DIR) + "/" + name + ".ipl"; }

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / ("iplc-cli-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string firstLine(const std::string& s) { return s.substr(0, s.find('\n')); }

int freePort() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa);
  socklen_t len = sizeof sa;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len);
  ::close(fd);
  return ntohs(sa.sin_port);
}

}  // namespace

TEST_CASE("compile writes a GEER that parses back") {
  auto out = scratch() / "raining.geer";
  auto r = iplc_cli({"compile", corpusFile("01_raining"), "-o", out.string()});
  CHECK(r.code == 0);
  Geer g = geerParse(iplc::testing::readFile(out));
  CHECK(sameGeer(g, compile(iplc::testing::readFile(corpusFile("01_raining")))));
}

TEST_CASE("compile failures and exit codes") {
  auto bad = scratch() / "bad.ipl";
  std::ofstream(bad) << "x\nwhere\n  x = 1 +;\nend\n";
  auto r = iplc_cli({"compile", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.starts_with("3:"));  // line:column first

  CHECK(iplc_cli({"compile", (scratch() / "missing.ipl").string()}).code == 1);
  CHECK(iplc_cli({"frobnicate"}).code == 2);
  CHECK(iplc_cli({}).code == 2);
}

TEST_CASE("run prints the root value") {
  auto natural = iplc_cli({"run", corpusFile("03_natural"), "--ctx", "[t:5]"});
  CHECK(natural.code == 0);
  {
    // Oracle: the reference interpreter on the same program.
    Geer g = compile(iplc::testing::readFile(corpusFile("03_natural")));
    ProcedureRegistry none;
    CHECK(firstLine(natural.out) == NaiveEvaluator(g, none).evalRoot(parseContext("[t:5]")).text());
  }
  CHECK(firstLine(natural.out) == "5");
  CHECK(firstLine(iplc_cli({"run", corpusFile("01_raining"), "--ctx", "[day:3]"}).out) == "true");
  CHECK(firstLine(iplc_cli({"run", corpusFile("01_raining"), "--ctx", "[day:3]", "--naive"}).out) == "true");
  CHECK(iplc_cli({"run", corpusFile("01_raining"), "--ctx", "[t:]"}).code == 2);

  auto div = scratch() / "div.ipl";
  std::ofstream(div) << "1 / 0\n";
  auto r = iplc_cli({"run", div.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("DivisionByZero") != std::string::npos);
}

TEST_CASE("run writes the demand trace") {
  auto trace = scratch() / "fib.trace";
  auto r = iplc_cli({"run", corpusFile("04_fib"), "--ctx", "[t:5]", "--trace-out", trace.string()});
  CHECK(r.code == 0);
  std::string text = iplc::testing::readFile(trace);
  CHECK(text.starts_with("issued "));
  CHECK(text.find("\ncomputed ") != std::string::npos);
}

TEST_CASE("a source file and its compiled GEER run the same") {
  for (const auto& p : corpus()) {
    CAPTURE(p.name);
    auto geer = scratch() / (p.name + ".geer");
    REQUIRE(iplc_cli({"compile", corpusFile(p.name), "-o", geer.string()}).code == 0);
    std::string ctx = p.expectations.empty() ? "[]" : p.expectations.front().at.text();
    auto fromSource = iplc_cli({"run", corpusFile(p.name), "--ctx", ctx});
    auto fromGeer = iplc_cli({"run", geer.string(), "--ctx", ctx});
    CHECK(fromSource.code == fromGeer.code);
    CHECK(fromSource.out == fromGeer.out);
  }
}

TEST_CASE("repl keeps declarations and a session context") {
  auto r = iplc_cli({"repl"}, "dimension t;\n#t\n:ctx [t:4]\n#t\n1 +\nx = #t * 2;\nx\n:quit\n#t\n");
  CHECK(r.code == 0);
  std::string out = r.out;
  auto zero = out.find("0\n"), four = out.find("4\n"), eight = out.find("8\n");
  CHECK(zero != std::string::npos);
  CHECK(four != std::string::npos);
  CHECK(eight != std::string::npos);
  CHECK(zero < four);
  CHECK(four < eight);
  CHECK(r.err.find("parse error") != std::string::npos);
}

TEST_CASE("demo runs on an in-process cluster") {
  auto r = iplc_cli({"demo", corpusFile("01_raining"), "--topology", "gim:1,dgt:2,dst:2,dwt:2", "--ctx", "[day:3]"});
  CHECK(r.code == 0);
  CHECK(firstLine(r.out) == "true");
  CHECK(r.out.find("demands migrated: ") != std::string::npos);

  auto faulty = iplc_cli({"demo", corpusFile("20_procedures"), "--ctx", "[t:60]", "--kill", "dwt@50%"});
  CHECK(faulty.code == 0);
  CHECK(firstLine(faulty.out) == firstLine(iplc_cli({"run", corpusFile("20_procedures"), "--ctx", "[t:60]"}).out));
  CHECK(faulty.out.find("re-dispatched: 0\n") == std::string::npos);
  CHECK(faulty.out.find("killed: sim:") != std::string::npos);

  CHECK(iplc_cli({"demo", corpusFile("01_raining"), "--topology", "dgt:0,dst:1"}).code == 2);
  CHECK(iplc_cli({"demo", corpusFile("01_raining"), "--kill", "dst@10%"}).code == 2);
}

TEST_CASE("demo agrees with run on every corpus program") {
  for (const auto& p : corpus()) {
    CAPTURE(p.name);
    std::string ctx = p.expectations.empty() ? "[]" : p.expectations.back().at.text();
    auto local = iplc_cli({"run", corpusFile(p.name), "--ctx", ctx});
    auto demo = iplc_cli({"demo", corpusFile(p.name), "--ctx", ctx, "--seed", "9"});
    CHECK(local.code == demo.code);
    CHECK(firstLine(local.out) == firstLine(demo.out));
  }
}

TEST_CASE("serve hosts a GIM and tier nodes until shut down") {
  std::string gim = "127.0.0.1:" + std::to_string(freePort());
  std::string nodeAddress = "127.0.0.1:" + std::to_string(freePort());
  Outcome gimRun, nodeRun;
  std::thread gimThread([&] { gimRun = iplc_cli({"serve", "--tier", "gim", "--listen", gim}); });

  TcpNetwork client;
  auto beat = [&] { return client.request(gim, systemCommand("", "Heartbeat"), std::chrono::milliseconds(500)); };
  std::optional<Message> topo;
  for (int i = 0; i < 100 && !(topo = beat()).has_value(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  REQUIRE(topo);

  std::thread nodeThread([&] { nodeRun = iplc_cli({"serve", "--tier", "dst", "--listen", nodeAddress, "--gim", gim}); });
  for (int i = 0; i < 200; ++i) {
    topo = beat();
    if (topo && splitList(topo->get("dst")).size() == 1) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  REQUIRE(topo);
  CHECK(splitList(topo->get("nodes")) == std::vector<std::string>{nodeAddress});
  CHECK(splitList(topo->get("dst")).size() == 1);

  CHECK(client.request(nodeAddress, systemCommand("", "Shutdown"), std::chrono::seconds(5)).has_value());
  nodeThread.join();
  CHECK(nodeRun.code == 0);
  CHECK(client.request(gim, systemCommand("", "Shutdown"), std::chrono::seconds(5)).has_value());
  gimThread.join();
  CHECK(gimRun.code == 0);

  auto badGim = iplc_cli({"serve", "--tier", "dwt", "--listen", "127.0.0.1:0", "--gim", "127.0.0.1:1"});
  CHECK(badGim.code != 0);
  CHECK(iplc_cli({"serve", "--tier", "xyz", "--listen", "127.0.0.1:0"}).code == 2);
}

TEST_CASE("exit code classes") {
  CHECK(cli::exitCodeFor(ErrorCode::IoError) == 1);
  CHECK(cli::exitCodeFor(ErrorCode::ParseError) == 2);
  CHECK(cli::exitCodeFor(ErrorCode::NotABoolean) == 3);
  CHECK(cli::exitCodeFor(ErrorCode::Timeout) == 4);
}
