#include "iplc/tiers/tcp.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <thread>

namespace iplc {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t nowMs() {
  static const auto epoch = Clock::now();
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - epoch).count();
}

/// Owns one file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }
  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

sockaddr_in resolve(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
    throw Error(ErrorCode::Unreachable, "cannot resolve " + host);
  }
  sockaddr_in sa = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  sa.sin_port = htons(static_cast<std::uint16_t>(port));
  return sa;
}

/// Connects with a bounded wait; an invalid Fd on failure.
Fd connectTo(const std::string& address, int timeoutMs) {
  auto [host, port] = splitAddress(address);
  sockaddr_in sa = resolve(host, port);
  Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
  if (!fd) return {};
  int flags = ::fcntl(fd.get(), F_GETFL, 0);
  ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
    if (errno != EINPROGRESS) return {};
    pollfd p{fd.get(), POLLOUT, 0};
    if (::poll(&p, 1, timeoutMs) <= 0) return {};
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) return {};
  }
  ::fcntl(fd.get(), F_SETFL, flags);
  int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

bool writeAll(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    ssize_t n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

std::pair<std::string, int> splitAddress(const std::string& address) {
  auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw Error(ErrorCode::UsageError, "address '" + address + "' is not host:port");
  }
  std::string host = address.substr(0, colon);
  int port = 0;
  for (char c : address.substr(colon + 1)) {
    if (c < '0' || c > '9' || port > 65535) throw Error(ErrorCode::UsageError, "bad port in '" + address + "'");
    port = port * 10 + (c - '0');
  }
  if (port > 65535) throw Error(ErrorCode::UsageError, "bad port in '" + address + "'");
  return {host, port};
}

/// One endpoint, its sockets and its thread.
class TcpNetwork::Host final : public TierEnv {
 public:
  Host(std::unique_ptr<Endpoint> ep, std::string address, Fd listener)
      : endpoint_(std::move(ep)), address_(std::move(address)), listener_(std::move(listener)) {}

  ~Host() override { halt(); }

  const std::string& self() const override { return address_; }
  std::int64_t now() const override { return nowMs(); }

  void send(const std::string& to, Message m) override {
    m.set("from", address_);
    std::string bytes = frame(m);
    {
      std::lock_guard lock(outMu_);
      for (int attempt = 0; attempt < 2; ++attempt) {
        auto it = out_.find(to);
        if (it == out_.end()) {
          Fd fd;
          try {
            fd = connectTo(to, 1000);
          } catch (const Error&) {
          }
          if (!fd) break;
          it = out_.emplace(to, std::move(fd)).first;
        }
        if (writeAll(it->second.get(), bytes)) return;
        out_.erase(it);  // stale connection: reconnect once
      }
    }
    if (m.has("bounced")) return;
    std::string kind(msgKindName(m.kind));
    m.kind = MsgKind::Err;
    m.set("error", std::string(errorName(ErrorCode::Unreachable)));
    m.set("message", "no endpoint at " + to);
    m.set("bounced", kind);
    m.set("from", to);
    std::lock_guard lock(localMu_);
    local_.push_back(std::move(m));
  }

  void run() {
    thread_ = std::thread([this] { loop(); });
  }

  /// Stops the thread and closes every socket. Safe from the host's own
  /// thread, which then just leaves its loop.
  void halt() {
    quit_ = true;
    if (thread_.joinable()) {
      if (thread_.get_id() == std::this_thread::get_id()) return;
      thread_.join();
    }
    listener_.reset();
    conns_.clear();
    std::lock_guard lock(outMu_);
    out_.clear();
  }

  bool done() const noexcept { return done_; }
  std::mutex& mu() { return mu_; }
  Endpoint& endpoint() { return *endpoint_; }

  void start() {
    std::lock_guard lock(mu_);
    endpoint_->start(*this);
  }

 private:
  struct Conn {
    Fd fd;
    FrameReader reader;
  };

  void deliver(const Message& m) {
    std::lock_guard lock(mu_);
    if (endpoint_->stopped()) return;
    endpoint_->receive(m, *this);
  }

  void loop() {
    while (!quit_) {
      std::vector<pollfd> fds;
      fds.push_back({listener_.get(), POLLIN, 0});
      for (const auto& c : conns_) fds.push_back({c.fd.get(), POLLIN, 0});
      int ready = ::poll(fds.data(), fds.size(), 10);
      if (ready > 0) {
        if (fds[0].revents & POLLIN) {
          int fd = ::accept(listener_.get(), nullptr, nullptr);
          if (fd >= 0) conns_.push_back(Conn{Fd(fd), {}});
        }
        std::vector<std::size_t> closed;
        for (std::size_t i = 1; i < fds.size(); ++i) {
          if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
          char buf[65536];
          ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
          if (n <= 0) {
            closed.push_back(i - 1);
            continue;
          }
          std::vector<Message> msgs;
          try {
            msgs = conns_[i - 1].reader.feed(std::string_view(buf, static_cast<std::size_t>(n)));
          } catch (const Error&) {
            closed.push_back(i - 1);  // garbage on the wire: drop the connection
          }
          for (const auto& m : msgs) deliver(m);
        }
        for (auto it = closed.rbegin(); it != closed.rend(); ++it) conns_.erase(conns_.begin() + static_cast<long>(*it));
      }
      std::deque<Message> local;
      {
        std::lock_guard lock(localMu_);
        local.swap(local_);
      }
      for (const auto& m : local) deliver(m);
      {
        std::lock_guard lock(mu_);
        if (!endpoint_->stopped()) endpoint_->tick(*this);
        if (endpoint_->stopped()) quit_ = true;
      }
    }
    done_ = true;
  }

  std::unique_ptr<Endpoint> endpoint_;
  std::string address_;
  Fd listener_;
  std::vector<Conn> conns_;
  std::thread thread_;
  std::atomic<bool> quit_{false};
  std::atomic<bool> done_{false};
  std::mutex mu_;
  std::mutex outMu_;
  std::map<std::string, Fd> out_;
  std::mutex localMu_;
  std::deque<Message> local_;
};

/// The network's own client address: keeps replies until `request` takes them.
class TcpNetwork::Inbox final : public Endpoint {
 public:
  void start(TierEnv& env) override { env_ = &env; }
  void receive(const Message& m, TierEnv&) override {
    {
      std::lock_guard lock(mu_);
      inbox_.push_back(m);
    }
    cv_.notify_all();
  }

  std::optional<Message> await(const std::string& id, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    std::optional<Message> found;
    cv_.wait_for(lock, timeout, [&] {
      for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
        if (it->find("id") == id) {
          found = std::move(*it);
          inbox_.erase(it);
          return true;
        }
      }
      return false;
    });
    return found;
  }

  TierEnv* env() const { return env_; }

 private:
  TierEnv* env_ = nullptr;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> inbox_;
};

TcpNetwork::TcpNetwork(std::string host) : host_(std::move(host)) {}

TcpNetwork::~TcpNetwork() {
  std::map<std::string, std::unique_ptr<Host>> hosts;
  {
    std::lock_guard lock(mu_);
    hosts.swap(hosts_);
  }
  for (auto& [_, h] : hosts) h->halt();
}

std::string TcpNetwork::listen(std::unique_ptr<Endpoint> ep, const std::string& host, int port) {
  sockaddr_in sa = resolve(host, port);
  Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
  if (!fd) throw Error(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0 || ::listen(fd.get(), 64) != 0) {
    throw Error(ErrorCode::IoError,
                "cannot listen on " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  }
  socklen_t len = sizeof sa;
  ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&sa), &len);
  std::string address = host + ":" + std::to_string(ntohs(sa.sin_port));
  auto h = std::make_unique<Host>(std::move(ep), address, std::move(fd));
  Host* raw = h.get();
  {
    std::lock_guard lock(mu_);
    hosts_[address] = std::move(h);
  }
  raw->start();
  raw->run();
  return address;
}

std::string TcpNetwork::attach(std::unique_ptr<Endpoint> ep, const std::string&) {
  return listen(std::move(ep), host_, 0);
}

std::string TcpNetwork::attachAt(std::unique_ptr<Endpoint> ep, const std::string& address) {
  auto [host, port] = splitAddress(address);
  return listen(std::move(ep), host, port);
}

void TcpNetwork::kill(const std::string& address) {
  Host* h = nullptr;
  {
    std::lock_guard lock(mu_);
    if (auto it = hosts_.find(address); it != hosts_.end()) h = it->second.get();
  }
  if (h) h->halt();
}

bool TcpNetwork::alive(const std::string& address) const {
  std::lock_guard lock(mu_);
  auto it = hosts_.find(address);
  return it != hosts_.end() && !it->second->done();
}

bool TcpNetwork::wait(std::chrono::milliseconds limit) {
  auto end = Clock::now() + limit;
  for (;;) {
    bool all = true;
    {
      std::lock_guard lock(mu_);
      for (const auto& [address, h] : hosts_) {
        if (address != inboxAddress_ && !h->done()) all = false;
      }
    }
    if (all) return true;
    if (Clock::now() >= end) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

std::optional<Message> TcpNetwork::request(const std::string& to, Message m, std::chrono::milliseconds timeout) {
  std::string id;
  {
    std::lock_guard lock(requestMu_);
    if (!inbox_) {
      auto inbox = std::make_unique<Inbox>();
      inbox_ = inbox.get();
      inboxAddress_ = attach(std::move(inbox), "client");
    }
    id = inboxAddress_ + "#" + std::to_string(++next_);
  }
  m.set("id", id);
  inbox_->env()->send(to, std::move(m));
  return inbox_->await(id, timeout);
}

void TcpNetwork::inspect(const std::string& address, const std::function<void(Endpoint&)>& fn) {
  Host* h = nullptr;
  {
    std::lock_guard lock(mu_);
    if (auto it = hosts_.find(address); it != hosts_.end()) h = it->second.get();
  }
  if (!h) throw Error(ErrorCode::Unreachable, "no endpoint at " + address);
  std::lock_guard lock(h->mu());
  fn(h->endpoint());
}

}  // namespace iplc
