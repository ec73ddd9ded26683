#pragma once

// TCP transport: each endpoint gets a listening socket and one thread that
// polls its connections, feeds it whole frames, and ticks it about every
// 10 ms. Outgoing connections are opened on first use and cached; a send
// that cannot connect comes back to the sender as a bounce.

#include <chrono>
#include <functional>
#include <mutex>

#include "iplc/tiers/tier.hpp"

namespace iplc {

class TcpNetwork final : public Network {
 public:
  explicit TcpNetwork(std::string host = "127.0.0.1");
  ~TcpNetwork() override;
  TcpNetwork(const TcpNetwork&) = delete;
  TcpNetwork& operator=(const TcpNetwork&) = delete;

  /// Listens on an ephemeral port of the network's host; `name` is unused.
  std::string attach(std::unique_ptr<Endpoint> ep, const std::string& name) override;
  /// Listens on `address` (`host:port`). Throws IoError when it cannot.
  std::string attachAt(std::unique_ptr<Endpoint> ep, const std::string& address);
  void kill(const std::string& address) override;
  bool alive(const std::string& address) const;

  /// Blocks until every endpoint has stopped (or `limit` passes).
  bool wait(std::chrono::milliseconds limit = std::chrono::hours(24 * 365));

  /// Sends `m` from a client address owned by the network and waits for the
  /// message answering its id.
  std::optional<Message> request(const std::string& to, Message m, std::chrono::milliseconds timeout);

  /// Runs `fn` on the endpoint while its thread is held off.
  void inspect(const std::string& address, const std::function<void(Endpoint&)>& fn);

 private:
  class Host;
  class Inbox;
  std::string listen(std::unique_ptr<Endpoint> ep, const std::string& host, int port);

  std::string host_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Host>> hosts_;
  Inbox* inbox_ = nullptr;
  std::string inboxAddress_;
  std::mutex requestMu_;
  std::uint64_t next_ = 0;
};

/// `host:port` split; throws UsageError on bad input.
std::pair<std::string, int> splitAddress(const std::string& address);

}  // namespace iplc
