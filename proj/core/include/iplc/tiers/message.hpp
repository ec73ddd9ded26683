#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iplc {

enum class MsgKind : std::uint8_t {
  Demand,
  Result,
  Sys,
  StorePut,
  StoreGet,
  StoreHit,
  StoreMiss,
  PeerAnnounce,
  Ack,
  Err,
};

/// `DEMAND`, `STORE_PUT`, ...
std::string_view msgKindName(MsgKind kind) noexcept;
std::optional<MsgKind> msgKindFromName(std::string_view name) noexcept;

/// One wire message: a kind plus named text fields. Every message carries
/// `from` and `id`; the rest depends on the kind.
struct Message {
  MsgKind kind = MsgKind::Ack;
  std::map<std::string, std::string, std::less<>> fields;

  Message() = default;
  explicit Message(MsgKind k) : kind(k) {}

  bool has(std::string_view name) const { return fields.find(name) != fields.end(); }
  /// Throws ProtocolError when absent.
  const std::string& get(std::string_view name) const;
  std::optional<std::string> find(std::string_view name) const;
  Message& set(std::string name, std::string value) {
    fields.insert_or_assign(std::move(name), std::move(value));
    return *this;
  }

  const std::string& id() const { return get("id"); }
  const std::string& from() const { return get("from"); }

  friend bool operator==(const Message&, const Message&) = default;
};

/// Payload text: `KIND\n` then one `name "value"` line per field, sorted.
std::string encodeBody(const Message& m);
/// Throws ProtocolError.
Message decodeBody(std::string_view body);

/// 4-byte big-endian payload length followed by the payload.
std::string frame(const Message& m);

/// Reassembles frames from a byte stream.
class FrameReader {
 public:
  /// Appends bytes and returns every message completed by them. Throws
  /// ProtocolError on an oversized or malformed frame.
  std::vector<Message> feed(std::string_view bytes);

  static constexpr std::uint32_t kMaxFrame = 64u << 20;

 private:
  std::string buffer_;
};

/// Space-separated quoted strings, for list-valued fields.
std::string joinList(const std::vector<std::string>& items);
std::vector<std::string> splitList(std::string_view text);

}  // namespace iplc
