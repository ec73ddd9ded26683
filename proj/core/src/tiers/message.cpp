#include "iplc/tiers/message.hpp"

#include <array>

#include "iplc/error.hpp"
#include "iplc/text.hpp"

namespace iplc {

namespace {

constexpr std::array<std::string_view, 10> kKindNames = {
    "DEMAND", "RESULT", "SYS", "STORE_PUT", "STORE_GET", "STORE_HIT", "STORE_MISS", "PEER_ANNOUNCE", "ACK", "ERR",
};

[[noreturn]] void protocol(const std::string& what) { throw Error(ErrorCode::ProtocolError, what); }

}  // namespace

std::string_view msgKindName(MsgKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<MsgKind> msgKindFromName(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<MsgKind>(i);
  }
  return std::nullopt;
}

const std::string& Message::get(std::string_view name) const {
  auto it = fields.find(name);
  if (it == fields.end()) {
    protocol(std::string(msgKindName(kind)) + " message lacks field '" + std::string(name) + "'");
  }
  return it->second;
}

std::optional<std::string> Message::find(std::string_view name) const {
  auto it = fields.find(name);
  if (it == fields.end()) return std::nullopt;
  return it->second;
}

std::string encodeBody(const Message& m) {
  std::string out(msgKindName(m.kind));
  out += '\n';
  for (const auto& [name, value] : m.fields) {
    out += name;
    out += ' ';
    out += quote(value);
    out += '\n';
  }
  return out;
}

Message decodeBody(std::string_view body) {
  auto nl = body.find('\n');
  if (nl == std::string_view::npos) protocol("message has no kind line");
  auto kind = msgKindFromName(body.substr(0, nl));
  if (!kind) protocol("unknown message kind '" + std::string(body.substr(0, nl)) + "'");
  Message m(*kind);
  body.remove_prefix(nl + 1);
  try {
    TextCursor cur(body);
    while (cur.peek() != '\0') {
      std::string name = cur.readIdentifier();
      std::string value = cur.readQuoted();
      if (!m.fields.emplace(std::move(name), std::move(value)).second) protocol("repeated field");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ProtocolError) throw;
    protocol(std::string("bad message body: ") + e.what());
  }
  return m;
}

std::string frame(const Message& m) {
  std::string body = encodeBody(m);
  auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  for (int shift = 24; shift >= 0; shift -= 8) out += static_cast<char>((n >> shift) & 0xff);
  return out + body;
}

std::vector<Message> FrameReader::feed(std::string_view bytes) {
  buffer_.append(bytes);
  std::vector<Message> out;
  std::size_t pos = 0;
  while (buffer_.size() - pos >= 4) {
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | static_cast<unsigned char>(buffer_[pos + i]);
    if (n > kMaxFrame) protocol("frame of " + std::to_string(n) + " bytes exceeds the limit");
    if (buffer_.size() - pos - 4 < n) break;
    out.push_back(decodeBody(std::string_view(buffer_).substr(pos + 4, n)));
    pos += 4 + n;
  }
  buffer_.erase(0, pos);
  return out;
}

std::string joinList(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ' ';
    out += quote(item);
  }
  return out;
}

std::vector<std::string> splitList(std::string_view text) {
  std::vector<std::string> out;
  TextCursor cur(text);
  while (cur.peek() != '\0') out.push_back(cur.readQuoted());
  return out;
}

}  // namespace iplc
