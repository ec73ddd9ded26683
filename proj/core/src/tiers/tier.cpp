#include "iplc/tiers/tier.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "iplc/tiers/tiers.hpp"

namespace iplc {

std::string_view tierKindName(TierKind kind) noexcept {
  switch (kind) {
    case TierKind::DGT: return "DGT";
    case TierKind::DST: return "DST";
    case TierKind::DWT: return "DWT";
    case TierKind::GIM: return "GIM";
  }
  return "?";
}

std::optional<TierKind> tierKindFromName(std::string_view name) noexcept {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (TierKind k : {TierKind::DGT, TierKind::DST, TierKind::DWT, TierKind::GIM}) {
    if (tierKindName(k) == upper) return k;
  }
  return std::nullopt;
}

Timing Timing::fromEnv(Timing base) {
  if (const char* ms = std::getenv("IPLC_DEADLINE_MS")) {
    char* end = nullptr;
    long long v = std::strtoll(ms, &end, 10);
    if (end != ms && *end == '\0' && v > 0) base.deadline = v;
  }
  return base;
}

Message replyTo(const Message& request, MsgKind kind) {
  Message m(kind);
  if (auto id = request.find("id")) m.set("id", *id);
  return m;
}

Message errorReply(const Message& request, ErrorCode code, const std::string& message) {
  return replyTo(request, MsgKind::Err).set("error", std::string(errorName(code))).set("message", message);
}

Message intensionalDemand(const std::string& id, const DemandKey& key) {
  Message m(MsgKind::Demand);
  m.set("id", id).set("demand", "intensional").set("program", key.programId).set("key", key.text());
  return m;
}

Message proceduralDemand(const std::string& id, const DemandKey& key, const std::string& name,
                         const std::vector<Value>& args) {
  std::vector<std::string> texts;
  for (const auto& a : args) texts.push_back(a.text());
  Message m(MsgKind::Demand);
  m.set("id", id).set("demand", "procedural").set("program", key.programId).set("key", key.text());
  m.set("proc", name).set("args", joinList(texts));
  return m;
}

Message systemCommand(const std::string& id, const std::string& cmd) {
  Message m(MsgKind::Sys);
  m.set("id", id).set("cmd", cmd);
  return m;
}

Message resultOf(const std::string& id, const std::string& key, const Value& v) {
  Message m(MsgKind::Result);
  m.set("id", id).set("key", key).set("value", v.text());
  return m;
}

Message failedResult(const std::string& id, const std::string& key, ErrorCode code, const std::string& message) {
  Message m(MsgKind::Result);
  m.set("id", id).set("key", key).set("error", std::string(errorName(code))).set("message", message);
  return m;
}

Value resultValue(const Message& m) {
  if (auto err = m.find("error")) {
    ErrorCode code = ErrorCode::ProtocolError;
    if (!errorFromName(*err, code)) code = ErrorCode::ProtocolError;
    throw Error(code, m.find("message").value_or(*err));
  }
  return parseValue(m.get("value"));
}

}  // namespace iplc
