#include "iplc/warehouse.hpp"

#include "iplc/error.hpp"
#include "iplc/text.hpp"

namespace iplc {

std::string DemandKey::text() const { return programId + ":" + quote(subject) + "@" + context.text(); }

DemandKey DemandKey::parse(std::string_view text) {
  TextCursor cur(text);
  DemandKey k;
  k.programId = cur.readAtom("():\"@");
  cur.expect(':');
  k.subject = cur.readQuoted();
  cur.expect('@');
  k.context = cur.readContext();
  cur.expectEnd();
  return k;
}

DemandKey procedureKey(const std::string& programId, const std::string& name,
                       const std::vector<Value>& args) {
  std::string subject = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) subject += ",";
    subject += args[i].text();
  }
  return DemandKey{programId, subject + ")", Context{}};
}

Warehouse::Claim Warehouse::claimOrGet(const DemandKey& key, const void* owner) {
  std::string k = key.text();
  std::unique_lock lock(mu_);
  ++stats_.issued;
  while (true) {
    auto it = slots_.find(k);
    if (it == slots_.end()) {
      ++stats_.misses;
      slots_.emplace(k, std::pair{key, Slot{true, owner, std::nullopt}});
      return Claim{};
    }
    Slot& s = it->second.second;
    if (!s.pending) {
      ++stats_.hits;
      return Claim{s.value};
    }
    if (s.owner == owner) {
      throw Error(ErrorCode::CyclicDemand, "demand for " + key.subject + " at " +
                                               key.context.text() + " depends on itself");
    }
    cv_.wait(lock);
  }
}

void Warehouse::fulfill(const DemandKey& key, const Value& v) {
  std::string k = key.text();
  {
    std::lock_guard lock(mu_);
    auto it = slots_.find(k);
    if (it == slots_.end() || !it->second.second.pending) {
      throw Error(ErrorCode::ConflictingResult, "fulfilling a key that was not claimed: " + k);
    }
    it->second.second = Slot{false, nullptr, v};
    ++stats_.computed;
    if (!everComputed_.insert(k).second) ++stats_.recomputations;
  }
  cv_.notify_all();
}

void Warehouse::release(const DemandKey& key) {
  {
    std::lock_guard lock(mu_);
    auto it = slots_.find(key.text());
    if (it != slots_.end() && it->second.second.pending) slots_.erase(it);
  }
  cv_.notify_all();
}

void Warehouse::insert(const DemandKey& key, const Value& v) {
  std::string k = key.text();
  {
    std::lock_guard lock(mu_);
    auto it = slots_.find(k);
    if (it != slots_.end() && !it->second.second.pending) {
      if (!(*it->second.second.value == v)) {
        throw Error(ErrorCode::ConflictingResult,
                    k + " already holds " + it->second.second.value->text() + ", not " + v.text());
      }
      return;
    }
    slots_.insert_or_assign(k, std::pair{key, Slot{false, nullptr, v}});
  }
  cv_.notify_all();
}

std::optional<Value> Warehouse::peek(const DemandKey& key) const {
  std::lock_guard lock(mu_);
  auto it = slots_.find(key.text());
  if (it == slots_.end() || it->second.second.pending) return std::nullopt;
  return it->second.second.value;
}

std::size_t Warehouse::size() const {
  std::lock_guard lock(mu_);
  return slots_.size();
}

Warehouse::Stats Warehouse::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::vector<std::pair<DemandKey, Value>> Warehouse::entries() const {
  std::lock_guard lock(mu_);
  std::vector<std::pair<DemandKey, Value>> out;
  for (const auto& [_, entry] : slots_) {
    if (!entry.second.pending) out.emplace_back(entry.first, *entry.second.value);
  }
  return out;
}

std::string_view eventName(DemandTrace::Event e) noexcept {
  switch (e) {
    case DemandTrace::Event::Issued: return "issued";
    case DemandTrace::Event::Hit: return "hit";
    case DemandTrace::Event::Computed: return "computed";
  }
  return "?";
}

void DemandTrace::record(const DemandKey& key, Event event) {
  auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::steady_clock::now().time_since_epoch())
                .count();
  records_.push_back({key, event, static_cast<std::int64_t>(ns)});
}

std::size_t DemandTrace::count(Event event) const {
  std::size_t n = 0;
  for (const auto& r : records_) n += r.event == event;
  return n;
}

std::string DemandTrace::exportText() const {
  std::string out;
  for (const auto& r : records_) {
    out += std::string(eventName(r.event)) + " " + r.key.text() + " " + std::to_string(r.ns) + "\n";
  }
  return out;
}

}  // namespace iplc
