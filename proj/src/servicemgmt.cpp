#include "harshnet/servicemgmt.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "harshnet/csvio.hpp"

namespace harshnet::servicemgmt {

namespace {

bool outranks(const ServiceDescriptor& a, const ServiceDescriptor& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.id < b.id;
}

}  // namespace

const ServiceDescriptor* ServiceGroup::active_member() const {
  for (const auto& m : members)
    if (m.state == ServiceState::active) return &m;
  return nullptr;
}

ServiceDescriptor* ServiceGroup::active_member() {
  for (auto& m : members)
    if (m.state == ServiceState::active) return &m;
  return nullptr;
}

const ServiceDescriptor* ServiceGroup::promotion_candidate() const {
  const ServiceDescriptor* best = nullptr;
  for (const auto& m : members) {
    if (m.state == ServiceState::down) continue;
    if (!best || outranks(m, *best)) best = &m;
  }
  return best;
}

bool ServiceGroup::unserved() const {
  return std::all_of(members.begin(), members.end(),
                     [](const ServiceDescriptor& m) { return m.state == ServiceState::down; });
}

std::vector<ServiceGroup> form_groups(const std::vector<ServiceDescriptor>& services) {
  std::set<int> seen;
  for (const auto& s : services)
    if (!seen.insert(s.id).second)
      throw std::invalid_argument("duplicate service id " + std::to_string(s.id));

  std::vector<ServiceGroup> groups;
  for (const auto& s : services) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const ServiceGroup& g) {
      return g.function_tag == s.function_tag;
    });
    if (it == groups.end()) {
      ServiceGroup g;
      g.id = static_cast<int>(groups.size());
      g.function_tag = s.function_tag;
      groups.push_back(std::move(g));
      it = groups.end() - 1;
    }
    ServiceDescriptor m = s;
    m.state = ServiceState::backup;
    it->members.push_back(std::move(m));
  }
  for (auto& g : groups) {
    auto best = std::min_element(g.members.begin(), g.members.end(),
                                 [](const auto& a, const auto& b) { return outranks(a, b); });
    best->state = ServiceState::active;
  }
  return groups;
}

void failover(ServiceGroup& g, int failed_id) {
  auto it = std::find_if(g.members.begin(), g.members.end(),
                         [&](const ServiceDescriptor& m) { return m.id == failed_id; });
  if (it == g.members.end() || it->state != ServiceState::active)
    throw std::invalid_argument("failover target is not the active member");
  it->state = ServiceState::down;
  ServiceDescriptor* best = nullptr;
  for (auto& m : g.members) {
    if (m.state != ServiceState::backup) continue;
    if (!best || outranks(m, *best)) best = &m;
  }
  if (best) best->state = ServiceState::active;
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::failed: return "failed";
    case EventKind::promoted: return "promoted";
    case EventKind::suspended: return "suspended";
    case EventKind::reactivated: return "reactivated";
    case EventKind::unserved: return "unserved";
  }
  return "unknown";
}

std::vector<ServiceEvent> reorganize(std::vector<ServiceGroup>& groups, double r_hat,
                                     const std::map<int, double>& rates) {
  std::vector<ServiceEvent> events;
  for (auto& g : groups) {
    if (g.suspended) {
      const ServiceDescriptor* cand = g.promotion_candidate();
      if (cand && cand->min_rate <= r_hat) {
        g.suspended = false;
        for (auto& m : g.members)
          if (m.id == cand->id) m.state = ServiceState::active;
        events.push_back({EventKind::reactivated, cand->id, g.id});
      }
      continue;
    }
    ServiceDescriptor* act = g.active_member();
    if (!act) continue;
    auto it = rates.find(act->id);
    if (it == rates.end() || it->second >= act->min_rate) continue;

    int failed_id = act->id;
    failover(g, failed_id);
    events.push_back({EventKind::failed, failed_id, g.id});
    ServiceDescriptor* next = g.active_member();
    if (!next) {
      events.push_back({EventKind::unserved, -1, g.id});
      continue;
    }
    events.push_back({EventKind::promoted, next->id, g.id});
    if (next->min_rate > r_hat) {
      // Even the whole predicted budget cannot cover the new active.
      next->state = ServiceState::backup;
      g.suspended = true;
      events.push_back({EventKind::suspended, -1, g.id});
    }
  }
  return events;
}

std::vector<const ServiceDescriptor*> active_services(const std::vector<ServiceGroup>& groups) {
  std::vector<const ServiceDescriptor*> out;
  for (const auto& g : groups) {
    if (g.suspended) continue;
    if (const auto* a = g.active_member()) out.push_back(a);
  }
  return out;
}

std::vector<ServiceDescriptor> load_roster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (!j.is_array()) throw std::runtime_error("roster must be a JSON array");
  std::vector<ServiceDescriptor> roster;
  for (const auto& e : j) {
    ServiceDescriptor s;
    s.id = e.at("id").get<int>();
    s.function_tag = e.at("function_tag").get<std::string>();
    s.weight = e.at("weight").get<double>();
    s.min_rate = e.at("min_rate").get<double>();
    if (!(s.weight > 0.0)) throw std::runtime_error("service weight must be positive");
    if (s.min_rate < 0.0) throw std::runtime_error("min_rate must be nonnegative");
    roster.push_back(std::move(s));
  }
  return roster;
}

void write_event_log(const std::string& path, const std::vector<LoggedEvent>& events) {
  csvio::Table t;
  t.header = {"time_step", "event_type", "service_id", "group_id"};
  for (const auto& le : events)
    t.rows.push_back({std::to_string(le.step), event_name(le.event.kind),
                      std::to_string(le.event.service_id),
                      std::to_string(le.event.group_id)});
  csvio::write_table(path, t);
}

}  // namespace harshnet::servicemgmt
