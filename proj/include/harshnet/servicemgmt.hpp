#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace harshnet::servicemgmt {

enum class ServiceState { active, backup, down };

struct ServiceDescriptor {
  int id = 0;
  std::string function_tag;
  double weight = 0.0;    // feeds the game as w_l
  double min_rate = 0.0;  // Mbps QoS floor
  ServiceState state = ServiceState::backup;
};

/// Function-homogeneous group with at most one active member. A suspended
/// group keeps its members as backups and stays out of the game until the
/// predicted resource level covers its floor again.
struct ServiceGroup {
  int id = 0;
  std::string function_tag;
  std::vector<ServiceDescriptor> members;
  bool suspended = false;

  const ServiceDescriptor* active_member() const;
  ServiceDescriptor* active_member();
  /// Highest-weight non-down member, ties to the lowest id; the member a
  /// promotion or reactivation would pick. Null when everyone is down.
  const ServiceDescriptor* promotion_candidate() const;
  bool unserved() const;  // every member down
};

/// Partition by exact function tag. Within each group the highest-weight
/// member starts active (ties to the lowest id), the rest backup. Group ids
/// follow first appearance order. Throws on duplicate service ids.
std::vector<ServiceGroup> form_groups(const std::vector<ServiceDescriptor>& services);

/// Marks the active member down and promotes the best backup. Throws if
/// failed_id is not the group's active member.
void failover(ServiceGroup& g, int failed_id);

enum class EventKind { failed, promoted, suspended, reactivated, unserved };

struct ServiceEvent {
  EventKind kind = EventKind::failed;
  int service_id = -1;  // -1 on group-level events
  int group_id = 0;
};

const char* event_name(EventKind k);

/// One management round against fresh game results. Active services whose
/// measured rate misses their floor fail over; a group whose promoted member
/// needs more than the whole predicted budget r_hat is suspended; suspended
/// groups come back once r_hat covers their candidate again. Active services
/// absent from rates (not yet measured) are left alone, which makes the round
/// idempotent under unchanged inputs.
std::vector<ServiceEvent> reorganize(std::vector<ServiceGroup>& groups, double r_hat,
                                     const std::map<int, double>& rates);

std::vector<const ServiceDescriptor*> active_services(const std::vector<ServiceGroup>& groups);

/// JSON array of {id, function_tag, weight, min_rate}.
std::vector<ServiceDescriptor> load_roster(const std::string& path);

struct LoggedEvent {
  int step = 0;
  ServiceEvent event;
};

/// CSV columns: step,event,service_id,group_id.
void write_event_log(const std::string& path, const std::vector<LoggedEvent>& events);

}  // namespace harshnet::servicemgmt
