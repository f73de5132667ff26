#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ensopt {

enum class DescriptorKind : uint8_t { AllPoints = 0, PolicyLevelSet = 1, ArgmaxRegion = 2, Intersection = 3 };

// Replayable predicate identifying a conditioning event. The frozen member
// set (below) is what the debiasing statistics use; the descriptor is what
// out-of-sample replay evaluates.
struct EventDescriptor {
    DescriptorKind kind = DescriptorKind::AllPoints;

    // PolicyLevelSet: policy `policy_id` allocates an amount in bucket
    // `bucket` (of a `num_buckets`-wide uniform partition) to coordinate
    // `coord`. "self" means the patched model's own induced policy at the
    // patch's round; other ids name opaque policies.
    std::string policy_id;
    int policy_rank = -1;  // deterministic ordering rank (self = -1)
    int coord = -1;
    int bucket = -1;
    int num_buckets = 0;

    // ArgmaxRegion: model `model_index` has the highest self-assessed payoff.
    int model_index = -1;

    // Intersection of child predicates.
    std::vector<EventDescriptor> parts;

    static EventDescriptor all_points();
    static EventDescriptor level_set(std::string policy_id, int policy_rank, int coord, int bucket,
                                     int num_buckets);
    static EventDescriptor argmax_region(int model_index);
    static EventDescriptor intersection(EventDescriptor a, EventDescriptor b);

    // Flattened (kind, model index, coordinate, bucket, policy rank) tuple
    // used for deterministic tie-breaking.
    void sort_key(std::vector<long long>& out) const;

    std::string label() const;

    nlohmann::json to_json() const;
    static EventDescriptor from_json(const nlohmann::json& j);
};

bool descriptor_less(const EventDescriptor& a, const EventDescriptor& b);

// A conditioning event with its member set frozen at creation time. All
// bias statistics and patch applications during one update invocation use
// the frozen set.
struct ConditioningEvent {
    EventDescriptor descriptor;
    std::vector<int32_t> members;  // sorted sample indices
    double mass = 0.0;             // |members| / n at freeze time

    static ConditioningEvent freeze(EventDescriptor d, std::vector<int32_t> members, int n);
};

// Intersection of two frozen events (sorted-merge); n is the sample size.
ConditioningEvent intersect_events(const ConditioningEvent& a, const ConditioningEvent& b, int n);

}  // namespace ensopt
