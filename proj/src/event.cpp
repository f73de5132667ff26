#include "ensopt/event.hpp"

#include <algorithm>

#include "ensopt/errors.hpp"

namespace ensopt {

EventDescriptor EventDescriptor::all_points() {
    EventDescriptor d;
    d.kind = DescriptorKind::AllPoints;
    return d;
}

EventDescriptor EventDescriptor::level_set(std::string policy_id, int policy_rank, int coord, int bucket,
                                           int num_buckets) {
    EventDescriptor d;
    d.kind = DescriptorKind::PolicyLevelSet;
    d.policy_id = std::move(policy_id);
    d.policy_rank = policy_rank;
    d.coord = coord;
    d.bucket = bucket;
    d.num_buckets = num_buckets;
    return d;
}

EventDescriptor EventDescriptor::argmax_region(int model_index) {
    EventDescriptor d;
    d.kind = DescriptorKind::ArgmaxRegion;
    d.model_index = model_index;
    return d;
}

EventDescriptor EventDescriptor::intersection(EventDescriptor a, EventDescriptor b) {
    EventDescriptor d;
    d.kind = DescriptorKind::Intersection;
    d.parts.push_back(std::move(a));
    d.parts.push_back(std::move(b));
    return d;
}

void EventDescriptor::sort_key(std::vector<long long>& out) const {
    out.push_back(static_cast<long long>(kind));
    switch (kind) {
        case DescriptorKind::AllPoints: break;
        case DescriptorKind::PolicyLevelSet:
            out.push_back(-1);  // no model index
            out.push_back(coord);
            out.push_back(bucket);
            out.push_back(policy_rank);
            break;
        case DescriptorKind::ArgmaxRegion:
            out.push_back(model_index);
            break;
        case DescriptorKind::Intersection:
            for (const auto& part : parts) part.sort_key(out);
            break;
    }
}

bool descriptor_less(const EventDescriptor& a, const EventDescriptor& b) {
    std::vector<long long> ka, kb;
    a.sort_key(ka);
    b.sort_key(kb);
    return ka < kb;
}

std::string EventDescriptor::label() const {
    switch (kind) {
        case DescriptorKind::AllPoints: return "all";
        case DescriptorKind::PolicyLevelSet:
            return "ls(" + policy_id + ",c" + std::to_string(coord) + ",b" + std::to_string(bucket) + ")";
        case DescriptorKind::ArgmaxRegion: return "argmax(m" + std::to_string(model_index) + ")";
        case DescriptorKind::Intersection: {
            std::string s;
            for (size_t i = 0; i < parts.size(); ++i) {
                if (i) s += "&";
                s += parts[i].label();
            }
            return s;
        }
    }
    return "?";
}

nlohmann::json EventDescriptor::to_json() const {
    nlohmann::json j;
    switch (kind) {
        case DescriptorKind::AllPoints: j["kind"] = "all"; break;
        case DescriptorKind::PolicyLevelSet:
            j["kind"] = "level_set";
            j["policy_id"] = policy_id;
            j["policy_rank"] = policy_rank;
            j["coord"] = coord;
            j["bucket"] = bucket;
            j["num_buckets"] = num_buckets;
            break;
        case DescriptorKind::ArgmaxRegion:
            j["kind"] = "argmax";
            j["model_index"] = model_index;
            break;
        case DescriptorKind::Intersection: {
            j["kind"] = "intersection";
            auto arr = nlohmann::json::array();
            for (const auto& part : parts) arr.push_back(part.to_json());
            j["parts"] = std::move(arr);
            break;
        }
    }
    return j;
}

EventDescriptor EventDescriptor::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "all") return all_points();
    if (kind == "level_set")
        return level_set(j.at("policy_id").get<std::string>(), j.at("policy_rank").get<int>(),
                         j.at("coord").get<int>(), j.at("bucket").get<int>(), j.at("num_buckets").get<int>());
    if (kind == "argmax") return argmax_region(j.at("model_index").get<int>());
    if (kind == "intersection") {
        const auto& parts = j.at("parts");
        if (parts.size() != 2) throw ConfigError("event descriptor: intersection needs two parts");
        return intersection(from_json(parts[0]), from_json(parts[1]));
    }
    throw ConfigError("event descriptor: unknown kind '" + kind + "'");
}

ConditioningEvent ConditioningEvent::freeze(EventDescriptor d, std::vector<int32_t> members, int n) {
    ConditioningEvent e;
    e.descriptor = std::move(d);
    std::sort(members.begin(), members.end());
    e.members = std::move(members);
    e.mass = n > 0 ? static_cast<double>(e.members.size()) / n : 0.0;
    return e;
}

ConditioningEvent intersect_events(const ConditioningEvent& a, const ConditioningEvent& b, int n) {
    std::vector<int32_t> common;
    std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                          std::back_inserter(common));
    return ConditioningEvent::freeze(EventDescriptor::intersection(a.descriptor, b.descriptor),
                                     std::move(common), n);
}

}  // namespace ensopt
