#include "stf/runtime/system.hpp"

#include <algorithm>

#include "stf/ml/automl.hpp"
#include "stf/model/error.hpp"

namespace stf {

namespace {

template <typename T>
std::optional<std::size_t> index_of(const std::vector<T>& items, std::string_view n) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].name == n) return i;
    }
    return std::nullopt;
}

std::vector<std::string> names(const std::vector<Ref>& refs) {
    std::vector<std::string> out;
    for (const auto& r : refs) out.push_back(r.name);
    return out;
}

DaConfig describe_da(const Thing& t) {
    const DataAnalyticsSpec& da = *t.da;
    DaConfig c;
    c.dataset = da.dataset;
    c.pipeline = pipeline_spec(t);
    if (const auto* e = std::get_if<ExpertMode>(&da.mode)) {
        c.expert.algorithm = e->algorithm.name;
        for (const auto& h : e->hyperparams) c.expert.hyperparams[h.name] = h.value.to_double();
    } else {
        const auto& a = std::get<AutoMlMode>(da.mode);
        c.automl = true;
        c.metric = a.metric.name;
        c.folds = a.folds;
        c.budget = a.budget.value_or(kDefaultBudget);
    }
    c.pretrained = da.pretrained;
    c.backend = resolved_backend(t).value_or("builtin");
    return c;
}

}  // namespace

std::optional<std::size_t> ThingInfo::property_index(std::string_view n) const { return index_of(properties, n); }
std::optional<std::size_t> ThingInfo::message_index(std::string_view n) const { return index_of(messages, n); }
std::optional<std::size_t> ThingInfo::port_index(std::string_view n) const { return index_of(ports, n); }
std::optional<std::size_t> SystemInfo::thing_index(std::string_view n) const { return index_of(things, n); }
std::optional<std::size_t> SystemInfo::instance_index(std::string_view n) const { return index_of(instances, n); }

ThingInfo describe_thing(const Thing& t) {
    ThingInfo info;
    info.name = t.name;
    for (const auto& p : t.properties) {
        Value initial = Value::zero(p.type);
        if (p.initial) initial = p.initial->convert_to(p.type).value_or(initial);
        info.properties.push_back({p.name, p.type, initial});
    }
    for (const auto& m : t.messages) {
        MessageInfo mi{m.name, {}};
        for (const auto& p : m.params) mi.params.push_back({p.name, p.type});
        info.messages.push_back(std::move(mi));
    }
    for (const auto& p : t.ports) info.ports.push_back({p.name, names(p.receives), names(p.sends)});
    for (const auto& s : t.behavior.states) info.states.push_back(s.name);
    if (t.da) info.da = describe_da(t);
    return info;
}

const Configuration& select_configuration(const Model& m, const std::string& requested) {
    if (requested.empty()) {
        if (m.configurations.size() != 1) {
            throw InstantiationError("model declares " + std::to_string(m.configurations.size()) +
                                     " configurations; name the one to use");
        }
        return m.configurations.front();
    }
    const Configuration* c = m.find_configuration(requested);
    if (!c) throw InstantiationError("unknown configuration '" + requested + "'");
    return *c;
}

SystemInfo describe_system(const Model& m, const std::string& config) {
    const Configuration& c = select_configuration(m, config);
    SystemInfo sys;
    sys.configuration = c.name;
    std::vector<const Thing*> used;
    for (const auto& inst : c.instances) {
        const Thing* t = m.find_thing(inst.thing.name);
        if (!t || t->is_fragment) {
            throw InstantiationError("instance '" + inst.name.name + "' names unknown thing '" + inst.thing.name + "'");
        }
        if (std::find(used.begin(), used.end(), t) == used.end()) used.push_back(t);
    }
    for (const auto& t : m.things) {
        if (std::find(used.begin(), used.end(), &t) != used.end()) sys.things.push_back(describe_thing(t));
    }
    for (const auto& inst : c.instances) {
        if (sys.instance_index(inst.name.name)) throw InstantiationError("duplicate instance '" + inst.name.name + "'");
        sys.instances.push_back({inst.name.name, *sys.thing_index(inst.thing.name)});
    }
    for (const auto& k : c.connectors) {
        LinkInfo link;
        auto endpoint = [&](const Endpoint& e, std::size_t& inst, std::size_t& port) {
            auto i = sys.instance_index(e.instance.name);
            if (!i) throw InstantiationError("connector names unknown instance '" + e.instance.name + "'");
            auto p = sys.things[sys.instances[*i].thing].port_index(e.port.name);
            if (!p) throw InstantiationError("connector names unknown port '" + e.instance.name + "." + e.port.name + "'");
            inst = *i;
            port = *p;
        };
        endpoint(k.left, link.left_instance, link.left_port);
        endpoint(k.right, link.right_instance, link.right_port);
        sys.links.push_back(link);
    }
    return sys;
}

}  // namespace stf
