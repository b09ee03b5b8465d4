#include "stf/model/merge.hpp"

#include <algorithm>
#include <set>

#include "stf/model/error.hpp"

namespace stf {

namespace {

std::string join_cycle(const std::vector<std::string>& stack, const std::string& repeat) {
    auto it = std::find(stack.begin(), stack.end(), repeat);
    std::string out;
    for (; it != stack.end(); ++it) out += *it + " -> ";
    return out + repeat;
}

template <typename T>
T* find_by_name(std::vector<T>& v, std::string_view name) {
    auto it = std::find_if(v.begin(), v.end(), [&](const T& e) { return e.name == name; });
    return it == v.end() ? nullptr : &*it;
}

bool has_ref(const std::vector<Ref>& refs, std::string_view name) {
    return std::any_of(refs.begin(), refs.end(), [&](const Ref& r) { return r.name == name; });
}

void merge_annotations(std::vector<Annotation>& base, const std::vector<Annotation>& extra) {
    for (const auto& a : extra) {
        auto it = std::find_if(base.begin(), base.end(), [&](const Annotation& b) { return b.key == a.key; });
        if (it == base.end()) {
            base.push_back(a);
        } else {
            it->value = a.value;
        }
    }
}

[[noreturn]] void conflict(const Thing& t, const std::string& what) {
    throw MergeError("conflicting redefinition of thing '" + t.name + "': " + what);
}

void refine_da(Thing& base, const Thing& overlay) {
    if (!overlay.da) return;
    if (!base.da) {
        base.da = overlay.da;
        return;
    }
    DataAnalyticsSpec& b = *base.da;
    const DataAnalyticsSpec& o = *overlay.da;
    if (b.dataset != o.dataset || b.features != o.features || b.labels != o.labels || b.sequential != o.sequential ||
        b.window != o.window || b.scaling != o.scaling || b.missing != o.missing) {
        conflict(base, "DA block changes dataset, features, labels or preprocessing");
    }
    b.mode = o.mode;
    if (o.pretrained) {
        if (b.pretrained && *b.pretrained != *o.pretrained) conflict(base, "pretrained model path changed");
        b.pretrained = o.pretrained;
    }
    merge_annotations(b.annotations, o.annotations);
}

void refine(Thing& base, const Thing& overlay) {
    if (base.is_fragment != overlay.is_fragment) conflict(base, "fragment flag changed");
    for (const auto& inc : overlay.includes) {
        if (!has_ref(base.includes, inc.name)) base.includes.push_back(inc);
    }
    merge_annotations(base.annotations, overlay.annotations);

    for (const auto& p : overlay.properties) {
        if (Property* existing = find_by_name(base.properties, p.name)) {
            if (existing->type != p.type) conflict(base, "retyping property '" + p.name + "'");
            if (p.initial) {
                if (existing->initial && !(*existing->initial == *p.initial)) {
                    conflict(base, "changing initial value of property '" + p.name + "'");
                }
                existing->initial = p.initial;
            }
        } else {
            base.properties.push_back(p);
        }
    }
    for (const auto& m : overlay.messages) {
        if (Message* existing = find_by_name(base.messages, m.name)) {
            if (existing->params != m.params) conflict(base, "retyping message '" + m.name + "'");
        } else {
            base.messages.push_back(m);
        }
    }
    for (const auto& p : overlay.ports) {
        if (Port* existing = find_by_name(base.ports, p.name)) {
            for (const auto& r : existing->receives) {
                if (!has_ref(p.receives, r.name)) {
                    conflict(base, "port '" + p.name + "' removes received message '" + r.name + "'");
                }
            }
            for (const auto& s : existing->sends) {
                if (!has_ref(p.sends, s.name)) {
                    conflict(base, "port '" + p.name + "' removes sent message '" + s.name + "'");
                }
            }
            for (const auto& r : p.receives) {
                if (!has_ref(existing->receives, r.name)) existing->receives.push_back(r);
            }
            for (const auto& s : p.sends) {
                if (!has_ref(existing->sends, s.name)) existing->sends.push_back(s);
            }
        } else {
            base.ports.push_back(p);
        }
    }
    refine_da(base, overlay);

    const StateMachine& sm = overlay.behavior;
    if (sm.states.empty()) {
        if (sm.name != base.behavior.name || sm.initial.name != base.behavior.initial.name) {
            conflict(base, "statechart placeholder does not match '" + base.behavior.name + "'");
        }
    } else if (!(sm == base.behavior)) {
        conflict(base, "statechart redefined");
    }
}

/// Adds `layer` on top of `acc`; same-named things already in `acc` are refined.
void overlay(Model& acc, const Model& layer) {
    const std::size_t previous = acc.things.size();
    for (const auto& t : layer.things) {
        auto end = acc.things.begin() + static_cast<std::ptrdiff_t>(previous);
        auto it = std::find_if(acc.things.begin(), end, [&](const Thing& e) { return e.name == t.name; });
        if (it != end) {
            refine(*it, t);
        } else {
            acc.things.push_back(t);
        }
    }
    for (const auto& c : layer.configurations) acc.configurations.push_back(c);
}

struct Walker {
    const ModuleResolver& resolver;
    std::vector<std::string> stack;
    std::set<std::string> done;

    Model collect(const Model& m, const std::string& id) {
        Model acc;
        for (const auto& imp : m.imports) {
            LoadedModule mod = resolver(imp, id);
            if (std::find(stack.begin(), stack.end(), mod.id) != stack.end()) {
                throw MergeError("cyclic import: " + join_cycle(stack, mod.id));
            }
            if (done.count(mod.id) != 0) continue;
            stack.push_back(mod.id);
            Model sub = collect(mod.model, mod.id);
            stack.pop_back();
            done.insert(mod.id);
            overlay(acc, sub);
        }
        overlay(acc, m);
        return acc;
    }
};

void flatten_into(Model& m, std::size_t index, std::vector<std::string>& active) {
    Thing& thing = m.things[index];
    if (thing.includes.empty()) return;
    if (std::find(active.begin(), active.end(), thing.name) != active.end()) {
        throw MergeError("cyclic fragment inclusion involving '" + thing.name + "'");
    }
    active.push_back(thing.name);
    const std::vector<Ref> includes = std::move(thing.includes);
    m.things[index].includes.clear();
    for (const auto& inc : includes) {
        auto it = std::find_if(m.things.begin(), m.things.end(), [&](const Thing& t) { return t.name == inc.name; });
        if (it == m.things.end()) throw MergeError("unknown fragment '" + inc.name + "'");
        if (!it->is_fragment) throw MergeError("'" + inc.name + "' is not a thing fragment");
        const auto frag_index = static_cast<std::size_t>(it - m.things.begin());
        flatten_into(m, frag_index, active);
        const Thing frag = m.things[frag_index];
        Thing& target = m.things[index];
        auto clash = [&](const std::string& kind, const std::string& name) {
            throw MergeError("fragment '" + frag.name + "' " + kind + " '" + name + "' clashes with '" +
                             target.name + "'");
        };
        for (const auto& p : frag.properties) {
            if (target.find_property(p.name)) clash("property", p.name);
            target.properties.push_back(p);
        }
        for (const auto& msg : frag.messages) {
            if (target.find_message(msg.name)) clash("message", msg.name);
            target.messages.push_back(msg);
        }
        for (const auto& p : frag.ports) {
            if (target.find_port(p.name)) clash("port", p.name);
            target.ports.push_back(p);
        }
        if (frag.da) {
            if (target.da) clash("DA block", frag.name);
            target.da = frag.da;
        }
        for (const auto& a : frag.annotations) {
            auto has = std::any_of(target.annotations.begin(), target.annotations.end(),
                                   [&](const Annotation& b) { return b.key == a.key; });
            if (!has) target.annotations.push_back(a);
        }
    }
    active.pop_back();
}

}  // namespace

Model merge_imports(const Model& root, const std::string& root_id, const ModuleResolver& resolver) {
    Walker walker{resolver, {root_id}, {}};
    Model merged = walker.collect(root, root_id);
    std::vector<std::string> active;
    for (std::size_t i = 0; i < merged.things.size(); ++i) flatten_into(merged, i, active);
    return merged;
}

std::vector<UnresolvedSite> platform_completeness(const Model& m) {
    std::vector<UnresolvedSite> out;
    for (const auto& t : m.things) {
        if (t.is_fragment || !t.da) continue;
        if (!resolved_backend(t)) out.push_back({t.name, t.da->span});
    }
    return out;
}

}  // namespace stf
