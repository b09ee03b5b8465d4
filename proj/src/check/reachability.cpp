#include "stf/check/reachability.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace stf {

namespace {

std::optional<std::size_t> state_index(const StateMachine& sm, const std::string& name) {
    for (std::size_t i = 0; i < sm.states.size(); ++i) {
        if (sm.states[i].name == name) return i;
    }
    return std::nullopt;
}

struct Flow {
    DaAction enable;
    DaAction use;
    std::set<const Statement*> sites;

    /// Returns whether `enable` may still be missing after the block.
    bool run(const Block& b, bool open) {
        for (const auto& st : b) {
            if (const auto* da = std::get_if<DaStmt>(&st.node)) {
                if (da->action == use && open) sites.insert(&st);
                if (da->action == enable) open = false;
            } else if (const auto* i = std::get_if<IfStmt>(&st.node)) {
                const bool a = run(*i->then_body, open);
                const bool c = run(*i->else_body, open);
                open = a || c;
            } else if (const auto* w = std::get_if<WhileStmt>(&st.node)) {
                open = run(*w->body, open) || open;
            }
        }
        return open;
    }
};

}  // namespace

PathFacts path_facts(const StateMachine& sm, DaAction enable, DaAction use) {
    PathFacts facts;
    facts.open_at.assign(sm.states.size(), false);
    const auto init = state_index(sm, sm.initial.name);
    if (!init) return facts;
    Flow flow{enable, use, {}};
    std::deque<std::size_t> work;
    if (flow.run(sm.states[*init].on_entry, true)) {
        facts.open_at[*init] = true;
        work.push_back(*init);
    }
    while (!work.empty()) {
        const State& s = sm.states[work.front()];
        work.pop_front();
        for (const auto& tr : s.transitions) {
            const auto target = state_index(sm, tr.target.name);
            if (!target) continue;
            bool open = flow.run(s.on_exit, true);
            open = flow.run(tr.actions, open);
            open = flow.run(sm.states[*target].on_entry, open);
            if (open && !facts.open_at[*target]) {
                facts.open_at[*target] = true;
                work.push_back(*target);
            }
        }
    }
    facts.sites.assign(flow.sites.begin(), flow.sites.end());
    std::sort(facts.sites.begin(), facts.sites.end(),
              [](const Statement* a, const Statement* b) { return a->span.begin < b->span.begin; });
    return facts;
}

Reachability reachability(const StateMachine& sm) {
    Reachability r;
    r.reachable.assign(sm.states.size(), false);
    const auto init = state_index(sm, sm.initial.name);
    if (!init) return r;
    r.initial_known = true;
    std::deque<std::size_t> work{*init};
    r.reachable[*init] = true;
    while (!work.empty()) {
        const State& s = sm.states[work.front()];
        work.pop_front();
        for (const auto& tr : s.transitions) {
            const auto t = state_index(sm, tr.target.name);
            if (t && !r.reachable[*t]) {
                r.reachable[*t] = true;
                work.push_back(*t);
            }
        }
    }
    r.untrained_predicts = path_facts(sm, DaAction::Train, DaAction::Predict);
    r.unprepared_trains = path_facts(sm, DaAction::Preprocess, DaAction::Train);
    return r;
}

}  // namespace stf
