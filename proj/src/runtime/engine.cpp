#include "stf/runtime/engine.hpp"

#include <algorithm>

#include "stf/model/error.hpp"
#include "stf/runtime/ops.hpp"

namespace stf {

using json = nlohmann::ordered_json;

class Simulation::InstanceHost : public Host {
public:
    InstanceHost(Simulation& sim, std::size_t index) : sim_(sim), index_(index) {}

    const Value& property(std::size_t i) const override { return inst().properties.at(i); }

    void assign(std::size_t i, const Value& v) override {
        const PropertyInfo& p = thing().properties.at(i);
        inst().properties[i] = coerce(v, p.type);
        json payload;
        payload["name"] = p.name;
        payload["value"] = value_json(inst().properties[i]);
        sim_.emit(inst(), "assign", std::move(payload));
    }

    void send(std::size_t port, std::size_t message, std::vector<Value> args) override {
        const ThingInfo& t = thing();
        const MessageInfo& msg = t.messages.at(message);
        if (args.size() != msg.params.size()) {
            throw RuntimeFault("message '" + msg.name + "' takes " + std::to_string(msg.params.size()) + " arguments");
        }
        for (std::size_t k = 0; k < args.size(); ++k) args[k] = coerce(args[k], msg.params[k].type);
        bool routed = false;
        for (const auto& link : sim_.system_.links) {
            std::size_t peer, peer_port;
            if (link.left_instance == index_ && link.left_port == port) {
                peer = link.right_instance;
                peer_port = link.right_port;
            } else if (link.right_instance == index_ && link.right_port == port) {
                peer = link.left_instance;
                peer_port = link.left_port;
            } else {
                continue;
            }
            const InstanceState& target = sim_.instances_[peer];
            const ThingInfo& peer_thing = sim_.system_.things[target.thing];
            json payload = sim_.message_json(t, port, message, args);
            payload["to"] = target.name + "." + peer_thing.ports[peer_port].name;
            auto peer_message = peer_thing.message_index(msg.name);
            if (!peer_message) {
                payload["reason"] = "peer does not accept the message";
                sim_.emit(inst(), "drop", std::move(payload));
                continue;
            }
            sim_.emit(inst(), "send", std::move(payload));
            sim_.outbox_.push_back({peer, Envelope{peer_port, *peer_message, args, sim_.tick_}});
            routed = true;
        }
        if (!routed && std::none_of(sim_.system_.links.begin(), sim_.system_.links.end(), [&](const LinkInfo& l) {
                return (l.left_instance == index_ && l.left_port == port) ||
                       (l.right_instance == index_ && l.right_port == port);
            })) {
            json payload = sim_.message_json(t, port, message, args);
            payload["reason"] = "no connector";
            sim_.emit(inst(), "drop", std::move(payload));
        }
    }

    void print(const Value& v) override {
        json payload;
        payload["text"] = v.to_text();
        sim_.emit(inst(), "print", std::move(payload));
    }

    void da(DaAction action) override {
        const std::string kind(to_string(action));
        InstanceState& self = inst();
        if (!self.da) {
            json payload;
            payload["action"] = kind;
            payload["message"] = "thing has no data_analytics block";
            sim_.emit(self, "error", std::move(payload));
            return;
        }
        try {
            json payload;
            switch (action) {
                case DaAction::Save: payload = self.da->save(self.properties); break;
                case DaAction::Preprocess: payload = self.da->preprocess(); break;
                case DaAction::Train: payload = self.da->train(sim_.options_.seed); break;
                case DaAction::Predict: payload = self.da->predict(self.properties); break;
            }
            sim_.emit(self, kind.c_str(), std::move(payload));
        } catch (const RuntimeFault&) {
            throw;
        } catch (const Error& e) {
            json payload;
            payload["action"] = kind;
            payload["message"] = e.what();
            sim_.emit(self, "error", std::move(payload));
        }
    }

private:
    InstanceState& inst() const { return sim_.instances_[index_]; }
    const ThingInfo& thing() const { return sim_.system_.things[inst().thing]; }

    Simulation& sim_;
    std::size_t index_;
};

Simulation::Simulation(SystemInfo system, std::vector<std::unique_ptr<Behavior>> behaviors, RunOptions options)
    : system_(std::move(system)), behaviors_(std::move(behaviors)), options_(std::move(options)) {
    if (behaviors_.size() != system_.things.size()) throw InstantiationError("one behavior per thing is required");
    instances_.reserve(system_.instances.size());
    for (const auto& info : system_.instances) {
        const ThingInfo& t = system_.things[info.thing];
        InstanceState inst;
        inst.name = info.name;
        inst.thing = info.thing;
        for (const auto& p : t.properties) inst.properties.push_back(p.initial);
        inst.state = behaviors_[info.thing]->initial_state();
        if (t.da) inst.da = std::make_unique<DaRuntime>(t, options_.data_root, options_.persist_saves);
        instances_.push_back(std::move(inst));
    }
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        InstanceState& inst = instances_[i];
        json payload;
        payload["state"] = system_.things[inst.thing].states.at(inst.state);
        emit(inst, "state_enter", std::move(payload));
        InstanceHost host(*this, i);
        try {
            behaviors_[inst.thing]->entry(host, inst.state);
        } catch (const RuntimeFault& f) {
            fault(i, f.what());
        }
    }
}

Simulation::~Simulation() = default;

void Simulation::emit(const InstanceState& inst, const char* kind, json payload) {
    trace_.push_back({tick_, kind, inst.name, std::move(payload)});
}

json Simulation::message_json(const ThingInfo& t, std::size_t port, std::size_t message,
                              const std::vector<Value>& args) const {
    json payload;
    payload["port"] = t.ports.at(port).name;
    payload["message"] = t.messages.at(message).name;
    json a = json::array();
    for (const auto& v : args) a.push_back(value_json(v));
    payload["args"] = a;
    return payload;
}

void Simulation::schedule(const Scenario& scenario) {
    for (const auto& inj : scenario.injections) {
        const std::string where = "scenario line " + std::to_string(inj.line);
        auto i = system_.instance_index(inj.instance);
        if (!i) throw ScenarioError(where + ": unknown instance '" + inj.instance + "'");
        const ThingInfo& t = system_.things[system_.instances[*i].thing];
        auto port = t.port_index(inj.port);
        if (!port) throw ScenarioError(where + ": " + t.name + " has no port '" + inj.port + "'");
        const auto& receives = t.ports[*port].receives;
        auto message = t.message_index(inj.message);
        if (!message || std::find(receives.begin(), receives.end(), inj.message) == receives.end()) {
            throw ScenarioError(where + ": port '" + inj.port + "' does not receive '" + inj.message + "'");
        }
        const MessageInfo& msg = t.messages[*message];
        if (inj.args.size() != msg.params.size()) {
            throw ScenarioError(where + ": '" + msg.name + "' takes " + std::to_string(msg.params.size()) +
                                " arguments, " + std::to_string(inj.args.size()) + " given");
        }
        Envelope env{*port, *message, {}, inj.tick};
        for (std::size_t k = 0; k < inj.args.size(); ++k) {
            auto v = parse_value(inj.args[k], msg.params[k].type);
            if (!v) {
                throw ScenarioError(where + ": argument '" + inj.args[k] + "' is not a valid " +
                                    std::string(to_string(msg.params[k].type)));
            }
            env.args.push_back(*v);
        }
        if (inj.tick < tick_) throw ScenarioError(where + ": tick " + std::to_string(inj.tick) + " is in the past");
        pending_.push_back({inj.tick, *i, std::move(env)});
    }
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const Scheduled& a, const Scheduled& b) { return a.tick < b.tick; });
}

bool Simulation::quiescent() {
    if (!pending_.empty() || !outbox_.empty()) return false;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        const InstanceState& inst = instances_[i];
        if (inst.halted) continue;
        if (!inst.mailbox.empty()) return false;
        InstanceHost host(*this, i);
        try {
            if (behaviors_[inst.thing]->select(host, inst.state, nullptr)) return false;
        } catch (const RuntimeFault&) {
            return false;
        }
    }
    return true;
}

void Simulation::step() {
    while (!pending_.empty() && pending_.front().tick <= tick_) {
        Scheduled s = std::move(pending_.front());
        pending_.pop_front();
        InstanceState& inst = instances_[s.instance];
        json payload = message_json(system_.things[inst.thing], s.envelope.port, s.envelope.message, s.envelope.args);
        if (inst.halted) {
            payload["reason"] = "instance halted";
            emit(inst, "drop", std::move(payload));
            continue;
        }
        emit(inst, "inject", std::move(payload));
        inst.mailbox.push_back(std::move(s.envelope));
    }
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        if (!instances_[i].halted) run_instance(i);
    }
    flush_outbox();
    ++tick_;
}

void Simulation::run_instance(std::size_t i) {
    InstanceState& inst = instances_[i];
    Behavior& behavior = *behaviors_[inst.thing];
    InstanceHost host(*this, i);
    try {
        if (!inst.mailbox.empty()) {
            const Envelope env = std::move(inst.mailbox.front());
            inst.mailbox.pop_front();
            const ThingInfo& t = system_.things[inst.thing];
            emit(inst, "receive", message_json(t, env.port, env.message, env.args));
            if (auto tr = behavior.select(host, inst.state, &env)) {
                fire(i, *tr, &env);
            } else {
                json payload = message_json(t, env.port, env.message, {});
                payload.erase("args");
                payload["state"] = t.states[inst.state];
                emit(inst, "discard", std::move(payload));
            }
        } else if (auto tr = behavior.select(host, inst.state, nullptr)) {
            fire(i, *tr, nullptr);
        }
    } catch (const RuntimeFault& f) {
        fault(i, f.what());
    }
}

void Simulation::fire(std::size_t i, std::size_t transition, const Envelope* msg) {
    InstanceState& inst = instances_[i];
    Behavior& behavior = *behaviors_[inst.thing];
    const ThingInfo& t = system_.things[inst.thing];
    InstanceHost host(*this, i);
    const std::size_t from = inst.state;
    const std::size_t to = behavior.target(from, transition);
    json exit_payload;
    exit_payload["state"] = t.states[from];
    emit(inst, "state_exit", std::move(exit_payload));
    behavior.exit(host, from);
    behavior.actions(host, from, transition, msg);
    inst.state = to;
    json enter_payload;
    enter_payload["state"] = t.states[to];
    emit(inst, "state_enter", std::move(enter_payload));
    behavior.entry(host, to);
}

void Simulation::fault(std::size_t i, const std::string& message) {
    InstanceState& inst = instances_[i];
    json payload;
    payload["message"] = message;
    payload["halted"] = true;
    emit(inst, "error", std::move(payload));
    inst.halted = true;
    inst.mailbox.clear();
}

void Simulation::flush_outbox() {
    for (auto& out : outbox_) {
        InstanceState& inst = instances_[out.instance];
        if (inst.halted) {
            json payload = message_json(system_.things[inst.thing], out.envelope.port, out.envelope.message,
                                        out.envelope.args);
            payload["reason"] = "instance halted";
            emit(inst, "drop", std::move(payload));
            continue;
        }
        inst.mailbox.push_back(std::move(out.envelope));
    }
    outbox_.clear();
}

const Trace& Simulation::run(const Scenario& scenario) {
    schedule(scenario);
    while (tick_ < scenario.max_ticks && !quiescent()) step();
    return trace_;
}

const InstanceState& Simulation::instance(std::string_view name) const {
    auto i = system_.instance_index(name);
    if (!i) throw InstantiationError("unknown instance '" + std::string(name) + "'");
    return instances_[*i];
}

const Value& Simulation::property(std::string_view instance_name, std::string_view name) const {
    const InstanceState& inst = instance(instance_name);
    auto p = system_.things[inst.thing].property_index(name);
    if (!p) throw InstantiationError("unknown property '" + std::string(name) + "'");
    return inst.properties[*p];
}

std::string Simulation::state_name(std::string_view instance_name) const {
    const InstanceState& inst = instance(instance_name);
    return system_.things[inst.thing].states[inst.state];
}

}  // namespace stf
