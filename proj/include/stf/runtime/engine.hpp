#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stf/runtime/da_runtime.hpp"
#include "stf/runtime/scenario.hpp"
#include "stf/runtime/system.hpp"
#include "stf/runtime/trace.hpp"

namespace stf {

/// A message waiting in a mailbox. Indices refer to the receiving thing.
struct Envelope {
    std::size_t port = 0;
    std::size_t message = 0;
    std::vector<Value> args;
    std::int64_t sent_tick = 0;
};

/// Services the engine offers to the behavior of the instance being run.
class Host {
public:
    virtual ~Host() = default;
    virtual const Value& property(std::size_t index) const = 0;
    virtual void assign(std::size_t index, const Value& v) = 0;
    virtual void send(std::size_t port, std::size_t message, std::vector<Value> args) = 0;
    virtual void print(const Value& v) = 0;
    virtual void da(DaAction action) = 0;
};

/// Statechart of one thing, as executed by some executor. Throws
/// RuntimeFault on dynamic failures.
class Behavior {
public:
    virtual ~Behavior() = default;
    virtual std::size_t initial_state() const = 0;
    virtual void entry(Host& host, std::size_t state) = 0;
    virtual void exit(Host& host, std::size_t state) = 0;
    /// First transition of `state`, in textual order, that handles `msg`
    /// (eventless transitions when null) and whose guard holds. Pure.
    virtual std::optional<std::size_t> select(const Host& host, std::size_t state, const Envelope* msg) = 0;
    virtual std::size_t target(std::size_t state, std::size_t transition) const = 0;
    virtual void actions(Host& host, std::size_t state, std::size_t transition, const Envelope* msg) = 0;
};

struct RunOptions {
    std::string data_root;  ///< base for relative dataset and pretrained paths
    std::uint64_t seed = 0;
    bool persist_saves = false;  ///< also append da_save rows to the dataset file
};

struct InstanceState {
    std::string name;
    std::size_t thing = 0;
    std::size_t state = 0;
    std::vector<Value> properties;
    std::deque<Envelope> mailbox;
    std::unique_ptr<DaRuntime> da;
    bool halted = false;
};

/// Deterministic tick-based execution of one configuration.
class Simulation {
public:
    /// Creates the instances, loads DA resources and runs the initial
    /// states' entry actions at tick 0. `behaviors` is indexed like
    /// `system.things`. Throws InstantiationError.
    Simulation(SystemInfo system, std::vector<std::unique_ptr<Behavior>> behaviors, RunOptions options);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Queues the scenario's injections; throws ScenarioError on unknown
    /// targets or arguments that do not fit the message.
    void schedule(const Scenario& scenario);

    /// No pending injections, messages or enabled eventless transitions.
    bool quiescent();
    /// Runs one global tick and advances the clock.
    void step();
    /// Steps until quiescence or the scenario's tick bound.
    const Trace& run(const Scenario& scenario);

    std::int64_t tick() const { return tick_; }
    const Trace& trace() const { return trace_; }
    const SystemInfo& system() const { return system_; }
    const std::vector<InstanceState>& instances() const { return instances_; }
    const InstanceState& instance(std::string_view name) const;
    const Value& property(std::string_view instance, std::string_view name) const;
    std::string state_name(std::string_view instance) const;

private:
    class InstanceHost;
    struct Outgoing {
        std::size_t instance;
        Envelope envelope;
    };
    struct Scheduled {
        std::int64_t tick;
        std::size_t instance;
        Envelope envelope;
    };

    void emit(const InstanceState& inst, const char* kind, nlohmann::ordered_json payload);
    void run_instance(std::size_t i);
    void fire(std::size_t i, std::size_t transition, const Envelope* msg);
    void fault(std::size_t i, const std::string& message);
    void flush_outbox();
    nlohmann::ordered_json message_json(const ThingInfo& t, std::size_t port, std::size_t message,
                                        const std::vector<Value>& args) const;

    SystemInfo system_;
    std::vector<std::unique_ptr<Behavior>> behaviors_;
    RunOptions options_;
    std::vector<InstanceState> instances_;
    std::vector<Outgoing> outbox_;
    std::deque<Scheduled> pending_;
    Trace trace_;
    std::int64_t tick_ = 0;
};

}  // namespace stf
