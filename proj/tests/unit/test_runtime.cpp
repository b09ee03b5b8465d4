#include <doctest.h>

#include <cmath>

#include "stf/model/error.hpp"
#include "stf/runtime/interpreter.hpp"
#include "stf/runtime/ops.hpp"
#include "stf/syntax/parser.hpp"
#include "temp_dir.hpp"

using namespace stf;
using json = nlohmann::ordered_json;

namespace {

Model model_of(const std::string& text) {
    ParseResult r = parse(text, "m.stf");
    REQUIRE(r.ok());
    return *r.model;
}

Scenario scenario_of(const std::string& text) { return parse_scenario(text, "s.txt"); }

std::vector<const TraceEvent*> events(const Trace& t, const std::string& kind, const std::string& instance = {}) {
    std::vector<const TraceEvent*> out;
    for (const auto& e : t) {
        if (e.kind == kind && (instance.empty() || e.instance == instance)) out.push_back(&e);
    }
    return out;
}

const std::string kPingPong = R"(
thing Client {
    property sent : Int = 0
    message ping(n : Int)
    message pong(n : Int)
    port server { receives pong sends ping }
    statechart C init Idle {
        state Idle {
            transition -> Idle event server.pong { print "pong " + n }
        }
    }
}
thing Server {
    property served : Int = 0
    message ping(n : Int)
    message pong(n : Int)
    port clients { receives ping sends pong }
    statechart S init Ready {
        state Ready {
            transition -> Ready event clients.ping guard n >= 0 {
                served = served + 1
                clients!pong(n)
            }
        }
    }
}
configuration PingPong {
    instance client : Client
    instance server : Server
    connector client.server <-> server.clients
}
)";

}  // namespace

TEST_CASE("scenario files") {
    const Scenario s = scenario_of("# stimulus\nmax_ticks 50\n3 a p m 1,2\n\n1 b q n\n");
    CHECK(s.max_ticks == 50);
    REQUIRE(s.injections.size() == 2);
    CHECK(s.injections[0].tick == 1);
    CHECK(s.injections[0].args.empty());
    CHECK(s.injections[1].args == std::vector<std::string>{"1", "2"});
    CHECK(s.injections[1].line == 3);
    CHECK(parse_scenario(scenario_text(s)).injections.size() == 2);
    CHECK_THROWS_AS(scenario_of("x a p m"), ScenarioError);
    CHECK_THROWS_AS(scenario_of("-1 a p m"), ScenarioError);
    CHECK_THROWS_AS(scenario_of("1 a p"), ScenarioError);
}

TEST_CASE("instances start in their initial states at tick zero") {
    auto sim = instantiate(model_of(kPingPong), "", {});
    CHECK(sim->instances().size() == 2);
    CHECK(sim->state_name("client") == "Idle");
    CHECK(sim->state_name("server") == "Ready");
    const Trace& t = sim->run(Scenario{});
    CHECK(sim->tick() == 0);
    REQUIRE(t.size() == 2);
    for (const auto& e : t) {
        CHECK(e.kind == "state_enter");
        CHECK(e.tick == 0);
    }
}

TEST_CASE("a reply is received one tick after it is sent") {
    const Trace t = interpret(model_of(kPingPong), "PingPong", scenario_of("2 server clients ping 5"), {});
    const auto receives = events(t, "receive");
    const auto sends = events(t, "send");
    REQUIRE(receives.size() == 2);
    REQUIRE(sends.size() == 1);
    CHECK(receives[0]->instance == "server");
    CHECK(receives[0]->tick == 2);
    CHECK(sends[0]->tick == 2);
    CHECK(sends[0]->payload["to"] == "client.server");
    CHECK(receives[1]->instance == "client");
    CHECK(receives[1]->tick == 3);
    CHECK(receives[1]->payload["args"] == json::array({5}));
    const auto prints = events(t, "print");
    REQUIRE(prints.size() == 1);
    CHECK(prints[0]->payload["text"] == "pong 5");
    CHECK(prints[0]->tick == 3);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i - 1].tick <= t[i].tick);
    CHECK(trace_line(*sends[0]) ==
          R"({"tick":2,"kind":"send","instance":"server","payload":{"port":"clients","message":"pong","args":[5],"to":"client.server"}})");
}

TEST_CASE("a false guard discards the message") {
    auto sim = instantiate(model_of(kPingPong), "", {});
    const Trace& t = sim->run(scenario_of("0 server clients ping -1"));
    const auto discards = events(t, "discard");
    REQUIRE(discards.size() == 1);
    CHECK(discards[0]->payload["state"] == "Ready");
    CHECK(events(t, "send").empty());
    CHECK(sim->property("server", "served") == Value::integer(0));
    CHECK(sim->state_name("server") == "Ready");
}

TEST_CASE("the first enabled transition in textual order fires") {
    const Model m = model_of(R"(thing T {
        message go()
        port p { receives go }
        statechart S init A {
            state A {
                transition -> B event p.go guard 1 < 2
                transition -> C event p.go
            }
            state B { }
            state C { }
        }
    } configuration X { instance t : T })");
    auto sim = instantiate(m, "X", {});
    sim->run(scenario_of("0 t p go"));
    CHECK(sim->state_name("t") == "B");
}

TEST_CASE("eventless transitions fire at most once per tick") {
    const Model m = model_of(R"(thing T {
        property n : Int = 0
        statechart S init A {
            state A { transition -> A guard n < 3 { n = n + 1 } }
        }
    } configuration X { instance t : T })");
    auto sim = instantiate(m, "X", {});
    const Trace& t = sim->run(Scenario{});
    CHECK(sim->property("t", "n") == Value::integer(3));
    CHECK(sim->tick() == 3);
    const auto assigns = events(t, "assign");
    REQUIRE(assigns.size() == 3);
    CHECK(assigns[0]->tick == 0);
    CHECK(assigns[2]->tick == 2);
    CHECK(events(t, "state_exit").size() == 3);
}

TEST_CASE("messages to unconnected ports are dropped with a note") {
    const Model m = model_of(R"(thing T {
        message hello()
        port out { sends hello }
        statechart S init A { state A { on_entry { out!hello() } } }
    } configuration X { instance t : T })");
    const Trace t = interpret(m, "X", Scenario{}, {});
    const auto drops = events(t, "drop");
    REQUIRE(drops.size() == 1);
    CHECK(drops[0]->payload["reason"] == "no connector");
}

TEST_CASE("division by zero halts the instance with an error event") {
    const Model m = model_of(R"(thing T {
        property d : Int = 0
        property r : Int = 1
        message go()
        port p { receives go }
        statechart S init A {
            state A { transition -> A event p.go { r = 10 / d } }
        }
    } configuration X { instance t : T })");
    auto sim = instantiate(m, "X", {});
    const Trace& t = sim->run(scenario_of("0 t p go\n1 t p go"));
    const auto errors = events(t, "error");
    REQUIRE(errors.size() == 1);
    CHECK(errors[0]->payload["message"] == "division by zero");
    CHECK(sim->instance("t").halted);
    CHECK(events(t, "drop").size() == 1);
    CHECK(sim->property("t", "r") == Value::integer(1));
}

TEST_CASE("short-circuit evaluation protects the right operand") {
    const Model m = model_of(R"(thing T {
        property d : Int = 0
        property ok : Bool = true
        statechart S init A { state A { on_entry { ok = d != 0 and 10 / d > 1 } } }
    } configuration X { instance t : T })");
    auto sim = instantiate(m, "X", {});
    sim->run(Scenario{});
    CHECK(sim->property("t", "ok") == Value::boolean(false));
    CHECK_FALSE(sim->instance("t").halted);
}

TEST_CASE("operator semantics") {
    CHECK(apply_binary(BinaryOp::Add, Value::integer(2), Value::real(0.5)) == Value::real(2.5));
    CHECK(apply_binary(BinaryOp::Add, Value::string("n="), Value::integer(3)) == Value::string("n=3"));
    CHECK(apply_binary(BinaryOp::Div, Value::integer(-7), Value::integer(2)) == Value::integer(-3));
    CHECK(apply_binary(BinaryOp::Mod, Value::integer(-7), Value::integer(2)) == Value::integer(-1));
    CHECK(apply_binary(BinaryOp::Sub, Value::timestamp(100), Value::timestamp(40)) == Value::integer(60));
    CHECK(apply_binary(BinaryOp::Add, Value::timestamp(100), Value::integer(5)) == Value::timestamp(105));
    CHECK(apply_binary(BinaryOp::Eq, Value::integer(1), Value::real(1.0)) == Value::boolean(true));
    CHECK(apply_binary(BinaryOp::Lt, Value::string("a"), Value::string("b")) == Value::boolean(true));
    CHECK(apply_binary(BinaryOp::Add, Value::integer(INT64_MAX), Value::integer(1)) == Value::integer(INT64_MIN));
    CHECK_THROWS_AS(apply_binary(BinaryOp::Div, Value::real(1), Value::real(0)), RuntimeFault);
    CHECK_THROWS_AS(apply_binary(BinaryOp::Div, Value::integer(INT64_MIN), Value::integer(-1)), RuntimeFault);
    CHECK_THROWS_AS(truth(Value::integer(1)), RuntimeFault);
    CHECK(*parse_value("2024-01-01T00:00:00Z", ScalarType::Timestamp) == Value::timestamp(1704067200));
    CHECK_FALSE(parse_value("1.5", ScalarType::Int));
}

TEST_CASE("identical inputs give byte-identical traces") {
    const Scenario s = scenario_of("0 server clients ping 1\n0 server clients ping 2\n4 server clients ping 3");
    const std::string a = trace_text(interpret(model_of(kPingPong), "", s, {}));
    const std::string b = trace_text(interpret(model_of(kPingPong), "", s, {}));
    CHECK(a == b);
    CHECK(a.find("\"pong\"") != std::string::npos);
}

TEST_CASE("every send is received exactly once or dropped") {
    const Scenario s = scenario_of("0 server clients ping 1\n0 server clients ping 2\n1 server clients ping 3");
    const Trace t = interpret(model_of(kPingPong), "", s, {});
    CHECK(events(t, "send").size() + events(t, "inject").size() == events(t, "receive").size());
}

TEST_CASE("instantiation errors") {
    CHECK_THROWS_AS(instantiate(model_of("thing T { statechart S init A { state A { } } } configuration X { instance t : U }"),
                                "X", {}),
                    InstantiationError);
    CHECK_THROWS_AS(instantiate(model_of(kPingPong), "Nope", {}), InstantiationError);
    CHECK_THROWS_AS(interpret(model_of(kPingPong), "", scenario_of("0 nobody p ping 1"), {}), ScenarioError);
    CHECK_THROWS_AS(interpret(model_of(kPingPong), "", scenario_of("0 server clients ping x"), {}), ScenarioError);
}

namespace {

const std::string kLinearThing = R"(thing Doubler {
    property x : Float = 3.0
    property y : Float
    data_analytics {
        dataset "line.csv"
        features x
        labels y
        DA_MODE
    }
    statechart S init Start {
        state Start { on_entry { ACTIONS } }
    }
} configuration X { instance d : Doubler })";

std::string doubler(const std::string& mode, const std::string& actions) {
    std::string s = kLinearThing;
    s.replace(s.find("DA_MODE"), 7, mode);
    s.replace(s.find("ACTIONS"), 7, actions);
    return s;
}

const std::string kHandWritten = R"({"format_version": 1, "algorithm": "linear_regression", "task": "regression",
    "schema": {"features": [{"name": "x", "type": "numeric"}], "labels": [{"name": "y", "type": "numeric"}]},
    "parameters": {"outputs": [{"weights": [2.0], "intercept": 1.0}]}})";

}  // namespace

TEST_CASE("a pretrained model predicts without training") {
    testing::TempDir dir;
    dir.write("w2b1.json", kHandWritten);
    const Model m = model_of(doubler("automl { metric rmse folds 3 } pretrained \"w2b1.json\"", "da_predict"));
    auto sim = instantiate(m, "X", RunOptions{dir.str(), 0, false});
    CHECK(sim->instance("d").da->model_ready());
    const Trace& t = sim->run(Scenario{});
    CHECK(events(t, "da_train").empty());
    REQUIRE(events(t, "da_predict").size() == 1);
    CHECK(std::fabs(sim->property("d", "y").as_float() - 7.0) <= 1e-9);
}

TEST_CASE("da actions before their prerequisites become error events") {
    testing::TempDir dir;
    dir.write("line.csv", "x,y\n1,3\n2,5\n3,7\n4,9\n");
    const Trace t = interpret(model_of(doubler("model linear_regression { lambda = 0 }", "da_predict da_train")), "X",
                              Scenario{}, RunOptions{dir.str(), 0, false});
    const auto errors = events(t, "error");
    REQUIRE(errors.size() == 2);
    CHECK(errors[0]->payload["message"] == "model not ready");
    CHECK(errors[1]->payload["message"] == "no prepared data");
    CHECK(errors[0]->payload.find("halted") == errors[0]->payload.end());
}

TEST_CASE("expert training then prediction follows the fitted line") {
    testing::TempDir dir;
    dir.write("line.csv", "x,y\n1,3\n2,5\n3,7\n4,9\n5,11\n");
    auto sim = instantiate(model_of(doubler("model linear_regression { lambda = 0 }", "da_preprocess da_train da_predict")),
                           "X", RunOptions{dir.str(), 0, false});
    const Trace& t = sim->run(Scenario{});
    REQUIRE(events(t, "da_train").size() == 1);
    CHECK(events(t, "da_train")[0]->payload["algorithm"] == "linear_regression");
    CHECK(std::fabs(sim->property("d", "y").as_float() - 7.0) <= 1e-9);
}

TEST_CASE("automl training picks the linear model on linear data") {
    testing::TempDir dir;
    std::string csv = "x,y\n";
    for (int i = 0; i < 40; ++i) csv += std::to_string(i * 0.25) + "," + std::to_string(2 * i * 0.25 + 1) + "\n";
    dir.write("line.csv", csv);
    const Trace t = interpret(model_of(doubler("automl { metric rmse folds 4 }", "da_preprocess da_train")), "X",
                              Scenario{}, RunOptions{dir.str(), 0, false});
    const auto train = events(t, "da_train");
    REQUIRE(train.size() == 1);
    CHECK(train[0]->payload["mode"] == "automl");
    CHECK(train[0]->payload["algorithm"] == "linear_regression");
}

TEST_CASE("da_save appends the current feature and label values") {
    testing::TempDir dir;
    dir.write("hits.csv", "ip_block,hour,attacker\n1,2,false\n");
    const Model m = model_of(R"(thing Guard {
        property ip_block : Int = 5
        property hour : Int = 13
        property attacker : Bool = false
        data_analytics {
            dataset "hits.csv"
            features ip_block hour
            labels attacker
            model knn { k = 1 }
        }
        statechart S init A { state A { on_entry { da_save } } }
    } configuration X { instance g : Guard })");
    {
        auto sim = instantiate(m, "X", RunOptions{dir.str(), 0, false});
        const Trace& t = sim->run(Scenario{});
        REQUIRE(events(t, "da_save").size() == 1);
        CHECK(sim->instance("g").da->combined().size() == 2);
        CHECK(to_csv(sim->instance("g").da->combined()) == "ip_block,hour,attacker\n1,2,false\n5,13,false\n");
        CHECK(read_file((dir.path() / "hits.csv").string()) == "ip_block,hour,attacker\n1,2,false\n");
    }
    interpret(m, "X", Scenario{}, RunOptions{dir.str(), 0, true});
    CHECK(read_file((dir.path() / "hits.csv").string()) == "ip_block,hour,attacker\n1,2,false\n5,13,false\n");
}

TEST_CASE("a missing dataset fails instantiation unless a model is pretrained") {
    testing::TempDir dir;
    CHECK_THROWS_AS(instantiate(model_of(doubler("automl { metric rmse folds 3 }", "da_preprocess")), "X",
                                RunOptions{dir.str(), 0, false}),
                    InstantiationError);
}
