#include <doctest.h>

#include <filesystem>
#include <functional>
#include <random>
#include <set>

#include "json.hpp"
#include "random_model.hpp"
#include "stf/check/reachability.hpp"
#include "stf/check/validator.hpp"
#include "stf/syntax/parser.hpp"
#include "validator_fixtures.hpp"

using namespace stf;

namespace {

const std::filesystem::path kFixtures = std::filesystem::path(STF_SOURCE_DIR) / "tests/fixtures/validator";

std::vector<Diagnostic> check_text(const std::string& text, const MetadataProvider* meta = nullptr) {
    ParseResult r = parse(text, "m.stf");
    REQUIRE(r.ok());
    return validate(*r.model, meta);
}

std::vector<std::string> rules_of(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(d.rule);
    return out;
}

// Counter thing with a bidirectional port, used by the configuration tests.
const std::string kPeers = R"(
thing A {
    message ping(n : Int)
    message pong()
    port p { receives pong sends ping }
    statechart S init I { state I { transition -> I event p.pong } }
}
thing B {
    message ping(n : Int)
    message pong()
    port q { receives ping sends pong }
    statechart S init I { state I { transition -> I event q.ping } }
}
)";

}  // namespace

TEST_CASE("every catalog rule has a fixture that triggers exactly that rule at the marked span") {
    std::set<std::string> covered;
    for (const auto& path : testing::fixture_files(kFixtures)) {
        const auto outcome = testing::run_fixture(path);
        INFO(outcome.file << ": " << outcome.problem);
        CHECK(outcome.problem.empty());
        if (outcome.problem.empty()) {
            covered.insert(outcome.expected_rule);
            CHECK(outcome.diagnostics.front().severity == find_rule(outcome.expected_rule)->severity);
        }
    }
    for (const auto& rule : rule_catalog()) {
        INFO(rule.id);
        CHECK(covered.count(std::string(rule.id)) == 1);
    }
}

TEST_CASE("da action in a thing without a data analytics block") {
    const auto ds = check_text("thing T { statechart S init A { state A { on_entry { da_predict } } } }");
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].rule == "E005");
    CHECK(ds[0].span.column == 54);
    CHECK(format_diagnostic(ds[0]) == "m.stf:1:54: error[E005]: da_predict used in thing 'T' which has no data_analytics block");
}

TEST_CASE("algorithm family must match the label type") {
    const std::string head = "thing T { property x : Float property y : ";
    const std::string tail = " data_analytics { dataset \"d.csv\" features x labels y model ALGO { k = 3 } } "
                             "statechart S init A { state A { on_entry { da_preprocess da_train da_predict } } } }";
    auto rules = [&](const std::string& type, const std::string& algo) {
        std::string t = tail;
        t.replace(t.find("ALGO"), 4, algo);
        if (algo != "knn") t.replace(t.find("k = 3"), 5, "");
        return rules_of(check_text(head + type + t));
    };
    CHECK(rules("Float", "logistic_regression") == std::vector<std::string>{"E006", "H202"});
    CHECK(rules("Bool", "linear_regression") == std::vector<std::string>{"E006", "H202"});
    CHECK(rules("String", "knn").empty());
    CHECK(rules("Int", "knn") == std::vector<std::string>{"E006"});
    CHECK(rules("Int", "baseline") == std::vector<std::string>{"H202"});
    CHECK(rules("Float", "deep_forest") == std::vector<std::string>{"E006", "H202"});
}

TEST_CASE("hyperparameter and automl settings are checked") {
    auto rules = [](const std::string& mode) {
        return rules_of(check_text("thing T { property x : Float property y : Bool data_analytics { dataset \"d.csv\" "
                                   "features x labels y " +
                                   mode + " } statechart S init A { state A { } } }"));
    };
    CHECK(rules("model knn { k = 0 }") == std::vector<std::string>{"E006"});
    CHECK(rules("model knn { k = 2.5 }") == std::vector<std::string>{"E006"});
    CHECK(rules("model knn { k = 3 k = 5 }") == std::vector<std::string>{"E006"});
    CHECK(rules("model knn { depth = 3 }") == std::vector<std::string>{"E006"});
    CHECK(rules("model knn { k = \"three\" }") == std::vector<std::string>{"E006"});
    CHECK(rules("automl { metric rmse folds 3 }") == std::vector<std::string>{"E006"});
    CHECK(rules("automl { metric speed folds 3 }") == std::vector<std::string>{"E006"});
    CHECK(rules("automl { metric macro_f1 folds 1 }") == std::vector<std::string>{"E006"});
    CHECK(rules("automl { metric macro_f1 folds 3 budget 0 }") == std::vector<std::string>{"E006"});
    CHECK(rules("automl { metric accuracy folds 5 budget 4 }").empty());
}

TEST_CASE("connectors need compatible message sets in both directions") {
    CHECK(check_text(kPeers + "configuration C { instance a : A instance b : B connector a.p <-> b.q }").empty());

    std::string mismatch = kPeers;
    mismatch.replace(mismatch.rfind("ping(n : Int)"), 13, "ping(n : Float)");
    CHECK(rules_of(check_text(mismatch + "configuration C { instance a : A instance b : B connector a.p <-> b.q }")) ==
          std::vector<std::string>{"E007"});

    const auto ds = check_text(kPeers + "configuration C { instance a : A instance b : B connector a.p <-> b.r }");
    CHECK(rules_of(ds) == std::vector<std::string>{"W102", "E007"});
    CHECK(rules_of(check_text(kPeers + "configuration C { instance a : Z }")) == std::vector<std::string>{"E007"});
    CHECK(rules_of(check_text("thing fragment F { statechart S init I { } } configuration C { instance f : F }")) ==
          std::vector<std::string>{"E007"});
}

TEST_CASE("type errors in actions") {
    auto rules = [](const std::string& body) {
        return rules_of(check_text("thing T { property n : Int property s : String message m(a : Int) "
                                   "port p { receives m sends m } statechart S init A { state A { "
                                   "transition -> A event p.m { " +
                                   body + " } } } }"));
    };
    CHECK(rules("n = a + 1 s = \"x\" + n p!m(n)").empty());
    CHECK(rules("n = 1.5") == std::vector<std::string>{"E009"});
    CHECK(rules("a = 2") == std::vector<std::string>{"E009"});
    CHECK(rules("p!m()") == std::vector<std::string>{"E009"});
    CHECK(rules("p!m(\"x\")") == std::vector<std::string>{"E009"});
    CHECK(rules("q!m(1)") == std::vector<std::string>{"E009"});
    CHECK(rules("if n { }") == std::vector<std::string>{"E009"});
    CHECK(rules("while n < s { }") == std::vector<std::string>{"E009"});
    CHECK(rules("print nothing_here") == std::vector<std::string>{"E009"});
    CHECK(rules("var x : Int = 1 var x : Int = 2") == std::vector<std::string>{"E009"});
    CHECK(rules("var x : Int = 1 if true { var x : Float = 2.0 n = x } ").size() == 1);
    CHECK(rules("var f : Float = n n = -n").empty());
    CHECK(rules("n = not n") == std::vector<std::string>{"E009"});
}

TEST_CASE("reachability of simple graphs") {
    ParseResult r = parse("thing T { statechart S init A { state A { transition -> B } state B { transition -> C } "
                          "state C { } state D { transition -> A } } }");
    REQUIRE(r.ok());
    const Reachability reach = reachability(r.model->things[0].behavior);
    CHECK(reach.initial_known);
    CHECK(reach.reachable == std::vector<bool>{true, true, true, false});
}

TEST_CASE("a diamond where only one branch trains warns about the other") {
    const std::string model = R"(thing T { property x : Float property y : Bool
        data_analytics { dataset "d.csv" features x labels y automl { metric accuracy folds 3 } }
        statechart S init Init {
            state Init { on_entry { da_preprocess } transition -> Left transition -> Right }
            state Left { on_entry { da_train } transition -> Join }
            state Right { transition -> Join }
            state Join { on_entry { da_predict } }
        } })";
    CHECK(rules_of(check_text(model)) == std::vector<std::string>{"W101"});
    std::string both = model;
    both.replace(both.find("state Right {"), 13, "state Right { on_entry { da_train }");
    CHECK(check_text(both).empty());
    std::string pretrained = model;
    pretrained.replace(pretrained.find("folds 3 }"), 9, "folds 3 } pretrained \"m.json\"");
    CHECK(check_text(pretrained).empty());
}

namespace {

Statement da(DaAction a) { return Statement{DaStmt{a}, {}}; }

Block random_block(std::mt19937_64& gen, int depth) {
    std::uniform_int_distribution<int> count(0, 2), kind(0, depth > 0 ? 5 : 3);
    Block b;
    for (int i = 0, n = count(gen); i < n; ++i) {
        switch (kind(gen)) {
            case 0: b.push_back(da(DaAction::Train)); break;
            case 1: b.push_back(da(DaAction::Predict)); break;
            case 2: b.push_back(da(DaAction::Preprocess)); break;
            case 3: b.push_back(Statement{PrintStmt{Expr{LiteralExpr{Value::integer(1)}, {}}}, {}}); break;
            case 4: {
                IfStmt s{Expr{LiteralExpr{Value::boolean(true)}, {}}, random_block(gen, depth - 1),
                         random_block(gen, depth - 1)};
                b.push_back(Statement{std::move(s), {}});
                break;
            }
            default: {
                WhileStmt s{Expr{LiteralExpr{Value::boolean(true)}, {}}, random_block(gen, depth - 1)};
                b.push_back(Statement{std::move(s), {}});
                break;
            }
        }
    }
    return b;
}

StateMachine random_machine(std::mt19937_64& gen) {
    const int n = std::uniform_int_distribution<int>(1, 6)(gen);
    std::uniform_int_distribution<int> target(0, n - 1), degree(0, 2);
    StateMachine sm;
    sm.name = "S";
    sm.initial = Ref{"s0", {}};
    for (int i = 0; i < n; ++i) {
        State s;
        s.name = "s" + std::to_string(i);
        s.on_entry = random_block(gen, 2);
        s.on_exit = random_block(gen, 1);
        for (int k = 0, d = degree(gen); k < d; ++k) {
            Transition t;
            t.target = Ref{"s" + std::to_string(target(gen)), {}};
            t.actions = random_block(gen, 1);
            s.transitions.push_back(std::move(t));
        }
        sm.states.push_back(std::move(s));
    }
    return sm;
}

// Enumerates executions: every branch choice inside blocks (loops run zero,
// one or two times) and every simple path through (state, enabled) pairs.
// Any execution reaching a use site can be shortened to such a path.
struct PathOracle {
    DaAction enable, use;
    std::set<const Statement*> sites;

    // Flag values a block can end with, recording uses while not enabled.
    std::set<bool> run(const Block& b, std::size_t i, bool enabled) {
        if (i == b.size()) return {enabled};
        const Statement& st = b[i];
        std::set<bool> after;
        if (const auto* d = std::get_if<DaStmt>(&st.node)) {
            if (d->action == use && !enabled) sites.insert(&st);
            after.insert(enabled || d->action == enable);
        } else if (const auto* s = std::get_if<IfStmt>(&st.node)) {
            for (bool e : run(*s->then_body, 0, enabled)) after.insert(e);
            for (bool e : run(*s->else_body, 0, enabled)) after.insert(e);
        } else if (const auto* w = std::get_if<WhileStmt>(&st.node)) {
            after.insert(enabled);
            for (bool e1 : run(*w->body, 0, enabled)) {
                after.insert(e1);
                for (bool e2 : run(*w->body, 0, e1)) after.insert(e2);
            }
        } else {
            after.insert(enabled);
        }
        std::set<bool> out;
        for (bool e : after) {
            for (bool r : run(b, i + 1, e)) out.insert(r);
        }
        return out;
    }

    void walk(const StateMachine& sm, std::size_t state, bool enabled, std::set<std::pair<std::size_t, bool>>& on_path) {
        if (!on_path.insert({state, enabled}).second) return;
        const State& s = sm.states[state];
        for (const auto& t : s.transitions) {
            for (bool a : run(s.on_exit, 0, enabled)) {
                for (bool b : run(t.actions, 0, a)) {
                    const std::size_t next = std::stoul(t.target.name.substr(1));
                    for (bool c : run(sm.states[next].on_entry, 0, b)) walk(sm, next, c, on_path);
                }
            }
        }
        on_path.erase({state, enabled});
    }

    void explore(const StateMachine& sm) {
        std::set<std::pair<std::size_t, bool>> on_path;
        for (bool e : run(sm.states[0].on_entry, 0, false)) walk(sm, 0, e, on_path);
    }
};

}  // namespace

TEST_CASE("path facts agree with brute-force path enumeration") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const StateMachine sm = random_machine(gen);
        for (auto [enable, use] : {std::pair{DaAction::Train, DaAction::Predict},
                                   std::pair{DaAction::Preprocess, DaAction::Train}}) {
            PathOracle oracle{enable, use, {}};
            oracle.explore(sm);
            const PathFacts facts = path_facts(sm, enable, use);
            const std::set<const Statement*> got(facts.sites.begin(), facts.sites.end());
            INFO("trial " << trial);
            CHECK(got == oracle.sites);
            CHECK(got.size() == facts.sites.size());
        }
    }
}

TEST_CASE("reachability agrees with a transitive closure") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 200; ++trial) {
        const StateMachine sm = random_machine(gen);
        const std::size_t n = sm.states.size();
        std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) {
            edge[i][i] = true;
            for (const auto& t : sm.states[i].transitions) edge[i][std::stoul(t.target.name.substr(1))] = true;
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) edge[i][j] = edge[i][j] || (edge[i][k] && edge[k][j]);
        CHECK(reachability(sm).reachable == edge[0]);
    }
}

TEST_CASE("validate is deterministic and total on random models") {
    testing::RandomModelGen gen(7);
    for (int i = 0; i < 300; ++i) {
        const Model m = gen.model();
        const auto a = validate(m);
        const auto b = validate(m);
        CHECK(diagnostics_report(a) == diagnostics_report(b));
        for (const auto& d : a) CHECK(find_rule(d.rule) != nullptr);
    }
}

TEST_CASE("diagnostic report is machine readable") {
    const auto ds = check_text("thing T { statechart S init Nowhere { } }");
    REQUIRE(ds.size() == 1);
    const auto report = nlohmann::json::parse(diagnostics_report(ds));
    CHECK(report == nlohmann::json::parse(R"([{"rule": "E008", "severity": "error", "file": "m.stf", "line": 1,
        "column": 29, "message": "initial state 'Nowhere' is not declared"}])"));
    CHECK(has_errors(ds));
}
