#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "executable_model.hpp"
#include "stf/codegen/bundle.hpp"
#include "stf/codegen/templates.hpp"
#include "stf/model/error.hpp"
#include "stf/runtime/interpreter.hpp"
#include "stf/syntax/parser.hpp"
#include "temp_dir.hpp"

using namespace stf;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

Model model_of(const std::string& text) {
    ParseResult r = parse(text, "m.stf");
    if (!r.ok()) {
        for (const auto& d : r.diagnostics) MESSAGE(format_parse_diagnostic(d));
    }
    REQUIRE(r.ok());
    return *r.model;
}

const std::string kMinimal = "thing Lamp { property on : Bool statechart L init Off { state Off { } } }\n"
                             "configuration Home { instance lamp : Lamp }\n";

const std::string kPingPong = R"(
thing Client {
    property count : Int = 0
    message ping(n : Int)
    message pong(n : Int)
    port server { receives pong sends ping }
    statechart C init Idle {
        state Idle {
            on_entry { count = count + 1 }
            transition -> Waiting event server.pong guard n < 3 {
                var next : Int = n + 1
                server!ping(next)
                print "sent " + next
            }
            transition -> Done event server.pong
        }
        state Waiting { transition -> Idle }
        state Done { on_entry { print "done after " + count } }
    }
}
thing Server {
    message ping(n : Int)
    message pong(n : Int)
    port clients { receives ping sends pong }
    statechart S init Ready {
        state Ready {
            transition -> Ready event clients.ping { clients!pong(n) }
        }
    }
}
configuration PingPong {
    instance client : Client
    instance server : Server
    connector client.server <-> server.clients
}
)";

std::string compile_text(const std::string& model, const BundleOptions& options = {}) {
    return generate_bundle(model_of(model), "", options);
}

Trace check_equivalent(const Model& m, const Scenario& s, const RunOptions& options) {
    Trace interpreted = interpret(m, "", s, options);
    const Bundle b = load_bundle(generate_bundle(m, "", {options.data_root, std::nullopt}));
    CHECK(trace_text(run_bundle(b, s, options)) == trace_text(interpreted));
    return interpreted;
}

json tampered(const std::string& text, const std::function<void(json&)>& edit) {
    json j = json::parse(text);
    edit(j);
    return j;
}

}  // namespace

TEST_CASE("a minimal model compiles to one thing with one state") {
    const Bundle b = compile_bundle(model_of(kMinimal), "Home", {});
    REQUIRE(b.things.size() == 1);
    CHECK(b.things[0]->states.size() == 1);
    CHECK(b.system.instances.size() == 1);
    CHECK(b.manifest.model_hash.rfind("fnv1a64:", 0) == 0);
    const json j = bundle_json(b);
    CHECK(j["format_version"] == kBundleFormatVersion);
    CHECK(j["things"][0]["states"][0]["name"] == "Off");
}

TEST_CASE("bundle bytes are deterministic and canonical") {
    const std::string a = compile_text(kPingPong);
    CHECK(a == compile_text(kPingPong));
    CHECK(bundle_text(load_bundle(a)) == a);
    CHECK(json::parse(a).dump(2) + "\n" == a);
    CHECK(a.back() == '\n');
}

TEST_CASE("whitespace edits do not change the bundle; content edits change the hash") {
    std::string spaced = kPingPong;
    for (std::size_t p = 0; (p = spaced.find('\n', p)) != std::string::npos; p += 3) spaced.replace(p, 1, "\n\n ");
    CHECK(compile_text(spaced) == compile_text(kPingPong));
    std::string edited = kPingPong;
    edited.replace(edited.find("n < 3"), 5, "n < 4");
    const Bundle a = load_bundle(compile_text(kPingPong));
    const Bundle b = load_bundle(compile_text(edited));
    CHECK(a.manifest.model_hash != b.manifest.model_hash);
    CHECK(a.manifest.model_hash == model_hash(model_of(kPingPong)));
}

TEST_CASE("bundle and interpreter traces are byte-identical on ping-pong") {
    const Model m = model_of(kPingPong);
    const Scenario s = parse_scenario("0 server clients ping 0\n0 client server pong 0\n5 client server pong 9\n");
    check_equivalent(m, s, {});
    const Trace t = run_bundle(load_bundle(generate_bundle(m, "", {})), s, {});
    CHECK_FALSE(t.empty());
}

TEST_CASE("bundle and interpreter agree on random executable models") {
    int runs = 0;
    std::set<std::string> kinds;
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        testing::ExecutableModelGen gen(seed);
        const std::string text = gen.model();
        const Scenario s = parse_scenario(gen.scenario());
        CAPTURE(seed);
        CAPTURE(text);
        ParseResult r = parse(text, "gen.stf");
        REQUIRE(r.ok());
        for (const auto& e : check_equivalent(*r.model, s, {})) kinds.insert(e.kind);
        ++runs;
    }
    CHECK(runs == 150);
    for (const char* k : {"state_enter", "state_exit", "inject", "receive", "send", "drop", "discard", "assign", "print",
                          "error"}) {
        CAPTURE(k);
        CHECK(kinds.count(k) == 1);
    }
}

TEST_CASE("faults and loop limits behave the same in both executors") {
    const Model m = model_of(R"(thing T {
        property d : Int = 0
        property n : Int = 0
        message go(k : Int)
        port p { receives go }
        statechart S init A {
            state A {
                transition -> A event p.go guard k > 0 and 10 / k > 1 { n = n + 10 / d }
                transition -> A event p.go { while true { n = n + 1 } }
            }
        }
    } configuration X { instance t : T })");
    check_equivalent(m, parse_scenario("0 t p go 0\n1 t p go 3"), {});
}

TEST_CASE("future format versions are refused") {
    const std::string text = compile_text(kMinimal);
    const json j = tampered(text, [](json& b) { b["format_version"] = kBundleFormatVersion + 1; });
    CHECK_THROWS_WITH_AS(load_bundle(j.dump()), doctest::Contains("newer than supported"), BundleError);
}

TEST_CASE("tampered bundles fail with structured errors") {
    const std::string text = compile_text(kPingPong);
    CHECK_THROWS_WITH_AS(load_bundle(tampered(text, [](json& b) {
                                         b["things"][0]["states"][0]["transitions"][0]["target"] = 99;
                                     }).dump()),
                         doctest::Contains("$.things[0].states[0].transitions[0].target: index 99 out of range"),
                         BundleError);
    CHECK_THROWS_AS(load_bundle(tampered(text, [](json& b) { b["things"][0]["initial"] = -1; }).dump()), BundleError);
    CHECK_THROWS_AS(load_bundle(tampered(text, [](json& b) { b["configuration"]["instances"][0]["thing"] = 7; }).dump()),
                    BundleError);
    CHECK_THROWS_AS(load_bundle(tampered(text, [](json& b) { b["things"][1].erase("states"); }).dump()), BundleError);
    CHECK_THROWS_AS(load_bundle(tampered(text, [](json& b) {
                                    b["things"][0]["states"][0]["entry"]["code"][0] = {"assign", 0, {"warp", 1}};
                                }).dump()),
                    BundleError);
    CHECK_THROWS_AS(load_bundle(tampered(text, [](json& b) {
                                    b["things"][0]["states"][0]["entry"]["code"][0] = {"assign", 0, {"param", 0}};
                                }).dump()),
                    BundleError);
    CHECK_THROWS_AS(load_bundle(text.substr(0, text.size() / 2)), BundleError);
    CHECK_THROWS_AS(load_bundle_file("/nonexistent/bundle.json"), BundleError);
}

TEST_CASE("random corruption never crashes the loader or the engine") {
    const std::string text = compile_text(kPingPong);
    const Scenario s = parse_scenario("0 server clients ping 0\n0 client server pong 0\n");
    std::mt19937_64 rng(42);
    int loaded = 0;
    for (int round = 0; round < 300; ++round) {
        json j = json::parse(text);
        std::vector<json*> leaves;
        std::function<void(json&)> collect = [&](json& node) {
            if (node.is_structured()) {
                for (auto& child : node) collect(child);
            } else {
                leaves.push_back(&node);
            }
        };
        collect(j);
        json& leaf = *leaves[rng() % leaves.size()];
        switch (rng() % 4) {
            case 0: leaf = static_cast<std::int64_t>(rng() % 7) - 2; break;
            case 1: leaf = "Int"; break;
            case 2: leaf = nullptr; break;
            default: leaf = true; break;
        }
        try {
            const Bundle b = load_bundle(j.dump());
            ++loaded;
            try {
                run_bundle(b, s, {});
            } catch (const Error&) {
            }
        } catch (const BundleError&) {
        }
    }
    CHECK(loaded > 0);
}

TEST_CASE("models with errors are not compiled") {
    CHECK_THROWS_WITH_AS(
        compile_text("thing T { statechart S init Nowhere { state A { } } } configuration C { instance t : T }"),
        doctest::Contains("E008"), BundleError);
    CHECK_THROWS_AS(generate_bundle(model_of(kPingPong), "Missing", {}), BundleError);
}

namespace {

const std::string kDaModel = R"(thing Doubler {
    property x : Float = 3.0
    property y : Float
    data_analytics {
        dataset "line.csv"
        features x
        labels y
        MODE
        BACKEND
    }
    statechart S init Start {
        state Start { on_entry { ACTIONS } }
    }
} configuration X { instance d : Doubler })";

std::string da_model(const std::string& backend, const std::string& mode, const std::string& actions) {
    std::string s = kDaModel;
    s.replace(s.find("BACKEND"), 7, backend);
    s.replace(s.find("MODE"), 4, mode);
    s.replace(s.find("ACTIONS"), 7, actions);
    return s;
}

}  // namespace

TEST_CASE("DA things need a resolved, supported backend") {
    const std::string pim = da_model("", "model linear_regression { lambda = 0 }", "da_preprocess");
    CHECK_THROWS_WITH_AS(compile_text(pim), doctest::Contains("no backend"), BundleError);
    const Bundle b = load_bundle(compile_text(pim, {"", "builtin"}));
    CHECK(b.manifest.default_backend == std::optional<std::string>("builtin"));
    CHECK(b.system.things[0].da->backend == "builtin");
    const std::string psm = da_model("@backend \"builtin\"", "model linear_regression { lambda = 0 }", "da_preprocess");
    CHECK_FALSE(load_bundle(compile_text(psm)).manifest.default_backend);
    const std::string other = da_model("@backend \"tensorflow\"", "model linear_regression { lambda = 0 }", "");
    CHECK_THROWS_WITH_AS(compile_text(other, {"", "builtin"}), doctest::Contains("unsupported backend"), BundleError);
}

TEST_CASE("DA lifecycles run identically from a bundle") {
    testing::TempDir dir;
    std::string csv = "x,y\n";
    for (int i = 0; i < 30; ++i) csv += std::to_string(i) + "," + std::to_string(2 * i + 1) + "\n";
    dir.write("line.csv", csv);
    const RunOptions options{dir.str(), 3, false};
    check_equivalent(model_of(da_model("@backend \"builtin\"", "model linear_regression { lambda = 0 }",
                                       "da_predict da_preprocess da_train da_predict da_save")),
                     Scenario{}, options);
    check_equivalent(model_of(da_model("@backend \"builtin\"", "automl { metric rmse folds 3 budget 6 }",
                                       "da_preprocess da_train da_predict")),
                     Scenario{}, options);
}

TEST_CASE("pretrained models are embedded and bundles avoid absolute paths") {
    testing::TempDir dir;
    dir.write("models/w2b1.json",
              R"({"format_version": 1, "algorithm": "linear_regression", "task": "regression",
                  "schema": {"features": [{"name": "x", "type": "numeric"}], "labels": [{"name": "y", "type": "numeric"}]},
                  "parameters": {"outputs": [{"weights": [2.0], "intercept": 1.0}]}})");
    const Model m = model_of(da_model("@backend \"builtin\"", "automl { metric rmse folds 3 } pretrained \"models/w2b1.json\"",
                                      "da_predict print y"));
    const std::string text = generate_bundle(m, "", {dir.str(), std::nullopt});
    CHECK(text.find(dir.str()) == std::string::npos);
    CHECK(json::parse(text)["things"][0]["da"]["pretrained_model"]["algorithm"] == "linear_regression");
    const Trace interpreted = interpret(m, "", Scenario{}, {dir.str(), 0, false});
    fs::remove_all(dir.path() / "models");
    const Trace bundled = run_bundle(load_bundle(text), Scenario{}, {dir.str(), 0, false});
    CHECK(trace_text(bundled) == trace_text(interpreted));
    CHECK(trace_text(bundled).find("\"text\":\"7.0\"") != std::string::npos);
    CHECK_THROWS_AS(generate_bundle(m, "", {dir.str(), std::nullopt}), BundleError);
}

TEST_CASE("the reference pack emits exactly its manifest") {
    testing::TempDir dir;
    const Bundle b = compile_bundle(model_of(kPingPong), "", {});
    const auto manifest = generate_sources(b, reference_pack(), dir.str());
    const std::vector<std::string> expected = {"README.md",    "bundle.json",      "deploy.cfg",
                                               "manifest.txt", "run.sh",           "state_tables.txt"};
    CHECK(manifest == expected);
    std::set<std::string> emitted;
    for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
        if (e.is_regular_file()) emitted.insert(fs::relative(e.path(), dir.path()).generic_string());
    }
    CHECK(emitted == std::set<std::string>(expected.begin(), expected.end()));
    CHECK(read_file((dir.path() / "bundle.json").string()) == bundle_text(b));
    CHECK(read_file((dir.path() / "manifest.txt").string()) ==
          "README.md\nbundle.json\ndeploy.cfg\nmanifest.txt\nrun.sh\nstate_tables.txt\n");
    CHECK((fs::status(dir.path() / "run.sh").permissions() & fs::perms::owner_exec) != fs::perms::none);
    const std::string tables = read_file((dir.path() / "state_tables.txt").string());
    CHECK(tables.find("thing Client") != std::string::npos);
    CHECK(tables.find("0.0 0 -> 1 on server.pong guarded") != std::string::npos);
    CHECK(read_file((dir.path() / "deploy.cfg").string()).find("client.server = server.clients") != std::string::npos);

    const auto& registry = slot_registry();
    for (const auto& f : reference_pack().files) {
        for (const auto& slot : template_slots(f.text)) {
            CHECK(std::find(registry.begin(), registry.end(), slot) != registry.end());
        }
    }
}

TEST_CASE("regenerating a pack is idempotent across whitespace edits") {
    testing::TempDir a, b;
    generate_sources(compile_bundle(model_of(kPingPong), "", {}), reference_pack(), a.str());
    std::string spaced = kPingPong;
    for (std::size_t p = 0; (p = spaced.find("  ", p)) != std::string::npos; p += 5) spaced.replace(p, 2, "\t \t ");
    generate_sources(compile_bundle(model_of(spaced), "", {}), reference_pack(), b.str());
    generate_sources(compile_bundle(model_of(spaced), "", {}), reference_pack(), b.str());
    for (const auto& e : fs::directory_iterator(a.path())) {
        CHECK(read_file(e.path().string()) == read_file((b.path() / e.path().filename()).string()));
    }
}

TEST_CASE("unknown template slots are reported with the template name") {
    testing::TempDir out;
    TemplatePack pack{"custom", {{"notes.txt", "config {{configuration}} and {{unknown_slot}}"}}};
    const Bundle b = compile_bundle(model_of(kMinimal), "", {});
    CHECK_THROWS_WITH_AS(generate_sources(b, pack, out.str()),
                         doctest::Contains("template 'custom/notes.txt': unknown slot 'unknown_slot'"), TemplateError);
    testing::TempDir packdir;
    packdir.write("conf/app.ini", "name={{configuration}}\nhash={{model_hash}}\n");
    const TemplatePack loaded = load_template_pack(packdir.str());
    REQUIRE(loaded.files.size() == 1);
    CHECK(generate_sources(b, loaded, out.str()) == std::vector<std::string>{"conf/app.ini", "manifest.txt"});
    CHECK(read_file((out.path() / "conf/app.ini").string()).rfind("name=Home\n", 0) == 0);
    CHECK_THROWS_AS(find_template_pack((packdir.path() / "missing").string()), TemplateError);
}
