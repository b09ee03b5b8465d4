#include <doctest.h>

#include <map>
#include <set>

#include "random_model.hpp"
#include "stf/model/error.hpp"
#include "stf/model/merge.hpp"
#include "stf/syntax/parser.hpp"

using namespace stf;

namespace {

Model model_of(const std::string& text, const std::string& file = "m.stf") {
    ParseResult r = parse(text, file);
    REQUIRE(r.ok());
    return *r.model;
}

/// Resolves imports from an in-memory file table.
ModuleResolver table_resolver(const std::map<std::string, std::string>& files) {
    return [files](const Import& imp, const std::string&) -> LoadedModule {
        auto it = files.find(imp.path);
        if (it == files.end()) throw MergeError("no module " + imp.path);
        return {imp.path, model_of(it->second, imp.path)};
    };
}

Model merged(const std::string& root, const std::map<std::string, std::string>& files) {
    return merge_imports(model_of(root, "root.stf"), "root.stf", table_resolver(files));
}

const std::string kPim = R"(
thing Disagg {
    property aggregate : Float
    property on : Bool
    message reading(w : Float)
    port meter { receives reading }
    data_analytics {
        dataset "d.csv"
        features aggregate
        labels on
        automl { metric accuracy folds 5 }
    }
    statechart D init Idle {
        state Idle { transition -> Idle event meter.reading { aggregate = w da_predict } }
    }
}
)";

const std::string kPsm = R"(
import "pim.stf"
thing Disagg @backend "builtin" {
    statechart D init Idle { }
}
configuration Home { instance d : Disagg }
)";

std::set<std::string> member_names(const Model& m) {
    std::set<std::string> out;
    for (const auto& t : m.things) {
        out.insert("thing " + t.name);
        for (const auto& p : t.properties) out.insert(t.name + ".property " + p.name);
        for (const auto& p : t.ports) out.insert(t.name + ".port " + p.name);
        for (const auto& msg : t.messages) out.insert(t.name + ".message " + msg.name);
    }
    return out;
}

}  // namespace

TEST_CASE("a PSM overlay adds the backend and changes nothing else") {
    const Model pim = model_of(kPim, "pim.stf");
    const Model m = merged(kPsm, {{"pim.stf", kPim}});
    REQUIRE(m.things.size() == 1);
    REQUIRE(m.imports.empty());
    CHECK(resolved_backend(m.things[0]) == std::optional<std::string>("builtin"));
    Thing stripped = m.things[0];
    stripped.annotations.clear();
    CHECK(stripped == pim.things[0]);
    CHECK(platform_completeness(pim).size() == 1);
    CHECK(platform_completeness(m).empty());
    const auto before = member_names(pim);
    const auto after = member_names(m);
    CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
}

TEST_CASE("a model without imports merges to itself") {
    const Model m = model_of(kPim);
    CHECK(merge_imports(m, "m.stf", table_resolver({})) == m);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Model r = testing::RandomModelGen(seed).model();
        r.imports.clear();
        for (auto& t : r.things) t.includes.clear();
        bool unique = true;
        std::set<std::string> names;
        for (const auto& t : r.things) unique = unique && names.insert(t.name).second;
        if (!unique) continue;
        CHECK(merge_imports(r, "r.stf", table_resolver({})) == r);
    }
}

TEST_CASE("merging is idempotent") {
    const Model once = merged(kPsm, {{"pim.stf", kPim}});
    CHECK(merge_imports(once, "root.stf", table_resolver({})) == once);
    const std::string frag = R"(
thing fragment Counting { property count : Int = 0 message tick() port clock { receives tick } statechart F init X { } }
thing Meter includes Counting {
    statechart M init A { state A { transition -> A event clock.tick { count = count + 1 } } }
}
)";
    const Model flat = merged(frag, {});
    CHECK(flat.things[1].includes.empty());
    CHECK(flat.things[1].find_property("count") != nullptr);
    CHECK(merge_imports(flat, "root.stf", table_resolver({})) == flat);
}

TEST_CASE("cyclic imports name the cycle") {
    const std::map<std::string, std::string> files = {
        {"a.stf", "import \"b.stf\"\nthing A { statechart S init X { state X { } } }"},
        {"b.stf", "import \"a.stf\"\nthing B { statechart S init X { state X { } } }"},
    };
    CHECK_THROWS_WITH_AS(merge_imports(model_of(files.at("a.stf"), "a.stf"), "a.stf", table_resolver(files)),
                         "cyclic import: a.stf -> b.stf -> a.stf", MergeError);
}

TEST_CASE("shared imports are merged once") {
    const std::map<std::string, std::string> files = {
        {"base.stf", "thing Base { property x : Int statechart S init X { state X { } } }"},
        {"left.stf", "import \"base.stf\"\nthing L { statechart S init X { state X { } } }"},
    };
    const Model m = merged("import \"left.stf\"\nimport \"base.stf\"\nthing Top { statechart S init X { state X { } } }",
                           files);
    CHECK(m.things.size() == 3);
}

TEST_CASE("overlays may not retype or remove") {
    auto refine = [](const std::string& overlay) {
        return merged("import \"pim.stf\"\n" + overlay, {{"pim.stf", kPim}});
    };
    CHECK_THROWS_WITH_AS(refine("thing Disagg { property aggregate : Int statechart D init Idle { } }"),
                         doctest::Contains("retyping property 'aggregate'"), MergeError);
    CHECK_THROWS_WITH_AS(refine("thing Disagg { message reading(w : Int) statechart D init Idle { } }"),
                         doctest::Contains("retyping message 'reading'"), MergeError);
    CHECK_THROWS_WITH_AS(refine("thing Disagg { message other() port meter { receives other } statechart D init Idle { } }"),
                         doctest::Contains("removes received message 'reading'"), MergeError);
    CHECK_THROWS_WITH_AS(refine("thing Disagg { statechart D init Idle { state Other { } } }"),
                         doctest::Contains("statechart redefined"), MergeError);
    CHECK_THROWS_WITH_AS(refine("thing Disagg { statechart Other init Idle { } }"),
                         doctest::Contains("placeholder"), MergeError);
    const Model added = refine("thing Disagg { property extra : String = \"x\" statechart D init Idle { } }");
    CHECK(added.things[0].find_property("extra") != nullptr);
    CHECK(added.things[0].properties.size() == 3);
}

TEST_CASE("an overlay may fill the DA mode") {
    const Model m = merged(R"(import "pim.stf"
thing Disagg {
    property aggregate : Float
    property on : Bool
    data_analytics {
        dataset "d.csv"
        features aggregate
        labels on
        model knn { k = 3 }
        @backend "builtin"
    }
    statechart D init Idle { }
})",
                           {{"pim.stf", kPim}});
    const auto& da = *m.things[0].da;
    REQUIRE(std::holds_alternative<ExpertMode>(da.mode));
    CHECK(std::get<ExpertMode>(da.mode).algorithm.name == "knn");
    CHECK(platform_completeness(m).empty());
}

TEST_CASE("platform completeness lists DA things without a backend") {
    const Model two = model_of(R"(
thing A {
    property x : Float property y : Float
    data_analytics { dataset "a.csv" features x labels y automl { metric rmse folds 3 } @backend "builtin" }
    statechart S init I { state I { } }
}
thing B {
    property x : Float property y : Float
    data_analytics { dataset "b.csv" features x labels y automl { metric rmse folds 3 } }
    statechart S init I { state I { } }
}
thing C { statechart S init I { state I { } } }
)");
    const auto sites = platform_completeness(two);
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].thing == "B");
    CHECK(sites[0].span.line == 9);
    CHECK(platform_completeness(model_of("thing C { statechart S init I { state I { } } }")).empty());
}

TEST_CASE("fragments flatten into their includers") {
    const std::string base = R"(
thing fragment Logging { property lines : Int = 0 message log(text : String) port logs { receives log } statechart F init X { } }
)";
    CHECK_THROWS_WITH_AS(merged(base + "thing T includes Logging { property lines : Int statechart S init A { state A { } } }", {}),
                         doctest::Contains("clashes"), MergeError);
    CHECK_THROWS_WITH_AS(merged("thing T includes Nope { statechart S init A { state A { } } }", {}),
                         doctest::Contains("unknown fragment 'Nope'"), MergeError);
    const Model m = merged(base + "thing T includes Logging { statechart S init A { state A { } } }", {});
    CHECK(m.things[1].find_port("logs") != nullptr);
    CHECK(m.things[1].find_message("log") != nullptr);
}
