#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "corpus_experiments.hpp"
#include "json.hpp"

using namespace stf::testing;
using json = nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

CliResult stf_cli(const std::vector<std::string>& args, const std::string& env = {}) {
    static int counter = 0;
    TempDir io;
    const auto out = io.path() / ("out" + std::to_string(counter));
    const auto err = io.path() / ("err" + std::to_string(counter++));
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += quote(STF_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " > " + quote(out.string()) + " 2> " + quote(err.string());
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out.string());
    r.err = slurp(err.string());
    return r;
}

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
    std::size_t n = 0, start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        if (text.substr(start, end - start).find(needle) != std::string::npos) ++n;
        start = end + 1;
    }
    return n;
}

std::string fixture(const std::string& name) { return std::string(STF_SOURCE_DIR) + "/tests/fixtures/validator/" + name; }

const std::string kNotReady = R"(
thing Guess {
    property x : Float = 3.0
    property y : Float = 0.0
    data_analytics {
        dataset "d.csv"
        features x
        labels y
        model linear_regression { }
        @backend "builtin"
    }
    statechart S init A {
        state A {
            on_entry { da_predict }
        }
    }
}
configuration Solo {
    instance g : Guess
}
)";

}  // namespace

TEST_CASE("version") {
    const CliResult r = stf_cli({"version"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("stf 0.1.0", 0) == 0);
    const CliResult rep = stf_cli({"--format", "report", "version"});
    CHECK(json::parse(rep.out)["version"] == "0.1.0");
}

TEST_CASE("usage errors exit 2") {
    CHECK(stf_cli({}).code == 2);
    CHECK(stf_cli({"frobnicate"}).code == 2);
    CHECK(stf_cli({"run", corpus_path("pingpong.stf"), "--seed", "x"}).code == 2);
    CHECK(stf_cli({"--format", "xml", "version"}).code == 2);
    CHECK(stf_cli({"--help"}).code == 0);
}

TEST_CASE("check clean corpus") {
    const CliResult r = stf_cli({"check", corpus_path("pingpong.stf"), corpus_path("nialm.stf"), corpus_path("prices.stf")});
    CHECK(r.code == 0);
    CHECK(count_lines_with(r.out, ": error") == 0);
    CHECK(r.out.find("0 error(s)") != std::string::npos);
}

TEST_CASE("check E005 fixture") {
    const CliResult r = stf_cli({"check", fixture("E005.stf")});
    CHECK(r.code == 1);
    CHECK(count_lines_with(r.out, "error[E005]") == 1);
}

TEST_CASE("check missing file") {
    const CliResult r = stf_cli({"check", "/nonexistent/model.stf"});
    CHECK(r.code == 2);
    CHECK(r.err.find("usage: stf") != std::string::npos);
}

TEST_CASE("check report is machine readable") {
    const CliResult r = stf_cli({"--format", "report", "check", fixture("E005.stf"), corpus_path("pingpong.stf")});
    CHECK(r.code == 1);
    const json doc = json::parse(r.out);
    CHECK(doc["command"] == "check");
    CHECK(doc["errors"] == 1);
    CHECK(doc["files"].size() == 2);
    CHECK(doc["files"][0]["diagnostics"][0]["rule"] == "E005");
    CHECK(r.err.find("error[E005]") != std::string::npos);
}

TEST_CASE("check syntax error") {
    TempDir dir;
    const std::string p = dir.write("bad.stf", "thing {");
    const CliResult r = stf_cli({"check", p});
    CHECK(r.code == 1);
    CHECK(r.out.find("bad.stf:1:") != std::string::npos);
}

TEST_CASE("generate bundle and source tree") {
    TempDir dir;
    const std::string bundle = (dir.path() / "pp.json").string();
    CliResult r = stf_cli({"generate", corpus_path("pingpong.stf"), "--out", bundle});
    CHECK(r.code == 0);
    CHECK(r.out.find("wrote bundle") != std::string::npos);
    CHECK(json::parse(slurp(bundle))["format_version"] == 1);

    const std::string tree = (dir.path() / "tree").string();
    r = stf_cli({"--format", "report", "generate", corpus_path("pingpong.stf"), "--target", "pack:reference", "--out", tree});
    CHECK(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["files"].size() >= 3);
    CHECK(std::filesystem::exists(std::filesystem::path(tree) / "manifest.txt"));
    CHECK(std::filesystem::exists(std::filesystem::path(tree) / "bundle.json"));

    CHECK(stf_cli({"generate", corpus_path("pingpong.stf"), "--target", "pack:nope", "--out", tree + "2"}).code == 3);
    CHECK(stf_cli({"generate", corpus_path("pingpong.stf"), "--target", "zip", "--out", tree + "3"}).code == 2);
}

TEST_CASE("generate exit codes follow platform completeness") {
    TempDir dir;
    const std::string out = (dir.path() / "b.json").string();
    const CliResult pim = stf_cli({"generate", corpus_path("prices_pim.stf"), "--out", out});
    CHECK(pim.code == 1);
    CHECK(pim.out.find("PriceForecaster") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(out));
    CHECK(stf_cli({"generate", corpus_path("prices.stf"), "--out", out}).code == 0);
    CHECK(stf_cli({"generate", corpus_path("prices_pim.stf"), "--out", out, "--default-backend", "builtin"}).code == 0);
    CHECK(json::parse(slurp(out))["manifest"]["default_backend"] == "builtin");
    CHECK(stf_cli({"generate", corpus_path("prices_pim.stf"), "--out", out, "--default-backend", "tensorflow"}).code == 3);
    CHECK(stf_cli({"generate", fixture("E005.stf"), "--out", out}).code == 1);
}

TEST_CASE("run is deterministic and bundles match the interpreter") {
    TempDir dir;
    const auto p = [&](const std::string& n) { return (dir.path() / n).string(); };
    const std::string scenario = corpus_path("scenarios/pingpong.txt");
    REQUIRE(stf_cli({"run", corpus_path("pingpong.stf"), "--scenario", scenario, "--seed", "7", "--trace-out", p("a")}).code == 0);
    REQUIRE(stf_cli({"run", corpus_path("pingpong.stf"), "--scenario", scenario, "--seed", "7", "--trace-out", p("b")}).code == 0);
    CHECK(slurp(p("a")) == slurp(p("b")));
    CHECK_FALSE(slurp(p("a")).empty());

    REQUIRE(stf_cli({"generate", corpus_path("pingpong.stf"), "--out", p("pp.json")}).code == 0);
    const CliResult r = stf_cli({"run", p("pp.json"), "--data-root", corpus_path(""), "--scenario", scenario, "--seed", "7",
                                 "--trace-out", p("c")});
    CHECK(r.code == 0);
    CHECK(slurp(p("c")) == slurp(p("a")));
    CHECK(r.out.find("da_train server") != std::string::npos);

    const CliResult env = stf_cli({"run", p("pp.json"), "--scenario", scenario, "--seed", "7", "--trace-out", p("d")},
                                  "STF_DATA_ROOT=" + quote(corpus_path("")));
    CHECK(env.code == 0);
    CHECK(slurp(p("d")) == slurp(p("a")));
}

TEST_CASE("run writes the trace to stdout without --trace-out") {
    const CliResult r = stf_cli({"run", corpus_path("pingpong.stf"), "--scenario", corpus_path("scenarios/pingpong.txt")});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("{\"tick\":0,", 0) == 0);
    CHECK(r.err.find("da_train server") != std::string::npos);
}

TEST_CASE("run strict turns DA errors into exit 3") {
    TempDir dir;
    dir.write("d.csv", "x,y\n1,3\n2,5\n");
    const std::string m = dir.write("guess.stf", kNotReady);
    const CliResult lax = stf_cli({"run", m});
    CHECK(lax.code == 0);
    CHECK(lax.out.find("model not ready") != std::string::npos);
    const CliResult strict = stf_cli({"--format", "report", "run", m, "--strict"});
    CHECK(strict.code == 3);
    const json doc = json::parse(strict.out);
    CHECK(doc["error_events"] == 1);
    CHECK(doc["exit_code"] == 3);
}

TEST_CASE("run input errors") {
    TempDir dir;
    const std::string bad = dir.write("s.txt", "3 nobody port msg\n");
    CHECK(stf_cli({"run", corpus_path("pingpong.stf"), "--scenario", bad}).code == 2);
    CHECK(stf_cli({"run", fixture("E005.stf")}).code == 1);
    const std::string broken = dir.write("b.json", "{\"format_version\": 1}");
    CHECK(stf_cli({"run", broken}).code == 1);
    dir.write("lonely/m.stf", slurp(corpus_path("pingpong.stf")));
    CHECK(stf_cli({"run", (dir.path() / "lonely/m.stf").string()}).code == 3);
}

TEST_CASE("synth pingpong") {
    TempDir dir;
    const std::string a = (dir.path() / "a.csv").string();
    const std::string b = (dir.path() / "b.csv").string();
    REQUIRE(stf_cli({"synth", "pingpong", "--seed", "1", "-n", "1000", "--out", a}).code == 0);
    REQUIRE(stf_cli({"synth", "pingpong", "--seed", "1", "-n", "1000", "--out", b}).code == 0);
    const std::string csv = slurp(a);
    CHECK(csv.rfind("ip_block,hour,attacker\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1001);
    CHECK(csv == slurp(b));
    CHECK(csv == stf::gen_pingpong(1, 1000));
}

TEST_CASE("synth to stdout, holdout and errors") {
    const CliResult r = stf_cli({"synth", "prices", "--seed", "2", "-n", "300"});
    CHECK(r.code == 0);
    CHECK(r.out == stf::gen_prices(2, 300));

    TempDir dir;
    const std::string csv = (dir.path() / "n.csv").string();
    const std::string sc = (dir.path() / "n.txt").string();
    const CliResult h = stf_cli({"--format", "report", "synth", "nialm", "--seed", "1", "-n", "2000", "--holdout", "0.2",
                                 "--out", csv, "--scenario-out", sc});
    CHECK(h.code == 0);
    CHECK(json::parse(h.out)["rows"] == 1600);
    CHECK(slurp(csv) == slurp(corpus_path("data/nialm.csv")));
    CHECK(slurp(sc) == slurp(corpus_path("scenarios/nialm.txt")));

    CHECK(stf_cli({"synth", "foo"}).code == 2);
    CHECK(stf_cli({"synth", "nialm", "-n", "10"}).code == 2);
    CHECK(stf_cli({"synth", "nialm", "--holdout", "0.2"}).code == 2);
}
