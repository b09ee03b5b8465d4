#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stf/check/diagnostic.hpp"
#include "stf/check/validator.hpp"
#include "stf/codegen/bundle.hpp"
#include "stf/codegen/templates.hpp"
#include "stf/corpus/generators.hpp"
#include "stf/model/error.hpp"
#include "stf/model/merge.hpp"
#include "stf/runtime/interpreter.hpp"
#include "stf/runtime/scenario.hpp"
#include "stf/syntax/parser.hpp"
#include "stf/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kModelErrors = 1, kUsage = 2, kFailure = 3 };

struct Output {
    bool report = false;

    /// Human text goes to stderr when stdout carries the report or other data.
    std::ostream& human(bool stdout_busy = false) const { return report || stdout_busy ? std::cerr : std::cout; }

    void emit(const json& doc) const {
        if (report) std::cout << doc.dump(2) << '\n';
    }
};

void write_text(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw stf::Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw stf::Error("cannot write '" + path + "'");
}

std::string data_root_for(const std::string& flag, const std::string& input) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("STF_DATA_ROOT"); env && *env) return env;
    return fs::path(input).parent_path().string();
}

json diagnostics_json(const std::vector<stf::Diagnostic>& ds) { return json::parse(stf::diagnostics_report(ds)); }

json parse_diagnostics_json(const std::vector<stf::ParseDiagnostic>& ds) {
    json out = json::array();
    for (const auto& d : ds) {
        json r;
        r["rule"] = "parse";
        r["severity"] = "error";
        r["file"] = d.span.file;
        r["line"] = d.span.line;
        r["column"] = d.span.column;
        r["message"] = d.message;
        out.push_back(r);
    }
    return out;
}

struct Loaded {
    std::optional<stf::Model> model;
    std::vector<stf::Diagnostic> diagnostics;
    json report = json::array();
};

/// Parse, merge and validate. `model` is empty on parse or merge failure.
Loaded load_checked(const std::string& path, const std::string& data_root, std::ostream& human, bool print_all) {
    Loaded out;
    stf::LoadResult r = stf::load_model_file(path);
    if (!r.diagnostics.empty() || !r.model) {
        for (const auto& d : r.diagnostics) human << stf::format_parse_diagnostic(d) << '\n';
        out.report = parse_diagnostics_json(r.diagnostics);
        return out;
    }
    const stf::FileMetadataProvider meta(data_root);
    out.diagnostics = stf::validate(*r.model, &meta);
    for (const auto& d : out.diagnostics) {
        if (print_all || d.severity == stf::Severity::Error) human << stf::format_diagnostic(d) << '\n';
    }
    out.report = diagnostics_json(out.diagnostics);
    out.model = std::move(r.model);
    return out;
}

struct CheckArgs {
    std::vector<std::string> files;
    std::string data_root;
};

int cmd_check(const CheckArgs& a, const Output& o) {
    json files = json::array();
    std::size_t errors = 0, warnings = 0, hints = 0;
    for (const auto& f : a.files) {
        Loaded l = load_checked(f, data_root_for(a.data_root, f), o.human(), true);
        if (!l.model) errors += std::max<std::size_t>(1, l.report.size());
        for (const auto& d : l.diagnostics) {
            switch (d.severity) {
                case stf::Severity::Error: ++errors; break;
                case stf::Severity::Warning: ++warnings; break;
                case stf::Severity::Hint: ++hints; break;
            }
        }
        json entry;
        entry["file"] = f;
        entry["diagnostics"] = l.report;
        files.push_back(entry);
    }
    o.human() << a.files.size() << " file(s): " << errors << " error(s), " << warnings << " warning(s), " << hints
              << " hint(s)\n";
    const int code = errors ? kModelErrors : kOk;
    json doc;
    doc["command"] = "check";
    doc["exit_code"] = code;
    doc["errors"] = errors;
    doc["warnings"] = warnings;
    doc["hints"] = hints;
    doc["files"] = files;
    o.emit(doc);
    return code;
}

struct GenerateArgs {
    std::string model;
    std::string config;
    std::string target = "bundle";
    std::string out;
    std::string default_backend;
    std::string data_root;
};

int cmd_generate(const GenerateArgs& a, const Output& o) {
    json doc;
    doc["command"] = "generate";
    doc["target"] = a.target;
    auto finish = [&](int code, const std::string& message) {
        if (!message.empty()) o.human() << "error: " << message << '\n';
        doc["exit_code"] = code;
        if (!message.empty()) doc["message"] = message;
        o.emit(doc);
        return code;
    };
    std::optional<std::string> pack;
    if (a.target.rfind("pack:", 0) == 0) {
        pack = a.target.substr(5);
    } else if (a.target != "bundle") {
        return finish(kUsage, "unknown target '" + a.target + "'; use bundle or pack:<name>");
    }
    const std::string root = data_root_for(a.data_root, a.model);
    Loaded l = load_checked(a.model, root, o.human(), true);
    doc["diagnostics"] = l.report;
    if (!l.model || stf::has_errors(l.diagnostics)) return finish(kModelErrors, "model has errors");
    const auto unresolved = stf::platform_completeness(*l.model);
    if (!unresolved.empty() && a.default_backend.empty()) {
        json sites = json::array();
        for (const auto& u : unresolved) {
            o.human() << u.span.file << ':' << u.span.line << ':' << u.span.column << ": error: thing '" << u.thing
                      << "' has no backend; add @backend or pass --default-backend\n";
            sites.push_back(u.thing);
        }
        doc["unresolved"] = sites;
        return finish(kModelErrors, "model is not platform-complete");
    }
    try {
        stf::BundleOptions opts;
        opts.data_root = root;
        if (!a.default_backend.empty()) opts.default_backend = a.default_backend;
        const stf::Bundle b = stf::compile_bundle(*l.model, a.config, opts);
        doc["model_hash"] = b.manifest.model_hash;
        json files = json::array();
        if (pack) {
            const stf::TemplatePack tp = stf::find_template_pack(*pack);
            const auto written = stf::generate_sources(b, tp, a.out);
            o.human() << "wrote " << written.size() << " files to " << a.out << '\n';
            for (const auto& f : written) {
                o.human() << "  " << f << '\n';
                files.push_back(f);
            }
        } else {
            write_text(a.out, stf::bundle_text(b));
            o.human() << "wrote bundle " << a.out << " (" << b.system.things.size() << " things, "
                      << b.system.instances.size() << " instances, " << b.manifest.model_hash << ")\n";
            files.push_back(a.out);
        }
        doc["out"] = a.out;
        doc["files"] = files;
    } catch (const stf::Error& e) {
        return finish(kFailure, e.what());
    }
    return finish(kOk, "");
}

struct RunArgs {
    std::string input;
    std::string scenario;
    std::string config;
    std::string trace_out;
    std::string data_root;
    std::uint64_t seed = 0;
    bool strict = false;
    bool persist_saves = false;
};

bool is_bundle_path(const std::string& path) { return fs::path(path).extension() == ".json"; }

std::string train_summary(const stf::TraceEvent& e) {
    const json& p = e.payload;
    std::string s = "da_train " + e.instance + " at tick " + std::to_string(e.tick) + ": " +
                    p.value("mode", std::string()) + " " + p.value("algorithm", std::string());
    const std::string metric = p.value("metric", std::string());
    if (p.contains("cv_score")) s += " cv " + metric + "=" + p["cv_score"].dump();
    if (p.contains("train_score")) s += " train " + metric + "=" + p["train_score"].dump();
    if (p.contains("rows")) s += " rows=" + p["rows"].dump();
    return s;
}

int cmd_run(const RunArgs& a, const Output& o) {
    json doc;
    doc["command"] = "run";
    doc["input"] = a.input;
    doc["seed"] = a.seed;
    const bool trace_on_stdout = a.trace_out.empty() && !o.report;
    std::ostream& human = o.human(trace_on_stdout);
    auto finish = [&](int code, const std::string& message) {
        if (!message.empty()) human << "error: " << message << '\n';
        doc["exit_code"] = code;
        if (!message.empty()) doc["message"] = message;
        o.emit(doc);
        return code;
    };
    stf::Scenario scenario;
    if (!a.scenario.empty()) {
        try {
            scenario = stf::load_scenario(a.scenario);
        } catch (const stf::Error& e) {
            return finish(kUsage, e.what());
        }
    }
    stf::RunOptions opts;
    opts.data_root = data_root_for(a.data_root, a.input);
    opts.seed = a.seed;
    opts.persist_saves = a.persist_saves;
    std::unique_ptr<stf::Simulation> sim;
    if (is_bundle_path(a.input)) {
        std::optional<stf::Bundle> b;
        try {
            b = stf::load_bundle_file(a.input);
        } catch (const stf::Error& e) {
            return finish(kModelErrors, e.what());
        }
        try {
            sim = stf::instantiate_bundle(*b, opts);
        } catch (const stf::Error& e) {
            return finish(kFailure, e.what());
        }
    } else {
        Loaded l = load_checked(a.input, opts.data_root, human, false);
        doc["diagnostics"] = l.report;
        if (!l.model || stf::has_errors(l.diagnostics)) return finish(kModelErrors, "model has errors");
        try {
            sim = stf::instantiate(*l.model, a.config, opts);
        } catch (const stf::Error& e) {
            return finish(kFailure, e.what());
        }
    }
    try {
        sim->run(scenario);
    } catch (const stf::ScenarioError& e) {
        return finish(kUsage, e.what());
    } catch (const stf::Error& e) {
        return finish(kFailure, e.what());
    }
    const stf::Trace& trace = sim->trace();
    const std::string text = stf::trace_text(trace);
    try {
        if (!a.trace_out.empty()) {
            write_text(a.trace_out, text);
        } else if (trace_on_stdout) {
            std::cout << text;
        }
    } catch (const stf::Error& e) {
        return finish(kFailure, e.what());
    }
    std::size_t errors = 0;
    json trained = json::array();
    for (const auto& e : trace) {
        if (e.kind == "error") ++errors;
        if (e.kind == "da_train") {
            human << train_summary(e) << '\n';
            json t = e.payload;
            t["instance"] = e.instance;
            t["tick"] = e.tick;
            trained.push_back(t);
        }
    }
    human << "run: " << trace.size() << " events over " << sim->tick() << " ticks, " << errors << " error event(s)\n";
    doc["events"] = trace.size();
    doc["ticks"] = sim->tick();
    doc["error_events"] = errors;
    doc["trained"] = trained;
    if (!a.trace_out.empty()) doc["trace_out"] = a.trace_out;
    if (a.strict && errors) return finish(kFailure, "trace contains " + std::to_string(errors) + " error event(s)");
    return finish(kOk, "");
}

struct SynthArgs {
    std::string name;
    std::uint64_t seed = 0;
    std::size_t n = 1000;
    std::optional<double> noise;
    std::optional<double> holdout;
    std::string out;
    std::string scenario_out;
};

int cmd_synth(const SynthArgs& a, const Output& o) {
    json doc;
    doc["command"] = "synth";
    doc["name"] = a.name;
    doc["seed"] = a.seed;
    doc["n"] = a.n;
    const bool csv_on_stdout = a.out.empty() && !o.report;
    std::ostream& human = o.human(csv_on_stdout);
    auto finish = [&](int code, const std::string& message) {
        if (!message.empty()) human << "error: " << message << '\n';
        doc["exit_code"] = code;
        if (!message.empty()) doc["message"] = message;
        o.emit(doc);
        return code;
    };
    const auto& names = stf::generator_names();
    if (std::find(names.begin(), names.end(), a.name) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        return finish(kUsage, "unknown scenario '" + a.name + "' (known: " + known + ")");
    }
    if (a.holdout && a.scenario_out.empty()) return finish(kUsage, "--holdout needs --scenario-out");
    stf::GeneratorSpec spec{a.name, a.seed, a.n, a.noise};
    std::string csv;
    std::size_t rows = a.n;
    try {
        if (a.holdout) {
            const stf::CorpusSplit split = stf::synthesize_split(spec, *a.holdout);
            csv = split.csv;
            rows = split.train_rows;
            write_text(a.scenario_out, split.scenario);
            doc["scenario_out"] = a.scenario_out;
            doc["holdout_rows"] = a.n - rows;
        } else {
            csv = stf::synthesize(spec);
        }
    } catch (const stf::GeneratorError& e) {
        return finish(kUsage, e.what());
    } catch (const stf::Error& e) {
        return finish(kFailure, e.what());
    }
    try {
        if (!a.out.empty()) {
            write_text(a.out, csv);
        } else if (csv_on_stdout) {
            std::cout << csv;
        }
    } catch (const stf::Error& e) {
        return finish(kFailure, e.what());
    }
    human << "synth " << a.name << ": " << rows << " rows, seed " << a.seed;
    if (!a.out.empty()) human << ", wrote " << a.out;
    if (a.holdout) human << ", scenario " << a.scenario_out;
    human << '\n';
    doc["rows"] = rows;
    if (!a.out.empty()) doc["out"] = a.out;
    return finish(kOk, "");
}

int cmd_version(const Output& o) {
    o.human() << stf::kToolName << ' ' << stf::kToolVersion << " (bundle format " << stf::kBundleFormatVersion << ")\n";
    json doc;
    doc["command"] = "version";
    doc["tool"] = stf::kToolName;
    doc["version"] = stf::kToolVersion;
    doc["bundle_format"] = stf::kBundleFormatVersion;
    doc["exit_code"] = 0;
    o.emit(doc);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Statechart things with data analytics: check, generate, run and synthesize."};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "report"}));

    CheckArgs check;
    auto* c = app.add_subcommand("check", "Parse, merge and validate models");
    c->add_option("models", check.files, "Model files")->required()->check(CLI::ExistingFile);
    c->add_option("--data-root", check.data_root, "Base directory for dataset paths");

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a bundle or a source tree");
    g->add_option("model", gen.model, "Model file")->required()->check(CLI::ExistingFile);
    g->add_option("--config", gen.config, "Configuration name");
    g->add_option("--target", gen.target, "bundle or pack:<name>");
    g->add_option("--out,-o", gen.out, "Output file or directory")->required();
    g->add_option("--default-backend", gen.default_backend, "Backend for things without @backend");
    g->add_option("--data-root", gen.data_root, "Base directory for pretrained paths");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Simulate a model or a bundle");
    r->add_option("input", run.input, "Model or bundle (.json) file")->required()->check(CLI::ExistingFile);
    r->add_option("--scenario", run.scenario, "Scenario file")->check(CLI::ExistingFile);
    r->add_option("--config", run.config, "Configuration name (models only)");
    r->add_option("--seed", run.seed, "Random seed");
    r->add_option("--trace-out", run.trace_out, "Trace file (JSON Lines)");
    r->add_option("--data-root", run.data_root, "Base directory for dataset paths");
    r->add_flag("--strict", run.strict, "Exit 3 when the trace holds error events");
    r->add_flag("--persist-saves", run.persist_saves, "Append da_save rows to dataset files");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Write a synthetic dataset");
    s->add_option("name", synth.name, "pingpong, nialm or prices")->required();
    s->add_option("--seed", synth.seed, "Random seed");
    s->add_option("-n", synth.n, "Rows");
    s->add_option("--noise", synth.noise, "Label flip rate, sensor sigma or price shock sigma");
    s->add_option("--holdout", synth.holdout, "Held-out fraction fed through a scenario")
        ->check(CLI::Range(0.0, 1.0));
    s->add_option("--out,-o", synth.out, "CSV file (stdout when absent)");
    s->add_option("--scenario-out", synth.scenario_out, "Scenario file for the held-out rows");

    auto* v = app.add_subcommand("version", "Print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cerr << "usage: stf [--format text|report] <check|generate|run|synth|version> ...\n";
        std::cerr << "run 'stf --help' for details\n";
        return kUsage;
    }

    const Output out{format == "report"};
    try {
        if (c->parsed()) return cmd_check(check, out);
        if (g->parsed()) return cmd_generate(gen, out);
        if (r->parsed()) return cmd_run(run, out);
        if (s->parsed()) return cmd_synth(synth, out);
        if (v->parsed()) return cmd_version(out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
