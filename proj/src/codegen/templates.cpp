#include "stf/codegen/templates.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "stf/model/error.hpp"
#include "stf/syntax/parser.hpp"

namespace stf {

namespace fs = std::filesystem;

namespace {

const char* kReadme = R"(# {{configuration}}

Generated by {{tool}} {{tool_version}} from a model with hash `{{model_hash}}`.

## Files

{{file_list}}
## Running

    ./run.sh --scenario <scenario file> --seed 0 --trace-out trace.jsonl

`run.sh` executes `bundle.json` (format version {{format_version}}) with `stf run`.
Set `STF` to the path of the `stf` binary when it is not on `PATH`, and
`STF_DATA_ROOT` to the directory holding the datasets.

## Instances

{{instances}}
## Connectors

{{connectors}}
## Messages

{{message_enums}}
## Data analytics

{{da_constants}})";

const char* kRunScript = R"(#!/bin/sh
# Runs configuration {{configuration}} from its bundle.
set -e
here=$(dirname "$0")
exec "${STF:-stf}" run "$here/bundle.json" "$@"
)";

const char* kDeploy = R"([deployment]
configuration = {{configuration}}
bundle = bundle.json
format_version = {{format_version}}
model_hash = {{model_hash}}
tool = {{tool}}
tool_version = {{tool_version}}

[instances]
{{instances}}
[connectors]
{{connectors}}
[data_analytics]
{{da_constants}})";

std::string index_list(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i] + " = " + std::to_string(i);
    return out;
}

std::string state_tables(const Bundle& b) {
    std::ostringstream out;
    for (const auto& t : b.things) {
        const ThingInfo& info = t->info;
        out << "thing " << info.name << "\n";
        out << "  initial " << t->initial << "\n";
        out << "  states\n";
        for (std::size_t s = 0; s < t->states.size(); ++s) out << "    " << s << " " << t->states[s].name << "\n";
        out << "  transitions\n";
        for (std::size_t s = 0; s < t->states.size(); ++s) {
            const auto& transitions = t->states[s].transitions;
            for (std::size_t k = 0; k < transitions.size(); ++k) {
                const CTransition& tr = transitions[k];
                out << "    " << s << "." << k << " " << s << " -> " << tr.target << " on ";
                if (tr.event) {
                    out << info.ports[tr.event->first].name << "." << info.messages[tr.event->second].name;
                } else {
                    out << "-";
                }
                out << (tr.guard ? " guarded" : "") << "\n";
            }
        }
    }
    return out.str();
}

}  // namespace

const std::vector<std::string_view>& slot_registry() {
    static const std::vector<std::string_view> slots = {
        "bundle",       "configuration", "connectors",    "da_constants", "file_list",   "format_version",
        "instances",    "message_enums", "model_hash",    "state_tables", "tool",        "tool_version",
    };
    return slots;
}

TemplatePack reference_pack() {
    return {"reference",
            {{"README.md", kReadme},
             {"bundle.json", "{{bundle}}"},
             {"run.sh", kRunScript},
             {"state_tables.txt", "{{state_tables}}"},
             {"deploy.cfg", kDeploy}}};
}

TemplatePack load_template_pack(const std::string& dir) {
    if (!fs::is_directory(dir)) throw TemplateError("template pack '" + dir + "' is not a directory");
    TemplatePack pack;
    pack.name = fs::path(dir).filename().string();
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir).generic_string();
        if (rel == kManifestFile) throw TemplateError("template pack '" + dir + "' may not define " + rel);
        pack.files.push_back({rel, read_file(entry.path().string())});
    }
    std::sort(pack.files.begin(), pack.files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return pack;
}

TemplatePack find_template_pack(const std::string& name) {
    if (name == "reference") return reference_pack();
    return load_template_pack(name);
}

std::vector<std::string> template_slots(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = text.find("{{", pos)) != std::string_view::npos) {
        const std::size_t close = text.find("}}", pos + 2);
        if (close == std::string_view::npos) break;
        out.emplace_back(text.substr(pos + 2, close - pos - 2));
        pos = close + 2;
    }
    return out;
}

std::map<std::string, std::string> slot_values(const Bundle& b) {
    std::map<std::string, std::string> v;
    v["bundle"] = bundle_text(b);
    v["configuration"] = b.system.configuration;
    v["format_version"] = std::to_string(b.format_version);
    v["model_hash"] = b.manifest.model_hash;
    v["tool"] = b.manifest.tool;
    v["tool_version"] = b.manifest.tool_version;
    v["state_tables"] = state_tables(b);

    std::string instances;
    for (const auto& i : b.system.instances) instances += i.name + " = " + b.system.things[i.thing].name + "\n";
    v["instances"] = instances;

    std::string connectors;
    for (const auto& l : b.system.links) {
        const auto& li = b.system.instances[l.left_instance];
        const auto& ri = b.system.instances[l.right_instance];
        connectors += li.name + "." + b.system.things[li.thing].ports[l.left_port].name + " = " + ri.name + "." +
                      b.system.things[ri.thing].ports[l.right_port].name + "\n";
    }
    v["connectors"] = connectors;

    std::string enums;
    for (const auto& t : b.system.things) {
        std::vector<std::string> messages, ports, states = t.states;
        for (const auto& m : t.messages) messages.push_back(m.name);
        for (const auto& p : t.ports) ports.push_back(p.name);
        enums += t.name + ".Message { " + index_list(messages) + " }\n";
        enums += t.name + ".Port { " + index_list(ports) + " }\n";
        enums += t.name + ".State { " + index_list(states) + " }\n";
    }
    v["message_enums"] = enums;

    std::string da;
    for (const auto& t : b.system.things) {
        if (!t.da) continue;
        const DaConfig& d = *t.da;
        auto names = [](const std::vector<FeatureSpec>& fs) {
            std::string s;
            for (const auto& f : fs) s += (s.empty() ? "" : " ") + f.name;
            return s;
        };
        da += t.name + ".backend = " + d.backend + "\n";
        da += t.name + ".dataset = " + d.dataset + "\n";
        da += t.name + ".features = " + names(d.pipeline.features) + "\n";
        da += t.name + ".labels = " + names(d.pipeline.labels) + "\n";
        da += t.name + ".task = " + std::string(to_string(d.pipeline.task)) + "\n";
        if (d.pipeline.window) {
            da += t.name + ".window = " + std::to_string(d.pipeline.window->lag) + " " +
                  std::to_string(d.pipeline.window->horizon) + "\n";
        }
        if (d.automl) {
            da += t.name + ".mode = automl " + d.metric + " folds " + std::to_string(d.folds) + " budget " +
                  std::to_string(d.budget) + "\n";
        } else {
            da += t.name + ".mode = expert " + d.expert.algorithm + "\n";
        }
        if (d.pretrained) da += t.name + ".pretrained = " + *d.pretrained + " (embedded)\n";
    }
    v["da_constants"] = da;
    return v;
}

std::string render(std::string_view text, const std::map<std::string, std::string>& values,
                   const std::string& template_name) {
    const auto& registry = slot_registry();
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = text.find("{{", pos);
        const std::size_t close = open == std::string_view::npos ? open : text.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out += text.substr(pos);
            return out;
        }
        out += text.substr(pos, open - pos);
        const std::string slot(text.substr(open + 2, close - open - 2));
        if (std::find(registry.begin(), registry.end(), slot) == registry.end()) {
            throw TemplateError("template '" + template_name + "': unknown slot '" + slot + "'");
        }
        auto it = values.find(slot);
        if (it == values.end()) throw TemplateError("template '" + template_name + "': no value for slot '" + slot + "'");
        out += it->second;
        pos = close + 2;
    }
}

std::vector<std::string> generate_sources(const Bundle& b, const TemplatePack& pack, const std::string& out_dir) {
    std::vector<std::string> manifest;
    for (const auto& f : pack.files) {
        const fs::path p(f.path);
        if (p.is_absolute() || f.path.find("..") != std::string::npos || f.path == kManifestFile) {
            throw TemplateError("template pack '" + pack.name + "': bad output path '" + f.path + "'");
        }
        manifest.push_back(f.path);
    }
    manifest.emplace_back(kManifestFile);
    std::sort(manifest.begin(), manifest.end());
    if (std::adjacent_find(manifest.begin(), manifest.end()) != manifest.end()) {
        throw TemplateError("template pack '" + pack.name + "' lists a path twice");
    }

    auto values = slot_values(b);
    std::string list;
    for (const auto& m : manifest) list += m + "\n";
    values["file_list"] = list;

    std::map<std::string, std::string> rendered;
    for (const auto& f : pack.files) rendered[f.path] = render(f.text, values, pack.name + "/" + f.path);
    rendered[std::string(kManifestFile)] = list;

    for (const auto& [path, text] : rendered) {
        const fs::path target = fs::path(out_dir) / path;
        fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        if (!out) throw TemplateError("cannot write '" + target.string() + "'");
        out << text;
        out.close();
        if (target.extension() == ".sh") {
            fs::permissions(target, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                            fs::perm_options::add);
        }
    }
    for (const auto& path : manifest) {
        const fs::path target = fs::path(out_dir) / path;
        if (!fs::is_regular_file(target) || read_file(target.string()) != rendered[path]) {
            throw TemplateError("emitted tree does not match the manifest at '" + path + "'");
        }
    }
    return manifest;
}

}  // namespace stf
