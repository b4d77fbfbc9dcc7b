// revex command line: preprocess, serve, run, iterate, validate, synth.

#include <csignal>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "revex/api_service.hpp"
#include "revex/config.hpp"
#include "revex/error.hpp"
#include "revex/http_server.hpp"
#include "revex/pipeline.hpp"
#include "revex/query.hpp"
#include "revex/synth.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

revex::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

std::string flag_name(const std::string& key) {
    std::string out = "--";
    for (char c : key) out.push_back(c == '_' ? '-' : c);
    return out;
}

/// --config plus one flag per config key.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file (key = value lines)")->required();
        for (const auto& key : revex::config_keys()) {
            cmd->add_option(flag_name(key), overrides[key], "override config key " + key);
        }
    }

    revex::PipelineConfig load(CLI::App* cmd) const {
        auto config = revex::load_config(config_path);
        revex::apply_environment(config);
        for (const auto& key : revex::config_keys()) {
            if (cmd->count(flag_name(key)) > 0) revex::set_config_value(config, key, overrides.at(key));
        }
        return config;
    }
};

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << json{{"warning", w}}.dump() << "\n";
}

json index_report(const revex::PipelineResult& r) {
    const auto& tree = r.artifacts.trees.front().tree;
    return {{"index_dir", r.index_dir.string()},
            {"index_version", r.artifacts.index_version},
            {"reviews", r.artifacts.corpus.size()},
            {"attributes", r.artifacts.schema.attributes.size()},
            {"nodes", tree.node_count()},
            {"max_depth", tree.max_depth()},
            {"trees", r.artifacts.trees.size()},
            {"warnings", r.warnings.size()}};
}

int fail(revex::ErrorKind kind, const std::string& message) {
    const char* name = kind == revex::ErrorKind::Validation ? "validation"
                       : kind == revex::ErrorKind::NotFound ? "not_found"
                                                            : "runtime";
    std::cerr << json{{"error", {{"kind", name}, {"message", message}}}}.dump() << "\n";
    return kind == revex::ErrorKind::Runtime ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"revex: review exploration engine"};
    app.require_subcommand(1);

    ConfigFlags pre_flags, serve_flags, run_flags, iter_flags, valid_flags;

    auto* pre = app.add_subcommand("preprocess", "featurize, cluster, summarize and write the index");
    pre_flags.attach(pre);

    auto* serve = app.add_subcommand("serve", "serve the newest index over HTTP");
    serve_flags.attach(serve);

    auto* run = app.add_subcommand("run", "replay a command script and print matching review ids");
    run_flags.attach(run);
    std::string script_path, entity = revex::kAllEntities, path;
    run->add_option("script", script_path, "newline separated commands ('-' for stdin)")->required();
    run->add_option("--entity", entity, "entity id or 'all'");
    run->add_option("--path", path, "cluster path, empty for the whole scope");

    auto* iter = app.add_subcommand("iterate", "rebuild with a new schema into the next index version");
    iter_flags.attach(iter);
    std::string new_schema;
    iter->add_option("new_schema", new_schema, "schema file")->required();

    auto* valid = app.add_subcommand("validate", "check config and inputs without building");
    valid_flags.attach(valid);

    auto* synth = app.add_subcommand("synth", "write the synthetic hotel corpus and a config");
    std::string out_dir;
    revex::SynthOptions synth_options;
    synth->add_option("out", out_dir, "output directory")->required();
    synth->add_option("--reviews", synth_options.reviews, "number of reviews");
    synth->add_option("--entities", synth_options.entities, "number of hotels");
    synth->add_option("--seed", synth_options.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(revex::ErrorKind::Validation, e.what());
    }

    try {
        if (*pre) {
            const auto config = pre_flags.load(pre);
            const auto result = revex::preprocess(config);
            print_warnings(result.warnings);
            std::cout << index_report(result).dump() << "\n";
        } else if (*iter) {
            const auto config = iter_flags.load(iter);
            const auto result = revex::iterate(config, new_schema);
            print_warnings(result.warnings);
            std::cout << index_report(result).dump() << "\n";
        } else if (*run) {
            const auto config = run_flags.load(run);
            const fs::path dir = revex::resolve_index_dir(config.index_dir);
            const auto index = revex::open_index(dir);
            std::string script;
            if (script_path == "-") {
                script.assign(std::istreambuf_iterator<char>(std::cin), {});
            } else {
                script = revex::read_file(script_path);
            }
            const auto scope = revex::scope_members(index, entity, path);
            for (auto i : revex::run_script(index, script, scope)) {
                std::cout << json{{"id", index.corpus.reviews()[i].id}}.dump() << "\n";
            }
        } else if (*valid) {
            auto config = valid_flags.load(valid);
            revex::validate_config(config);
            const auto corpus = revex::load_corpus(config.reviews, config.entities);
            json report = {{"reviews", corpus.size()},
                           {"entities", corpus.has_entity_info() ? corpus.entities().size() : 0},
                           {"featurizer", config.build.mode == revex::FeatureMode::Topic ? "lda" : "extractions"}};
            if (config.build.mode == revex::FeatureMode::Extraction) {
                const auto schema = revex::load_schema(*config.schema);
                const auto records = revex::load_extractions(*config.extractions, schema, corpus);
                report["attributes"] = schema.attributes.size();
                report["extraction_records"] = records.size();
            }
            if (config.lexicon_path) report["lexicon_terms"] = revex::SentimentLexicon::load(*config.lexicon_path).entries().size();
            std::cout << report.dump() << "\n";
        } else if (*serve) {
            const auto config = serve_flags.load(serve);
            const fs::path dir = revex::resolve_index_dir(config.index_dir);
            revex::ApiService service(revex::open_index(dir), config.index_dir);
            revex::HttpServer server(service);
            const int port = server.bind(config.host, config.port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << json{{"listening", "http://" + config.host + ":" + std::to_string(port)},
                              {"index_dir", dir.string()}}
                             .dump()
                      << std::endl;
            server.serve();
            g_server = nullptr;
        } else if (*synth) {
            const auto corpus = revex::generate_corpus(synth_options);
            revex::write_corpus(out_dir, corpus);
            std::cout << json{{"dir", out_dir},
                              {"reviews", corpus.reviews.size()},
                              {"entities", corpus.entities.size()},
                              {"extraction_records", corpus.extractions.size()}}
                             .dump()
                      << "\n";
        }
    } catch (const revex::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail(revex::ErrorKind::Runtime, e.what());
    }
    return 0;
}
