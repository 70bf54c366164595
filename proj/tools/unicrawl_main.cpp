#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include "unicrawl/errors.hpp"
#include "unicrawl/index.hpp"
#include "unicrawl/mockcc.hpp"
#include "unicrawl/pipeline.hpp"
#include "unicrawl/store.hpp"
#include "unicrawl/version.hpp"

namespace {

using namespace unicrawl;

struct cli_options {
    pipeline_config cfg;
    std::string mode_name = "strict";
    std::string in_manifest;
    std::string dedup_out;
    std::string manifest_path;
    std::string fixture_root;
    std::uint64_t fixture_seed = 42;
    int fixture_archives = 2;
    int serve_port = 8080;
    std::string serve_root;
};

void add_common_flags(CLI::App* app, cli_options& opts) {
    app->add_option("--lang", opts.cfg.target_language,
                    "Target language, ISO-639-3 (e.g. amh)");
    app->add_option("--crawls", opts.cfg.crawl_ids,
                    "Crawl ids (CC-MAIN-YYYY-WW), repeatable or comma-separated")
        ->delimiter(',');
    app->add_option("--mode", opts.mode_name, "Language filter: strict|lenient")
        ->check(CLI::IsMember({"strict", "lenient"}));
    app->add_option("--min-dup-len", opts.cfg.min_dup_len,
                    "Duplicate substring threshold in bytes (default 50)");
    app->add_option("--min-doc-len", opts.cfg.min_doc_chars,
                    "Minimum document length in characters (default 100)");
    app->add_option("--workers", opts.cfg.workers, "Worker threads (default 4)");
    app->add_option("--rate-limit", opts.cfg.rate_limit,
                    "Max requests/sec across workers (default 20, 0 = unlimited)");
    app->add_option("--out", opts.cfg.out_dir, "Output directory (default out)");
    app->add_option("--cc-base", opts.cfg.cc_base,
                    "Data endpoint base URL (default $UNICRAWL_CC_BASE or the public endpoint)");
    app->add_flag("--resume,!--no-resume", opts.cfg.resume,
                  "Skip stages with valid checkpoints (default on)");
    app->add_option("--user-agent", opts.cfg.user_agent, "User-Agent header for requests");
    app->add_flag("--spool", opts.cfg.spool, "Keep raw fetched WARC records under spool/");
    app->add_flag("--span-dump", opts.cfg.span_dump, "Write dedup span audit files under spans/");
    app->add_flag("--strict-exit", opts.cfg.strict_exit,
                  "Non-zero exit when any record failed");
    app->add_option("--min-block-chars", opts.cfg.extract.min_block_chars,
                    "Extractor: minimum characters per kept block (default 25)");
    app->add_option("--max-link-density", opts.cfg.extract.max_link_density,
                    "Extractor: maximum link density per kept block (default 0.33)");
    app->add_option("--compare", opts.cfg.compare_csv,
                    "CSV of prior dataset sizes (dataset,language,size_mb) for the report");
    app->add_option("--max-shard-bytes", opts.cfg.max_shard_bytes,
                    "Uncompressed shard roll size (default 256 MiB)");
    app->add_option("--dedup-budget", opts.cfg.dedup_budget_bytes,
                    "Corpus bytes deduped as one block before chunking kicks in");
    app->add_option("--retries", opts.cfg.retry.attempts, "Attempts per request (default 5)");
}

int dispatch(cli_options& opts, const std::function<int()>& body) {
    try {
        opts.cfg.mode = parse_filter_mode(opts.mode_name);
        if (opts.cfg.cc_base.empty()) opts.cfg.cc_base = default_cc_base();
        if (opts.cfg.user_agent.empty()) {
            opts.cfg.user_agent = std::string("unicrawl/") + tool_version;
        }
        return body();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return exit_fatal;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unicrawl: harvest one language's text from web crawl archives"};
    app.set_version_flag("--version", std::string("unicrawl ") + tool_version);
    app.set_config("--config", "", "TOML-style key/value config file; flags win");
    app.require_subcommand(1);

    cli_options opts;

    auto* run = app.add_subcommand("run", "Full pipeline: index, fetch+extract, dedup, report");
    add_common_flags(run, opts);

    auto* index = app.add_subcommand("index", "Filter archive indexes only");
    add_common_flags(index, opts);

    auto* fetch = app.add_subcommand("fetch", "Fetch + extract from existing filtered indexes");
    add_common_flags(fetch, opts);

    auto* dedup = app.add_subcommand("dedup", "Deduplicate a stored dataset");
    add_common_flags(dedup, opts);
    dedup->add_option("--in", opts.in_manifest, "Input manifest.json")->required();
    dedup->add_option("--dedup-out", opts.dedup_out, "Output dataset directory")->required();

    auto* report = app.add_subcommand("report", "Regenerate report.json/report.txt");
    add_common_flags(report, opts);

    auto* validate = app.add_subcommand("validate-manifest", "Check a dataset manifest");
    validate->add_option("manifest", opts.manifest_path, "Path to manifest.json")->required();

    auto* gen = app.add_subcommand("gen-fixtures", "Write synthetic crawl archives for testing");
    gen->add_option("--root", opts.fixture_root, "Directory to populate")->required();
    gen->add_option("--archives", opts.fixture_archives, "Number of archives (default 2)");
    gen->add_option("--seed", opts.fixture_seed, "Generator seed (default 42)");
    gen->add_option("--lang", opts.cfg.target_language, "Target language (default amh)");

    auto* serve = app.add_subcommand("mock-serve", "Serve a fixture tree over HTTP with ranges");
    serve->add_option("--root", opts.serve_root, "Directory to serve")->required();
    serve->add_option("--port", opts.serve_port, "Port (default 8080)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return dispatch(opts, [&] { return run_pipeline(opts.cfg); });
    }
    if (index->parsed()) {
        return dispatch(opts, [&] { return run_index_only(opts.cfg); });
    }
    if (fetch->parsed()) {
        return dispatch(opts, [&] { return run_fetch_only(opts.cfg); });
    }
    if (dedup->parsed()) {
        return dispatch(opts, [&] {
            return run_dedup_only(opts.cfg, opts.in_manifest, opts.dedup_out);
        });
    }
    if (report->parsed()) {
        return dispatch(opts, [&] { return run_report_only(opts.cfg); });
    }
    if (validate->parsed()) {
        return dispatch(opts, [&] {
            auto problems = validate_manifest(opts.manifest_path);
            if (problems.empty()) {
                std::cout << "manifest valid: " << opts.manifest_path << "\n";
                return exit_ok;
            }
            for (const auto& p : problems) std::cerr << "problem: " << p << "\n";
            return exit_fatal;
        });
    }
    if (gen->parsed()) {
        return dispatch(opts, [&] {
            if (opts.cfg.target_language.empty()) opts.cfg.target_language = "amh";
            for (int i = 0; i < opts.fixture_archives; ++i) {
                synth_archive_config scfg;
                char id[32];
                std::snprintf(id, sizeof(id), "CC-MAIN-2023-%02d", 14 + i * 9);
                scfg.crawl_id = id;
                scfg.target_language = opts.cfg.target_language;
                scfg.seed = opts.fixture_seed + static_cast<std::uint64_t>(i) * 1000003;
                synth_archive a = write_synth_archive(opts.fixture_root, scfg);
                std::cout << a.crawl_id << ": " << a.all_rows.size() << " rows, "
                          << a.expected_strict.size() << " strict / "
                          << a.expected_lenient.size() << " lenient matches\n";
            }
            return exit_ok;
        });
    }
    if (serve->parsed()) {
        return dispatch(opts, [&]() -> int {
            mock_cc_server server(opts.serve_root);
            std::string base = server.start(opts.serve_port);
            std::cout << "serving " << opts.serve_root << " at " << base
                      << " (set UNICRAWL_CC_BASE=" << base << ")\n"
                      << "press Ctrl-C to stop\n";
            // Block until interrupted.
            std::signal(SIGINT, [](int) { std::exit(0); });
            while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
        });
    }
    return exit_config;
}
