// Command line front end: identification runs, stage profiling, workflow
// template handling and the benchmark harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sid/bench.hpp"
#include "sid/dagflow.hpp"
#include "sid/executor.hpp"
#include "sid/n4sid.hpp"
#include "sid/plant.hpp"
#include "sid/sid_tasks.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw sid::Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw sid::Error("cannot open " + path.string() + " for writing");
    out << text;
}

struct IdentifyArgs {
    std::string input;
    long long N = 10;
    long long j = 1000;
    std::optional<long long> order;
    double order_tol = 1e-6;
    long long block_width = 0;
    bool use_mat = false;
    std::optional<int> mpt;
    int nodes = 2;
    int cpus = 16;
    double latency_ms = 0.0;
    std::string out;
    std::string dump_dir;
};

int run_identify(const IdentifyArgs& args) {
    sid::SidConfig cfg;
    cfg.N = args.N;
    cfg.j = args.j;
    cfg.order_tol = args.order_tol;
    if (args.order) cfg.order = static_cast<sid::Index>(*args.order);
    if (args.use_mat || args.block_width > 0) {
        cfg.svd_mode = sid::SvdStageMode::BlockMerge;
        cfg.svd_block_width = args.block_width;
    }

    std::string doc;
    if (args.mpt) {
        // Distributed route: build the workflow, point it at the CSV, run it.
        sid::WorkflowDag dag = sid::build_sid_workflow(*args.mpt, cfg);
        dag = sid::with_param(std::move(dag), "task-ini", "csv", args.input);
        sid::validate_dag(dag);

        std::vector<sid::NodeSpec> nodes;
        for (int i = 0; i < args.nodes; ++i) {
            nodes.push_back({"node-" + std::to_string(i + 1), static_cast<double>(args.cpus)});
        }
        sid::BlobStore store;
        sid::RunOptions opts;
        opts.run_id = "identify";
        opts.latency_ms = args.latency_ms;
        const sid::RunReport report =
            sid::run_workflow(dag, nodes, store, sid::sid_task_bodies(), opts);
        if (!report.ok) throw sid::TaskFailed(report.failure);

        const sid::WorkflowModel wf = sid::read_workflow_model(store, opts.run_id);
        sid::IdentifyResult result;
        result.model = wf.model;
        result.order = wf.order;
        result.diagnostics.singular_values = wf.singular_values;
        result.diagnostics.residual = wf.residual;
        doc = sid::model_to_json(result);
        if (!args.dump_dir.empty()) store.dump_namespace(opts.run_id, args.dump_dir);
    } else {
        const sid::IoRecord rec = sid::read_csv(std::filesystem::path(args.input));
        const sid::IdentifyResult result = sid::identify(rec, cfg);
        doc = sid::model_to_json(result);
        if (!args.dump_dir.empty()) {
            sid::BlobStore store;
            const sid::HankelSet h = sid::build_hankel_set(rec, cfg.N, cfg.j);
            store.put({"identify", "Uf"}, h.Uf);
            store.put({"identify", "Yf"}, h.Yf);
            store.put({"identify", "Wp"}, h.Wp);
            store.dump_namespace("identify", args.dump_dir);
        }
    }

    if (args.out.empty()) {
        std::cout << doc;
    } else {
        write_file(args.out, doc);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subspace identification with a workflow-structured distributed SVD"};
    app.require_subcommand(1);

    IdentifyArgs id_args;
    auto* identify = app.add_subcommand("identify", "Identify a model from CSV data");
    identify->add_option("--input", id_args.input, "CSV record (header u1..um,y1..yl)")
        ->required();
    identify->add_option("--N", id_args.N, "Hankel block rows");
    identify->add_option("--j", id_args.j, "Hankel columns");
    long long forced_order = 0;
    auto* order_opt = identify->add_option("--order", forced_order, "Force the model order");
    identify->add_option("--order-tol", id_args.order_tol, "Relative order threshold");
    identify->add_option("--svd-block-width", id_args.block_width,
                         "Use the block-merge SVD with this column width");
    identify->add_flag("--mat", id_args.use_mat, "Use the block-merge SVD stage");
    int mpt = 0;
    auto* mpt_opt = identify->add_option(
        "--mpt", mpt, "Run as a workflow with this SVD parallelism degree");
    identify->add_option("--nodes", id_args.nodes, "Simulated node count");
    identify->add_option("--cpus", id_args.cpus, "CPU units per node");
    identify->add_option("--latency-ms", id_args.latency_ms, "Per-edge transfer latency");
    identify->add_option("--out", id_args.out, "Write the model JSON here");
    identify->add_option("--dump-blobs", id_args.dump_dir,
                         "Debug: dump intermediate blobs to this directory");

    struct {
        long long L = 1119;
        long long channels = 1;
        unsigned long long seed = 1;
        std::string out;
    } sim_args;
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a white-noise-excited record of the built-in plant");
    simulate->add_option("--L", sim_args.L, "Record length");
    simulate->add_option("--seed", sim_args.seed, "Excitation seed");
    simulate->add_option("--out", sim_args.out, "CSV output path")->required();

    struct {
        long long N = 50;
        long long j = 10000;
        int repeats = 20;
        unsigned long long seed = 1;
        std::string out;
    } prof_args;
    auto* profile = app.add_subcommand("profile", "Per-stage timing of the sequential pipeline");
    profile->add_option("--N", prof_args.N, "Hankel block rows");
    profile->add_option("--j", prof_args.j, "Hankel columns");
    profile->add_option("--repeats", prof_args.repeats, "Monte Carlo repetitions");
    profile->add_option("--seed", prof_args.seed, "Base seed");
    profile->add_option("--out", prof_args.out, "Write the profile JSON here");

    struct {
        std::string config;
        std::string out_dir = "report";
    } bench_args;
    auto* bench = app.add_subcommand("bench", "Baseline-versus-workflow comparison campaign");
    bench->add_option("--config", bench_args.config, "ExperimentConfig JSON file")->required();
    bench->add_option("--out", bench_args.out_dir, "Report output directory");

    auto* workflow = app.add_subcommand("workflow", "Workflow template operations");
    workflow->require_subcommand(1);

    struct {
        int mpt = 10;
        long long N = 10;
        long long j = 1000;
        std::string out;
    } emit_args;
    auto* emit = workflow->add_subcommand("emit", "Emit the identification workflow template");
    emit->add_option("--mpt", emit_args.mpt, "SVD parallelism degree");
    emit->add_option("--N", emit_args.N, "Hankel block rows");
    emit->add_option("--j", emit_args.j, "Hankel columns");
    emit->add_option("--out", emit_args.out, "Template output path");

    std::string validate_file;
    auto* validate = workflow->add_subcommand("validate", "Validate a workflow template");
    validate->add_option("file", validate_file, "Template path")->required();

    struct {
        std::string file;
        int nodes = 4;
        int cpus = 16;
        double latency_ms = 0.0;
        std::string out;
        std::string dump_dir;
    } run_args;
    auto* run = workflow->add_subcommand("run", "Execute a workflow template");
    run->add_option("file", run_args.file, "Template path")->required();
    run->add_option("--nodes", run_args.nodes, "Simulated node count");
    run->add_option("--cpus", run_args.cpus, "CPU units per node");
    run->add_option("--latency-ms", run_args.latency_ms, "Per-edge transfer latency");
    run->add_option("--out", run_args.out, "Write the run report JSON here");
    run->add_option("--dump-blobs", run_args.dump_dir,
                    "Debug: dump run blobs to this directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (identify->parsed()) {
            if (*order_opt) id_args.order = forced_order;
            if (*mpt_opt) id_args.mpt = mpt;
            return run_identify(id_args);
        }
        if (simulate->parsed()) {
            const auto u = sid::gen_excitation(sim_args.L, sim_args.channels, sim_args.seed);
            sid::write_csv(std::filesystem::path(sim_args.out),
                           sid::simulate(sid::ball_beam(), u));
            std::cout << "wrote " << sim_args.out << " (" << sim_args.L << " samples)\n";
            return 0;
        }
        if (profile->parsed()) {
            sid::ExperimentConfig cfg;
            cfg.scale = {{static_cast<sid::Index>(prof_args.N),
                          static_cast<sid::Index>(prof_args.j)}};
            cfg.repeats = prof_args.repeats;
            cfg.seed = prof_args.seed;
            const auto profiles = sid::profile_stages(cfg);
            std::cout << sid::format_profile_table(profiles);
            if (!prof_args.out.empty()) write_file(prof_args.out, sid::profile_to_json(profiles));
            return 0;
        }
        if (bench->parsed()) {
            const auto cfg = sid::config_from_json(read_file(bench_args.config));
            const auto report = sid::run_comparison(cfg);
            std::cout << sid::format_report_table(report);
            std::filesystem::create_directories(bench_args.out_dir);
            const std::filesystem::path dir(bench_args.out_dir);
            write_file(dir / "report.json", sid::report_to_json(report));
            sid::write_report_csv(report, dir / "report.csv");
            std::cout << "report written to " << bench_args.out_dir << "\n";
            return 0;
        }
        if (emit->parsed()) {
            sid::SidConfig cfg;
            cfg.N = emit_args.N;
            cfg.j = emit_args.j;
            const auto dag = sid::build_sid_workflow(emit_args.mpt, cfg);
            const auto doc = sid::emit_template(dag);
            if (emit_args.out.empty()) {
                std::cout << doc;
            } else {
                write_file(emit_args.out, doc);
            }
            return 0;
        }
        if (validate->parsed()) {
            const auto dag = sid::parse_template(read_file(validate_file));
            const auto order = sid::validate_dag(dag);
            std::cout << "valid: " << dag.tasks.size() << " tasks ("
                      << dag.count_excluding_entry() << " excluding ini), mpt "
                      << dag.mpt << ", topological order ends at " << order.back() << "\n";
            return 0;
        }
        if (run->parsed()) {
            const auto dag = sid::parse_template(read_file(run_args.file));
            sid::validate_dag(dag);
            std::vector<sid::NodeSpec> nodes;
            for (int i = 0; i < run_args.nodes; ++i) {
                nodes.push_back({"node-" + std::to_string(i + 1),
                                 static_cast<double>(run_args.cpus)});
            }
            sid::BlobStore store;
            sid::RunOptions opts;
            opts.run_id = "cli";
            opts.latency_ms = run_args.latency_ms;
            const auto report =
                sid::run_workflow(dag, nodes, store, sid::sid_task_bodies(), opts);
            const auto doc = sid::run_report_to_json(report);
            if (run_args.out.empty()) {
                std::cout << doc;
            } else {
                write_file(run_args.out, doc);
                std::cout << "makespan " << report.makespan_s << " s, report written to "
                          << run_args.out << "\n";
            }
            if (!run_args.dump_dir.empty()) store.dump_namespace("cli", run_args.dump_dir);
            if (!report.ok) {
                std::cerr << "workflow failed: " << report.failure << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
