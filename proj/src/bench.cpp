#include "sid/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sid/dagflow.hpp"
#include "sid/sid_tasks.hpp"

namespace sid {

using json = nlohmann::ordered_json;

void ExperimentConfig::validate() const {
    if (repeats < 1) throw InvalidShape("config: repeats >= 1 required");
    if (mpt < 1) throw InvalidParallelism("config: mpt >= 1 required");
    if (nodes < 1 || cpus_per_node < 1) {
        throw InvalidShape("config: nodes and cpus_per_node must be >= 1");
    }
    if (scale.empty()) throw InvalidShape("config: at least one scale point required");
    for (const auto& p : scale) {
        if (p.j < 10 * p.N) {
            throw InvalidShape("config: j >= 10N required, got N=" + std::to_string(p.N) +
                               " j=" + std::to_string(p.j));
        }
    }
}

namespace {

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

IoRecord make_record(const StateSpaceModel& model, Index N, Index j, std::uint64_t seed) {
    const Index length = 2 * N + j - 1;
    return simulate(model, gen_excitation(length, model.m(), seed));
}

}  // namespace

std::vector<StageProfile> profile_stages(const ExperimentConfig& cfg,
                                         const StateSpaceModel& model) {
    cfg.validate();
    std::vector<StageProfile> out;
    for (std::size_t pi = 0; pi < cfg.scale.size(); ++pi) {
        const ScalePoint p = cfg.scale[pi];
        SidConfig sid_cfg;
        sid_cfg.N = p.N;
        sid_cfg.j = p.j;

        identify(make_record(model, p.N, p.j, cfg.seed), sid_cfg);  // warm-up

        std::vector<double> oblique, svd, estimation, totals;
        for (int r = 0; r < cfg.repeats; ++r) {
            const auto rec = make_record(model, p.N, p.j, cfg.seed + static_cast<std::uint64_t>(r));
            const auto result = identify(rec, sid_cfg);
            oblique.push_back(result.diagnostics.oblique_ms / 1e3);
            svd.push_back(result.diagnostics.svd_ms / 1e3);
            estimation.push_back(result.diagnostics.estimation_ms / 1e3);
            totals.push_back(result.diagnostics.total_ms() / 1e3);
        }

        StageProfile prof;
        prof.point = p;
        prof.repeats = cfg.repeats;
        prof.oblique_s = mean(oblique);
        prof.svd_s = mean(svd);
        prof.estimation_s = mean(estimation);
        prof.total_s = prof.oblique_s + prof.svd_s + prof.estimation_s;
        prof.total_std_s = sample_std(totals);
        prof.oblique_pct = 100.0 * prof.oblique_s / prof.total_s;
        prof.svd_pct = 100.0 * prof.svd_s / prof.total_s;
        prof.estimation_pct = 100.0 * prof.estimation_s / prof.total_s;
        prof.major_stage = prof.oblique_pct >= prof.svd_pct
                               ? (prof.oblique_pct >= prof.estimation_pct ? "oblique projection"
                                                                          : "estimation")
                               : (prof.svd_pct >= prof.estimation_pct ? "svd" : "estimation");
        out.push_back(std::move(prof));
    }
    return out;
}

double flops_model(double m, double n, int blocks, double k) {
    if (blocks < 1) throw InvalidPartition("block count must be >= 1");
    if (static_cast<double>(blocks) > n) {
        throw InvalidPartition("more blocks than columns");
    }
    const double s = n / static_cast<double>(blocks);
    if (k > s) throw InvalidPartition("per-merge rank k must not exceed n/N");
    const double per_block = 6.0 * m * s * s + 16.0 * s * s * s;
    const double per_merge = 6.0 * m * k * k + 176.0 * k * k * k;
    return static_cast<double>(blocks) * per_block +
           static_cast<double>(blocks - 1) * per_merge;
}

double speedup(double sequential_s, double parallel_s) {
    if (!(parallel_s > 0.0)) {
        throw ZeroParallelTime("parallel time must be positive");
    }
    return sequential_s / parallel_s;
}

BenchReport run_comparison(const ExperimentConfig& cfg) {
    cfg.validate();
    const StateSpaceModel plant = ball_beam();
    const BodyMap bodies = sid_task_bodies();

    std::vector<NodeSpec> nodes;
    for (int i = 0; i < cfg.nodes; ++i) {
        nodes.push_back({"node-" + std::to_string(i + 1),
                         static_cast<double>(cfg.cpus_per_node)});
    }

    BenchReport report;
    report.config = cfg;
    for (std::size_t pi = 0; pi < cfg.scale.size(); ++pi) {
        const ScalePoint p = cfg.scale[pi];
        SidConfig sid_cfg;
        sid_cfg.N = p.N;
        sid_cfg.j = p.j;

        std::vector<double> base_totals, wf_totals;
        std::vector<double> base_oblique, base_svd, base_estimation;
        double max_sv_delta = 0.0;
        double max_markov_delta = 0.0;

        for (int r = 0; r < cfg.repeats; ++r) {
            const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
            const IoRecord rec = make_record(plant, p.N, p.j, seed);

            const IdentifyResult base = identify(rec, sid_cfg);
            base_totals.push_back(base.diagnostics.total_ms() / 1e3);
            base_oblique.push_back(base.diagnostics.oblique_ms / 1e3);
            base_svd.push_back(base.diagnostics.svd_ms / 1e3);
            base_estimation.push_back(base.diagnostics.estimation_ms / 1e3);

            WorkflowDag dag = build_sid_workflow(cfg.mpt, sid_cfg, cfg.svd_task_cpu);
            dag = with_param(std::move(dag), "task-ini", "seed", std::to_string(seed));
            validate_dag(dag);

            BlobStore store;
            RunOptions opts;
            opts.run_id = "bench-" + std::to_string(pi) + "-" + std::to_string(r);
            opts.latency_ms = cfg.latency_ms;
            const RunReport run = run_workflow(dag, nodes, store, bodies, opts);
            if (!run.ok) throw TaskFailed("workflow run failed: " + run.failure);
            wf_totals.push_back(run.post_entry_makespan_s);

            // The acceleration must not change the answers.
            const WorkflowModel wf = read_workflow_model(store, opts.run_id);
            const double s1 = base.diagnostics.singular_values.empty()
                                  ? 1.0
                                  : base.diagnostics.singular_values.front();
            const std::size_t shared = std::min(
                {static_cast<std::size_t>(base.order), wf.singular_values.size(),
                 base.diagnostics.singular_values.size()});
            for (std::size_t i = 0; i < shared; ++i) {
                max_sv_delta = std::max(
                    max_sv_delta,
                    std::abs(base.diagnostics.singular_values[i] - wf.singular_values[i]) / s1);
            }
            const auto markov_base = markov_parameters(base.model, 10);
            const auto markov_wf = markov_parameters(wf.model, 10);
            double truth_scale = 0.0;
            for (const auto& mk : markov_base) {
                truth_scale = std::max(truth_scale, mk.eigen().cwiseAbs().maxCoeff());
            }
            for (std::size_t i = 0; i < markov_base.size(); ++i) {
                const double delta =
                    (markov_base[i].eigen() - markov_wf[i].eigen()).cwiseAbs().maxCoeff();
                max_markov_delta = std::max(max_markov_delta, delta / truth_scale);
            }
        }

        ComparisonRow row;
        row.point = p;
        row.repeats = cfg.repeats;
        row.baseline_s = mean(base_totals);
        row.baseline_std_s = sample_std(base_totals);
        row.workflow_s = mean(wf_totals);
        row.workflow_std_s = sample_std(wf_totals);
        row.reduction = 1.0 - row.workflow_s / row.baseline_s;
        row.speedup = speedup(row.baseline_s, row.workflow_s);
        row.baseline_oblique_s = mean(base_oblique);
        row.baseline_svd_s = mean(base_svd);
        row.baseline_estimation_s = mean(base_estimation);
        row.max_singular_delta = max_sv_delta;
        row.max_markov_delta = max_markov_delta;
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

json scale_to_json(const std::vector<ScalePoint>& scale) {
    json arr = json::array();
    for (const auto& p : scale) arr.push_back(json{{"N", p.N}, {"j", p.j}});
    return arr;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw TemplateSyntaxError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (doc.contains("scale")) {
            cfg.scale.clear();
            for (const auto& p : doc.at("scale")) {
                cfg.scale.push_back({p.at("N").get<Index>(), p.at("j").get<Index>()});
            }
        }
        if (doc.contains("repeats")) cfg.repeats = doc.at("repeats").get<int>();
        if (doc.contains("mpt")) cfg.mpt = doc.at("mpt").get<int>();
        if (doc.contains("nodes")) cfg.nodes = doc.at("nodes").get<int>();
        if (doc.contains("cpusPerNode")) cfg.cpus_per_node = doc.at("cpusPerNode").get<int>();
        if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("latencyMs")) cfg.latency_ms = doc.at("latencyMs").get<double>();
        if (doc.contains("svdTaskCpu")) cfg.svd_task_cpu = doc.at("svdTaskCpu").get<double>();
    } catch (const json::exception& e) {
        throw TemplateSchemaError(std::string("bad config field: ") + e.what());
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["scale"] = scale_to_json(cfg.scale);
    doc["repeats"] = cfg.repeats;
    doc["mpt"] = cfg.mpt;
    doc["nodes"] = cfg.nodes;
    doc["cpusPerNode"] = cfg.cpus_per_node;
    doc["seed"] = cfg.seed;
    doc["latencyMs"] = cfg.latency_ms;
    doc["svdTaskCpu"] = cfg.svd_task_cpu;
    return doc.dump(2) + "\n";
}

std::string report_to_json(const BenchReport& report) {
    json doc;
    doc["config"] = json::parse(config_to_json(report.config));
    doc["rows"] = json::array();
    for (const auto& r : report.rows) {
        doc["rows"].push_back(json{{"N", r.point.N},
                                   {"j", r.point.j},
                                   {"repeats", r.repeats},
                                   {"baseline_s", r.baseline_s},
                                   {"baseline_std_s", r.baseline_std_s},
                                   {"workflow_s", r.workflow_s},
                                   {"workflow_std_s", r.workflow_std_s},
                                   {"reduction", r.reduction},
                                   {"speedup", r.speedup},
                                   {"baseline_oblique_s", r.baseline_oblique_s},
                                   {"baseline_svd_s", r.baseline_svd_s},
                                   {"baseline_estimation_s", r.baseline_estimation_s},
                                   {"max_singular_delta", r.max_singular_delta},
                                   {"max_markov_delta", r.max_markov_delta}});
    }
    return doc.dump(2) + "\n";
}

void write_report_csv(const BenchReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SerializationError("cannot open " + path.string() + " for writing");
    out << "N,j,repeats,baseline_s,workflow_s,reduction_pct,speedup,"
           "baseline_std_s,workflow_std_s,max_singular_delta,max_markov_delta\n";
    char buf[256];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%d,%.4f,%.4f,%.1f,%.2f,%.4f,%.4f,%.3e,%.3e\n",
                      static_cast<long long>(r.point.N), static_cast<long long>(r.point.j),
                      r.repeats, r.baseline_s, r.workflow_s, 100.0 * r.reduction, r.speedup,
                      r.baseline_std_s, r.workflow_std_s, r.max_singular_delta,
                      r.max_markov_delta);
        out << buf;
    }
}

std::string format_report_table(const BenchReport& report) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-6s %-7s %-12s %-12s %-11s %-8s\n", "N", "j",
                  "baseline(s)", "workflow(s)", "reduction", "speedup");
    out << buf;
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%-6lld %-7lld %-12.4f %-12.4f %9.1f%%  %7.2fx\n",
                      static_cast<long long>(r.point.N), static_cast<long long>(r.point.j),
                      r.baseline_s, r.workflow_s, 100.0 * r.reduction, r.speedup);
        out << buf;
    }
    return out.str();
}

std::string format_profile_table(const std::vector<StageProfile>& profiles) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-6s %-7s %-14s %-14s %-14s %-10s %s\n", "N", "j",
                  "oblique(s)", "svd(s)", "estimation(s)", "total(s)", "major stage");
    out << buf;
    for (const auto& p : profiles) {
        std::snprintf(buf, sizeof(buf),
                      "%-6lld %-7lld %.4f (%4.1f%%) %.4f (%4.1f%%) %.4f (%4.1f%%) %-10.4f %s\n",
                      static_cast<long long>(p.point.N), static_cast<long long>(p.point.j),
                      p.oblique_s, p.oblique_pct, p.svd_s, p.svd_pct, p.estimation_s,
                      p.estimation_pct, p.total_s, p.major_stage.c_str());
        out << buf;
    }
    return out.str();
}

std::string profile_to_json(const std::vector<StageProfile>& profiles) {
    json arr = json::array();
    for (const auto& p : profiles) {
        arr.push_back(json{{"N", p.point.N},
                           {"j", p.point.j},
                           {"repeats", p.repeats},
                           {"oblique_s", p.oblique_s},
                           {"svd_s", p.svd_s},
                           {"estimation_s", p.estimation_s},
                           {"total_s", p.total_s},
                           {"total_std_s", p.total_std_s},
                           {"oblique_pct", p.oblique_pct},
                           {"svd_pct", p.svd_pct},
                           {"estimation_pct", p.estimation_pct},
                           {"major_stage", p.major_stage}});
    }
    return arr.dump(2) + "\n";
}

namespace {

json matrix_to_json(const Matrix& m) {
    json arr = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    }
    return arr;
}

}  // namespace

std::string model_to_json(const IdentifyResult& result) {
    const auto& model = result.model;
    json doc;
    doc["n"] = model.n();
    doc["m"] = model.m();
    doc["l"] = model.l();
    doc["A"] = matrix_to_json(model.A);
    doc["B"] = matrix_to_json(model.B);
    doc["C"] = matrix_to_json(model.C);
    doc["D"] = matrix_to_json(model.D);
    doc["order"] = result.order;
    doc["singular_values"] = result.diagnostics.singular_values;
    doc["stage_times_ms"] = json{{"hankel", result.diagnostics.hankel_ms},
                                 {"oblique", result.diagnostics.oblique_ms},
                                 {"svd", result.diagnostics.svd_ms},
                                 {"estimation", result.diagnostics.estimation_ms}};
    doc["residual"] = result.diagnostics.residual;
    return doc.dump(2) + "\n";
}

std::string run_report_to_json(const RunReport& report) {
    json doc;
    doc["ok"] = report.ok;
    if (!report.ok) doc["failure"] = report.failure;
    doc["makespan_s"] = report.makespan_s;
    doc["post_entry_makespan_s"] = report.post_entry_makespan_s;
    doc["per_task"] = json::object();
    for (const auto& [id, info] : report.per_task) {
        doc["per_task"][id] = json{{"node", info.node},
                                   {"phase", to_string(info.phase)},
                                   {"duration_s", info.duration_s()}};
    }
    doc["per_stage_s"] = report.per_stage_s;
    doc["schedule"] = report.schedule;
    doc["events"] = json::array();
    for (const auto& e : report.events) {
        doc["events"].push_back(json{{"t_ns", e.t_ns}, {"task", e.task},
                                     {"phase", to_string(e.phase)}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace sid
