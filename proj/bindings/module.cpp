// Python bindings for the identification engine: numpy-facing wrappers over
// the matrix type plus the main pipeline, decomposition and workflow entry
// points.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "sid/bench.hpp"
#include "sid/dagflow.hpp"
#include "sid/executor.hpp"
#include "sid/hankel.hpp"
#include "sid/n4sid.hpp"
#include "sid/plant.hpp"
#include "sid/projection.hpp"
#include "sid/sid_tasks.hpp"
#include "sid/tsvd.hpp"

namespace py = pybind11;

namespace {

sid::Matrix matrix_from_numpy(const py::array_t<double>& array) {
    const auto buf = array.request();
    if (buf.ndim != 2) throw sid::InvalidShape("expected a 2-D float array");
    auto checked = py::array_t<double, py::array::c_style | py::array::forcecast>(array);
    const auto info = checked.request();
    std::vector<double> data(static_cast<std::size_t>(info.shape[0] * info.shape[1]));
    std::memcpy(data.data(), info.ptr, data.size() * sizeof(double));
    return sid::Matrix(static_cast<sid::Index>(info.shape[0]),
                       static_cast<sid::Index>(info.shape[1]), std::move(data));
}

py::array_t<double> matrix_to_numpy(const sid::Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::memcpy(out.request().ptr, m.data(),
                sizeof(double) * static_cast<std::size_t>(m.size()));
    return out;
}

sid::StateSpaceModel model_from_numpy(const py::array_t<double>& a,
                                      const py::array_t<double>& b,
                                      const py::array_t<double>& c,
                                      const py::array_t<double>& d) {
    sid::StateSpaceModel model{matrix_from_numpy(a), matrix_from_numpy(b),
                               matrix_from_numpy(c), matrix_from_numpy(d)};
    model.validate();
    return model;
}

py::dict model_to_dict(const sid::StateSpaceModel& model) {
    py::dict out;
    out["A"] = matrix_to_numpy(model.A);
    out["B"] = matrix_to_numpy(model.B);
    out["C"] = matrix_to_numpy(model.C);
    out["D"] = matrix_to_numpy(model.D);
    return out;
}

py::tuple triple_to_tuple(const sid::SvdTriple& t) {
    return py::make_tuple(matrix_to_numpy(t.U), py::cast(t.S), matrix_to_numpy(t.V));
}

sid::SidConfig make_config(sid::Index N, sid::Index j, std::optional<sid::Index> order,
                           double order_tol, sid::Index svd_block_width) {
    sid::SidConfig cfg;
    cfg.N = N;
    cfg.j = j;
    cfg.order = order;
    cfg.order_tol = order_tol;
    if (svd_block_width > 0) {
        cfg.svd_mode = sid::SvdStageMode::BlockMerge;
        cfg.svd_block_width = svd_block_width;
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Subspace identification with a workflow-structured distributed SVD";

    py::register_exception<sid::Error>(m, "SidError");

    m.def("ball_beam", [] { return model_to_dict(sid::ball_beam()); },
          "The built-in marginally stable two-state plant");

    m.def(
        "simulate",
        [](const py::array_t<double>& a, const py::array_t<double>& b,
           const py::array_t<double>& c, const py::array_t<double>& d,
           const py::array_t<double>& u) {
            const auto rec = sid::simulate(model_from_numpy(a, b, c, d),
                                           matrix_from_numpy(u));
            return py::make_tuple(matrix_to_numpy(rec.u), matrix_to_numpy(rec.y));
        },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"), py::arg("u"),
        "Run the state recurrences on an L x m input; returns (u, y)");

    m.def(
        "gen_excitation",
        [](sid::Index length, sid::Index channels, std::uint64_t seed) {
            return matrix_to_numpy(sid::gen_excitation(length, channels, seed));
        },
        py::arg("length"), py::arg("channels") = 1, py::arg("seed") = 1,
        "Reproducible zero-mean unit-variance white excitation");

    m.def(
        "markov_parameters",
        [](const py::array_t<double>& a, const py::array_t<double>& b,
           const py::array_t<double>& c, const py::array_t<double>& d, int count) {
            py::list out;
            for (const auto& mk :
                 sid::markov_parameters(model_from_numpy(a, b, c, d), count)) {
                out.append(matrix_to_numpy(mk));
            }
            return out;
        },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"), py::arg("count") = 10);

    m.def(
        "build_block_hankel",
        [](const py::array_t<double>& series, sid::Index start, sid::Index block_rows,
           sid::Index j) {
            return matrix_to_numpy(
                sid::build_block_hankel(matrix_from_numpy(series), start, block_rows, j));
        },
        py::arg("series"), py::arg("start"), py::arg("block_rows"), py::arg("j"));

    m.def(
        "pinv",
        [](const py::array_t<double>& a, double rel_tol) {
            return matrix_to_numpy(sid::pinv(matrix_from_numpy(a), rel_tol));
        },
        py::arg("a"), py::arg("rel_tol") = -1.0);

    m.def(
        "orth_project",
        [](const py::array_t<double>& a, const py::array_t<double>& b) {
            return matrix_to_numpy(
                sid::orth_project(matrix_from_numpy(a), matrix_from_numpy(b)));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "oblique_project",
        [](const py::array_t<double>& a, const py::array_t<double>& b,
           const py::array_t<double>& c) {
            return matrix_to_numpy(sid::oblique_project(
                matrix_from_numpy(a), matrix_from_numpy(b), matrix_from_numpy(c)));
        },
        py::arg("a"), py::arg("b"), py::arg("c"));

    m.def(
        "svd_dense",
        [](const py::array_t<double>& a) {
            return triple_to_tuple(sid::svd_dense(matrix_from_numpy(a)));
        },
        py::arg("a"), "Thin SVD; returns (U, s, V)");

    m.def(
        "parallel_svd_by_cols",
        [](const py::array_t<double>& a, sid::Index col, int parallel) {
            return triple_to_tuple(
                sid::parallel_svd_by_cols(matrix_from_numpy(a), col, parallel));
        },
        py::arg("a"), py::arg("col"), py::arg("parallel") = 1,
        "Column-partitioned merge-and-truncate SVD; returns (U, s, V)");

    m.def(
        "identify",
        [](const py::array_t<double>& u, const py::array_t<double>& y, sid::Index N,
           sid::Index j, std::optional<sid::Index> order, double order_tol,
           sid::Index svd_block_width, int parallel) {
            const sid::IoRecord rec{matrix_from_numpy(u), matrix_from_numpy(y)};
            const auto res = sid::identify(
                rec, make_config(N, j, order, order_tol, svd_block_width), parallel);
            py::dict out = model_to_dict(res.model);
            out["order"] = res.order;
            out["singular_values"] = res.diagnostics.singular_values;
            out["residual"] = res.diagnostics.residual;
            out["stage_times_ms"] =
                py::dict(py::arg("hankel") = res.diagnostics.hankel_ms,
                         py::arg("oblique") = res.diagnostics.oblique_ms,
                         py::arg("svd") = res.diagnostics.svd_ms,
                         py::arg("estimation") = res.diagnostics.estimation_ms);
            return out;
        },
        py::arg("u"), py::arg("y"), py::arg("N"), py::arg("j"),
        py::arg("order") = py::none(), py::arg("order_tol") = 1e-6,
        py::arg("svd_block_width") = 0, py::arg("parallel") = 1,
        "Full identification pipeline on an input/output record");

    m.def(
        "emit_workflow",
        [](int parallelism, sid::Index N, sid::Index j) {
            sid::SidConfig cfg;
            cfg.N = N;
            cfg.j = j;
            return sid::emit_template(sid::build_sid_workflow(parallelism, cfg));
        },
        py::arg("parallelism"), py::arg("N") = 10, py::arg("j") = 1000,
        "Workflow template document for the given SVD parallelism");

    m.def(
        "validate_workflow",
        [](const std::string& text) {
            return sid::validate_dag(sid::parse_template(text));
        },
        py::arg("template_text"), "Topological order of a template document");

    m.def(
        "run_workflow",
        [](const std::string& text, int nodes, int cpus_per_node, double latency_ms) {
            const sid::WorkflowDag dag = sid::parse_template(text);
            sid::validate_dag(dag);
            std::vector<sid::NodeSpec> cluster;
            for (int i = 0; i < nodes; ++i) {
                cluster.push_back({"node-" + std::to_string(i + 1),
                                   static_cast<double>(cpus_per_node)});
            }
            sid::BlobStore store;
            sid::RunOptions opts;
            opts.run_id = "py";
            opts.latency_ms = latency_ms;
            const sid::RunReport report =
                sid::run_workflow(dag, cluster, store, sid::sid_task_bodies(), opts);
            if (!report.ok) throw sid::TaskFailed(report.failure);
            const sid::WorkflowModel wf = sid::read_workflow_model(store, "py");
            py::dict out = model_to_dict(wf.model);
            out["order"] = wf.order;
            out["singular_values"] = wf.singular_values;
            out["residual"] = wf.residual;
            out["makespan_s"] = report.makespan_s;
            out["post_entry_makespan_s"] = report.post_entry_makespan_s;
            return out;
        },
        py::arg("template_text"), py::arg("nodes") = 2, py::arg("cpus_per_node") = 16,
        py::arg("latency_ms") = 0.0,
        "Execute a workflow template on the simulated cluster");

    m.def("flops_model", &sid::flops_model, py::arg("m"), py::arg("n"), py::arg("blocks"),
          py::arg("k"), "Flop cost of the column-partitioned truncated SVD");
    m.def("speedup", &sid::speedup, py::arg("sequential_s"), py::arg("parallel_s"));

    m.def(
        "serialize_matrix",
        [](const py::array_t<double>& a) {
            const auto blob = sid::serialize_matrix(matrix_from_numpy(a));
            return py::bytes(reinterpret_cast<const char*>(blob.data()), blob.size());
        },
        py::arg("a"), "Binary blob framing used by the store and on-disk dumps");

    m.def(
        "deserialize_matrix",
        [](const py::bytes& blob) {
            const std::string_view view = blob;
            return matrix_to_numpy(sid::deserialize_matrix(std::span(
                reinterpret_cast<const std::uint8_t*>(view.data()), view.size())));
        },
        py::arg("blob"));
}
