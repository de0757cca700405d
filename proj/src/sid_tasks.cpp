#include "sid/sid_tasks.hpp"

#include <cstdlib>
#include <string>
#include <vector>

#include "sid/hankel.hpp"
#include "sid/plant.hpp"
#include "sid/projection.hpp"
#include "sid/tsvd.hpp"

namespace sid {

namespace {

const std::string& param(const TaskSpec& task, const std::string& key) {
    auto it = task.params.find(key);
    if (it == task.params.end()) {
        throw TemplateSchemaError(task.id + ": missing param '" + key + "'");
    }
    return it->second;
}

Index param_index(const TaskSpec& task, const std::string& key) {
    return static_cast<Index>(std::stoll(param(task, key)));
}

Matrix vector_as_column(const std::vector<double>& v) {
    return Matrix(static_cast<Index>(v.size()), 1, v);
}

std::vector<double> column_as_vector(const Matrix& m) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, 0);
    return out;
}

void put_triple(ScopedStore& store, const std::string& name, const SvdTriple& t) {
    store.put(name + ".U", t.U);
    store.put(name + ".S", vector_as_column(t.S));
    store.put(name + ".V", t.V);
}

SvdTriple get_triple(const ScopedStore& store, const std::string& name) {
    SvdTriple t;
    t.U = *store.get(name + ".U");
    t.S = column_as_vector(*store.get(name + ".S"));
    t.V = *store.get(name + ".V");
    return t;
}

void body_ini(TaskContext& ctx) {
    const Index N = param_index(ctx.task, "N");
    const Index j = param_index(ctx.task, "j");

    IoRecord rec;
    if (auto it = ctx.task.params.find("csv"); it != ctx.task.params.end()) {
        rec = read_csv(it->second);
    } else {
        const auto seed = static_cast<std::uint64_t>(std::stoull(param(ctx.task, "seed")));
        const Index length = 2 * N + j - 1;
        rec = simulate(ball_beam(), gen_excitation(length, 1, seed));
    }

    const HankelSet h = build_hankel_set(rec, N, j);
    const auto [yi, ui] = extract_YiUi(rec, N, j);
    ctx.store.put("Uf", h.Uf);
    ctx.store.put("Yf", h.Yf);
    ctx.store.put("Wp", h.Wp);
    ctx.store.put("UfMinus", h.UfMinus);
    ctx.store.put("YfMinus", h.YfMinus);
    ctx.store.put("WpPlus", h.WpPlus);
    ctx.store.put("Yi", yi);
    ctx.store.put("Ui", ui);
}

void body_a(TaskContext& ctx) {
    const auto yf = ctx.store.get("Yf");
    const auto uf = ctx.store.get("Uf");
    const auto wp = ctx.store.get("Wp");
    const Matrix oi = oblique_project(*yf, *uf, *wp);

    const Index slices = param_index(ctx.task, "slices");
    const Index j = oi.cols();
    if (slices < 1 || slices > j) {
        throw InvalidShape(ctx.task.id + ": cannot cut " + std::to_string(j) +
                           " columns into " + std::to_string(slices) + " slices");
    }
    // Balanced partition: the first j mod P slices get one extra column.
    const Index base = j / slices;
    const Index extra = j % slices;
    Index offset = 0;
    for (Index k = 0; k < slices; ++k) {
        const Index width = base + (k < extra ? 1 : 0);
        ctx.store.put("O_i.slice." + std::to_string(k), col_slice(oi, offset, width));
        offset += width;
    }
    ctx.store.put("O_i", oi);
}

void body_b(TaskContext& ctx) {
    const auto yfm = ctx.store.get("YfMinus");
    const auto ufm = ctx.store.get("UfMinus");
    const auto wpp = ctx.store.get("WpPlus");
    ctx.store.put("O_im1", oblique_project(*yfm, *ufm, *wpp));
}

void body_c(TaskContext& ctx) {
    const auto slice = ctx.store.get("O_i.slice." + param(ctx.task, "slice"));
    put_triple(ctx.store, ctx.task.id, do_truncate(svd_dense(*slice)));
}

void body_d(TaskContext& ctx) {
    if (ctx.task.deps.size() != 2) {
        throw TemplateSchemaError(ctx.task.id + ": merge task needs exactly two deps");
    }
    const SvdTriple left = get_triple(ctx.store, ctx.task.deps[0]);
    const SvdTriple right = get_triple(ctx.store, ctx.task.deps[1]);
    put_triple(ctx.store, ctx.task.id, block_merge(left, right));
}

void body_e(TaskContext& ctx) {
    const auto oi = ctx.store.get("O_i");
    const auto oim1 = ctx.store.get("O_im1");

    // Finish the merge tree: operands are dep task ids or $k references to
    // earlier folded results.
    std::vector<SvdTriple> folded;
    auto resolve = [&](const std::string& ref) -> SvdTriple {
        if (ref.starts_with("$")) {
            return folded.at(static_cast<std::size_t>(std::stoul(ref.substr(1))));
        }
        return get_triple(ctx.store, ref);
    };
    const std::string& fold = param(ctx.task, "fold");
    std::size_t pos = 0;
    while (pos < fold.size()) {
        const std::size_t end = fold.find(';', pos);
        const std::string step = fold.substr(pos, end == std::string::npos ? end : end - pos);
        pos = end == std::string::npos ? fold.size() : end + 1;
        const std::size_t comma = step.find(',');
        if (comma == std::string::npos) {
            throw TemplateSchemaError(ctx.task.id + ": malformed fold step '" + step + "'");
        }
        folded.push_back(
            block_merge(resolve(step.substr(0, comma)), resolve(step.substr(comma + 1))));
    }
    const SvdTriple final_triple = resolve(param(ctx.task, "final"));

    // Order selection on the merged spectrum.
    const double order_tol = std::strtod(param(ctx.task, "order_tol").c_str(), nullptr);
    Index order = 0;
    if (auto it = ctx.task.params.find("order"); it != ctx.task.params.end()) {
        order = static_cast<Index>(std::stoll(it->second));
        if (order > final_triple.rank()) {
            throw InvalidShape(ctx.task.id + ": forced order exceeds the merged rank");
        }
    } else {
        if (final_triple.S.empty() || final_triple.S.front() <= 0.0) {
            throw OrderZero("all singular values are zero");
        }
        const double cutoff = order_tol * final_triple.S.front();
        for (double s : final_triple.S) {
            if (s >= cutoff) ++order;
        }
        if (order == 0) throw OrderZero("no singular value above the order threshold");
    }

    const Index N = param_index(ctx.task, "N");
    const Index l = oi->rows() / N;
    const Matrix u1 = Matrix(RowMajorMatrix(final_triple.U.eigen().leftCols(order)));
    const std::vector<double> s1(final_triple.S.begin(), final_triple.S.begin() + order);

    const SidIntermediate inter = estimate_states(u1, s1, *oi, *oim1, N, l);
    const auto yi = ctx.store.get("Yi");
    const auto ui = ctx.store.get("Ui");
    const SolveResult solved = solve_system(inter.Xi, inter.Xip1, *yi, *ui);

    ctx.store.put("model.A", solved.model.A);
    ctx.store.put("model.B", solved.model.B);
    ctx.store.put("model.C", solved.model.C);
    ctx.store.put("model.D", solved.model.D);
    ctx.store.put("model.S", vector_as_column(final_triple.S));
    ctx.store.put("model.order", Matrix(1, 1, {static_cast<double>(order)}));
    ctx.store.put("model.residual", Matrix(1, 1, {solved.residual}));
}

}  // namespace

BodyMap sid_task_bodies() {
    return BodyMap{
        {ImageKind::Ini, body_ini},
        {ImageKind::A, body_a},
        {ImageKind::B, body_b},
        {ImageKind::C, body_c},
        {ImageKind::D, body_d},
        {ImageKind::E, body_e},
    };
}

WorkflowModel read_workflow_model(const BlobStore& store, const std::string& ns) {
    WorkflowModel out;
    out.model.A = *store.get({ns, "model.A"});
    out.model.B = *store.get({ns, "model.B"});
    out.model.C = *store.get({ns, "model.C"});
    out.model.D = *store.get({ns, "model.D"});
    out.singular_values = column_as_vector(*store.get({ns, "model.S"}));
    out.order = static_cast<Index>((*store.get({ns, "model.order"}))(0, 0));
    out.residual = (*store.get({ns, "model.residual"}))(0, 0);
    return out;
}

}  // namespace sid
