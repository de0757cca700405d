#include "sid/dagflow.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sid/tsvd.hpp"

namespace sid {

using json = nlohmann::ordered_json;

std::string to_string(ImageKind kind) {
    switch (kind) {
        case ImageKind::Ini: return "ini";
        case ImageKind::A: return "A";
        case ImageKind::B: return "B";
        case ImageKind::C: return "C";
        case ImageKind::D: return "D";
        case ImageKind::E: return "E";
    }
    return "?";
}

ImageKind image_from_string(const std::string& name) {
    if (name == "ini") return ImageKind::Ini;
    if (name == "A") return ImageKind::A;
    if (name == "B") return ImageKind::B;
    if (name == "C") return ImageKind::C;
    if (name == "D") return ImageKind::D;
    if (name == "E") return ImageKind::E;
    throw TemplateSchemaError("unknown image kind: " + name);
}

const TaskSpec* WorkflowDag::find(const std::string& id) const {
    for (const auto& t : tasks) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

std::size_t WorkflowDag::count_excluding_entry() const {
    std::size_t n = 0;
    for (const auto& t : tasks) {
        if (t.image != ImageKind::Ini) ++n;
    }
    return n;
}

std::vector<std::pair<std::string, std::string>> WorkflowDag::edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : tasks) {
        for (const auto& d : t.deps) out.emplace_back(d, t.id);
    }
    return out;
}

namespace {

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int max_level_width(const std::vector<TaskSpec>& tasks) {
    std::map<int, int> width;
    for (const auto& t : tasks) {
        if (t.image != ImageKind::Ini) ++width[t.level];
    }
    int mpt = 0;
    for (const auto& [_, w] : width) mpt = std::max(mpt, w);
    return mpt;
}

}  // namespace

WorkflowDag build_sid_workflow(int parallelism, const SidConfig& cfg,
                               double svd_task_cpu) {
    if (parallelism < 1) {
        throw InvalidParallelism("SVD parallelism must be >= 1");
    }
    cfg.validate();
    const int p = parallelism;

    WorkflowDag dag;
    dag.entry_task = "task-ini";

    TaskSpec ini;
    ini.id = "task-ini";
    ini.image = ImageKind::Ini;
    ini.level = 0;
    ini.params = {{"system", "ball-beam"},
                  {"seed", "1"},
                  {"N", std::to_string(cfg.N)},
                  {"j", std::to_string(cfg.j)}};
    dag.tasks.push_back(std::move(ini));

    TaskSpec a;
    a.id = "task-1";
    a.image = ImageKind::A;
    a.level = 1;
    a.deps = {"task-ini"};
    a.params = {{"slices", std::to_string(p)}};
    dag.tasks.push_back(std::move(a));

    TaskSpec b;
    b.id = "task-2";
    b.image = ImageKind::B;
    b.level = 1;
    b.deps = {"task-ini"};
    dag.tasks.push_back(std::move(b));

    for (int k = 0; k < p; ++k) {
        TaskSpec c;
        c.id = "task-" + std::to_string(3 + k);
        c.image = ImageKind::C;
        c.level = 2;
        c.deps = {"task-1"};
        c.params = {{"slice", std::to_string(k)}};
        c.cpu = svd_task_cpu;
        dag.tasks.push_back(std::move(c));
    }

    // The merge tree over the P slice factorizations. The last two merges
    // run inside the export task; the rest become standalone D tasks.
    const auto schedule = merge_schedule(p);
    const int merges = static_cast<int>(schedule.size());
    const int folded = std::min(2, merges);
    const int standalone = merges - folded;

    // producer[slot] = task id of the triple, or "$k" for the k-th folded merge
    std::vector<std::string> producer(static_cast<std::size_t>(p + merges));
    for (int i = 0; i < p; ++i) {
        producer[static_cast<std::size_t>(i)] = "task-" + std::to_string(3 + i);
    }

    std::vector<std::string> fold_steps;
    std::vector<std::string> fold_dep_ids;  // task ids the folded merges consume
    for (int t = 0; t < merges; ++t) {
        const MergeStep& step = schedule[static_cast<std::size_t>(t)];
        const std::string& left = producer[static_cast<std::size_t>(step.left)];
        const std::string& right = producer[static_cast<std::size_t>(step.right)];
        if (t < standalone) {
            TaskSpec d;
            d.id = "task-" + std::to_string(p + 3 + t);
            d.image = ImageKind::D;
            d.level = 2 + step.level;
            d.deps = {left, right};
            d.cpu = svd_task_cpu;
            producer[static_cast<std::size_t>(step.out)] = d.id;
            dag.tasks.push_back(std::move(d));
        } else {
            for (const auto& op : {left, right}) {
                if (!op.starts_with("$")) fold_dep_ids.push_back(op);
            }
            fold_steps.push_back(left + "," + right);
            producer[static_cast<std::size_t>(step.out)] =
                "$" + std::to_string(t - standalone);
        }
    }

    const std::string final_ref = producer[static_cast<std::size_t>(p + merges - 1)];
    if (merges == 0 && !final_ref.starts_with("$")) fold_dep_ids.push_back(final_ref);

    TaskSpec e;
    e.id = "task-" + std::to_string(p + 3 + standalone);
    e.image = ImageKind::E;
    e.deps = {"task-1", "task-2"};
    std::sort(fold_dep_ids.begin(), fold_dep_ids.end(), [](const auto& x, const auto& y) {
        return std::stoi(x.substr(5)) < std::stoi(y.substr(5));
    });
    for (const auto& id : fold_dep_ids) e.deps.push_back(id);
    std::string fold;
    for (const auto& s : fold_steps) {
        if (!fold.empty()) fold += ";";
        fold += s;
    }
    e.params = {{"fold", fold},
                {"final", final_ref},
                {"N", std::to_string(cfg.N)},
                {"order_tol", format_param(cfg.order_tol)}};
    if (cfg.order) e.params["order"] = std::to_string(*cfg.order);
    int e_level = 0;
    for (const auto& d : e.deps) e_level = std::max(e_level, dag.find(d)->level);
    e.level = e_level + 1;
    dag.export_task = e.id;
    dag.tasks.push_back(std::move(e));

    dag.mpt = max_level_width(dag.tasks);
    return dag;
}

std::vector<std::string> validate_dag(const WorkflowDag& dag) {
    if (dag.tasks.empty()) throw TemplateSchemaError("workflow has no tasks");

    std::unordered_map<std::string, const TaskSpec*> by_id;
    for (const auto& t : dag.tasks) {
        if (t.id.empty()) throw TemplateSchemaError("task with empty id");
        if (!by_id.emplace(t.id, &t).second) {
            throw TemplateSchemaError("duplicate task id: " + t.id);
        }
    }

    for (const auto& t : dag.tasks) {
        if (t.cpu <= 0.0) throw TemplateSchemaError(t.id + ": cpu must be positive");
        for (const auto& d : t.deps) {
            if (!by_id.contains(d)) {
                throw DanglingDependency(t.id + " depends on unknown task " + d);
            }
        }
    }

    // Kahn's algorithm, template order among ready tasks.
    std::unordered_map<std::string, int> remaining;
    for (const auto& t : dag.tasks) remaining[t.id] = static_cast<int>(t.deps.size());
    std::vector<std::string> order;
    order.reserve(dag.tasks.size());
    std::unordered_set<std::string> done;
    bool progressed = true;
    while (order.size() < dag.tasks.size() && progressed) {
        progressed = false;
        for (const auto& t : dag.tasks) {
            if (done.contains(t.id) || remaining[t.id] != 0) continue;
            order.push_back(t.id);
            done.insert(t.id);
            for (const auto& other : dag.tasks) {
                if (std::find(other.deps.begin(), other.deps.end(), t.id) !=
                    other.deps.end()) {
                    --remaining[other.id];
                }
            }
            progressed = true;
        }
    }
    if (order.size() != dag.tasks.size()) {
        throw CycleDetected("workflow dependencies contain a cycle");
    }

    int entries = 0;
    int exports = 0;
    for (const auto& t : dag.tasks) {
        if (t.image == ImageKind::Ini) ++entries;
        if (t.image == ImageKind::E) ++exports;
        for (const auto& d : t.deps) {
            if (by_id.at(d)->level >= t.level) {
                throw TemplateSchemaError(t.id + ": dependency " + d +
                                          " does not have a smaller level");
            }
        }
    }
    if (entries != 1) throw TemplateSchemaError("workflow must have exactly one ini task");
    if (exports != 1) throw TemplateSchemaError("workflow must have exactly one export task");

    std::unordered_map<std::string, int> dependents;
    for (const auto& t : dag.tasks) {
        for (const auto& d : t.deps) ++dependents[d];
    }
    int sinks = 0;
    for (const auto& t : dag.tasks) {
        if (dependents[t.id] == 0) ++sinks;
    }
    if (sinks != 1) throw TemplateSchemaError("workflow must have exactly one sink");

    if (dag.mpt != max_level_width(dag.tasks)) {
        throw TemplateSchemaError("declared mpt does not match the maximal level width");
    }
    return order;
}

std::string emit_template(const WorkflowDag& dag) {
    json doc;
    doc["version"] = 1;
    doc["mpt"] = dag.mpt;
    doc["tasks"] = json::array();
    for (const auto& t : dag.tasks) {
        json jt;
        jt["id"] = t.id;
        jt["image"] = to_string(t.image);
        jt["level"] = t.level;
        jt["deps"] = t.deps;
        jt["params"] = t.params;
        jt["cpu"] = t.cpu;
        doc["tasks"].push_back(std::move(jt));
    }
    return doc.dump(2) + "\n";
}

WorkflowDag parse_template(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw TemplateSyntaxError(std::string("template is not valid JSON: ") + e.what());
    }

    auto require = [](const json& obj, const char* field, const std::string& where) -> const json& {
        if (!obj.contains(field)) {
            throw TemplateSchemaError(where + ": missing '" + field + "'");
        }
        return obj.at(field);
    };

    if (!doc.is_object()) throw TemplateSchemaError("template root must be an object");
    if (require(doc, "version", "template").get<int>() != 1) {
        throw TemplateSchemaError("unsupported template version");
    }

    WorkflowDag dag;
    dag.mpt = require(doc, "mpt", "template").get<int>();
    const json& tasks = require(doc, "tasks", "template");
    if (!tasks.is_array()) throw TemplateSchemaError("'tasks' must be an array");

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const json& jt = tasks[i];
        const std::string where = "task #" + std::to_string(i);
        try {
            TaskSpec t;
            t.id = require(jt, "id", where).get<std::string>();
            t.image = image_from_string(require(jt, "image", where).get<std::string>());
            t.level = require(jt, "level", where).get<int>();
            for (const auto& d : require(jt, "deps", where)) {
                t.deps.push_back(d.get<std::string>());
            }
            for (const auto& [k, v] : require(jt, "params", where).items()) {
                t.params[k] = v.get<std::string>();
            }
            t.cpu = require(jt, "cpu", where).get<double>();
            if (t.image == ImageKind::Ini) dag.entry_task = t.id;
            if (t.image == ImageKind::E) dag.export_task = t.id;
            dag.tasks.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw TemplateSchemaError(where + ": " + e.what());
        }
    }
    return dag;
}

WorkflowDag with_param(WorkflowDag dag, const std::string& task_id,
                       const std::string& key, const std::string& value) {
    for (auto& t : dag.tasks) {
        if (t.id == task_id) {
            t.params[key] = value;
            return dag;
        }
    }
    throw DanglingDependency("no task with id " + task_id);
}

}  // namespace sid
