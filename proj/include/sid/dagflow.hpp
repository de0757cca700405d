#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sid/n4sid.hpp"

namespace sid {

/// The reusable task images of the identification workflow.
///   Ini  - prepare history data and Hankel blocks
///   A    - oblique projection O_i, sliced column-wise for the SVD tasks
///   B    - shifted oblique projection O_{i-1}
///   C    - truncated SVD of one column slice
///   D    - pairwise merge-and-truncate of two upstream factorizations
///   E    - final merges, order selection and the system solve
enum class ImageKind { Ini, A, B, C, D, E };

std::string to_string(ImageKind kind);
ImageKind image_from_string(const std::string& name);

struct TaskSpec {
    std::string id;
    ImageKind image = ImageKind::Ini;
    int level = 0;
    std::vector<std::string> deps;
    std::map<std::string, std::string> params;
    double cpu = 1.0;  // resource request, CPU units

    bool operator==(const TaskSpec&) const = default;
};

/// Abstract workflow template: tasks with dependency edges, acyclic, one
/// entry (Ini) and one sink (E). mpt is the maximal number of tasks sharing
/// a level, i.e. the peak concurrency the structure admits.
struct WorkflowDag {
    std::vector<TaskSpec> tasks;  // template order
    int mpt = 0;
    std::string entry_task;
    std::string export_task;

    const TaskSpec* find(const std::string& id) const;
    std::size_t count_excluding_entry() const;
    std::vector<std::pair<std::string, std::string>> edges() const;

    bool operator==(const WorkflowDag&) const = default;
};

/// Emits the identification workflow for an SVD parallelism degree P:
/// Ini -> {task-1 (A), task-2 (B)} -> P slice-SVD tasks (C) -> the pairwise
/// merge tree as standalone D tasks, except the final two merges which fold
/// into the export task -> export (E). Excluding Ini the task count is
/// 2 + P + max(P-3, 0) + 1.
WorkflowDag build_sid_workflow(int parallelism, const SidConfig& cfg,
                               double svd_task_cpu = 1.0);

/// Structural validation: unique ids, known dependencies, level
/// monotonicity, single entry and sink, consistent mpt, acyclicity.
/// Returns a topological order (template order among ready tasks).
std::vector<std::string> validate_dag(const WorkflowDag& dag);

/// Template document round-trip. The format is JSON-shaped:
/// {"version":1, "mpt":P, "tasks":[{id, image, level, deps, params, cpu}]}.
WorkflowDag parse_template(const std::string& text);
std::string emit_template(const WorkflowDag& dag);

/// Copy of the workflow with one task's parameter overridden.
WorkflowDag with_param(WorkflowDag dag, const std::string& task_id,
                       const std::string& key, const std::string& value);

}  // namespace sid
