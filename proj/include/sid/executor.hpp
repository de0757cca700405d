#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sid/blob_store.hpp"
#include "sid/dagflow.hpp"

namespace sid {

/// A simulated computing node: a pool of CPU units.
struct NodeSpec {
    std::string id;
    double capacity = 1.0;
};

/// Node bookkeeping used by the scheduler: load is the sum of the resource
/// requests committed to the node so far.
struct NodeState {
    std::string id;
    double capacity = 0.0;
    double load = 0.0;
    std::vector<std::string> assigned;
};

enum class TaskPhase { Pending, Scheduled, Running, Completed, Failed };

std::string to_string(TaskPhase phase);

/// One phase transition of one task.
struct StateEvent {
    std::int64_t t_ns = 0;
    std::string task;
    TaskPhase phase = TaskPhase::Pending;
};

/// Thread-safe transition log, readable while a run is active.
class StateTracker {
public:
    void record(std::int64_t t_ns, const std::string& task, TaskPhase phase);
    std::vector<StateEvent> events() const;

private:
    mutable std::mutex mutex_;
    std::vector<StateEvent> events_;
};

struct TaskRunInfo {
    std::string node;
    TaskPhase phase = TaskPhase::Pending;
    std::int64_t start_ns = 0;
    std::int64_t end_ns = 0;
    std::string error;

    double duration_s() const {
        return static_cast<double>(end_ns - start_ns) * 1e-9;
    }
};

struct RunReport {
    bool ok = false;
    std::string failure;  // "<task>: <cause>" of the first body failure
    double makespan_s = 0.0;
    /// Span from the first non-entry task start to the last completion;
    /// excludes data preparation, comparable to the sequential stage total.
    double post_entry_makespan_s = 0.0;
    std::map<std::string, TaskRunInfo> per_task;
    std::map<std::string, double> per_stage_s;  // image kind -> summed duration
    std::map<std::string, std::vector<std::string>> schedule;  // node -> task ids
    std::vector<StateEvent> events;
};

/// Greedy lowest-load placement: tasks are taken in list order, each goes to
/// the node with the minimal committed load (ties to the lowest node index),
/// and the load is updated immediately. Every placement is decided before
/// execution starts. Returns task id -> node id; node states are updated in
/// place. Throws NoNodes when the node list is empty.
std::map<std::string, std::string> schedule_tasks(const std::vector<TaskSpec>& tasks,
                                                  std::vector<NodeState>& nodes);

/// Namespaced store view handed to task bodies. Write-once like the store.
class ScopedStore {
public:
    ScopedStore(BlobStore& store, std::string ns)
        : store_(&store), ns_(std::move(ns)) {}

    void put(const std::string& name, Matrix m) { store_->put({ns_, name}, std::move(m)); }
    std::shared_ptr<const Matrix> get(const std::string& name) const {
        return store_->get({ns_, name});
    }
    const std::string& ns() const { return ns_; }

private:
    BlobStore* store_;
    std::string ns_;
};

struct TaskContext {
    ScopedStore store;
    const TaskSpec& task;
};

using TaskBody = std::function<void(TaskContext&)>;
using BodyMap = std::map<ImageKind, TaskBody>;

struct RunOptions {
    std::string run_id = "run";
    /// Simulated transfer cost charged once per dependency edge before a
    /// task body starts; exposes the communication overhead of fine-grained
    /// structures.
    double latency_ms = 0.0;
    unsigned workers = 0;  // 0 = hardware concurrency
};

/// Executes a validated workflow on the simulated cluster. Tasks start only
/// when all dependencies completed and their node has free capacity; all
/// data flows through the blob store under opts.run_id. A body failure marks
/// every dependent Failed and stops dispatching. Throws DeadlockDetected if
/// no progress is possible with tasks still pending (an invalid DAG).
RunReport run_workflow(const WorkflowDag& dag, const std::vector<NodeSpec>& nodes,
                       BlobStore& store, const BodyMap& bodies,
                       const RunOptions& opts = {}, StateTracker* tracker = nullptr);

}  // namespace sid
