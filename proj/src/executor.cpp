#include "sid/executor.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <thread>
#include <unordered_map>

#include "thread_pool.hpp"

namespace sid {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               Clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::string to_string(TaskPhase phase) {
    switch (phase) {
        case TaskPhase::Pending: return "Pending";
        case TaskPhase::Scheduled: return "Scheduled";
        case TaskPhase::Running: return "Running";
        case TaskPhase::Completed: return "Completed";
        case TaskPhase::Failed: return "Failed";
    }
    return "?";
}

void StateTracker::record(std::int64_t t_ns, const std::string& task, TaskPhase phase) {
    std::lock_guard lock(mutex_);
    events_.push_back({t_ns, task, phase});
}

std::vector<StateEvent> StateTracker::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::map<std::string, std::string> schedule_tasks(const std::vector<TaskSpec>& tasks,
                                                  std::vector<NodeState>& nodes) {
    if (nodes.empty()) throw NoNodes("cannot schedule onto an empty cluster");
    std::map<std::string, std::string> assignment;
    for (const auto& task : tasks) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            if (nodes[i].load < nodes[best].load) best = i;
        }
        nodes[best].load += task.cpu;
        nodes[best].assigned.push_back(task.id);
        assignment[task.id] = nodes[best].id;
    }
    return assignment;
}

RunReport run_workflow(const WorkflowDag& dag, const std::vector<NodeSpec>& nodes,
                       BlobStore& store, const BodyMap& bodies,
                       const RunOptions& opts, StateTracker* tracker) {
    if (nodes.empty()) throw NoNodes("cannot run on an empty cluster");
    for (const auto& task : dag.tasks) {
        if (!bodies.contains(task.image)) {
            throw TaskFailed(task.id + ": no body registered for image " +
                             to_string(task.image));
        }
    }

    StateTracker local_tracker;
    StateTracker& log = tracker ? *tracker : local_tracker;

    // Static placement, Scheduled before anything runs.
    std::vector<NodeState> node_states;
    node_states.reserve(nodes.size());
    for (const auto& n : nodes) node_states.push_back({n.id, n.capacity, 0.0, {}});
    const auto assignment = schedule_tasks(dag.tasks, node_states);
    for (const auto& task : dag.tasks) log.record(now_ns(), task.id, TaskPhase::Scheduled);

    const std::size_t count = dag.tasks.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < count; ++i) index[dag.tasks[i].id] = i;
    std::unordered_map<std::string, std::size_t> node_index;
    for (std::size_t i = 0; i < node_states.size(); ++i) {
        node_index[node_states[i].id] = i;
    }

    std::vector<std::vector<std::size_t>> dependents(count);
    std::vector<int> remaining(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        remaining[i] = static_cast<int>(dag.tasks[i].deps.size());
        for (const auto& d : dag.tasks[i].deps) {
            auto it = index.find(d);
            if (it == index.end()) {
                throw DanglingDependency(dag.tasks[i].id + " depends on unknown task " + d);
            }
            dependents[it->second].push_back(i);
        }
    }

    std::vector<TaskRunInfo> info(count);
    for (std::size_t i = 0; i < count; ++i) {
        info[i].node = assignment.at(dag.tasks[i].id);
        info[i].phase = TaskPhase::Scheduled;
        // A request larger than its node can ever satisfy could never start.
        const auto& node = node_states[node_index.at(info[i].node)];
        if (dag.tasks[i].cpu > node.capacity) {
            throw TaskFailed(dag.tasks[i].id + ": request exceeds node capacity");
        }
    }

    std::mutex mutex;
    std::condition_variable cv;
    std::vector<double> committed(node_states.size(), 0.0);
    std::vector<std::size_t> ready;
    std::size_t finished = 0;
    bool failed = false;
    std::string failure;

    for (std::size_t i = 0; i < count; ++i) {
        if (remaining[i] == 0) ready.push_back(i);
    }

    unsigned workers = opts.workers;
    if (workers == 0) {
        workers = std::max(2u, std::thread::hardware_concurrency());
    }
    detail::ThreadPool pool(workers);

    auto fail_descendants = [&](std::size_t root) {
        // Breadth-first over dependents; caller holds the lock.
        std::vector<std::size_t> stack = {root};
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (std::size_t dep : dependents[cur]) {
                if (info[dep].phase == TaskPhase::Scheduled) {
                    info[dep].phase = TaskPhase::Failed;
                    info[dep].error = "upstream failure";
                    log.record(now_ns(), dag.tasks[dep].id, TaskPhase::Failed);
                    ++finished;
                    stack.push_back(dep);
                }
            }
        }
    };

    auto run_task = [&](std::size_t i) {
        const TaskSpec& task = dag.tasks[i];
        if (opts.latency_ms > 0.0 && !task.deps.empty()) {
            const auto delay = std::chrono::duration<double, std::milli>(
                opts.latency_ms * static_cast<double>(task.deps.size()));
            std::this_thread::sleep_for(delay);
        }
        std::string error;
        try {
            TaskContext ctx{ScopedStore(store, opts.run_id), task};
            bodies.at(task.image)(ctx);
        } catch (const std::exception& e) {
            error = e.what();
        } catch (...) {
            error = "unknown error";
        }
        {
            std::lock_guard lock(mutex);
            const std::size_t node = node_index.at(info[i].node);
            committed[node] -= task.cpu;
            info[i].end_ns = now_ns();
            ++finished;
            if (error.empty()) {
                info[i].phase = TaskPhase::Completed;
                log.record(info[i].end_ns, task.id, TaskPhase::Completed);
                for (std::size_t dep : dependents[i]) {
                    if (--remaining[dep] == 0) ready.push_back(dep);
                }
            } else {
                info[i].phase = TaskPhase::Failed;
                info[i].error = error;
                log.record(info[i].end_ns, task.id, TaskPhase::Failed);
                if (!failed) {
                    failed = true;
                    failure = task.id + ": " + error;
                }
                fail_descendants(i);
            }
        }
        cv.notify_all();
    };

    {
        std::unique_lock lock(mutex);
        std::size_t running = 0;
        for (;;) {
            if (finished == count) break;
            if (failed && running == 0) break;

            // First ready task whose node has spare capacity, list order.
            std::size_t pick = count;
            if (!failed) {
                for (std::size_t pos = 0; pos < ready.size(); ++pos) {
                    const std::size_t i = ready[pos];
                    const std::size_t node = node_index.at(info[i].node);
                    if (committed[node] + dag.tasks[i].cpu <=
                        node_states[node].capacity + 1e-12) {
                        pick = pos;
                        break;
                    }
                }
            }
            if (pick == count) {
                if (running == 0) {
                    if (failed) break;
                    throw DeadlockDetected(
                        "no runnable task but the workflow is not finished");
                }
                cv.wait(lock);
                // Recount running tasks after any completion.
                running = 0;
                for (std::size_t i = 0; i < count; ++i) {
                    if (info[i].phase == TaskPhase::Running) ++running;
                }
                continue;
            }

            const std::size_t i = ready[pick];
            ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
            const std::size_t node = node_index.at(info[i].node);
            committed[node] += dag.tasks[i].cpu;
            info[i].phase = TaskPhase::Running;
            info[i].start_ns = now_ns();
            log.record(info[i].start_ns, dag.tasks[i].id, TaskPhase::Running);
            ++running;
            pool.submit([&run_task, i] { run_task(i); });
        }
    }

    RunReport report;
    report.ok = !failed;
    report.failure = failure;
    report.events = log.events();
    std::int64_t first_start = 0;
    std::int64_t first_post_entry_start = 0;
    std::int64_t last_end = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const TaskSpec& task = dag.tasks[i];
        report.per_task[task.id] = info[i];
        report.schedule[info[i].node].push_back(task.id);
        if (info[i].start_ns == 0) continue;
        if (first_start == 0 || info[i].start_ns < first_start) {
            first_start = info[i].start_ns;
        }
        if (task.id != dag.entry_task &&
            (first_post_entry_start == 0 || info[i].start_ns < first_post_entry_start)) {
            first_post_entry_start = info[i].start_ns;
        }
        last_end = std::max(last_end, info[i].end_ns);
        report.per_stage_s[to_string(task.image)] += info[i].duration_s();
    }
    if (last_end > first_start && first_start > 0) {
        report.makespan_s = static_cast<double>(last_end - first_start) * 1e-9;
    }
    if (last_end > first_post_entry_start && first_post_entry_start > 0) {
        report.post_entry_makespan_s =
            static_cast<double>(last_end - first_post_entry_start) * 1e-9;
    }
    return report;
}

}  // namespace sid
