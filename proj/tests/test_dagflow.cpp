#include <doctest.h>

#include <map>

#include "sid/dagflow.hpp"

using namespace sid;

namespace {

SidConfig cfg_small() {
    SidConfig cfg;
    cfg.N = 10;
    cfg.j = 1000;
    return cfg;
}

std::map<ImageKind, int> image_counts(const WorkflowDag& dag) {
    std::map<ImageKind, int> counts;
    for (const auto& t : dag.tasks) ++counts[t.image];
    return counts;
}

}  // namespace

TEST_CASE("builder: parallelism 10 reproduces the twenty-task structure") {
    const WorkflowDag dag = build_sid_workflow(10, cfg_small());
    CHECK(dag.count_excluding_entry() == 20);
    CHECK(dag.tasks.size() == 21);
    CHECK(dag.mpt == 10);

    const auto counts = image_counts(dag);
    CHECK(counts.at(ImageKind::Ini) == 1);
    CHECK(counts.at(ImageKind::A) == 1);
    CHECK(counts.at(ImageKind::B) == 1);
    CHECK(counts.at(ImageKind::C) == 10);
    CHECK(counts.at(ImageKind::D) == 7);
    CHECK(counts.at(ImageKind::E) == 1);

    // slice tasks are task-3..task-12 at level 2, each fed by task-1 only
    for (int k = 3; k <= 12; ++k) {
        const TaskSpec* t = dag.find("task-" + std::to_string(k));
        REQUIRE(t != nullptr);
        CHECK(t->image == ImageKind::C);
        CHECK(t->level == 2);
        CHECK(t->deps == std::vector<std::string>{"task-1"});
    }
    // merge tasks are task-13..task-19 on levels 3 and 4 with two parents
    for (int k = 13; k <= 19; ++k) {
        const TaskSpec* t = dag.find("task-" + std::to_string(k));
        REQUIRE(t != nullptr);
        CHECK(t->image == ImageKind::D);
        CHECK((t->level == 3 || t->level == 4));
        CHECK(t->deps.size() == 2);
    }
    CHECK(dag.find("task-13")->level == 3);
    CHECK(dag.find("task-18")->level == 4);

    // export fan-in of five: the two projections plus the surviving merges
    const TaskSpec* e = dag.find("task-20");
    REQUIRE(e != nullptr);
    CHECK(e->image == ImageKind::E);
    CHECK(e->level == 5);
    CHECK(e->deps == std::vector<std::string>{"task-1", "task-2", "task-17", "task-18",
                                              "task-19"});
    CHECK(dag.export_task == "task-20");
    CHECK(dag.entry_task == "task-ini");
}

TEST_CASE("builder: parallelism 2 yields the five-task structure") {
    const WorkflowDag dag = build_sid_workflow(2, cfg_small());
    CHECK(dag.count_excluding_entry() == 5);
    CHECK(dag.mpt == 2);
    const auto counts = image_counts(dag);
    CHECK(counts.at(ImageKind::C) == 2);
    CHECK(counts.count(ImageKind::D) == 0);
    const TaskSpec* e = dag.find("task-5");
    REQUIRE(e != nullptr);
    CHECK(e->image == ImageKind::E);
    CHECK(e->deps == std::vector<std::string>{"task-1", "task-2", "task-3", "task-4"});
    CHECK(e->params.at("fold") == "task-3,task-4");
    CHECK(e->params.at("final") == "$0");
}

TEST_CASE("builder: parallelism 1 degenerates to a chain") {
    const WorkflowDag dag = build_sid_workflow(1, cfg_small());
    CHECK(dag.count_excluding_entry() == 4);
    const auto counts = image_counts(dag);
    CHECK(counts.at(ImageKind::C) == 1);
    CHECK(counts.count(ImageKind::D) == 0);
    const TaskSpec* e = dag.find("task-4");
    REQUIRE(e != nullptr);
    CHECK(e->params.at("fold").empty());
    CHECK(e->params.at("final") == "task-3");
    CHECK(e->deps == std::vector<std::string>{"task-1", "task-2", "task-3"});
}

TEST_CASE("builder: task-count formula and validation over a parallelism sweep") {
    for (int p = 1; p <= 64; ++p) {
        const WorkflowDag dag = build_sid_workflow(p, cfg_small());
        const std::size_t expected =
            2 + static_cast<std::size_t>(p) + static_cast<std::size_t>(std::max(p - 3, 0)) + 1;
        CHECK(dag.count_excluding_entry() == expected);
        CHECK(dag.mpt == std::max(p, 2));
        CHECK_NOTHROW(validate_dag(dag));

        const auto counts = image_counts(dag);
        CHECK(counts.at(ImageKind::C) == p);
        if (p > 3) CHECK(counts.at(ImageKind::D) == p - 3);
    }
    CHECK_THROWS_AS(build_sid_workflow(0, cfg_small()), InvalidParallelism);
}

TEST_CASE("validate: topological order ends at the export task") {
    const WorkflowDag dag = build_sid_workflow(10, cfg_small());
    const auto order = validate_dag(dag);
    CHECK(order.size() == 21);
    CHECK(order.front() == "task-ini");
    CHECK(order.back() == "task-20");
}

TEST_CASE("validate: rejects cycles, dangling deps and broken structure") {
    WorkflowDag dag = build_sid_workflow(2, cfg_small());

    WorkflowDag cyclic = dag;
    // a 2-cycle between the projections
    cyclic.tasks[1].deps.push_back("task-2");
    cyclic.tasks[2].deps.push_back("task-1");
    CHECK_THROWS_AS(validate_dag(cyclic), CycleDetected);

    WorkflowDag bad_levels = dag;
    bad_levels.tasks[3].level = 1;  // slice task on the projection level
    CHECK_THROWS_AS(validate_dag(bad_levels), TemplateSchemaError);

    WorkflowDag dangling = dag;
    dangling.tasks.back().deps.push_back("task-99");
    CHECK_THROWS_AS(validate_dag(dangling), DanglingDependency);

    WorkflowDag bad_mpt = dag;
    bad_mpt.mpt = 7;
    CHECK_THROWS_AS(validate_dag(bad_mpt), TemplateSchemaError);

    WorkflowDag two_sinks = dag;
    two_sinks.tasks[2].deps = {"task-ini"};  // keep B, detach it from E
    auto& e_task = two_sinks.tasks.back();
    e_task.deps = {"task-1", "task-3", "task-4"};
    CHECK_THROWS_AS(validate_dag(two_sinks), TemplateSchemaError);
}

TEST_CASE("pure cycle without levels raises CycleDetected") {
    WorkflowDag dag;
    dag.mpt = 1;
    TaskSpec ini;
    ini.id = "task-ini";
    ini.image = ImageKind::Ini;
    ini.level = 0;
    TaskSpec x;
    x.id = "x";
    x.image = ImageKind::C;
    x.level = 1;
    x.deps = {"y", "task-ini"};
    TaskSpec y;
    y.id = "y";
    y.image = ImageKind::C;
    y.level = 1;
    y.deps = {"x"};
    TaskSpec e;
    e.id = "e";
    e.image = ImageKind::E;
    e.level = 2;
    e.deps = {"x", "y"};
    dag.tasks = {ini, x, y, e};
    dag.entry_task = "task-ini";
    dag.export_task = "e";
    dag.mpt = 2;
    // x <-> y at the same level slips past the level check but not Kahn
    CHECK_THROWS_AS(validate_dag(dag), CycleDetected);
}

TEST_CASE("template round trip is structurally stable") {
    for (int p : {1, 2, 10, 13}) {
        const WorkflowDag dag = build_sid_workflow(p, cfg_small());
        const std::string doc = emit_template(dag);
        const WorkflowDag back = parse_template(doc);
        CHECK(back == dag);
        CHECK(emit_template(back) == doc);
    }
}

TEST_CASE("template parsing reports syntax and schema errors") {
    CHECK_THROWS_AS(parse_template("{not json"), TemplateSyntaxError);
    CHECK_THROWS_AS(parse_template("{\"version\":2,\"mpt\":1,\"tasks\":[]}"),
                    TemplateSchemaError);
    // missing image field
    CHECK_THROWS_AS(parse_template(R"({"version":1,"mpt":1,"tasks":[
        {"id":"task-ini","level":0,"deps":[],"params":{},"cpu":1.0}]})"),
                    TemplateSchemaError);
    // unknown image kind
    CHECK_THROWS_AS(parse_template(R"({"version":1,"mpt":1,"tasks":[
        {"id":"task-ini","image":"Z","level":0,"deps":[],"params":{},"cpu":1.0}]})"),
                    TemplateSchemaError);
}

TEST_CASE("hand-written coarse template parses to five tasks at width two") {
    const std::string doc = R"({
      "version": 1,
      "mpt": 2,
      "tasks": [
        {"id":"task-ini","image":"ini","level":0,"deps":[],
         "params":{"system":"ball-beam","seed":"1","N":"10","j":"1000"},"cpu":1.0},
        {"id":"task-1","image":"A","level":1,"deps":["task-ini"],
         "params":{"slices":"2"},"cpu":1.0},
        {"id":"task-2","image":"B","level":1,"deps":["task-ini"],"params":{},"cpu":1.0},
        {"id":"task-3","image":"C","level":2,"deps":["task-1"],
         "params":{"slice":"0"},"cpu":1.0},
        {"id":"task-4","image":"C","level":2,"deps":["task-1"],
         "params":{"slice":"1"},"cpu":1.0},
        {"id":"task-5","image":"E","level":3,
         "deps":["task-1","task-2","task-3","task-4"],
         "params":{"fold":"task-3,task-4","final":"$0","N":"10","order_tol":"1e-06"},
         "cpu":1.0}
      ]
    })";
    const WorkflowDag dag = parse_template(doc);
    CHECK(dag.count_excluding_entry() == 5);
    CHECK(dag.mpt == 2);
    CHECK_NOTHROW(validate_dag(dag));
}

TEST_CASE("with_param produces an amended copy") {
    const WorkflowDag dag = build_sid_workflow(2, cfg_small());
    const WorkflowDag amended = with_param(dag, "task-ini", "seed", "99");
    CHECK(amended.find("task-ini")->params.at("seed") == "99");
    CHECK(dag.find("task-ini")->params.at("seed") == "1");
    CHECK_THROWS_AS(with_param(dag, "task-99", "k", "v"), DanglingDependency);
}
