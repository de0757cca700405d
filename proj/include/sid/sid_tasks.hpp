#pragma once

#include <string>

#include "sid/executor.hpp"
#include "sid/n4sid.hpp"

namespace sid {

/// Task bodies for the identification workflow images. Bodies are pure
/// functions of their store inputs and task params:
///   Ini writes the Hankel blocks and regressor data,
///   A   writes "O_i" plus its column slices "O_i.slice.<k>",
///   B   writes "O_im1",
///   C/D write factor triples "<task>.U" / "<task>.S" / "<task>.V",
///   E   finishes the merge tree, selects the order, solves the system and
///       writes "model.A/B/C/D", "model.S", "model.order", "model.residual".
BodyMap sid_task_bodies();

/// Model and diagnostics written by the export task of a finished run.
struct WorkflowModel {
    StateSpaceModel model;
    Index order = 0;
    std::vector<double> singular_values;
    double residual = 0.0;
};

WorkflowModel read_workflow_model(const BlobStore& store, const std::string& ns);

}  // namespace sid
