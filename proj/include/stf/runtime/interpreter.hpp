#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stf/runtime/engine.hpp"

namespace stf {

/// Tree-walking behaviors, one per thing of `system`, reading statecharts
/// straight from the model.
std::vector<std::unique_ptr<Behavior>> ast_behaviors(std::shared_ptr<const Model> model, const SystemInfo& system);

/// Interprets configuration `config` of a merged model. Throws
/// InstantiationError when the model has validation errors or resources
/// are missing.
std::unique_ptr<Simulation> instantiate(const Model& model, const std::string& config, const RunOptions& options);

/// instantiate + run.
Trace interpret(const Model& model, const std::string& config, const Scenario& scenario, const RunOptions& options);

}  // namespace stf
