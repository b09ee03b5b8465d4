#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stf/ml/learners.hpp"
#include "stf/ml/preprocess.hpp"
#include "stf/model/ast.hpp"

namespace stf {

// Executor-independent description of a configuration: what the engine
// needs to schedule instances, route messages and run DA actions.

struct PropertyInfo {
    std::string name;
    ScalarType type = ScalarType::Int;
    Value initial;
    friend bool operator==(const PropertyInfo&, const PropertyInfo&) = default;
};

struct ParamInfo {
    std::string name;
    ScalarType type = ScalarType::Int;
    friend bool operator==(const ParamInfo&, const ParamInfo&) = default;
};

struct MessageInfo {
    std::string name;
    std::vector<ParamInfo> params;
    friend bool operator==(const MessageInfo&, const MessageInfo&) = default;
};

struct PortInfo {
    std::string name;
    std::vector<std::string> receives;
    std::vector<std::string> sends;
    friend bool operator==(const PortInfo&, const PortInfo&) = default;
};

struct DaConfig {
    std::string dataset;
    PipelineSpec pipeline;
    bool automl = false;
    ModelSpec expert;     ///< expert mode
    std::string metric;   ///< automl mode
    std::int64_t folds = 5;
    std::int64_t budget = 24;
    std::optional<std::string> pretrained;       ///< path as written in the model
    std::optional<std::string> pretrained_json;  ///< embedded model file, when present
    std::string backend;
};

struct ThingInfo {
    std::string name;
    std::vector<PropertyInfo> properties;
    std::vector<MessageInfo> messages;
    std::vector<PortInfo> ports;
    std::vector<std::string> states;
    std::optional<DaConfig> da;

    std::optional<std::size_t> property_index(std::string_view n) const;
    std::optional<std::size_t> message_index(std::string_view n) const;
    std::optional<std::size_t> port_index(std::string_view n) const;
};

struct InstanceInfo {
    std::string name;
    std::size_t thing = 0;
};

/// Connector between two instance ports (indices into instances / ports).
struct LinkInfo {
    std::size_t left_instance = 0, left_port = 0;
    std::size_t right_instance = 0, right_port = 0;
};

struct SystemInfo {
    std::string configuration;
    std::vector<ThingInfo> things;  ///< instantiated things, model order
    std::vector<InstanceInfo> instances;
    std::vector<LinkInfo> links;

    std::optional<std::size_t> thing_index(std::string_view n) const;
    std::optional<std::size_t> instance_index(std::string_view n) const;
};

/// Builds the description of configuration `config` (the only one when
/// empty). Throws InstantiationError on unknown names.
SystemInfo describe_system(const Model& m, const std::string& config);

/// Name of the configuration to run: `requested`, or the single one declared.
const Configuration& select_configuration(const Model& m, const std::string& requested);

ThingInfo describe_thing(const Thing& t);

}  // namespace stf
