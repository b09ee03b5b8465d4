#pragma once

#include <vector>

#include "stf/model/ast.hpp"

namespace stf {

/// Statements using `use` that can run on some path from the initial state
/// before any statement that definitely runs `enable` (exists-path semantics).
/// Statements inside `if` branches or `while` bodies may run; `enable` counts
/// only when it runs on every path through the enclosing block.
struct PathFacts {
    std::vector<bool> open_at;  ///< per state: entered on some path without `enable`
    std::vector<const Statement*> sites;  ///< in source order
};

struct Reachability {
    bool initial_known = false;
    std::vector<bool> reachable;  ///< per state index
    PathFacts untrained_predicts;  ///< da_predict before da_train
    PathFacts unprepared_trains;   ///< da_train before da_preprocess
};

PathFacts path_facts(const StateMachine& sm, DaAction enable, DaAction use);
Reachability reachability(const StateMachine& sm);

}  // namespace stf
