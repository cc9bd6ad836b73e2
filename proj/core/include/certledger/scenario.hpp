// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "certledger/controller.hpp"
#include "certledger/node.hpp"
#include "certledger/store.hpp"

namespace certledger::scenario {

// Scripted end-to-end runs: a JSON document declares actors, chain
// parameters, a device inventory and an ordered step list; the runner hosts
// a single validator, an observer-backed controller and a content store and
// executes the steps, producing one JSON log line per step.
//
// With a fixed seed the whole run is reproducible: actor keys, controller
// challenges and block timestamps (a virtual clock) all derive from the
// scenario content.
class ScenarioRunner {
  public:
    struct Options {
        std::filesystem::path store_dir;
        std::filesystem::path base_dir;  // resolves relative file references
        std::optional<std::uint64_t> seed;
    };

    ScenarioRunner(const std::string& config_json, Options options);
    ~ScenarioRunner();

    ScenarioRunner(const ScenarioRunner&) = delete;
    ScenarioRunner& operator=(const ScenarioRunner&) = delete;

    // Executes all steps; true when every step met its expectation.
    bool run();

    const std::vector<std::string>& log() const;

    const chain::GenesisConfig& genesis() const;
    std::shared_ptr<chain::Node> validator() const;
    std::shared_ptr<chain::Node> observer() const;
    controller::Controller& ctl();
    store::ContentStore& content_store();

    KeyPair actor_keys(const std::string& name) const;
    Address resolve_address(const std::string& ref) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace certledger::scenario
