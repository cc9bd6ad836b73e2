// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>
#include <vector>

#include "certledger/chain.hpp"
#include "certledger/chain_io.hpp"

namespace certledger::audit {

std::string event_to_json(const chain::AuditEvent& event);

// Replays a persisted chain and emits every certificate issuance/revocation,
// file registration and disclosure transition chronologically, one JSON
// object per line. Throws chain::IoError (with the failing height) on a
// corrupt chain.
std::vector<std::string> export_events(const chain::GenesisConfig& config,
                                       const std::vector<chain::Block>& blocks);

// Published vulnerabilities as a JSON feed, one entry per line.
std::vector<std::string> vulnerability_feed(const chain::LedgerState& state);

}  // namespace certledger::audit
