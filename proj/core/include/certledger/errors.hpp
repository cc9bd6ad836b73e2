// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace certledger {

// Rejection reasons for transactions and contract calls. Values are part of
// the external interface (rendered verbatim in CLI/JSON output).
enum class TxErrorCode {
    BadSignature,
    BadNonce,
    InsufficientBalance,
    UnknownContract,
    UnknownRegistry,
    NotOwner,
    NotManufacturer,
    NotAuthorized,
    BadHashLength,
    UnknownDisclosure,
    IllegalTransition,
    NotParty,
    EmbargoActive,
    InvalidArgument,
};

struct TxError {
    TxErrorCode code;
    std::string detail;
};

std::string_view to_string(TxErrorCode code);
std::optional<TxErrorCode> tx_error_code_from_string(std::string_view name);

}  // namespace certledger
