// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/errors.hpp"

#include <array>
#include <utility>

namespace certledger {

namespace {

constexpr std::array<std::pair<TxErrorCode, std::string_view>, 14> kNames{{
    {TxErrorCode::BadSignature, "BadSignature"},
    {TxErrorCode::BadNonce, "BadNonce"},
    {TxErrorCode::InsufficientBalance, "InsufficientBalance"},
    {TxErrorCode::UnknownContract, "UnknownContract"},
    {TxErrorCode::UnknownRegistry, "UnknownRegistry"},
    {TxErrorCode::NotOwner, "NotOwner"},
    {TxErrorCode::NotManufacturer, "NotManufacturer"},
    {TxErrorCode::NotAuthorized, "NotAuthorized"},
    {TxErrorCode::BadHashLength, "BadHashLength"},
    {TxErrorCode::UnknownDisclosure, "UnknownDisclosure"},
    {TxErrorCode::IllegalTransition, "IllegalTransition"},
    {TxErrorCode::NotParty, "NotParty"},
    {TxErrorCode::EmbargoActive, "EmbargoActive"},
    {TxErrorCode::InvalidArgument, "InvalidArgument"},
}};

}  // namespace

std::string_view to_string(TxErrorCode code) {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "UnknownError";
}

std::optional<TxErrorCode> tx_error_code_from_string(std::string_view name) {
    for (const auto& [c, n] : kNames) {
        if (n == name) return c;
    }
    return std::nullopt;
}

}  // namespace certledger
