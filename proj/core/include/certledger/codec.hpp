// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "certledger/crypto.hpp"

namespace certledger {

// Canonical byte encoding used for everything that is signed or hashed.
// The encoding is byte-exact and versioned by a leading domain string:
//
//   u8/u16/u32/u64   fixed-width big-endian
//   i64              two's-complement big-endian
//   bool             u8, 0 or 1
//   bytes            u32 length || raw bytes
//   string           UTF-8 bytes encoded as `bytes`
//   address          20 raw bytes
//   digest           32 raw bytes
//   optional<T>      u8 presence flag || T when present
//   list<T>          u32 count || elements in order
//   variant          u8 tag || fields of the alternative in declared order
//
// Every signed or hashed message starts with its domain rendered as `string`
// (e.g. "certledger.tx.v1"), so messages of different kinds can never collide.
class ByteWriter {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }

    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }

    void u32(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) {
            out_.push_back(static_cast<std::uint8_t>(v >> shift));
        }
    }

    void u64(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8) {
            out_.push_back(static_cast<std::uint8_t>(v >> shift));
        }
    }

    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

    void boolean(bool v) { u8(v ? 1 : 0); }

    void raw(std::span<const std::uint8_t> data) {
        out_.insert(out_.end(), data.begin(), data.end());
    }

    void bytes(std::span<const std::uint8_t> data) {
        u32(static_cast<std::uint32_t>(data.size()));
        raw(data);
    }

    void string(std::string_view s) {
        bytes(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    }

    void address(const Address& a) { raw(std::span<const std::uint8_t>(a.bytes)); }

    void digest(const Digest& d) { raw(std::span<const std::uint8_t>(d)); }

    const std::vector<std::uint8_t>& data() const { return out_; }

    std::span<const std::uint8_t> span() const {
        return std::span<const std::uint8_t>(out_);
    }

    Digest hash() const { return sha256(span()); }

  private:
    std::vector<std::uint8_t> out_;
};

}  // namespace certledger
