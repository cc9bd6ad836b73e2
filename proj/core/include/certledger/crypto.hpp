// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace certledger {

// All digests in the system are SHA-256.
using Digest = std::array<std::uint8_t, 32>;

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept;
};

// 20-byte account/contract identifier; for accounts it is the last 20 bytes
// of the digest of the public key.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    auto operator<=>(const Address&) const = default;
    bool is_zero() const;
};

struct AddressHash {
    std::size_t operator()(const Address& a) const noexcept;
};

struct PublicKey {
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const PublicKey&) const = default;
};

// Ed25519 expanded secret key (seed || public key).
struct PrivateKey {
    std::array<std::uint8_t, 64> bytes{};
    auto operator<=>(const PrivateKey&) const = default;
};

struct Signature {
    std::array<std::uint8_t, 64> bytes{};
    auto operator<=>(const Signature&) const = default;
};

struct KeyPair {
    PublicKey public_key;
    PrivateKey private_key;

    Address address() const;
};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

KeyPair generate_keypair();
KeyPair keypair_from_seed(const Digest& seed);
Address derive_address(const PublicKey& key);

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> message);
bool verify(const PublicKey& key, std::span<const std::uint8_t> message,
            const Signature& signature);

// Hybrid public-key encryption addressed to the holder of an Ed25519 key
// (sealed boxes over the corresponding Curve25519 key). Returns nullopt when
// the recipient key cannot be converted or, for open_sealed, when the
// ciphertext does not authenticate.
std::optional<std::vector<std::uint8_t>> seal_for(
    const PublicKey& recipient, std::span<const std::uint8_t> plaintext);
std::optional<std::vector<std::uint8_t>> open_sealed(
    const KeyPair& recipient, std::span<const std::uint8_t> ciphertext);

std::vector<std::uint8_t> random_bytes(std::size_t n);

// Hex rendering: lowercase, "0x"-prefixed in every external format.
std::string to_hex(std::span<const std::uint8_t> data);
std::string to_hex(const Digest& d);
std::string to_hex(const Address& a);
std::string to_hex(const PublicKey& k);
std::string to_hex(const PrivateKey& k);
std::string to_hex(const Signature& s);

std::optional<std::vector<std::uint8_t>> bytes_from_hex(std::string_view hex);
std::optional<Digest> digest_from_hex(std::string_view hex);
std::optional<Address> address_from_hex(std::string_view hex);
std::optional<PublicKey> public_key_from_hex(std::string_view hex);
std::optional<PrivateKey> private_key_from_hex(std::string_view hex);
std::optional<Signature> signature_from_hex(std::string_view hex);

}  // namespace certledger
