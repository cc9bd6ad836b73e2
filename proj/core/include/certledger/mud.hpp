// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "certledger/crypto.hpp"

namespace certledger::mud {

// Manufacturer Usage Description toolchain for the supported subset:
// same-manufacturer matches, an IPv6 protocol number, UDP/TCP exact-port
// matches with operator "eq", and forwarding action "accept". Anything
// outside the subset is rejected at parse time — an unsupported construct
// must never degrade into a silently permissive rule.

enum class L4 { Udp, Tcp };

struct PortMatch {
    std::string op;  // only "eq" is supported; validate() flags the rest
    int port = 0;

    bool operator==(const PortMatch&) const = default;
};

struct L4Match {
    L4 kind = L4::Udp;
    std::optional<PortMatch> source_port;
    std::optional<PortMatch> destination_port;

    bool operator==(const L4Match&) const = default;
};

struct Ace {
    std::string name;
    std::optional<std::string> same_manufacturer;
    std::optional<int> protocol;
    std::optional<L4Match> l4;
    std::string forwarding;

    bool operator==(const Ace&) const = default;
};

struct Acl {
    std::string name;
    std::string type;
    std::vector<Ace> aces;

    bool operator==(const Acl&) const = default;
};

struct MudFile {
    int mud_version = 0;
    std::string mud_url;
    std::string last_update;
    int cache_validity = 48;
    bool is_supported = false;
    std::string systeminfo;
    std::string mfg_name;
    std::string documentation;
    std::string model_name;
    std::vector<std::string> from_device_policy;
    std::vector<std::string> to_device_policy;
    std::vector<Acl> acls;

    bool operator==(const MudFile&) const = default;
};

enum class ParseErrorCode { Syntax, UnknownConstruct, MissingField, BadType };

std::string_view to_string(ParseErrorCode code);

class ParseError : public std::runtime_error {
  public:
    ParseError(ParseErrorCode code, std::string path, const std::string& what);

    ParseErrorCode code() const { return code_; }
    const std::string& path() const { return path_; }

  private:
    ParseErrorCode code_;
    std::string path_;
};

MudFile parse(std::span<const std::uint8_t> bytes);
MudFile parse(std::string_view text);

// Model-faithful re-emission; serialize(parse(f)) parses back to an equal
// MudFile.
std::string serialize(const MudFile& m);

struct Violation {
    std::string code;
    std::string path;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

// Semantic checks: version, cache-validity range (1..168 h), ACL referential
// integrity (each ACL referenced by exactly one policy direction),
// operator/action restrictions, port/protocol ranges, non-empty matches.
std::vector<Violation> validate(const MudFile& m);

enum class Direction { FromDevice, ToDevice };

std::string_view to_string(Direction d);

// Concrete packet-match rule. From-device rules bind the device as the
// flow's source, to-device rules as its destination; `peers` is the resolved
// same-manufacturer set unless the rule matches any peer.
struct AclRule {
    Direction direction = Direction::FromDevice;
    bool any_peer = false;
    std::set<Address> peers;
    std::optional<int> protocol;
    std::optional<int> src_port;
    std::optional<int> dst_port;
    std::string acl_name;
    std::string ace_name;

    std::string id() const { return acl_name + "/" + ace_name; }

    bool operator==(const AclRule&) const = default;
};

using Inventory = std::map<Address, std::string>;  // address -> mfg-name

// Deterministic compilation of a validated file: one rule per
// (policy direction, ace). An empty resolved peer set is kept as a rule that
// matches nothing.
std::vector<AclRule> compile(const MudFile& m, const Inventory& inventory);

// Strict freshness: stale as soon as a full cache-validity period has
// elapsed.
bool is_fresh(const MudFile& m, std::int64_t fetched_at, std::int64_t now);
bool is_fresh(int cache_validity_hours, std::int64_t fetched_at,
              std::int64_t now);

// RFC 3339 with numeric offset or 'Z', e.g. "2019-05-16T09:03:46+00:00".
std::optional<std::int64_t> parse_rfc3339(std::string_view text);

}  // namespace certledger::mud
