// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/mud.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <initializer_list>

namespace certledger::mud {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(ParseErrorCode code, const std::string& path,
                       const std::string& detail) {
    throw ParseError(code, path, detail);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(ParseErrorCode::UnknownConstruct, path + "/" + key,
                 "construct outside the supported subset");
        }
    }
}

const json& require(const json& obj, const std::string& path,
                    std::string_view key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        fail(ParseErrorCode::MissingField, path + "/" + std::string(key),
             "required field is missing");
    }
    return *it;
}

std::string require_string(const json& obj, const std::string& path,
                           std::string_view key) {
    const json& v = require(obj, path, key);
    if (!v.is_string()) {
        fail(ParseErrorCode::BadType, path + "/" + std::string(key),
             "expected a string");
    }
    return v.get<std::string>();
}

int require_int(const json& obj, const std::string& path,
                std::string_view key) {
    const json& v = require(obj, path, key);
    if (!v.is_number_integer()) {
        fail(ParseErrorCode::BadType, path + "/" + std::string(key),
             "expected an integer");
    }
    return v.get<int>();
}

bool require_bool(const json& obj, const std::string& path,
                  std::string_view key) {
    const json& v = require(obj, path, key);
    if (!v.is_boolean()) {
        fail(ParseErrorCode::BadType, path + "/" + std::string(key),
             "expected a boolean");
    }
    return v.get<bool>();
}

const json& require_object(const json& obj, const std::string& path,
                           std::string_view key) {
    const json& v = require(obj, path, key);
    if (!v.is_object()) {
        fail(ParseErrorCode::BadType, path + "/" + std::string(key),
             "expected an object");
    }
    return v;
}

const json& require_array(const json& obj, const std::string& path,
                          std::string_view key) {
    const json& v = require(obj, path, key);
    if (!v.is_array()) {
        fail(ParseErrorCode::BadType, path + "/" + std::string(key),
             "expected an array");
    }
    return v;
}

std::vector<std::string> parse_policy(const json& policy,
                                      const std::string& path) {
    check_keys(policy, path, {"access-lists"});
    const json& lists = require_object(policy, path, "access-lists");
    const std::string lists_path = path + "/access-lists";
    check_keys(lists, lists_path, {"access-list"});
    const json& entries = require_array(lists, lists_path, "access-list");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string entry_path =
            lists_path + "/access-list[" + std::to_string(i) + "]";
        if (!entries[i].is_object()) {
            fail(ParseErrorCode::BadType, entry_path, "expected an object");
        }
        check_keys(entries[i], entry_path, {"name"});
        names.push_back(require_string(entries[i], entry_path, "name"));
    }
    return names;
}

PortMatch parse_port(const json& spec, const std::string& path) {
    if (!spec.is_object()) {
        fail(ParseErrorCode::BadType, path, "expected an object");
    }
    check_keys(spec, path, {"operator", "port"});
    PortMatch match;
    match.op = require_string(spec, path, "operator");
    match.port = require_int(spec, path, "port");
    return match;
}

L4Match parse_l4(const json& container, const std::string& path, L4 kind) {
    check_keys(container, path, {"source-port", "destination-port"});
    L4Match match;
    match.kind = kind;
    if (container.contains("source-port")) {
        match.source_port =
            parse_port(container["source-port"], path + "/source-port");
    }
    if (container.contains("destination-port")) {
        match.destination_port = parse_port(container["destination-port"],
                                            path + "/destination-port");
    }
    return match;
}

Ace parse_ace(const json& entry, const std::string& path) {
    if (!entry.is_object()) {
        fail(ParseErrorCode::BadType, path, "expected an object");
    }
    check_keys(entry, path, {"name", "matches", "actions"});
    Ace ace;
    ace.name = require_string(entry, path, "name");

    const json& matches = require_object(entry, path, "matches");
    const std::string matches_path = path + "/matches";
    check_keys(matches, matches_path, {"ietf-mud:mud", "ipv6", "udp", "tcp"});
    if (matches.contains("ietf-mud:mud")) {
        const json& mud_match = matches["ietf-mud:mud"];
        const std::string mud_path = matches_path + "/ietf-mud:mud";
        if (!mud_match.is_object()) {
            fail(ParseErrorCode::BadType, mud_path, "expected an object");
        }
        check_keys(mud_match, mud_path, {"same-manufacturer"});
        ace.same_manufacturer =
            require_string(mud_match, mud_path, "same-manufacturer");
    }
    if (matches.contains("ipv6")) {
        const json& ipv6 = matches["ipv6"];
        const std::string ipv6_path = matches_path + "/ipv6";
        if (!ipv6.is_object()) {
            fail(ParseErrorCode::BadType, ipv6_path, "expected an object");
        }
        check_keys(ipv6, ipv6_path, {"protocol"});
        ace.protocol = require_int(ipv6, ipv6_path, "protocol");
    }
    if (matches.contains("udp") && matches.contains("tcp")) {
        // A single ace carries one transport-layer match in the subset.
        fail(ParseErrorCode::UnknownConstruct, matches_path + "/tcp",
             "both udp and tcp matches present");
    }
    if (matches.contains("udp")) {
        ace.l4 = parse_l4(matches["udp"], matches_path + "/udp", L4::Udp);
    } else if (matches.contains("tcp")) {
        ace.l4 = parse_l4(matches["tcp"], matches_path + "/tcp", L4::Tcp);
    }

    const json& actions = require_object(entry, path, "actions");
    const std::string actions_path = path + "/actions";
    check_keys(actions, actions_path, {"forwarding"});
    ace.forwarding = require_string(actions, actions_path, "forwarding");
    return ace;
}

Acl parse_acl(const json& entry, const std::string& path) {
    if (!entry.is_object()) {
        fail(ParseErrorCode::BadType, path, "expected an object");
    }
    check_keys(entry, path, {"name", "type", "aces"});
    Acl acl;
    acl.name = require_string(entry, path, "name");
    acl.type = require_string(entry, path, "type");
    const json& aces = require_object(entry, path, "aces");
    const std::string aces_path = path + "/aces";
    check_keys(aces, aces_path, {"ace"});
    const json& ace_list = require_array(aces, aces_path, "ace");
    for (std::size_t i = 0; i < ace_list.size(); ++i) {
        acl.aces.push_back(parse_ace(
            ace_list[i], aces_path + "/ace[" + std::to_string(i) + "]"));
    }
    return acl;
}

}  // namespace

std::string_view to_string(ParseErrorCode code) {
    switch (code) {
        case ParseErrorCode::Syntax: return "SyntaxError";
        case ParseErrorCode::UnknownConstruct: return "UnknownConstruct";
        case ParseErrorCode::MissingField: return "MissingField";
        case ParseErrorCode::BadType: return "BadType";
    }
    return "SyntaxError";
}

ParseError::ParseError(ParseErrorCode code, std::string path,
                       const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + " at " + path + ": " +
                         what),
      code_(code),
      path_(std::move(path)) {}

MudFile parse(std::span<const std::uint8_t> bytes) {
    return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                  bytes.size()));
}

MudFile parse(std::string_view text) {
    json root = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded()) {
        fail(ParseErrorCode::Syntax, "", "input is not valid JSON");
    }
    if (!root.is_object()) {
        fail(ParseErrorCode::BadType, "", "document root must be an object");
    }
    check_keys(root, "", {"ietf-mud:mud", "ietf-access-control-list:acls"});

    const json& mud = require_object(root, "", "ietf-mud:mud");
    const std::string mud_path = "/ietf-mud:mud";
    check_keys(mud, mud_path,
               {"mud-version", "mud-url", "last-update", "cache-validity",
                "is-supported", "systeminfo", "mfg-name", "documentation",
                "model-name", "from-device-policy", "to-device-policy"});

    MudFile m;
    m.mud_version = require_int(mud, mud_path, "mud-version");
    m.mud_url = require_string(mud, mud_path, "mud-url");
    m.last_update = require_string(mud, mud_path, "last-update");
    if (!parse_rfc3339(m.last_update)) {
        fail(ParseErrorCode::BadType, mud_path + "/last-update",
             "expected an RFC 3339 timestamp with offset");
    }
    if (mud.contains("cache-validity")) {
        m.cache_validity = require_int(mud, mud_path, "cache-validity");
    }
    m.is_supported = require_bool(mud, mud_path, "is-supported");
    m.systeminfo = require_string(mud, mud_path, "systeminfo");
    m.mfg_name = require_string(mud, mud_path, "mfg-name");
    m.documentation = require_string(mud, mud_path, "documentation");
    m.model_name = require_string(mud, mud_path, "model-name");
    m.from_device_policy =
        parse_policy(require_object(mud, mud_path, "from-device-policy"),
                     mud_path + "/from-device-policy");
    m.to_device_policy =
        parse_policy(require_object(mud, mud_path, "to-device-policy"),
                     mud_path + "/to-device-policy");

    const json& acls =
        require_object(root, "", "ietf-access-control-list:acls");
    const std::string acls_path = "/ietf-access-control-list:acls";
    check_keys(acls, acls_path, {"acl"});
    const json& acl_list = require_array(acls, acls_path, "acl");
    for (std::size_t i = 0; i < acl_list.size(); ++i) {
        m.acls.push_back(parse_acl(
            acl_list[i], acls_path + "/acl[" + std::to_string(i) + "]"));
    }
    return m;
}

std::string serialize(const MudFile& m) {
    ordered_json mud;
    mud["mud-version"] = m.mud_version;
    mud["mud-url"] = m.mud_url;
    mud["last-update"] = m.last_update;
    mud["cache-validity"] = m.cache_validity;
    mud["is-supported"] = m.is_supported;
    mud["systeminfo"] = m.systeminfo;
    mud["mfg-name"] = m.mfg_name;
    mud["documentation"] = m.documentation;
    mud["model-name"] = m.model_name;

    auto policy = [](const std::vector<std::string>& names) {
        ordered_json entries = ordered_json::array();
        for (const auto& name : names) {
            entries.push_back({{"name", name}});
        }
        return ordered_json{{"access-lists", {{"access-list", entries}}}};
    };
    mud["from-device-policy"] = policy(m.from_device_policy);
    mud["to-device-policy"] = policy(m.to_device_policy);

    ordered_json acl_list = ordered_json::array();
    for (const auto& acl : m.acls) {
        ordered_json aces = ordered_json::array();
        for (const auto& ace : acl.aces) {
            ordered_json matches = ordered_json::object();
            if (ace.same_manufacturer) {
                matches["ietf-mud:mud"] = {
                    {"same-manufacturer", *ace.same_manufacturer}};
            }
            if (ace.protocol) {
                matches["ipv6"] = {{"protocol", *ace.protocol}};
            }
            if (ace.l4) {
                ordered_json ports = ordered_json::object();
                if (ace.l4->destination_port) {
                    ports["destination-port"] = {
                        {"operator", ace.l4->destination_port->op},
                        {"port", ace.l4->destination_port->port}};
                }
                if (ace.l4->source_port) {
                    ports["source-port"] = {
                        {"operator", ace.l4->source_port->op},
                        {"port", ace.l4->source_port->port}};
                }
                matches[ace.l4->kind == L4::Udp ? "udp" : "tcp"] = ports;
            }
            aces.push_back({{"name", ace.name},
                            {"matches", matches},
                            {"actions", {{"forwarding", ace.forwarding}}}});
        }
        acl_list.push_back(
            {{"name", acl.name}, {"type", acl.type}, {"aces", {{"ace", aces}}}});
    }

    ordered_json root;
    root["ietf-mud:mud"] = mud;
    root["ietf-access-control-list:acls"] = {{"acl", acl_list}};
    return root.dump(2);
}

std::vector<Violation> validate(const MudFile& m) {
    std::vector<Violation> violations;
    auto flag = [&](std::string code, std::string path, std::string detail) {
        violations.push_back(
            Violation{std::move(code), std::move(path), std::move(detail)});
    };

    if (m.mud_version != 1) {
        flag("UnsupportedVersion", "/ietf-mud:mud/mud-version",
             "only mud-version 1 is supported");
    }
    if (m.cache_validity < 1 || m.cache_validity > 168) {
        flag("CacheValidityRange", "/ietf-mud:mud/cache-validity",
             "cache-validity must be within 1..168 hours");
    }

    // Referential integrity: every referenced ACL exists, and every ACL is
    // referenced by exactly one policy direction.
    std::map<std::string, int> reference_count;
    auto check_policy = [&](const std::vector<std::string>& names,
                            std::string_view policy) {
        for (const auto& name : names) {
            ++reference_count[name];
            if (std::none_of(m.acls.begin(), m.acls.end(),
                             [&](const Acl& acl) { return acl.name == name; })) {
                flag("DanglingAclName",
                     "/ietf-mud:mud/" + std::string(policy),
                     "policy references unknown ACL \"" + name + "\"");
            }
        }
    };
    check_policy(m.from_device_policy, "from-device-policy");
    check_policy(m.to_device_policy, "to-device-policy");

    for (std::size_t i = 0; i < m.acls.size(); ++i) {
        const Acl& acl = m.acls[i];
        const std::string acl_path =
            "/ietf-access-control-list:acls/acl[" + std::to_string(i) + "]";
        if (acl.name.empty()) {
            flag("EmptyName", acl_path + "/name", "ACL name must be non-empty");
        }
        if (acl.type != "ipv6-acl-type") {
            flag("UnsupportedAclType", acl_path + "/type",
                 "only ipv6-acl-type is supported");
        }
        const int refs = reference_count.contains(acl.name)
                             ? reference_count[acl.name]
                             : 0;
        if (refs != 1) {
            flag("PolicyReferenceCount", acl_path,
                 "ACL must be referenced by exactly one policy direction");
        }
        for (std::size_t k = 0; k < acl.aces.size(); ++k) {
            const Ace& ace = acl.aces[k];
            const std::string ace_path =
                acl_path + "/aces/ace[" + std::to_string(k) + "]";
            const bool has_ports =
                ace.l4 && (ace.l4->source_port || ace.l4->destination_port);
            if (!ace.same_manufacturer && !ace.protocol && !has_ports) {
                flag("EmptyMatch", ace_path + "/matches",
                     "ace must carry at least one match");
            }
            if (ace.protocol && (*ace.protocol < 0 || *ace.protocol > 255)) {
                flag("ProtocolRange", ace_path + "/matches/ipv6/protocol",
                     "protocol must be within 0..255");
            }
            if (ace.l4) {
                const char* l4_name = ace.l4->kind == L4::Udp ? "udp" : "tcp";
                auto check_port = [&](const std::optional<PortMatch>& p,
                                      std::string_view which) {
                    if (!p) return;
                    const std::string port_path = ace_path + "/matches/" +
                                                  l4_name + "/" +
                                                  std::string(which);
                    if (p->op != "eq") {
                        flag("UnsupportedOperator", port_path + "/operator",
                             "only operator \"eq\" is supported");
                    }
                    if (p->port < 0 || p->port > 65535) {
                        flag("PortRange", port_path + "/port",
                             "port must be within 0..65535");
                    }
                };
                check_port(ace.l4->source_port, "source-port");
                check_port(ace.l4->destination_port, "destination-port");
            }
            if (ace.forwarding != "accept") {
                flag("UnsupportedAction", ace_path + "/actions/forwarding",
                     "only forwarding \"accept\" is supported");
            }
        }
    }
    return violations;
}

std::string_view to_string(Direction d) {
    return d == Direction::FromDevice ? "from-device" : "to-device";
}

std::vector<AclRule> compile(const MudFile& m, const Inventory& inventory) {
    std::vector<AclRule> rules;
    auto compile_policy = [&](const std::vector<std::string>& names,
                              Direction direction) {
        for (const auto& name : names) {
            auto acl = std::find_if(m.acls.begin(), m.acls.end(),
                                    [&](const Acl& a) { return a.name == name; });
            if (acl == m.acls.end()) continue;  // validate() reports these
            for (const Ace& ace : acl->aces) {
                AclRule rule;
                rule.direction = direction;
                rule.acl_name = acl->name;
                rule.ace_name = ace.name;
                if (ace.same_manufacturer) {
                    for (const auto& [address, mfg] : inventory) {
                        if (mfg == *ace.same_manufacturer) {
                            rule.peers.insert(address);
                        }
                    }
                } else {
                    rule.any_peer = true;
                }
                rule.protocol = ace.protocol;
                if (ace.l4) {
                    if (ace.l4->source_port) {
                        rule.src_port = ace.l4->source_port->port;
                    }
                    if (ace.l4->destination_port) {
                        rule.dst_port = ace.l4->destination_port->port;
                    }
                }
                rules.push_back(std::move(rule));
            }
        }
    };
    compile_policy(m.from_device_policy, Direction::FromDevice);
    compile_policy(m.to_device_policy, Direction::ToDevice);
    return rules;
}

bool is_fresh(const MudFile& m, std::int64_t fetched_at, std::int64_t now) {
    return is_fresh(m.cache_validity, fetched_at, now);
}

bool is_fresh(int cache_validity_hours, std::int64_t fetched_at,
              std::int64_t now) {
    const std::int64_t validity_seconds =
        static_cast<std::int64_t>(cache_validity_hours) * 3600;
    return now - fetched_at < validity_seconds;
}

std::optional<std::int64_t> parse_rfc3339(std::string_view text) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    int off_hour = 0, off_minute = 0;
    char offset_sign = 0;
    const std::string s(text);
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day,
                    &hour, &minute, &second, &consumed) != 6) {
        return std::nullopt;
    }
    std::string_view rest = std::string_view(s).substr(consumed);
    if (rest == "Z" || rest == "z") {
        offset_sign = '+';
    } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') &&
               rest[3] == ':') {
        offset_sign = rest[0];
        if (std::sscanf(std::string(rest.substr(1)).c_str(), "%2d:%2d",
                        &off_hour, &off_minute) != 2) {
            return std::nullopt;
        }
    } else {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
        minute > 59 || second > 60) {
        return std::nullopt;
    }
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    std::int64_t epoch = timegm(&tm);
    const std::int64_t offset = (off_hour * 3600 + off_minute * 60) *
                                (offset_sign == '-' ? -1 : 1);
    return epoch - offset;
}

}  // namespace certledger::mud
