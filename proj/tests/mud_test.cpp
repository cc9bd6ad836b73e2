// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "certledger/mud.hpp"
#include "test_support.hpp"

using namespace certledger;
using namespace certledger::mud;

namespace {

std::string fixture_text() {
    return test::read_text(test::fixture_path("listing3.json"));
}

Address addr(std::uint8_t fill) {
    Address a;
    a.bytes.fill(fill);
    return a;
}

// Replaces the first occurrence in the fixture text; the needle must exist.
std::string patched_fixture(const std::string& needle,
                            const std::string& replacement) {
    std::string text = fixture_text();
    auto pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, needle.size(), replacement);
}

}  // namespace

TEST_CASE("the temperature-sensor fixture parses field by field") {
    auto m = parse(fixture_text());

    CHECK(m.mud_version == 1);
    CHECK(m.mud_url == "https://host1/model1");
    CHECK(m.last_update == "2019-05-16T09:03:46+00:00");
    CHECK(m.cache_validity == 48);
    CHECK(m.is_supported == true);
    CHECK(m.systeminfo == "Temperature sensor");
    CHECK(m.mfg_name == "manufacturerA");
    CHECK(m.documentation == "https://www.documentation.org");
    CHECK(m.model_name == "model1");
    CHECK(m.from_device_policy == std::vector<std::string>{"mud-37547-v6fr"});
    CHECK(m.to_device_policy == std::vector<std::string>{"mud-37547-v6to"});

    REQUIRE(m.acls.size() == 2);
    const Acl& fr = m.acls[0];
    CHECK(fr.name == "mud-37547-v6fr");
    CHECK(fr.type == "ipv6-acl-type");
    REQUIRE(fr.aces.size() == 1);
    const Ace& ace = fr.aces[0];
    CHECK(ace.name == "myman0-frdev");
    CHECK(ace.same_manufacturer == "manufacturerA");
    CHECK(ace.protocol == 17);
    REQUIRE(ace.l4.has_value());
    CHECK(ace.l4->kind == L4::Udp);
    REQUIRE(ace.l4->destination_port.has_value());
    CHECK(ace.l4->destination_port->op == "eq");
    CHECK(ace.l4->destination_port->port == 33);
    REQUIRE(ace.l4->source_port.has_value());
    CHECK(ace.l4->source_port->op == "eq");
    CHECK(ace.l4->source_port->port == 12);
    CHECK(ace.forwarding == "accept");

    CHECK(validate(m).empty());
}

TEST_CASE("parsing is fail-closed") {
    SUBCASE("invalid JSON is a syntax error") {
        CHECK_THROWS_AS(parse(std::string_view("{not json")), ParseError);
        try {
            parse(std::string_view("{not json"));
        } catch (const ParseError& e) {
            CHECK(e.code() == ParseErrorCode::Syntax);
        }
    }
    SUBCASE("an unknown top-level container is rejected") {
        auto text = patched_fixture("\"ietf-access-control-list:acls\"",
                                    "\"ietf-cloud:acls\"");
        try {
            parse(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            // Either the unknown container or the now-missing required one
            // fires first; both are fail-closed.
            CHECK((e.code() == ParseErrorCode::UnknownConstruct ||
                   e.code() == ParseErrorCode::MissingField));
        }
    }
    SUBCASE("an unknown match container is rejected") {
        auto text = patched_fixture("\"ipv6\"", "\"ietf-mud:cloud\"");
        try {
            parse(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.code() == ParseErrorCode::UnknownConstruct);
            CHECK(e.path().find("ietf-mud:cloud") != std::string::npos);
        }
    }
    SUBCASE("a missing required field is reported with its path") {
        auto text = patched_fixture("\"systeminfo\": \"Temperature sensor\",",
                                    "");
        try {
            parse(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.code() == ParseErrorCode::MissingField);
            CHECK(e.path() == "/ietf-mud:mud/systeminfo");
        }
    }
    SUBCASE("wrong types are rejected") {
        auto text = patched_fixture("\"mud-version\": 1", "\"mud-version\": \"1\"");
        try {
            parse(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.code() == ParseErrorCode::BadType);
        }
    }
    SUBCASE("a malformed last-update timestamp is rejected") {
        auto text = patched_fixture("2019-05-16T09:03:46+00:00", "yesterday");
        CHECK_THROWS_AS(parse(text), ParseError);
    }
    SUBCASE("absent cache-validity defaults to 48") {
        auto text = patched_fixture("\"cache-validity\": 48,", "");
        auto m = parse(text);
        CHECK(m.cache_validity == 48);
    }
}

TEST_CASE("validation flags semantic violations") {
    auto m = parse(fixture_text());

    SUBCASE("cache-validity range") {
        auto zero = parse(patched_fixture("\"cache-validity\": 48",
                                          "\"cache-validity\": 0"));
        auto violations = validate(zero);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "CacheValidityRange");

        auto week = parse(patched_fixture("\"cache-validity\": 48",
                                          "\"cache-validity\": 168"));
        CHECK(validate(week).empty());
        auto over = parse(patched_fixture("\"cache-validity\": 48",
                                          "\"cache-validity\": 169"));
        CHECK_FALSE(validate(over).empty());
    }
    SUBCASE("a dangling policy reference") {
        auto bad = m;
        bad.from_device_policy = {"mud-9999"};
        auto violations = validate(bad);
        bool found = false;
        for (const auto& v : violations) {
            if (v.code == "DanglingAclName") found = true;
        }
        CHECK(found);
    }
    SUBCASE("an ACL nobody references") {
        auto bad = m;
        bad.acls.push_back(bad.acls[0]);
        bad.acls.back().name = "mud-orphan";
        auto violations = validate(bad);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "PolicyReferenceCount");
    }
    SUBCASE("an ACL referenced by both directions") {
        auto bad = m;
        bad.to_device_policy = {"mud-37547-v6fr"};
        auto violations = validate(bad);
        CHECK_FALSE(violations.empty());
    }
    SUBCASE("unsupported port operator") {
        auto bad = parse(patched_fixture("\"operator\": \"eq\", \"port\": 33",
                                         "\"operator\": \"lt\", \"port\": 33"));
        auto violations = validate(bad);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "UnsupportedOperator");
    }
    SUBCASE("unsupported forwarding action") {
        auto bad = m;
        bad.acls[0].aces[0].forwarding = "drop";
        auto violations = validate(bad);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "UnsupportedAction");
    }
    SUBCASE("wrong mud-version") {
        auto bad = m;
        bad.mud_version = 2;
        CHECK(validate(bad).size() == 1);
    }
    SUBCASE("empty matches") {
        auto bad = m;
        bad.acls[0].aces[0].same_manufacturer.reset();
        bad.acls[0].aces[0].protocol.reset();
        bad.acls[0].aces[0].l4.reset();
        auto violations = validate(bad);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "EmptyMatch");
    }
    SUBCASE("ranges") {
        auto bad = m;
        bad.acls[0].aces[0].protocol = 300;
        bad.acls[0].aces[0].l4->source_port->port = 70000;
        auto violations = validate(bad);
        CHECK(violations.size() == 2);
    }
}

TEST_CASE("compilation resolves same-manufacturer against the inventory") {
    auto m = parse(fixture_text());
    const Address dev_a = addr(0xa1);
    const Address dev_b = addr(0xb2);
    const Address dev_c = addr(0xc3);
    Inventory inventory{{dev_a, "manufacturerA"},
                        {dev_b, "manufacturerA"},
                        {dev_c, "manufacturerB"}};

    auto rules = compile(m, inventory);
    REQUIRE(rules.size() == 2);

    const AclRule& from = rules[0];
    CHECK(from.direction == Direction::FromDevice);
    CHECK(from.acl_name == "mud-37547-v6fr");
    CHECK(from.ace_name == "myman0-frdev");
    CHECK_FALSE(from.any_peer);
    CHECK(from.peers == std::set<Address>{dev_a, dev_b});
    CHECK(from.protocol == 17);
    CHECK(from.src_port == 12);
    CHECK(from.dst_port == 33);

    const AclRule& to = rules[1];
    CHECK(to.direction == Direction::ToDevice);
    CHECK(to.acl_name == "mud-37547-v6to");
    CHECK(to.peers == std::set<Address>{dev_a, dev_b});
    CHECK(to.src_port == 33);
    CHECK(to.dst_port == 12);

    SUBCASE("an empty inventory compiles to empty peer sets") {
        auto empty_rules = compile(m, {});
        REQUIRE(empty_rules.size() == 2);
        CHECK(empty_rules[0].peers.empty());
        CHECK_FALSE(empty_rules[0].any_peer);
    }
    SUBCASE("compilation is deterministic") {
        CHECK(compile(m, inventory) == rules);
    }
    SUBCASE("every rule traces back to its source ace") {
        for (const auto& rule : rules) {
            auto acl = std::find_if(m.acls.begin(), m.acls.end(),
                                    [&](const Acl& a) {
                                        return a.name == rule.acl_name;
                                    });
            REQUIRE(acl != m.acls.end());
            bool has_ace = false;
            for (const auto& ace : acl->aces) {
                if (ace.name == rule.ace_name) has_ace = true;
            }
            CHECK(has_ace);
        }
    }
    SUBCASE("directions never cross policies") {
        for (const auto& rule : rules) {
            if (rule.acl_name == "mud-37547-v6fr") {
                CHECK(rule.direction == Direction::FromDevice);
            } else {
                CHECK(rule.direction == Direction::ToDevice);
            }
        }
    }
}

TEST_CASE("freshness uses a strict cache-validity window") {
    auto m = parse(fixture_text());
    REQUIRE(m.cache_validity == 48);
    const std::int64_t t0 = 1'558'000'000;

    CHECK(is_fresh(m, t0, t0));                       // just fetched
    CHECK(is_fresh(m, t0, t0 + 47 * 3600));           // 47 h
    CHECK(is_fresh(m, t0, t0 + 48 * 3600 - 1));       // one second short
    CHECK_FALSE(is_fresh(m, t0, t0 + 48 * 3600));     // exactly 48 h: stale
    CHECK_FALSE(is_fresh(m, t0, t0 + 49 * 3600));
}

TEST_CASE("rfc3339 parsing") {
    CHECK(parse_rfc3339("2019-05-16T09:03:46+00:00").has_value());
    CHECK(parse_rfc3339("2019-05-16T09:03:46Z") ==
          parse_rfc3339("2019-05-16T09:03:46+00:00"));
    auto utc = parse_rfc3339("2019-05-16T09:03:46+00:00");
    auto ahead = parse_rfc3339("2019-05-16T09:03:46+02:00");
    REQUIRE(utc.has_value());
    REQUIRE(ahead.has_value());
    CHECK(*utc - *ahead == 7200);

    CHECK_FALSE(parse_rfc3339("2019-05-16").has_value());
    CHECK_FALSE(parse_rfc3339("2019-13-16T09:03:46Z").has_value());
    CHECK_FALSE(parse_rfc3339("not a date").has_value());
}

TEST_CASE("serialize/parse round trip") {
    SUBCASE("the fixture survives") {
        auto m = parse(fixture_text());
        auto again = parse(serialize(m));
        CHECK(again == m);
    }
    SUBCASE("randomized files survive") {
        std::mt19937_64 rng(2024);
        for (int i = 0; i < 25; ++i) {
            MudFile m;
            m.mud_version = 1;
            m.mud_url = "https://host/" + std::to_string(rng() % 100);
            m.last_update = "2019-05-16T09:03:46+00:00";
            m.cache_validity = 1 + static_cast<int>(rng() % 168);
            m.is_supported = rng() % 2 == 0;
            m.systeminfo = "device " + std::to_string(i);
            m.mfg_name = "mfg-" + std::to_string(rng() % 5);
            m.documentation = "https://docs";
            m.model_name = "model";
            const int acl_count = 1 + static_cast<int>(rng() % 3);
            for (int a = 0; a < acl_count; ++a) {
                Acl acl;
                acl.name = "acl-" + std::to_string(a);
                acl.type = "ipv6-acl-type";
                const int ace_count = 1 + static_cast<int>(rng() % 2);
                for (int e = 0; e < ace_count; ++e) {
                    Ace ace;
                    ace.name = "ace-" + std::to_string(a) + "-" +
                               std::to_string(e);
                    if (rng() % 2) ace.same_manufacturer = m.mfg_name;
                    if (rng() % 2) ace.protocol = static_cast<int>(rng() % 256);
                    if (rng() % 2) {
                        L4Match l4;
                        l4.kind = rng() % 2 ? L4::Udp : L4::Tcp;
                        if (rng() % 2) {
                            l4.source_port =
                                PortMatch{"eq", static_cast<int>(rng() % 65536)};
                        }
                        l4.destination_port =
                            PortMatch{"eq", static_cast<int>(rng() % 65536)};
                        ace.l4 = l4;
                    }
                    if (!ace.same_manufacturer && !ace.protocol && !ace.l4) {
                        ace.protocol = 17;
                    }
                    ace.forwarding = "accept";
                    acl.aces.push_back(ace);
                }
                // Alternate directions so each ACL has exactly one reference.
                if (a % 2 == 0) {
                    m.from_device_policy.push_back(acl.name);
                } else {
                    m.to_device_policy.push_back(acl.name);
                }
                m.acls.push_back(acl);
            }
            CAPTURE(i);
            CHECK(validate(m).empty());
            auto again = parse(serialize(m));
            CHECK(again == m);
        }
    }
}
