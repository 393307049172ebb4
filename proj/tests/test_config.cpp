#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "fbshom/config.hpp"

using namespace fbshom;
using namespace fbshom::config;

namespace {
std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
} // namespace

TEST_CASE("key-value parsing") {
    std::stringstream ss("# comment\n"
                         "pair_rate = 140.5\n"
                         "  seed=7   # inline comment\n"
                         "\n"
                         "detuning_hz = 3e8\n");
    const auto kv = parse_key_values(ss);
    REQUIRE(kv.size() == 3);
    CHECK(kv.at("pair_rate") == "140.5");
    CHECK(kv.at("seed") == "7");
    CHECK(kv.at("detuning_hz") == "3e8");

    std::stringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS(parse_key_values(dup), config_error);
    std::stringstream noeq("just words\n");
    CHECK_THROWS_AS(parse_key_values(noeq), config_error);
}

TEST_CASE("experiment config from keys") {
    KeyValues kv{{"pair_rate", "140"},
                 {"detuning_hz", "3e8"},
                 {"strength", "0.3926990816987241"},
                 {"seed", "99"},
                 {"linewidth_hz", "2.7e8"}};
    const auto c = experiment_config(kv);
    CHECK(c.pair_rate == 140.0);
    CHECK(c.detuning == doctest::Approx(spectral::two_pi * 3e8));
    CHECK(c.source.linewidth == doctest::Approx(spectral::two_pi * 2.7e8));
    CHECK(c.seed == 99);
    CHECK(c.fbs.strength == doctest::Approx(0.3926990816987241));

    KeyValues unknown{{"pair_rte", "140"}};
    CHECK_THROWS_AS(experiment_config(unknown), config_error);
    KeyValues junk{{"pair_rate", "140x"}};
    CHECK_THROWS_AS(experiment_config(junk), config_error);
    KeyValues bad{{"seed", "0"}};
    CHECK_THROWS_AS(experiment_config(bad), invalid_parameter);
}

TEST_CASE("resolved config round trip") {
    montecarlo::ExperimentConfig c;
    c.source.pump_frequency = spectral::two_pi * 233.75e12;
    c.pair_rate = 123.25;
    c.detuning = spectral::two_pi * 6e8;
    c.seed = 1234567890123ULL;
    c.fbs.strength = 0.25;
    const auto kv = to_key_values(c, true);
    CHECK(autocorrelation_flag(kv));
    const auto back = experiment_config(kv);
    CHECK(back.pair_rate == c.pair_rate);
    CHECK(back.detuning == doctest::Approx(c.detuning).epsilon(1e-15));
    CHECK(back.seed == c.seed);
    CHECK(back.fbs.strength == c.fbs.strength);
    CHECK(back.source.pump_frequency == doctest::Approx(c.source.pump_frequency).epsilon(1e-15));
}

TEST_CASE("config hash is stable and content sensitive") {
    KeyValues a{{"x", "1"}, {"y", "2"}};
    KeyValues b{{"y", "2"}, {"x", "1"}};
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    KeyValues c{{"x", "1"}, {"y", "3"}};
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("manifest round trip and tamper detection") {
    Manifest m;
    m.subcommand = "simulate";
    m.config = {{"pair_rate", "140"}, {"seed", "7"}};
    m.outputs = {"histogram.csv", "events.txt"};
    const auto path = temp_path("fbshom_manifest_test.json");
    write_manifest(m, path);
    const auto back = read_manifest(path);
    CHECK(back.subcommand == "simulate");
    CHECK(back.config == m.config);
    CHECK(back.outputs == m.outputs);
    CHECK(back.hash == config_hash(m.config));

    // tamper with a value: the stored hash no longer matches
    nlohmann::json j;
    {
        std::ifstream is(path);
        is >> j;
    }
    j["config"]["pair_rate"] = "141";
    {
        std::ofstream os(path);
        os << j.dump(2);
    }
    CHECK_THROWS_AS(read_manifest(path), config_error);
    std::remove(path.c_str());
}

TEST_CASE("CSV to JSON mirror") {
    const auto csv = temp_path("fbshom_mirror_test.csv");
    const auto json_path = temp_path("fbshom_mirror_test.json");
    {
        std::ofstream os(csv);
        os << "a,b,c\n1,2,3\n4,5,6\n";
    }
    write_csv_json_mirror(csv, json_path);
    nlohmann::json j;
    {
        std::ifstream is(json_path);
        is >> j;
    }
    CHECK(j["header"] == nlohmann::json({"a", "b", "c"}));
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][1][2] == "6");
    std::remove(csv.c_str());
    std::remove(json_path.c_str());
}
