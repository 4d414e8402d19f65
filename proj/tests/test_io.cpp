#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bounce/io.hpp"

using namespace bounce;

namespace {

RunConfig sample_config() {
    RunConfig cfg;
    cfg.g = 2.5;
    cfg.mean_offset = 0.125;
    cfg.harmonics = {{0.0, 0.05}, {0.0, 0.0}, {0.25, -0.125}};
    cfg.seed = 987654321;
    cfg.tol_root = 1e-11;
    cfg.tol_quad = 1e-9;
    cfg.tol_el = 1e-10;
    cfg.p = 7;
    cfg.q = 3;
    cfg.window = 21;
    cfg.depth = 4;
    cfg.multistarts = 5;
    cfg.bounces = 321;
    cfg.accel_bounces = 555;
    cfg.t0 = 0.375;
    cfg.w0 = 9.5;
    cfg.alpha = 4.75;
    cfg.out_dir = "somewhere/deep";
    return cfg;
}

} // namespace

TEST_CASE("config text round trip preserves every field") {
    const RunConfig cfg = sample_config();
    const RunConfig back = parse_config_text(config_text(cfg));
    CHECK(back.g == cfg.g);
    CHECK(back.mean_offset == cfg.mean_offset);
    REQUIRE(back.harmonics.size() == cfg.harmonics.size());
    for (std::size_t i = 0; i < cfg.harmonics.size(); ++i) {
        CHECK(back.harmonics[i].a == cfg.harmonics[i].a);
        CHECK(back.harmonics[i].b == cfg.harmonics[i].b);
    }
    CHECK(back.seed == cfg.seed);
    CHECK(back.tol_root == cfg.tol_root);
    CHECK(back.tol_quad == cfg.tol_quad);
    CHECK(back.tol_el == cfg.tol_el);
    CHECK(back.p == cfg.p);
    CHECK(back.q == cfg.q);
    CHECK(back.window == cfg.window);
    CHECK(back.depth == cfg.depth);
    CHECK(back.multistarts == cfg.multistarts);
    CHECK(back.bounces == cfg.bounces);
    CHECK(back.accel_bounces == cfg.accel_bounces);
    CHECK(back.t0 == cfg.t0);
    CHECK(back.w0 == cfg.w0);
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.out_dir == cfg.out_dir);
}

TEST_CASE("comments, blank lines, and repeated keys") {
    const RunConfig cfg = parse_config_text(
        "# a comment\n"
        "\n"
        "g 2\n"
        "g 3.5\n"
        "harmonic 2 0.01 0\n"
        "ratio 11/4\n");
    CHECK(cfg.g == 3.5); // last assignment wins
    REQUIRE(cfg.harmonics.size() == 2);
    CHECK(cfg.harmonics[0].a == 0.0);
    CHECK(cfg.harmonics[1].a == 0.01);
    CHECK(cfg.p == 11);
    CHECK(cfg.q == 4);
}

TEST_CASE("malformed configs are rejected with the offending line") {
    auto reject = [](const std::string& text) {
        CHECK_THROWS_AS((void)parse_config_text(text), std::invalid_argument);
    };
    reject("gg 1\n");              // unknown key
    reject("g one\n");             // not a number
    reject("g 1.5x\n");            // trailing characters
    reject("g -2\n");              // must be positive
    reject("harmonic 0 1 2\n");    // index below 1
    reject("harmonic 65 0 0\n");   // index above 64
    reject("harmonic 1 0.1\n");    // missing coefficient
    reject("ratio 5\n");           // no slash
    reject("ratio 5/0\n");         // zero denominator
    reject("seed -3\n");           // negative seed
    // the error message carries the line number of the offending line
    try {
        parse_config_text("g 1\nbogus 2\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("double formatting: 15 significant digits, round trip on plain values") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5e-13) == "-2.5e-13");
    for (double v : {0.05, 123.456, 1e-300, -7.25, 3.0 / 4.0, 1e20}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("csv assembly and width validation") {
    const std::string text =
        csv_text({"a", "b"}, {{1.0, 0.5}, {2.0, 0.25}});
    CHECK(text == "a,b\n1,0.5\n2,0.25\n");
    CHECK_THROWS_AS((void)csv_text({"a", "b"}, {{1.0}}), std::invalid_argument);
}

TEST_CASE("manifest field order and timestamp isolation") {
    const RunConfig cfg = sample_config();
    const auto m1 = make_manifest(cfg, {{"answer", 42}}, {{"none", 0}}, 12.5);
    std::vector<std::string> keys;
    for (auto it = m1.begin(); it != m1.end(); ++it) keys.push_back(it.key());
    REQUIRE(keys.size() == 5);
    CHECK(keys[0] == "config");
    CHECK(keys[1] == "seed");
    CHECK(keys[2] == "results");
    CHECK(keys[3] == "defects");
    CHECK(keys[4] == "timing");
    CHECK(m1["config"]["library_version"] == kLibraryVersion);
    CHECK(m1["config"]["g"] == cfg.g);
    CHECK(m1["seed"] == cfg.seed);
    CHECK(m1["timing"].contains("wall_ms"));
    CHECK(m1["timing"].contains("written_at_unix"));
    // everything except timing is byte-deterministic
    const auto m2 = make_manifest(cfg, {{"answer", 42}}, {{"none", 0}}, 9999.0);
    CHECK(manifest_text_without_timing(m1) == manifest_text_without_timing(m2));
    CHECK(manifest_text_without_timing(m1).find("timing") == std::string::npos);
}

TEST_CASE("config json skips silent harmonics but keeps indices") {
    const auto j = config_json(sample_config());
    REQUIRE(j["harmonics"].size() == 2); // the zero pair at j = 2 is omitted
    CHECK(j["harmonics"][0]["j"] == 1);
    CHECK(j["harmonics"][1]["j"] == 3);
    CHECK(j["harmonics"][1]["a"] == 0.25);
    CHECK(j["ratio"] == "7/3");
}

TEST_CASE("forcing assembly from a config") {
    RunConfig cfg;
    cfg.mean_offset = 0.125;
    cfg.harmonics = {{0.0, 0.03}, {0.01, 0.0}};
    const ForcingFunction f = make_forcing(cfg);
    CHECK(f(0.0) == doctest::Approx(0.135).epsilon(1e-15));
    CHECK(f(0.25) == doctest::Approx(0.145).epsilon(1e-14));
}

TEST_CASE("file writing creates parents; config files parse back") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "bounce_io_test_scratch";
    const fs::path path = dir / "a" / "b" / "config.txt";
    const RunConfig cfg = sample_config();
    write_text_file(path.string(), config_text(cfg));
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream read_back;
    read_back << in.rdbuf();
    CHECK(read_back.str() == config_text(cfg));
    const RunConfig parsed = parse_config_file(path.string());
    CHECK(parsed.g == cfg.g);
    CHECK(parsed.out_dir == cfg.out_dir);
    CHECK_THROWS_AS((void)parse_config_file((dir / "absent.txt").string()),
                    std::runtime_error);
    in.close();
    fs::remove_all(dir);
}
