#include "bounce/io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bounce {

namespace {

[[noreturn]] void config_error(int line_no, const std::string& line, const std::string& why) {
    std::ostringstream msg;
    msg << "config line " << line_no << ": " << why << " (\"" << line << "\")";
    throw std::invalid_argument(msg.str());
}

double parse_number(const std::string& token, int line_no, const std::string& line) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        config_error(line_no, line, "expected a number, got \"" + token + "\"");
    }
    if (used != token.size())
        config_error(line_no, line, "trailing characters in number \"" + token + "\"");
    return v;
}

long parse_integer(const std::string& token, int line_no, const std::string& line) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(token, &used);
    } catch (const std::exception&) {
        config_error(line_no, line, "expected an integer, got \"" + token + "\"");
    }
    if (used != token.size())
        config_error(line_no, line, "trailing characters in integer \"" + token + "\"");
    return v;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;

        std::vector<std::string> args;
        std::string tok;
        while (ls >> tok) args.push_back(tok);
        auto want = [&](std::size_t n) {
            if (args.size() != n)
                config_error(line_no, raw, "key \"" + key + "\" takes " + std::to_string(n) + " argument(s)");
        };

        if (key == "g") {
            want(1);
            cfg.g = parse_number(args[0], line_no, raw);
            if (cfg.g <= 0) config_error(line_no, raw, "g must be positive");
        } else if (key == "mean_offset") {
            want(1);
            cfg.mean_offset = parse_number(args[0], line_no, raw);
        } else if (key == "harmonic") {
            want(3);
            long j = parse_integer(args[0], line_no, raw);
            if (j < 1 || j > 64) config_error(line_no, raw, "harmonic index must lie in 1..64");
            if (cfg.harmonics.size() < static_cast<std::size_t>(j))
                cfg.harmonics.resize(static_cast<std::size_t>(j));
            cfg.harmonics[static_cast<std::size_t>(j) - 1] = {
                parse_number(args[1], line_no, raw), parse_number(args[2], line_no, raw)};
        } else if (key == "seed") {
            want(1);
            long s = parse_integer(args[0], line_no, raw);
            if (s < 0) config_error(line_no, raw, "seed must be nonnegative");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "tol_root") {
            want(1);
            cfg.tol_root = parse_number(args[0], line_no, raw);
        } else if (key == "tol_quad") {
            want(1);
            cfg.tol_quad = parse_number(args[0], line_no, raw);
        } else if (key == "tol_el") {
            want(1);
            cfg.tol_el = parse_number(args[0], line_no, raw);
        } else if (key == "ratio") {
            want(1);
            auto slash = args[0].find('/');
            if (slash == std::string::npos)
                config_error(line_no, raw, "ratio must look like p/q");
            cfg.p = static_cast<int>(parse_integer(args[0].substr(0, slash), line_no, raw));
            cfg.q = static_cast<int>(parse_integer(args[0].substr(slash + 1), line_no, raw));
            if (cfg.q < 1) config_error(line_no, raw, "ratio denominator must be >= 1");
        } else if (key == "window") {
            want(1);
            cfg.window = static_cast<int>(parse_integer(args[0], line_no, raw));
        } else if (key == "depth") {
            want(1);
            cfg.depth = static_cast<int>(parse_integer(args[0], line_no, raw));
        } else if (key == "multistarts") {
            want(1);
            cfg.multistarts = static_cast<int>(parse_integer(args[0], line_no, raw));
        } else if (key == "bounces") {
            want(1);
            cfg.bounces = static_cast<int>(parse_integer(args[0], line_no, raw));
        } else if (key == "accel_bounces") {
            want(1);
            cfg.accel_bounces = static_cast<int>(parse_integer(args[0], line_no, raw));
        } else if (key == "t0") {
            want(1);
            cfg.t0 = parse_number(args[0], line_no, raw);
        } else if (key == "w0") {
            want(1);
            cfg.w0 = parse_number(args[0], line_no, raw);
        } else if (key == "alpha") {
            want(1);
            cfg.alpha = parse_number(args[0], line_no, raw);
        } else if (key == "out_dir") {
            want(1);
            cfg.out_dir = args[0];
        } else {
            config_error(line_no, raw, "unknown key \"" + key + "\"");
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "g " << format_double(cfg.g) << "\n";
    out << "mean_offset " << format_double(cfg.mean_offset) << "\n";
    for (std::size_t j = 0; j < cfg.harmonics.size(); ++j) {
        const auto& h = cfg.harmonics[j];
        if (h.a == 0.0 && h.b == 0.0) continue;
        out << "harmonic " << (j + 1) << " " << format_double(h.a) << " "
            << format_double(h.b) << "\n";
    }
    out << "seed " << cfg.seed << "\n";
    out << "tol_root " << format_double(cfg.tol_root) << "\n";
    out << "tol_quad " << format_double(cfg.tol_quad) << "\n";
    out << "tol_el " << format_double(cfg.tol_el) << "\n";
    out << "ratio " << cfg.p << "/" << cfg.q << "\n";
    out << "window " << cfg.window << "\n";
    out << "depth " << cfg.depth << "\n";
    out << "multistarts " << cfg.multistarts << "\n";
    out << "bounces " << cfg.bounces << "\n";
    out << "accel_bounces " << cfg.accel_bounces << "\n";
    out << "t0 " << format_double(cfg.t0) << "\n";
    out << "w0 " << format_double(cfg.w0) << "\n";
    out << "alpha " << format_double(cfg.alpha) << "\n";
    out << "out_dir " << cfg.out_dir << "\n";
    return out.str();
}

ForcingFunction make_forcing(const RunConfig& cfg) {
    return ForcingFunction(cfg.mean_offset, cfg.harmonics);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory " + p.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json harmonics = ordered_json::array();
    for (std::size_t j = 0; j < cfg.harmonics.size(); ++j) {
        if (cfg.harmonics[j].a == 0.0 && cfg.harmonics[j].b == 0.0) continue;
        harmonics.push_back({{"j", j + 1}, {"a", cfg.harmonics[j].a}, {"b", cfg.harmonics[j].b}});
    }
    return ordered_json{{"library_version", kLibraryVersion},
                        {"g", cfg.g},
                        {"mean_offset", cfg.mean_offset},
                        {"harmonics", harmonics},
                        {"tol_root", cfg.tol_root},
                        {"tol_quad", cfg.tol_quad},
                        {"tol_el", cfg.tol_el},
                        {"ratio", std::to_string(cfg.p) + "/" + std::to_string(cfg.q)},
                        {"window", cfg.window},
                        {"depth", cfg.depth},
                        {"multistarts", cfg.multistarts},
                        {"bounces", cfg.bounces},
                        {"accel_bounces", cfg.accel_bounces},
                        {"t0", cfg.t0},
                        {"w0", cfg.w0},
                        {"alpha", cfg.alpha},
                        {"out_dir", cfg.out_dir}};
}

ordered_json make_manifest(const RunConfig& cfg, ordered_json results,
                           ordered_json defects, double wall_ms) {
    auto now = std::chrono::system_clock::now();
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    return ordered_json{{"config", config_json(cfg)},
                        {"seed", cfg.seed},
                        {"results", std::move(results)},
                        {"defects", std::move(defects)},
                        {"timing", ordered_json{{"wall_ms", wall_ms}, {"written_at_unix", secs}}}};
}

std::string manifest_text_without_timing(ordered_json manifest) {
    manifest.erase("timing");
    return manifest.dump(2);
}

} // namespace bounce
