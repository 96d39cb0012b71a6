#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "crowd/io.hpp"

namespace crowd::io {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string s;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) s += ',';
        s += t.columns[c];
    }
    s += '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size()) throw Error("table '" + t.name + "' has a ragged row");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) s += ',';
            s += format_number(row[c]);
        }
        s += '\n';
    }
    return s;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

json write_bundle(const OutputBundle& bundle, const RunConfig& cfg, double wall_seconds) {
    if (cfg.output_dir.empty()) throw UsageError("no output directory (--out)");
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

    json files = json::array();
    auto emit = [&](const std::string& name, const std::string& bytes) {
        write_file(dir / name, bytes);
        files.push_back({{"name", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
    };
    if (cfg.wants("csv")) {
        for (const auto& t : bundle.tables) emit(t.name + ".csv", to_csv(t));
    }
    if (cfg.wants("json")) emit("summary.json", bundle.summary.dump(2) + "\n");

    json manifest = {
        {"config", to_json(cfg)},
        {"status", bundle.status},
        {"versions",
         {{"crowdsim", kVersion},
          {"boost", BOOST_LIB_VERSION},
          {"openssl", OPENSSL_VERSION_TEXT},
          {"compiler", __VERSION__}}},
        {"wall_time_seconds", wall_seconds},
        {"files", files},
    };
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

}  // namespace crowd::io
