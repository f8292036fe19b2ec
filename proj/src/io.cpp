#include "mslab/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mslab/errors.hpp"

namespace mslab {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

double parse_cell(const std::string& token, std::size_t row, std::size_t col) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || begin == end)
        throw ParseError("unparseable number at row " + std::to_string(row) + ", column " +
                         std::to_string(col));
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

json grid_to_json(const DomainGrid& grid) {
    json extents = json::array();
    json counts = json::array();
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        extents.push_back({grid.lo(a), grid.hi(a)});
        counts.push_back(grid.count(a));
    }
    return {{"dims", grid.dim()}, {"extents", extents}, {"counts", counts}};
}

DomainGrid grid_from_json(const json& j) {
    std::vector<double> lo, hi;
    std::vector<std::size_t> count;
    for (const auto& e : j.at("extents")) {
        lo.push_back(e.at(0).get<double>());
        hi.push_back(e.at(1).get<double>());
    }
    for (const auto& c : j.at("counts")) count.push_back(c.get<std::size_t>());
    return DomainGrid(lo, hi, count);
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ParticleEnsemble ingest_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + path);

    ParticleEnsemble out;
    std::string line;
    std::size_t row = 0;
    std::size_t columns = 0;
    bool first_content_row = true;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (first_content_row) {
            // a first row that fails numeric parsing is a header
            bool numeric = !cells.empty();
            for (std::size_t c = 0; numeric && c < cells.size(); ++c) {
                try {
                    parse_cell(cells[c], row, c + 1);
                } catch (const ParseError&) {
                    numeric = false;
                }
            }
            first_content_row = false;
            if (!numeric) {
                columns = cells.size();
                continue;
            }
        }
        if (columns == 0) columns = cells.size();
        if (cells.size() != columns)
            throw DimensionMismatch("row " + std::to_string(row) + " has " +
                                    std::to_string(cells.size()) + " columns, expected " +
                                    std::to_string(columns));
        for (std::size_t c = 0; c < cells.size(); ++c)
            out.positions.push_back(parse_cell(cells[c], row, c + 1));
    }
    if (columns == 0 || out.positions.empty())
        throw ParseError("dataset has no data rows: " + path);
    out.dim = columns;
    return out;
}

void save_particles_csv(const ParticleEnsemble& particles, const std::string& path) {
    std::ofstream out = open_out(path);
    for (std::size_t a = 0; a < particles.dim; ++a)
        out << (a ? ",x" : "x") << a;
    out << '\n';
    for (std::size_t i = 0; i < particles.size(); ++i) {
        const double* p = particles.point(i);
        for (std::size_t a = 0; a < particles.dim; ++a) {
            if (a) out << ',';
            out << format_double(p[a]);
        }
        out << '\n';
    }
    finish(out, path);
}

void write_frame_json(const DensityFrame& frame, const std::string& path) {
    json j{{"grid", grid_to_json(frame.grid())},
           {"time", frame.time()},
           {"values", frame.values()}};
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

DensityFrame load_frame_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open frame: " + path);
    json j;
    try {
        in >> j;
        return DensityFrame(grid_from_json(j.at("grid")),
                            j.at("values").get<std::vector<double>>(),
                            j.at("time").get<double>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("frame json: ") + e.what());
    }
}

void write_trajectory_jsonl(const TrajectoryLog& log, const std::string& path,
                            bool include_positions) {
    std::ofstream out = open_out(path);
    for (std::size_t k = 0; k < log.snapshots.size(); ++k) {
        json rec{{"iter", k},
                 {"time", log.timestamps[k]},
                 {"max_step", k == 0 ? 0.0 : log.max_step[k - 1]}};
        if (include_positions) rec["positions"] = log.snapshots[k].positions;
        out << rec.dump() << '\n';
    }
    finish(out, path);
}

void write_diagnostics_csv(const DiagnosticSeries& series, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "time,entropy,entropy_rate_analytic";
    for (std::size_t a = 0; a < series.variance.size(); ++a) out << ",var_axis" << a;
    out << ",mass,residual,gap\n";
    for (std::size_t k = 0; k < series.stamps(); ++k) {
        out << format_double(series.time[k]) << ',' << format_double(series.entropy[k])
            << ',' << format_double(series.entropy_rate[k]);
        for (const auto& axis : series.variance) out << ',' << format_double(axis[k]);
        out << ',' << format_double(series.mass[k]) << ','
            << format_double(series.residual[k]) << ',' << format_double(series.gap[k])
            << '\n';
    }
    finish(out, path);
}

void write_evolution_json(const EvolutionReport& report, const std::string& path) {
    json j{{"t_grid", report.t_grid},
           {"mass_clipped", report.mass_clipped},
           {"max_growth", report.max_growth},
           {"blew_up", report.blew_up}};
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for hashing: " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw IoError("digest context allocation failed");
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("digest init failed");
    }
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        if (EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount())) != 1) {
            EVP_MD_CTX_free(ctx);
            throw IoError("digest update failed");
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("digest final failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

} // namespace mslab
