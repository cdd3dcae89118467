#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ensemble.hpp"
#include "lattice.hpp"
#include "model.hpp"
#include "modes.hpp"
#include "report.hpp"
#include "spectrum.hpp"
#include "stats.hpp"
#include "version.hpp"

namespace fermispec {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Run manifest

struct RunManifest {
    std::vector<std::string> command_line;
    std::string model;
    json params = json::object();
    std::optional<std::uint64_t> seed;
    std::size_t realizations = 1;
    std::optional<std::size_t> n;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;
    std::string software_version = version;
};

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json to_json(const RunManifest& m) {
    json j;
    j["command_line"] = m.command_line;
    j["model"] = m.model;
    j["params"] = m.params;
    j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
    j["realizations"] = m.realizations;
    j["n"] = m.n ? json(*m.n) : json(nullptr);
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["outputs"] = m.outputs;
    j["software_version"] = m.software_version;
    return j;
}

// ---------------------------------------------------------------------------
// Lattice

inline json to_json(const Lattice& l) {
    json edges = json::array();
    for (const auto& [i, j] : l.edges()) edges.push_back({i, j});
    return {{"kind", std::string(to_string(l.kind()))},
            {"dimensions", l.dimensions()},
            {"boundary", std::string(to_string(l.boundary()))},
            {"edges", std::move(edges)}};
}

inline Lattice lattice_from_json(const json& j) {
    try {
        const Lattice l = build_lattice(parse_lattice_kind(j.at("kind").get<std::string>()),
                                        j.at("dimensions").get<std::vector<std::size_t>>(),
                                        parse_boundary(j.at("boundary").get<std::string>()));
        if (j.contains("edges")) {
            std::vector<Edge> edges;
            for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
            if (edges != l.edges()) throw FormatError("lattice edges do not match kind/dimensions/boundary");
        }
        return l;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("lattice JSON: ") + ex.what());
    }
}

// ---------------------------------------------------------------------------
// Provenance

inline json seed_to_json(const std::optional<SeedSpec>& s) {
    if (!s) return nullptr;
    return {{"master_seed", s->master_seed}, {"realization_index", s->realization_index}};
}

inline std::optional<SeedSpec> seed_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return SeedSpec{j.at("master_seed").get<std::uint64_t>(), j.at("realization_index").get<std::uint64_t>()};
}

inline Provenance provenance_from_json(const json& j) {
    Provenance p;
    p.model = j.value("model", std::string{});
    if (j.contains("params") && j.at("params").is_object())
        for (const auto& [k, v] : j.at("params").items()) p.params[k] = v.get<double>();
    if (j.contains("seed")) p.seed = seed_from_json(j.at("seed"));
    return p;
}

// ---------------------------------------------------------------------------
// CoefficientPair

inline json to_json(const CoefficientPair& c) {
    return {{"n", c.n},
            {"model", c.provenance.model},
            {"params", c.provenance.params},
            {"seed", seed_to_json(c.provenance.seed)},
            {"A", c.A.values()},
            {"B", c.B.values()}};
}

inline CoefficientPair coefficients_from_json(const json& j) {
    try {
        const auto n = j.at("n").get<std::size_t>();
        DenseMatrix a(n, j.at("A").get<std::vector<double>>());
        DenseMatrix b(n, j.at("B").get<std::vector<double>>());
        CoefficientPair c(std::move(a), std::move(b), provenance_from_json(j));
        if (const auto r = validate(c); !r.ok()) throw FormatError("coefficients: " + r.message());
        return c;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("coefficient JSON: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw FormatError(std::string("coefficient JSON: ") + ex.what());
    }
}

// ---------------------------------------------------------------------------
// ExcitationSet

inline json to_json(const ExcitationSet& e) {
    return {{"n", e.n},
            {"K", e.K},
            {"lambdas", e.lambdas},
            {"sigma_sq_hat", e.sigma_sq_hat},
            {"op_norm", e.op_norm},
            {"model", e.provenance.model},
            {"params", e.provenance.params},
            {"seed", seed_to_json(e.provenance.seed)}};
}

inline ExcitationSet excitations_from_json(const json& j) {
    try {
        auto lambdas = j.at("lambdas").get<std::vector<double>>();
        const auto n = j.at("n").get<std::size_t>();
        if (lambdas.size() != n) throw FormatError("excitations: lambdas has " + std::to_string(lambdas.size()) +
                                                   " entries, n = " + std::to_string(n));
        return make_excitations(std::move(lambdas), j.at("K").get<double>(), provenance_from_json(j));
    } catch (const json::exception& ex) {
        throw FormatError(std::string("excitation JSON: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw FormatError(std::string("excitation JSON: ") + ex.what());
    }
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const KolmogorovResult& k) {
    return {{"distance", k.distance}, {"bin_resolution", k.bin_resolution}};
}

inline json to_json(const GroundStateReport& g) {
    return {{"E1", g.E1},
            {"gap", g.gap},
            {"E1_over_n", g.E1_over_n},
            {"E1_cubic_scaling", g.E1_cubic_scaling},
            {"gap_rescaled", g.gap_rescaled},
            {"gap_sqrt_scaling", g.gap_sqrt_scaling}};
}

inline json to_json(const Histogram& h) {
    return {{"lo", h.lo},         {"hi", h.hi},           {"counts", h.counts},
            {"underflow", h.underflow}, {"overflow", h.overflow}, {"total", h.total}};
}

inline json to_json(const SpacingReport& s) {
    return {{"ks_vs_exponential", s.ks_vs_exponential},
            {"sample_count", s.sample_count},
            {"degenerate_count", s.degenerate_count},
            {"degenerate_fraction", s.degenerate_fraction},
            {"mean_spacing", s.mean_spacing},
            {"histogram", to_json(s.histogram)}};
}

template <class T>
json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_arithmetic_v<T>) return *v;
    else return to_json(*v);
}

inline json to_json(const SpectralReport& r) {
    return {{"model", r.model},
            {"n", r.n},
            {"level_count", r.level_count},
            {"K", r.K},
            {"total_sigma", r.total_sigma},
            {"ks_finite", to_json(r.ks_finite)},
            {"limit_variance", optional_json(r.limit_variance)},
            {"ks_limit", optional_json(r.ks_limit)},
            {"berry_esseen_bound", optional_json(r.be_bound)},
            {"berry_esseen_moment_form", optional_json(r.be_moment_form)},
            {"ground_state", to_json(r.ground)},
            {"spacings", optional_json(r.spacings)}};
}

inline json to_json(const EnsembleReport& r) {
    json scalars = json::object();
    for (const auto& [name, s] : r.scalars) scalars[name] = {{"mean", s.mean}, {"stderr", s.stderr_}};
    json j{{"model", r.model},
           {"n", r.n},
           {"realizations", r.realizations},
           {"seed", r.seed},
           {"scalars", std::move(scalars)}};
    if (r.histogram) {
        j["histogram"] = to_json(*r.histogram);
        j["density_stderr"] = r.density_stderr;
        j["kurtosis"] = r.kurtosis;
        j["kurtosis_stderr"] = r.kurtosis_stderr;
        j["variance"] = r.averaged_moments.variance();
    }
    return j;
}

// ---------------------------------------------------------------------------
// Histogram CSV

/// Metadata written as `# key: value` lines ahead of the data rows.
using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

inline void write_histogram_csv(std::ostream& out, const Histogram& h, const CsvMetadata& meta) {
    for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
    out << "# bins: " << h.bins() << '\n';
    out << "# lo: " << format_double(h.lo) << '\n';
    out << "# hi: " << format_double(h.hi) << '\n';
    out << "# underflow: " << h.underflow << '\n';
    out << "# overflow: " << h.overflow << '\n';
    out << "# total: " << h.total << '\n';
    out << "bin_left,bin_right,count,density\n";
    for (std::size_t i = 0; i < h.bins(); ++i)
        out << format_double(h.bin_left(i)) << ',' << format_double(h.bin_right(i)) << ',' << h.counts[i] << ','
            << format_double(h.density(i)) << '\n';
}

/// Parses a file produced by write_histogram_csv. Metadata lines are returned verbatim.
inline Histogram read_histogram_csv(std::istream& in, CsvMetadata* meta = nullptr) {
    std::string line;
    std::optional<double> lo, hi;
    std::uint64_t under = 0, over = 0, total = 0;
    std::vector<std::uint64_t> counts;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = line.substr(2, colon - 2), value = line.substr(colon + 2);
            if (key == "lo") lo = std::stod(value);
            else if (key == "hi") hi = std::stod(value);
            else if (key == "underflow") under = std::stoull(value);
            else if (key == "overflow") over = std::stoull(value);
            else if (key == "total") total = std::stoull(value);
            if (meta) meta->emplace_back(std::move(key), std::move(value));
            continue;
        }
        if (!header) {
            if (line != "bin_left,bin_right,count,density") throw FormatError("histogram CSV: missing header row");
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        for (int c = 0; c < 3; ++c) std::getline(row, cell, ',');
        counts.push_back(std::stoull(cell));
    }
    if (!lo || !hi || counts.empty()) throw FormatError("histogram CSV: incomplete");
    Histogram h(*lo, *hi, counts.size());
    h.counts = std::move(counts);
    h.underflow = under;
    h.overflow = over;
    h.total = total;
    return h;
}

// ---------------------------------------------------------------------------
// Raw level files: consecutive little-endian IEEE doubles

inline void write_levels_bin(std::ostream& out, const std::vector<double>& levels) {
    for (double v : levels) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

inline std::vector<double> read_levels_bin(std::istream& in) {
    std::vector<double> out;
    unsigned char bytes[8];
    while (in.read(reinterpret_cast<char*>(bytes), 8)) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= std::uint64_t{bytes[b]} << (8 * b);
        out.push_back(std::bit_cast<double>(bits));
    }
    if (in.gcount() != 0) throw FormatError("levels file length is not a multiple of 8 bytes");
    return out;
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw FormatError(path + ": " + ex.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
    if (!out) throw FormatError("write failed: " + path);
}

}  // namespace fermispec
