#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fermispec.hpp>

namespace fermispec::cli {

enum ExitCode : int { ok = 0, validation_error = 1, resource_guard = 2 };

struct GlobalOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    bool quiet = false;
};

/// Model selection flags shared by model, modes, ensemble and sweep.
struct ModelOptions {
    std::string name;
    std::size_t n = 0;
    std::uint64_t realization = 0;
    double gamma = 1.0;
    double h = 1.0;
    bool closed_form = false;
    double p = 0.5;
    double t = 1.0;
    double W = 1.0;
    std::string potential = "uniform";
    std::string lattice = "ring";
    std::vector<std::size_t> dims;
    std::string boundary;
    double s = 1.0;
    std::size_t bandwidth = 1;
    std::string entries = "gaussian";
    double xi = 1.0;
    std::vector<double> xi_support;
};

inline void add_model_options(CLI::App* cmd, ModelOptions& m, bool with_n = true) {
    if (with_n) cmd->add_option("--n", m.n, "number of modes")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--realization", m.realization, "realization index under --seed");
    cmd->add_option("--gamma", m.gamma, "xy anisotropy");
    cmd->add_option("--h", m.h, "ising transverse field");
    cmd->add_flag("--closed-form", m.closed_form, "ising: closed-form excitations instead of the free chain");
    cmd->add_option("--p", m.p, "percolation bond probability");
    cmd->add_option("--t", m.t, "anderson hopping");
    cmd->add_option("--W", m.W, "anderson potential standard deviation");
    cmd->add_option("--potential", m.potential, "anderson potential law")
        ->check(CLI::IsMember({"uniform", "gaussian", "rademacher"}));
    cmd->add_option("--lattice", m.lattice, "lattice kind")->check(CLI::IsMember({"path", "ring", "hypercubic"}));
    cmd->add_option("--dims", m.dims, "lattice dimensions (default: n)")->delimiter(',');
    cmd->add_option("--boundary", m.boundary, "lattice boundary")->check(CLI::IsMember({"free", "periodic"}));
    cmd->add_option("--s", m.s, "gaussian model scale");
    cmd->add_option("--bandwidth", m.bandwidth, "band model width");
    cmd->add_option("--entries", m.entries, "band model entry law")
        ->check(CLI::IsMember({"uniform", "gaussian", "rademacher"}));
    cmd->add_option("--xi", m.xi, "constant model value");
    cmd->add_option("--xi-support", m.xi_support, "constant model: draw xi uniformly from these values")
        ->delimiter(',');
}

inline Lattice lattice_for(const ModelOptions& m) {
    const LatticeKind kind = parse_lattice_kind(m.lattice);
    std::vector<std::size_t> dims = m.dims.empty() ? std::vector<std::size_t>{m.n} : m.dims;
    Boundary b;
    if (!m.boundary.empty()) b = parse_boundary(m.boundary);
    else b = kind == LatticeKind::path ? Boundary::free : Boundary::periodic;
    return build_lattice(kind, std::move(dims), b);
}

inline ModelParams model_params(const ModelOptions& m) {
    const std::string& name = m.name;
    if (name == "xy") return XYParams{m.gamma};
    if (name == "ising") return IsingParams{m.h, m.closed_form ? IsingMode::closed_form : IsingMode::free_array};
    if (name == "percolation") return PercolationParams{lattice_for(m), m.p};
    if (name == "anderson")
        return AndersonParams{lattice_for(m), m.t, DistributionSpec{parse_entry_law(m.potential), 0.0, m.W}};
    if (name == "gaussian") return GaussianParams{m.s};
    if (name == "band") return BandParams{m.bandwidth, DistributionSpec{parse_entry_law(m.entries), 0.0, 1.0}};
    if (name == "constant") return ConstantParams{m.xi, m.xi_support};
    throw std::invalid_argument("unknown model '" + name + "'");
}

inline const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names{"xy", "ising", "percolation", "anderson", "gaussian", "band", "constant"};
    return names;
}

/// Parameters recorded in manifests: only the flags that affect the chosen model.
inline json params_json(const ModelOptions& m) {
    json j = json::object();
    const std::string& name = m.name;
    if (name == "xy") j["gamma"] = m.gamma;
    if (name == "ising") {
        j["h"] = m.h;
        j["mode"] = m.closed_form ? "closed_form" : "free_array";
    }
    if (name == "percolation" || name == "anderson") {
        const Lattice l = lattice_for(m);
        j["lattice"] = std::string(to_string(l.kind()));
        j["dimensions"] = l.dimensions();
        j["boundary"] = std::string(to_string(l.boundary()));
    }
    if (name == "percolation") j["p"] = m.p;
    if (name == "anderson") {
        j["t"] = m.t;
        j["W"] = m.W;
        j["potential"] = m.potential;
    }
    if (name == "gaussian") j["s"] = m.s;
    if (name == "band") {
        j["bandwidth"] = m.bandwidth;
        j["entries"] = m.entries;
    }
    if (name == "constant") {
        j["xi"] = m.xi;
        if (!m.xi_support.empty()) j["xi_support"] = m.xi_support;
    }
    return j;
}

/// Excitations for one realization of the selected model.
inline ExcitationSet model_excitations(const ModelOptions& m, std::uint64_t seed) {
    if (m.name == "ising" && m.closed_form) {
        return make_excitations(ising_transverse_excitations(m.n, m.h), 0.0,
                                Provenance{"ising", {{"h", m.h}}, std::nullopt});
    }
    return decompose(build_model(model_params(m), m.n, SeedSpec{seed, m.realization}));
}

class Runner {
public:
    Runner(std::vector<std::string> args, std::ostream& out, std::ostream& err)
        : args_(std::move(args)), out_(out), err_(err) {}

    int run() {
        CLI::App app{"Exact spectra and spectral statistics of quadratic Fermi forms", "fermispec"};
        app.set_help_flag("--help", "print this help and exit");
        app.require_subcommand(1);
        app.add_option("--seed", g_.seed, "master seed for random models");
        app.add_option("--threads", g_.threads, "worker threads")->check(CLI::PositiveNumber);
        app.add_option("--out", g_.out, "output file (default: standard output)");
        app.add_flag("--quiet", g_.quiet, "suppress summaries on standard output");

        setup_model(app);
        setup_modes(app);
        setup_spectrum(app);
        setup_density(app);
        setup_spacings(app);
        setup_ensemble(app);
        setup_sweep(app);
        setup_oracle(app);
        for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();

        try {
            std::vector<std::string> reversed(args_.rbegin(), args_.rend());
            app.parse(std::move(reversed));
        } catch (const CLI::CallForHelp&) {
            out_ << app.help();
            return ok;
        } catch (const CLI::ParseError& ex) {
            err_ << "error: " << ex.what() << "\n\n" << usage(app);
            return validation_error;
        }

        started_ = utc_timestamp();
        try {
            action_();
            return ok;
        } catch (const ResourceGuardError& ex) {
            err_ << "refused: " << ex.what() << '\n';
            return resource_guard;
        } catch (const std::exception& ex) {
            err_ << "error: " << ex.what() << '\n';
            return validation_error;
        }
    }

private:
    std::string usage(const CLI::App& app) const {
        for (const auto* sub : app.get_subcommands()) return sub->help();
        return app.help();
    }

    RunManifest manifest(const std::string& model, json params, std::optional<std::size_t> n,
                         std::size_t realizations = 1, bool seeded = true) const {
        RunManifest m;
        m.command_line = args_;
        m.command_line.insert(m.command_line.begin(), "fermispec");
        m.model = model;
        m.params = std::move(params);
        if (seeded) m.seed = g_.seed;
        m.realizations = realizations;
        m.n = n;
        m.started = started_;
        m.finished = utc_timestamp();
        if (!g_.out.empty()) m.outputs.push_back(g_.out);
        return m;
    }

    void emit(const std::string& text) {
        if (g_.out.empty()) out_ << text;
        else write_text_file(g_.out, text);
    }

    void emit_json(json j, const RunManifest& m) {
        j["manifest"] = to_json(m);
        emit(j.dump(2) + "\n");
    }

    void note(const std::string& line) {
        if (!g_.quiet && !g_.out.empty()) out_ << line << '\n';
    }

    static CsvMetadata csv_metadata(const RunManifest& m) {
        CsvMetadata meta{{"model", m.model},
                         {"n", m.n ? std::to_string(*m.n) : "null"},
                         {"seed", m.seed ? std::to_string(*m.seed) : "null"},
                         {"realizations", std::to_string(m.realizations)}};
        return meta;
    }

    // -- model ---------------------------------------------------------------

    void setup_model(CLI::App& app) {
        auto* cmd = app.add_subcommand("model", "build a coefficient pair and write it as JSON");
        cmd->add_option("name", model_.name, "model name")->required()->check(CLI::IsMember(model_names()));
        add_model_options(cmd, model_);
        cmd->callback([this] { action_ = [this] { do_model(); }; });
    }

    void do_model() {
        const CoefficientPair c = build_model(model_params(model_), model_.n, SeedSpec{g_.seed, model_.realization});
        emit_json(to_json(c), manifest(model_.name, params_json(model_), model_.n, 1, is_random_model(model_params(model_))));
        note("wrote " + model_.name + " coefficients, n = " + std::to_string(c.n));
    }

    // -- modes ---------------------------------------------------------------

    void setup_modes(CLI::App& app) {
        auto* cmd = app.add_subcommand("modes", "compute the excitations of a coefficient pair");
        cmd->add_option("--in", in_, "coefficient JSON from `fermispec model`");
        cmd->add_option("--model", model_.name, "build the model in-process instead of reading --in")
            ->check(CLI::IsMember(model_names()));
        add_model_options(cmd, model_, false);
        cmd->add_option("--n", model_.n, "number of modes (with --model)");
        cmd->callback([this] { action_ = [this] { do_modes(); }; });
    }

    void do_modes() {
        ExcitationSet e;
        json params;
        if (!in_.empty()) {
            if (!model_.name.empty()) throw std::invalid_argument("modes takes either --in or --model, not both");
            const CoefficientPair c = coefficients_from_json(read_json_file(in_));
            e = decompose(c);
            params = c.provenance.params;
        } else {
            if (model_.name.empty() || model_.n == 0) throw std::invalid_argument("modes needs --in, or --model with --n");
            e = model_excitations(model_, g_.seed);
            params = params_json(model_);
        }
        emit_json(to_json(e), manifest(e.provenance.model, params, e.n, 1, e.provenance.seed.has_value()));
        note("n = " + std::to_string(e.n) + ", K = " + format_double(e.K) + ", sigma_sq_hat = " +
             format_double(e.sigma_sq_hat));
    }

    ExcitationSet read_excitations() const {
        if (in_.empty()) throw std::invalid_argument("--in is required");
        return excitations_from_json(read_json_file(in_));
    }

    RunManifest manifest_for(const ExcitationSet& e) const {
        RunManifest m = manifest(e.provenance.model, e.provenance.params, e.n, 1, false);
        if (e.provenance.seed) m.seed = e.provenance.seed->master_seed;
        return m;
    }

    // -- spectrum ------------------------------------------------------------

    struct SpectrumOptions {
        std::size_t bins = 200;
        std::string rescale = "clt";
        std::string density_rescale = "none";
        std::optional<double> lo, hi;
        std::optional<unsigned> sector;
        bool sorted = false;
        std::optional<std::size_t> n;
        bool override_guard = false;
    } spec_;

    void add_histogram_options(CLI::App* cmd, std::string& rescale) {
        cmd->add_option("--bins", spec_.bins, "histogram bins")->check(CLI::PositiveNumber);
        cmd->add_option("--rescale", rescale, "clt: (E-K)/sqrt(n); total: (E-K)/sqrt(sum l^2/4); none")
            ->check(CLI::IsMember({"clt", "total", "none"}));
        cmd->add_option("--lo", spec_.lo, "histogram lower edge (rescaled units)");
        cmd->add_option("--hi", spec_.hi, "histogram upper edge (rescaled units)");
        cmd->add_flag("--override-guard", spec_.override_guard, "allow enumeration beyond the size guard");
    }

    void setup_spectrum(CLI::App& app) {
        auto* cmd = app.add_subcommand("spectrum", "enumerate the many-body levels into a histogram or a raw file");
        cmd->add_option("--in", in_, "excitation JSON from `fermispec modes`")->required();
        add_histogram_options(cmd, spec_.rescale);
        cmd->add_option("--sector", spec_.sector, "restrict to subsets of size m");
        cmd->add_flag("--sorted", spec_.sorted, "write all levels ascending as little-endian doubles");
        cmd->add_option("--n", spec_.n, "expected number of modes");
        cmd->callback([this] { action_ = [this] { do_spectrum(); }; });
    }

    EnumerationLimits limits() const {
        EnumerationLimits l;
        l.override_guard = spec_.override_guard;
        return l;
    }

    Rescale rescale_for(const ExcitationSet& e, const std::string& mode) const {
        if (mode == "clt") return {e.K, std::sqrt(static_cast<double>(e.n))};
        if (mode == "total") return {e.K, e.total_sigma() > 0.0 ? e.total_sigma() : 1.0};
        return {0.0, 1.0};
    }

    /// Histogram range: explicit flags, else the exact span of the rescaled levels.
    std::pair<double, double> histogram_range(const LevelStream& s, const Rescale& r) const {
        double lo = r(s.min_level()), hi = r(s.max_level());
        if (s.sector()) {
            lo = std::numeric_limits<double>::infinity();
            hi = -lo;
            s.for_each([&](std::uint64_t, double e) {
                lo = std::min(lo, r(e));
                hi = std::max(hi, r(e));
            });
        }
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
        }
        return {spec_.lo.value_or(lo), spec_.hi.value_or(hi)};
    }

    void check_guard(std::size_t n) const {
        if (spec_.override_guard) return;
        const EnumerationLimits l;
        const unsigned cap = spec_.sorted ? l.max_sorted_n : l.max_stream_n;
        if (!spec_.sector && n > cap)
            throw ResourceGuardError(detail::guard_message(static_cast<unsigned>(n), cap,
                                                           spec_.sorted ? "sorted enumeration" : "enumeration"));
    }

    void do_spectrum() {
        if (spec_.n) check_guard(*spec_.n);
        const ExcitationSet e = read_excitations();
        if (spec_.n && *spec_.n != e.n)
            throw std::invalid_argument("--n " + std::to_string(*spec_.n) + " does not match the input (n = " +
                                        std::to_string(e.n) + ")");
        check_guard(e.n);
        RunManifest m = manifest_for(e);

        if (spec_.sorted) {
            if (g_.out.empty()) throw std::invalid_argument("--sorted needs --out for the binary level file");
            std::vector<double> levels;
            if (spec_.sector) {
                levels = sector_levels(e, *spec_.sector, limits()).materialize();
                std::sort(levels.begin(), levels.end());
            } else {
                levels = enumerate_levels(e, LevelOrder::sorted, limits()).materialize();
            }
            std::ofstream bin(g_.out, std::ios::binary);
            if (!bin) throw FormatError("cannot write " + g_.out);
            write_levels_bin(bin, levels);
            json side = to_json(m);
            side["level_count"] = levels.size();
            side["format"] = "little-endian float64, ascending";
            if (spec_.sector) side["sector"] = *spec_.sector;
            write_text_file(g_.out + ".manifest.json", side.dump(2) + "\n");
            note("wrote " + std::to_string(levels.size()) + " levels");
            return;
        }

        const LevelStream s =
            spec_.sector ? sector_levels(e, *spec_.sector, limits()) : enumerate_levels(e, LevelOrder::gray_code, limits());
        write_histogram(s, e, m, spec_.rescale);
    }

    void write_histogram(const LevelStream& s, const ExcitationSet& e, const RunManifest& m, const std::string& mode) {
        const Rescale r = rescale_for(e, mode);
        const auto [lo, hi] = histogram_range(s, r);
        const Histogram h = accumulate_histogram(s, lo, hi, spec_.bins, r, g_.threads);
        CsvMetadata meta = csv_metadata(m);
        meta.emplace_back("shift", format_double(r.shift));
        meta.emplace_back("scale", format_double(r.scale));
        meta.emplace_back("rescale", mode);
        if (spec_.sector) meta.emplace_back("sector", std::to_string(*spec_.sector));
        meta.emplace_back("manifest", to_json(m).dump());
        std::ostringstream csv;
        write_histogram_csv(csv, h, meta);
        emit(csv.str());
        note("binned " + std::to_string(h.total) + " levels (" + std::to_string(h.underflow + h.overflow) +
             " outside range)");
    }

    // -- density -------------------------------------------------------------

    std::string report_path_;

    void setup_density(CLI::App& app) {
        auto* cmd = app.add_subcommand("density", "level density histogram with Gaussian-limit statistics");
        cmd->add_option("--in", in_, "excitation JSON")->required();
        add_histogram_options(cmd, spec_.density_rescale);
        cmd->add_option("--report", report_path_, "also write the spectral report as JSON");
        cmd->add_option("--limit-variance", limit_variance_, "limiting variance of (E-K)/sqrt(n) for the KS check");
        cmd->callback([this] { action_ = [this] { do_density(); }; });
    }

    std::optional<double> limit_variance_;

    void do_density() {
        const ExcitationSet e = read_excitations();
        const LevelStream s = enumerate_levels(e, LevelOrder::gray_code, limits());
        const RunManifest m = manifest_for(e);
        write_histogram(s, e, m, spec_.density_rescale);

        ReportOptions ro;
        ro.limit_variance = limit_variance_;
        ro.threads = g_.threads;
        ro.limits = limits();
        ro.exact = e.n <= ro.limits.max_sorted_n || spec_.override_guard;
        const SpectralReport rep = spectral_report(e, ro);
        if (!report_path_.empty()) {
            json j = to_json(rep);
            j["manifest"] = to_json(m);
            write_text_file(report_path_, j.dump(2) + "\n");
        }
        note("KS vs N(0,1) after (E-K)/sigma_total: " + format_double(rep.ks_finite.distance) +
             "; Berry-Esseen bound: " + (rep.be_bound ? format_double(*rep.be_bound) : std::string("n/a")));
    }

    // -- spacings ------------------------------------------------------------

    struct {
        double window = 0.8;
        std::string unfold = "gaussian";
        unsigned degree = 9;
        bool retain = false;
        std::optional<double> degeneracy_tol;
        std::size_t bins = 50;
        std::string histogram;
    } sp_;

    void setup_spacings(CLI::App& app) {
        auto* cmd = app.add_subcommand("spacings", "unfolded nearest-neighbour spacing statistics");
        cmd->add_option("--in", in_, "excitation JSON")->required();
        cmd->add_option("--window", sp_.window, "central fraction of levels by rank")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--unfold", sp_.unfold, "gaussian or poly")->check(CLI::IsMember({"gaussian", "poly"}));
        cmd->add_option("--degree", sp_.degree, "polynomial degree for --unfold poly");
        cmd->add_flag("--retain-degenerate", sp_.retain, "keep exactly degenerate spacings in the KS comparison");
        cmd->add_option("--degeneracy-tol", sp_.degeneracy_tol, "degeneracy threshold in unfolded units");
        cmd->add_option("--bins", sp_.bins, "spacing histogram bins")->check(CLI::PositiveNumber);
        cmd->add_option("--histogram", sp_.histogram, "also write the spacing histogram as CSV");
        cmd->add_flag("--override-guard", spec_.override_guard, "allow enumeration beyond the size guard");
        cmd->callback([this] { action_ = [this] { do_spacings(); }; });
    }

    void do_spacings() {
        const ExcitationSet e = read_excitations();
        ReportOptions ro;
        ro.limits = limits();
        ro.threads = g_.threads;
        SpacingOptions so;
        so.window = sp_.window;
        so.retain_degenerate = sp_.retain;
        so.degeneracy_tol = sp_.degeneracy_tol.value_or(0.0);
        so.histogram_bins = sp_.bins;
        ro.spacings = so;
        if (sp_.unfold == "poly") ro.unfolding = EmpiricalFitUnfolding{sp_.degree};
        const SpectralReport rep = spectral_report(e, ro);
        const RunManifest m = manifest_for(e);
        json j = to_json(rep);
        j["window"] = sp_.window;
        j["unfolding"] = sp_.unfold;
        emit_json(std::move(j), m);
        if (!sp_.histogram.empty()) {
            CsvMetadata meta = csv_metadata(m);
            meta.emplace_back("window", format_double(sp_.window));
            meta.emplace_back("manifest", to_json(m).dump());
            std::ostringstream csv;
            write_histogram_csv(csv, rep.spacings->histogram, meta);
            write_text_file(sp_.histogram, csv.str());
        }
        note("spacings: " + std::to_string(rep.spacings->sample_count) + ", KS vs exp(-x): " +
             format_double(rep.spacings->ks_vs_exponential) + ", degenerate: " +
             std::to_string(rep.spacings->degenerate_count));
    }

    // -- ensemble ------------------------------------------------------------

    struct {
        std::size_t realizations = 1;
        bool no_density = false;
        std::string histogram;
    } ens_;

    void setup_ensemble(CLI::App& app) {
        auto* cmd = app.add_subcommand("ensemble", "average statistics over disorder realizations");
        cmd->add_option("--model", model_.name, "model name")->required()->check(CLI::IsMember(model_names()));
        add_model_options(cmd, model_);
        cmd->add_option("--realizations", ens_.realizations, "number of realizations")->check(CLI::PositiveNumber);
        cmd->add_option("--bins", spec_.bins, "histogram bins")->check(CLI::PositiveNumber);
        cmd->add_option("--lo", spec_.lo, "histogram lower edge for (E-K)/sqrt(n)");
        cmd->add_option("--hi", spec_.hi, "histogram upper edge for (E-K)/sqrt(n)");
        cmd->add_flag("--no-density", ens_.no_density, "scalars only; skip level enumeration");
        cmd->add_option("--histogram", ens_.histogram, "also write the averaged histogram as CSV");
        cmd->add_flag("--override-guard", spec_.override_guard, "allow enumeration beyond the size guard");
        cmd->callback([this] { action_ = [this] { do_ensemble(); }; });
    }

    void do_ensemble() {
        if (model_.name == "ising" && model_.closed_form)
            throw std::invalid_argument("closed-form Ising is deterministic; use sweep or modes --model");
        const ModelParams params = model_params(model_);
        const std::optional<double> limit = limiting_variance(params);
        const double half = limit ? 6.0 * std::sqrt(*limit) : 8.0;

        EnsembleOptions eo;
        eo.seed = g_.seed;
        eo.threads = g_.threads;
        eo.density = !ens_.no_density;
        eo.lo = spec_.lo.value_or(-half);
        eo.hi = spec_.hi.value_or(half);
        eo.bins = spec_.bins;
        eo.limits = limits();
        if (eo.density && !spec_.override_guard && model_.n > eo.limits.max_stream_n)
            throw ResourceGuardError(detail::guard_message(static_cast<unsigned>(model_.n), eo.limits.max_stream_n,
                                                           "enumeration"));
        const EnsembleReport rep = ensemble_average(params, model_.n, ens_.realizations, eo);

        json j = to_json(rep);
        j["limit_variance"] = limit ? json(*limit) : json(nullptr);
        if (rep.histogram && limit && *limit > 0.0) {
            const KolmogorovResult k = kolmogorov_distance_to_gaussian(*rep.histogram, std::sqrt(*limit));
            j["ks_limit"] = to_json(k);
            note("averaged density KS vs N(0, " + format_double(*limit) + "): " + format_double(k.distance));
        }
        const RunManifest m = manifest(model_.name, params_json(model_), model_.n, ens_.realizations);
        emit_json(std::move(j), m);
        if (!ens_.histogram.empty() && rep.histogram) {
            CsvMetadata meta = csv_metadata(m);
            meta.emplace_back("shift", "K");
            meta.emplace_back("scale", format_double(std::sqrt(static_cast<double>(model_.n))));
            meta.emplace_back("manifest", to_json(m).dump());
            std::ostringstream csv;
            write_histogram_csv(csv, *rep.histogram, meta);
            write_text_file(ens_.histogram, csv.str());
        }
    }

    // -- sweep ---------------------------------------------------------------

    struct {
        std::vector<std::size_t> sizes;
        std::string stat = "ks";
    } sw_;

    void setup_sweep(CLI::App& app) {
        auto* cmd = app.add_subcommand("sweep", "Kolmogorov distance and Berry-Esseen bound across system sizes");
        cmd->add_option("--model", model_.name, "model name")->required()->check(CLI::IsMember(model_names()));
        add_model_options(cmd, model_, false);
        cmd->add_option("--n", sw_.sizes, "comma-separated sizes")->required()->delimiter(',');
        cmd->add_option("--stat", sw_.stat, "statistic")->check(CLI::IsMember({"ks"}));
        cmd->add_flag("--override-guard", spec_.override_guard, "allow enumeration beyond the size guard");
        cmd->callback([this] { action_ = [this] { do_sweep(); }; });
    }

    void do_sweep() {
        const EnumerationLimits l = limits();
        for (std::size_t n : sw_.sizes) {
            if (n == 0) throw std::invalid_argument("sweep sizes must be positive");
            if (!l.override_guard && n > l.max_sorted_n)
                throw ResourceGuardError(detail::guard_message(static_cast<unsigned>(n), l.max_sorted_n, "sweep"));
        }
        std::ostringstream csv;
        ModelOptions first = model_;
        first.n = sw_.sizes.front();
        const RunManifest m = manifest(model_.name, params_json(first), std::nullopt, 1, true);
        csv << "# model: " << model_.name << '\n';
        csv << "# seed: " << g_.seed << '\n';
        csv << "# realizations: 1\n";
        csv << "# statistic: ks\n";
        csv << "# manifest: " << to_json(m).dump() << '\n';
        csv << "n,ks,ks_sqrt_n,ks_finite,berry_esseen_bound,berry_esseen_moment_form,sigma_sq_hat,op_norm_over_n4\n";
        for (std::size_t n : sw_.sizes) {
            ModelOptions mo = model_;
            mo.n = n;
            const ExcitationSet e = model_excitations(mo, g_.seed);
            std::optional<double> limit;
            if (!(mo.name == "ising" && mo.closed_form)) limit = limiting_variance(model_params(mo));
            else limit = 1.0 + mo.h * mo.h;
            ReportOptions ro;
            ro.limit_variance = limit;
            ro.limits = l;
            const SpectralReport rep = spectral_report(e, ro);
            const double ks = rep.ks_limit ? rep.ks_limit->distance : rep.ks_finite.distance;
            const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
            csv << n << ',' << format_double(ks) << ',' << format_double(ks * std::sqrt(static_cast<double>(n))) << ','
                << format_double(rep.ks_finite.distance) << ',' << opt(rep.be_bound) << ',' << opt(rep.be_moment_form)
                << ',' << format_double(e.sigma_sq_hat) << ','
                << format_double(theorem1_diagnostics(e).op_norm_over_n4) << '\n';
        }
        emit(csv.str());
    }

    // -- oracle --------------------------------------------------------------

    std::size_t oracle_n_ = 6;
    double oracle_s_ = 1.0;

    void setup_oracle(CLI::App& app) {
        auto* cmd = app.add_subcommand("oracle", "compare the subset-sum spectrum with Fock-space diagonalization");
        cmd->group("");
        cmd->add_option("--n", oracle_n_, "modes (at most 10)")->check(CLI::PositiveNumber);
        cmd->add_option("--s", oracle_s_, "gaussian model scale");
        cmd->callback([this] { action_ = [this] { do_oracle(); }; });
    }

    void do_oracle() {
        if (oracle_n_ > fock::max_sites)
            throw ResourceGuardError("oracle is limited to n <= " + std::to_string(fock::max_sites));
        const CoefficientPair c = gaussian_qf(oracle_n_, oracle_s_, SeedSpec{g_.seed, 0});
        const std::vector<double> subset = enumerate_levels(decompose(c), LevelOrder::sorted).materialize();
        const std::vector<double> exact = fock::exact_spectrum(fock::build_hamiltonian(c));
        double dev = 0.0;
        for (std::size_t k = 0; k < exact.size(); ++k) dev = std::max(dev, std::abs(exact[k] - subset[k]));
        json j{{"n", oracle_n_},
               {"levels", exact.size()},
               {"max_abs_deviation", dev},
               {"agree", dev < 1e-9}};
        emit_json(std::move(j), manifest("gaussian", json{{"s", oracle_s_}}, oracle_n_));
        note("max |fock - subset-sum| = " + format_double(dev));
    }

    std::vector<std::string> args_;
    std::ostream& out_;
    std::ostream& err_;
    GlobalOptions g_;
    ModelOptions model_;
    std::string in_;
    std::string started_;
    std::function<void()> action_;
};

/// Runs the command line (without the program name). Returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return Runner(std::move(args), out, err).run();
}

}  // namespace fermispec::cli
