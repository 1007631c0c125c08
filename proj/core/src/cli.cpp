// SPDX-License-Identifier: Apache-2.0

#include "pimsim/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace pimsim {

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int default_workers() {
    if (const char* env = std::getenv(kWorkersEnvVar)) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? static_cast<int>(hw) : 1;
}

SchemeConfig base_config(Scheme s, int p, int n_t, int n_p, Mod mod, std::uint64_t seed) {
    SchemeConfig cfg;
    cfg.scheme = s;
    cfg.p = p;
    cfg.n_t = n_t;
    cfg.n_r = 1;
    cfg.n_p = n_p;
    cfg.alphabet = mod;
    cfg.seed = seed;
    return cfg;
}

struct PresetDefaults {
    double snr_start, snr_stop, snr_step;
    std::int64_t max_trials;
};

std::vector<SchemeConfig> expand_preset(const std::string& name, std::uint64_t seed, PresetDefaults& defs) {
    if (name == "fig5") {
        defs = {0.0, 24.0, 2.0, 1'000'000};
        return {base_config(Scheme::PrppSm, 5, 4, 1, Mod::Bpsk, seed),
                base_config(Scheme::Sm, 1, 4, 1, Mod::Bpsk, seed),
                base_config(Scheme::Prpp, 5, 1, 1, Mod::Qam8, seed)};
    }
    if (name == "fig6") {
        defs = {0.0, 32.0, 2.0, 1'000'000};
        return {base_config(Scheme::Pim, 5, 1, 4, Mod::Qam4, seed),
                base_config(Scheme::Prpp, 5, 1, 1, Mod::Qam16, seed),
                base_config(Scheme::Sm, 1, 4, 1, Mod::Qam4, seed)};
    }
    if (name == "fig7") {
        defs = {0.0, 24.0, 2.0, 1'000'000};
        return {base_config(Scheme::PimSm, 5, 4, 2, Mod::Bpsk, seed),
                base_config(Scheme::Pim, 5, 1, 4, Mod::Qam4, seed),
                base_config(Scheme::PrppSm, 5, 4, 1, Mod::Qam4, seed)};
    }
    throw UsageError("unknown preset: " + name);
}

}  // namespace

std::vector<double> RunSpec::snr_list() const {
    std::vector<double> list;
    for (double v = snr_start; v <= snr_stop + 1e-9; v += snr_step) list.push_back(v);
    return list;
}

RunSpec parse_args(const std::vector<std::string>& args) {
    CLI::App app{"pimsim - Monte Carlo BER simulator for index-modulation schemes"};
    app.name("pimsim");

    std::string scheme_str, mod_str = "bpsk", preset, snr_str, detector_str = "ml", elapsed_str = "wall";
    int p = 1, n_t = 1, n_r = 1, n_p = 1;
    int workers = -1;
    double max_seconds = -1.0;
    RunSpec spec;
    spec.stop = StopRule{};

    app.add_option("--scheme", scheme_str, "prpp|sm|prpp-sm|pim|pim-sm");
    app.add_option("--p", p, "block length in channel uses");
    app.add_option("--nt", n_t, "transmit antennas (SM family)");
    app.add_option("--nr", n_r, "receive antennas");
    app.add_option("--np", n_p, "precoder columns per block (PIM family)");
    app.add_option("--mod", mod_str, "bpsk|qam4|qam8|qam16");
    app.add_option("--snr", snr_str, "sweep as start:stop:step in dB");
    app.add_option("--seed", spec.seed, "master seed (pre-shared and trial seeding)");
    app.add_option("--target-errors", spec.stop.target_bit_errors, "stop a point after this many bit errors");
    app.add_option("--max-trials", spec.stop.max_trials, "trial cap per point");
    app.add_option("--max-seconds", max_seconds, "wall-clock cap per point (not deterministic)");
    app.add_option("--workers", workers, "worker threads (default: $PIMSIM_WORKERS or hardware)");
    app.add_option("--out", spec.out, "CSV path, '-' for stdout");
    app.add_option("--preset", preset, "fig5|fig6|fig7 comparison bundles");
    app.add_option("--detector", detector_str, "ml|las (las: PRPP with BPSK/4-QAM)");
    app.add_option("--gap-level", spec.gap_level, "BER level for the gap report");
    app.add_option("--csv-elapsed", elapsed_str, "wall|zero: elapsed_s column content");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        std::ostringstream os;
        os << app.help();
        throw HelpRequested{os.str()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    try {
        if (workers == -1) workers = default_workers();
        if (workers < 1) throw UsageError("--workers must be >= 1");
        spec.workers = workers;
        if (max_seconds >= 0.0) spec.stop.max_wall_seconds = max_seconds;
        if (elapsed_str == "zero") {
            spec.csv_elapsed_zero = true;
        } else if (elapsed_str != "wall") {
            throw UsageError("--csv-elapsed must be wall or zero");
        }
        if (spec.gap_level <= 0.0 || spec.gap_level >= 1.0) throw UsageError("--gap-level must be in (0,1)");

        const bool have_snr = !snr_str.empty();
        if (!preset.empty()) {
            if (!scheme_str.empty()) throw UsageError("--preset and --scheme are mutually exclusive");
            if (app.count("--p") || app.count("--nt") || app.count("--nr") || app.count("--np") ||
                app.count("--mod") || app.count("--detector")) {
                throw UsageError("--preset fixes the scheme parameters; drop the per-scheme flags");
            }
            PresetDefaults defs{};
            spec.configs = expand_preset(preset, spec.seed, defs);
            spec.preset = preset;
            if (!app.count("--max-trials")) spec.stop.max_trials = defs.max_trials;
            if (!have_snr) {
                spec.snr_start = defs.snr_start;
                spec.snr_stop = defs.snr_stop;
                spec.snr_step = defs.snr_step;
            }
        } else {
            if (scheme_str.empty()) throw UsageError("--scheme is required (or use --preset)");
            SchemeConfig cfg = base_config(scheme_from_name(scheme_str), p, n_t, n_p, mod_from_name(mod_str), spec.seed);
            cfg.n_r = n_r;
            if (detector_str == "las") {
                cfg.detector = DetectorKind::Las;
            } else if (detector_str != "ml") {
                throw UsageError("--detector must be ml or las");
            }
            cfg.validate();
            spec.configs = {cfg};
        }

        if (have_snr) {
            double a = 0, b = 0, s = 0;
            if (std::sscanf(snr_str.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3) {
                throw UsageError("--snr must be start:stop:step");
            }
            if (s <= 0.0 || b < a) throw UsageError("--snr needs step > 0 and stop >= start");
            spec.snr_start = a;
            spec.snr_stop = b;
            spec.snr_step = s;
        }
        if (spec.stop.target_bit_errors < 1 || spec.stop.max_trials < 1) {
            throw UsageError("--target-errors and --max-trials must be >= 1");
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return spec;
}

std::string canonical_args(const RunSpec& spec) {
    std::ostringstream os;
    if (!spec.preset.empty()) {
        os << "--preset " << spec.preset;
    } else {
        const SchemeConfig& cfg = spec.configs.at(0);
        os << "--scheme " << scheme_name(cfg.scheme) << " --p " << cfg.p << " --nt " << cfg.n_t << " --nr " << cfg.n_r
           << " --np " << cfg.n_p << " --mod " << mod_name(cfg.alphabet);
        if (cfg.detector == DetectorKind::Las) os << " --detector las";
    }
    os << " --snr " << fmt_g(spec.snr_start) << ":" << fmt_g(spec.snr_stop) << ":" << fmt_g(spec.snr_step);
    os << " --seed " << spec.seed;
    os << " --target-errors " << spec.stop.target_bit_errors;
    os << " --max-trials " << spec.stop.max_trials;
    if (spec.stop.max_wall_seconds) os << " --max-seconds " << fmt_g(*spec.stop.max_wall_seconds);
    os << " --gap-level " << fmt_g(spec.gap_level);
    os << " --csv-elapsed " << (spec.csv_elapsed_zero ? "zero" : "wall");
    return os.str();
}

std::vector<std::string> split_args(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

void emit_csv(const RunSpec& spec, const std::vector<BerCurve>& curves, std::ostream& os) {
    os << "# pimsim " << canonical_args(spec) << "\n";
    os << "scheme,p,nt,nr,np,mod,bpcu,snr_db,trials,bits,bit_errors,ber,ci95,elapsed_s\n";
    for (const BerCurve& curve : curves) {
        const SchemeConfig& cfg = curve.config;
        const int bpcu = spectral_efficiency(cfg);
        for (const BerPoint& pt : curve.points) {
            os << scheme_name(cfg.scheme) << ',' << cfg.p << ',' << cfg.n_t << ',' << cfg.n_r << ',' << cfg.n_p << ','
               << mod_name(cfg.alphabet) << ',' << bpcu << ',' << fmt_g(pt.snr_db) << ',' << pt.trials << ','
               << pt.bits << ',' << pt.bit_errors << ',' << fmt_g(pt.ber) << ',' << fmt_g(pt.ci95_halfwidth) << ','
               << fmt_g(spec.csv_elapsed_zero ? 0.0 : pt.elapsed_seconds) << '\n';
        }
    }
}

void emit_csv(const RunSpec& spec, const std::vector<BerCurve>& curves, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    emit_csv(spec, curves, f);
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string curve_label(const SchemeConfig& cfg) {
    std::ostringstream os;
    os << scheme_name(cfg.scheme) << "(p=" << cfg.p;
    if (cfg.scheme == Scheme::Sm || cfg.scheme == Scheme::PrppSm || cfg.scheme == Scheme::PimSm) os << ",nt=" << cfg.n_t;
    if (cfg.scheme == Scheme::Pim || cfg.scheme == Scheme::PimSm) os << ",np=" << cfg.n_p;
    os << "," << mod_name(cfg.alphabet) << ")";
    return os.str();
}

std::string report_gaps(const std::vector<BerCurve>& curves, double ber_level) {
    std::ostringstream os;
    char lvl[32];
    std::snprintf(lvl, sizeof(lvl), "%.3g", ber_level);
    os << "SNR gaps at BER " << lvl << ":\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = i + 1; j < curves.size(); ++j) {
            os << "  " << curve_label(curves[i].config) << " vs " << curve_label(curves[j].config) << ": ";
            const auto gap = gap_at_ber(curves[i], curves[j], ber_level);
            if (gap) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%+.2f dB", *gap);
                os << buf << "\n";
            } else {
                os << "not bracketed (insufficient sweep range)\n";
            }
        }
    }
    return os.str();
}

int cli_main(int argc, char** argv) {
    RunSpec spec;
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        spec = parse_args(args);
    } catch (const HelpRequested& h) {
        std::cout << h.text;
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "pimsim: " << e.what() << "\nRun 'pimsim --help' for usage.\n";
        return 2;
    }

    try {
        const std::vector<double> snrs = spec.snr_list();
        std::vector<BerCurve> curves;
        curves.reserve(spec.configs.size());
        for (const SchemeConfig& cfg : spec.configs) {
            std::cerr << "running " << curve_label(cfg) << " over " << snrs.size() << " SNR points\n";
            BerCurve curve;
            curve.config = cfg;
            for (std::size_t i = 0; i < snrs.size(); ++i) {
                RunOptions opts;
                opts.workers = spec.workers;
                opts.snr_index = static_cast<int>(i);
                const BerPoint pt = run_point(cfg, snrs[i], spec.stop, spec.seed, opts);
                char line[160];
                std::snprintf(line, sizeof(line), "  %5.1f dB  ber %.3e  errors %lld  trials %lld  %.1fs\n",
                              pt.snr_db, pt.ber, static_cast<long long>(pt.bit_errors),
                              static_cast<long long>(pt.trials), pt.elapsed_seconds);
                std::cerr << line;
                curve.points.push_back(pt);
            }
            curves.push_back(std::move(curve));
        }

        if (spec.out == "-") {
            emit_csv(spec, curves, std::cout);
        } else {
            emit_csv(spec, curves, spec.out);
        }
        if (curves.size() >= 2) std::cerr << report_gaps(curves, spec.gap_level);
        return 0;
    } catch (const HypothesisBudgetExceeded& e) {
        std::cerr << "pimsim: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "pimsim: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace pimsim
