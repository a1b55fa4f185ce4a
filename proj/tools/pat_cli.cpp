// Command-line front end. Talks to the library through the C API only.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pat/pat.h"

namespace {

using json = nlohmann::json;

enum Exit { ok = 0, usage = 2, io_error = 3, validation = 4, numerical = 5 };

struct Failure {
    int code;
    std::string message;
};

void check(pat_status s) {
    if (s != PAT_OK) throw Failure{s == PAT_ERR_INTERNAL ? numerical : static_cast<int>(s), pat_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};
using Array = Handle<pat_array, pat_array_free>;
using Record = Handle<pat_record, pat_record_free>;
using Mask = Handle<pat_mask, pat_mask_free>;

struct String {
    char* p = nullptr;
    ~String() { pat_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{io_error, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Failure{io_error, "cannot write " + path};
}

json load_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw Failure{validation, path + ": " + e.what()};
    }
}

// Relative paths inside a config resolve against the config's directory.
json load_config(const std::string& path) {
    json j = load_json(path);
    if (!j.contains("base_dir")) {
        const auto slash = path.find_last_of('/');
        j["base_dir"] = slash == std::string::npos ? "." : path.substr(0, slash);
    }
    return j;
}

void write_image(const pat_array* a, const std::string& stem) {
    check(pat_array_write_image(a, (stem + ".pgm").c_str(), "pgm"));
    if (pat_png_supported()) check(pat_array_write_image(a, (stem + ".png").c_str(), "png"));
}

std::string stem_of(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

struct MaskArgs {
    std::string type = "equispaced";
    int dim = 2;
    std::size_t grid = 0;
    double pitch = 0.0;
    double r0 = 0.0;
    std::size_t n = 0;
    std::size_t interval = 1;
    std::vector<double> center;
    bool no_snap = false;
    std::string out = "mask.csv";
    std::string preview;
};

int run_mask(const MaskArgs& a) {
    json cfg;
    cfg["schema_version"] = 1;
    std::vector<std::size_t> dims(a.dim - 1, a.grid);
    dims.push_back(2);
    cfg["grid"] = {{"dims", dims}, {"spacing", a.pitch}};
    json ci = {{"r0", a.r0}};
    if (!a.center.empty()) ci["lateral"] = a.center;
    cfg["center_of_interest"] = ci;
    json m = {{"type", a.type}, {"snap", !a.no_snap}};
    if (a.n) m["n"] = a.n;
    if (a.type == "equispaced") m["interval"] = a.interval;
    if (a.type == "equispaced" && a.n == 0) throw Failure{usage, "--n is required"};

    Mask mask;
    check(pat_mask_create(cfg.dump().c_str(), m.dump().c_str(), mask.out()));
    check(pat_mask_write_csv(mask.get(), a.out.c_str()));
    String desc;
    check(pat_mask_describe(mask.get(), &desc.p));
    std::cout << desc.str() << "\n";
    const std::string prev = a.preview.empty() ? stem_of(a.out) : a.preview;
    Array img;
    check(pat_mask_preview(mask.get(), a.grid, a.pitch, img.out()));
    write_image(img.get(), prev);
    return ok;
}

struct SimulateArgs {
    std::string config;
    std::string mask;
    std::string out = "record.patarr";
    double snr = 0.0;
    bool has_snr = false;
    long long seed = -1;
};

int run_simulate(const SimulateArgs& a) {
    json cfg = load_config(a.config);
    if (a.has_snr) {
        cfg["noise"] = {{"snr_db", a.snr}, {"seed", a.seed >= 0 ? a.seed : cfg.value("seed", 0LL)}};
    } else if (a.seed >= 0 && cfg.contains("noise")) {
        cfg["noise"]["seed"] = a.seed;
    }
    Mask mask;
    if (!a.mask.empty()) check(pat_mask_read_csv(a.mask.c_str(), mask.out()));
    Record rec;
    check(pat_simulate(cfg.dump().c_str(), mask.get(), rec.out()));
    check(pat_record_write(rec.get(), a.out.c_str()));
    std::cout << pat_record_sensors(rec.get()) << " sensors x " << pat_record_samples_per_sensor(rec.get())
              << " samples -> " << a.out << "\n";
    return ok;
}

struct ReconstructArgs {
    std::string record;
    std::string method = "nufft";
    int upsample = 1;
    double c = 2.0;
    int K = 6;
    std::string out = "volume.patarr";
    std::string mip;
    int repeats = 1;
};

int run_reconstruct(const ReconstructArgs& a) {
    Record rec;
    check(pat_record_read(a.record.c_str(), rec.out()));
    json opt = {{"upsample", a.upsample}, {"window", {{"c", a.c}, {"K", a.K}}}};
    const std::string opts = opt.dump();
    Array vol;
    double best = 0.0;
    for (int r = 0; r < std::max(1, a.repeats); ++r) {
        Array tmp;
        double secs = 0.0;
        check(pat_reconstruct(rec.get(), a.method.c_str(), opts.c_str(), tmp.out(), &secs));
        if (r == 0 || secs < best) best = secs;
        std::swap(vol.p, tmp.p);
    }
    check(pat_array_write(vol.get(), a.out.c_str()));
    const std::size_t nd = pat_array_ndim(vol.get());
    std::vector<std::size_t> dims(nd);
    check(pat_array_dims(vol.get(), dims.data()));
    std::cout << "method " << a.method << ", dims";
    for (auto d : dims) std::cout << ' ' << d;
    std::printf(", reconstruction %.6f s\n", best);
    if (!a.mip.empty()) {
        if (nd == 3) {
            // One projection per axis; depth last.
            const char* names[] = {"x", "y", "z"};
            for (std::size_t ax = 0; ax < 3; ++ax) {
                Array p;
                check(pat_array_mip(vol.get(), ax, p.out()));
                const std::string stem = a.mip + "_mip_" + names[ax];
                check(pat_array_write(p.get(), (stem + ".patarr").c_str()));
                write_image(p.get(), stem);
            }
        } else {
            write_image(vol.get(), a.mip);
        }
    }
    return ok;
}

struct EvaluateArgs {
    std::string image, model, protocol;
    std::vector<double> center;
    double diameter = 0.0;
    double threshold = -1.0;
    std::vector<double> diameters;
    std::vector<std::size_t> counts;
    std::string out;
    std::string csv;
};

int run_evaluate(const EvaluateArgs& a) {
    json p = a.protocol.empty() ? json::object() : load_json(a.protocol);
    if (!a.center.empty() || a.diameter > 0.0) {
        json disc = p.value("disc", json::object());
        if (!a.center.empty()) disc["center"] = a.center;
        if (a.diameter > 0.0) disc["diameter"] = a.diameter;
        p["disc"] = disc;
    }
    if (a.threshold >= 0.0) p["threshold"] = a.threshold;
    if (!a.diameters.empty()) p["diameters"] = a.diameters;
    if (!a.counts.empty()) p["counts"] = a.counts;

    Array img, model;
    check(pat_array_read(a.image.c_str(), img.out()));
    check(pat_array_read(a.model.c_str(), model.out()));
    String report;
    check(pat_evaluate(img.get(), model.get(), p.dump().c_str(), &report.p));
    if (a.out.empty())
        std::cout << report.str() << "\n";
    else
        spit(a.out, report.str() + "\n");
    if (!a.csv.empty()) {
        String csv;
        check(pat_evaluate_csv(report.p, &csv.p));
        spit(a.csv, csv.str());
    }
    return ok;
}

int run_pipeline(const std::string& config, const std::string& out, bool quiet) {
    const json cfg = load_config(config);
    auto log = [](const char* msg, void*) { std::cerr << msg << "\n"; };
    check(pat_run_pipeline(cfg.dump().c_str(), out.c_str(), quiet ? nullptr : +log, nullptr));
    std::cout << "wrote " << out << "\n";
    return ok;
}

int run_phantom(const std::string& config, const std::string& out) {
    const json cfg = load_config(config);
    Array f;
    check(pat_phantom(cfg.dump().c_str(), f.out()));
    check(pat_array_write(f.get(), out.c_str()));
    write_image(f.get(), stem_of(out));
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar photoacoustic reconstruction toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pat_version()));

    MaskArgs ma;
    auto* mask = app.add_subcommand("mask", "Generate a sensor mask (CSV plus preview image)");
    mask->add_option("--type", ma.type, "equispaced, equiangular or equisteradian")
        ->check(CLI::IsMember({"equispaced", "equiangular", "equisteradian"}));
    mask->add_option("--dim", ma.dim, "Image dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
    mask->add_option("--grid", ma.grid, "Lateral grid nodes per axis")->required()->check(CLI::PositiveNumber);
    mask->add_option("--pitch", ma.pitch, "Grid pitch in metres")->required()->check(CLI::PositiveNumber);
    mask->add_option("--r0", ma.r0, "Standoff of the center of interest in metres");
    mask->add_option("--n", ma.n, "Requested sensor count");
    mask->add_option("--interval", ma.interval, "Equispaced interval in grid nodes")->check(CLI::PositiveNumber);
    mask->add_option("--center", ma.center, "Lateral center of interest in metres")->delimiter(',');
    mask->add_flag("--no-snap", ma.no_snap, "Keep continuous positions");
    mask->add_option("-o,--out", ma.out, "Output CSV");
    mask->add_option("--preview", ma.preview, "Preview image stem (default: CSV stem)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Synthetic sensor record from an experiment config");
    sim->add_option("config", sa.config, "Experiment config (JSON)")->required();
    sim->add_option("--mask", sa.mask, "Mask CSV (default: full grid)");
    auto* snr = sim->add_option("--snr", sa.snr, "Signal to noise ratio in dB");
    sim->add_option("--seed", sa.seed, "Noise seed");
    sim->add_option("-o,--out", sa.out, "Output record");

    ReconstructArgs ra;
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct the initial pressure from a record");
    rec->add_option("record", ra.record, "Sensor record")->required();
    rec->add_option("--method", ra.method, "nufft, interp or interp_ner")
        ->check(CLI::IsMember({"nufft", "interp", "interp_ner"}));
    rec->add_option("--upsample", ra.upsample, "Output upsampling factor")->check(CLI::PositiveNumber);
    rec->add_option("--c", ra.c, "NUFFT oversampling factor");
    rec->add_option("--K", ra.K, "NUFFT interpolation half width")->check(CLI::PositiveNumber);
    rec->add_option("-o,--out", ra.out, "Output volume");
    rec->add_option("--mip", ra.mip, "Stem for MIP exports");
    rec->add_option("--repeats", ra.repeats, "Timing repeats (minimum is reported)")->check(CLI::PositiveNumber);

    EvaluateArgs ea;
    auto* ev = app.add_subcommand("evaluate", "Compare an image with a model standard");
    ev->add_option("image", ea.image, "Image or volume")->required();
    ev->add_option("model", ea.model, "Model standard")->required();
    ev->add_option("--protocol", ea.protocol, "Protocol JSON file");
    ev->add_option("--center", ea.center, "Disc center in physical units (axis 0, axis 1)")->delimiter(',');
    ev->add_option("--diameter", ea.diameter, "Disc diameter in physical units");
    ev->add_option("--threshold", ea.threshold, "ROI threshold fraction of the model maximum")
        ->check(CLI::Range(0.0, 1.0));
    ev->add_option("--diameters", ea.diameters, "Diameter sweep")->delimiter(',');
    ev->add_option("--counts", ea.counts, "Pixel-count sweep")->delimiter(',');
    ev->add_option("-o,--out", ea.out, "Report JSON (default: stdout)");
    ev->add_option("--csv", ea.csv, "Report CSV");

    std::string pcfg, pout = "out";
    bool quiet = false;
    auto* pipe = app.add_subcommand("pipeline", "Run a full experiment");
    pipe->add_option("config", pcfg, "Experiment config (JSON)")->required();
    pipe->add_option("-o,--out", pout, "Output directory");
    pipe->add_flag("-q,--quiet", quiet, "No progress log");

    std::string phcfg, phout = "phantom.patarr";
    auto* ph = app.add_subcommand("phantom", "Write the phantom of an experiment config");
    ph->add_option("config", phcfg, "Experiment config (JSON)")->required();
    ph->add_option("-o,--out", phout, "Output field");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*mask) return run_mask(ma);
        if (*sim) {
            sa.has_snr = snr->count() > 0;
            return run_simulate(sa);
        }
        if (*rec) return run_reconstruct(ra);
        if (*ev) return run_evaluate(ea);
        if (*pipe) return run_pipeline(pcfg, pout, quiet);
        if (*ph) return run_phantom(phcfg, phout);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return usage;
}
