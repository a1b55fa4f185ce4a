#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "config.hpp"
#include "pat/io.hpp"
#include "pat/metrics.hpp"

namespace pat::experiment {

namespace {

using detail::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

RealArray preview(const Field& f) { return f.ndim() == 3 ? metrics::mip(f.values, 2) : f.values; }

void write_images(const fs::path& dir, const std::string& name, const Field& f) {
    const RealArray img = preview(f);
    io::write_pgm((dir / (name + ".pgm")).string(), img);
    if (io::png_supported()) io::write_png((dir / (name + ".png")).string(), img);
}

void make_dirs(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) fail(ErrorKind::io, "pipeline: cannot create " + p.string() + ": " + ec.message());
}

double weight_ratio(const masks::SensorMask& m) {
    if (m.weights.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(m.weights.begin(), m.weights.end());
    return *lo > 0.0 ? *hi / *lo : 0.0;
}

}  // namespace

void run_pipeline(const std::string& config_json, const std::string& out_dir, const Log& log) {
    const auto cfg = detail::parse_config(detail::parse(config_json, "config"));
    auto say = [&](const std::string& s) {
        if (log) log(s);
    };
    const fs::path root(out_dir);
    for (const char* sub : {"masks", "recon", "images", "sweeps"}) make_dirs(root / sub);

    const Field phantom = detail::build_phantom(cfg);
    io::write_field((root / "phantom.patarr").string(), phantom);
    write_images(root / "images", "phantom", phantom);

    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    const recon::SensorRecord full = detail::simulate_full(cfg, phantom);
    say("simulated full record (" + std::to_string(full.n_sensors) + " sensors x " + std::to_string(full.n_time) +
        " samples) in " + fmt(std::chrono::duration<double>(clock::now() - t0).count()) + " s");
    io::write_record((root / "record_full.patarr").string(), full);

    const auto opt = detail::recon_options(cfg);
    Field reference;
    if (cfg.reference == "phantom") {
        if (cfg.upsample != 1) fail(ErrorKind::parameter, "pipeline: a phantom reference needs upsample 1");
        reference = phantom;
    } else {
        t0 = clock::now();
        reference = reconstruct(full, Method::nufft, opt);
        say("reconstructed reference in " + fmt(std::chrono::duration<double>(clock::now() - t0).count()) + " s");
        io::write_field((root / "reference.patarr").string(), reference);
        write_images(root / "images", "reference", reference);
    }
    const std::string protocol = cfg.protocol.dump();

    json results = json::array();
    std::ostringstream csv;
    csv << "mask,layout,interval,sensors,method,weight_ratio,pixels,rho,tenenbaum,tenenbaum_normalized\n";
    for (const auto& entry : cfg.masks) {
        const std::vector<std::size_t> runs = entry.intervals.empty() ? std::vector<std::size_t>{0} : entry.intervals;
        for (std::size_t interval : runs) {
            std::string name = entry.name;
            if (entry.intervals.size() > 1) {
                char buf[16];
                std::snprintf(buf, sizeof buf, "_i%02zu", interval);
                name += buf;
            }
            const auto mask = detail::build_mask(cfg, entry, interval);
            io::write_mask_csv((root / "masks" / (name + ".csv")).string(), mask);
            const auto rec = detail::simulate_mask(cfg, phantom, &full, mask);

            t0 = clock::now();
            const Field image = reconstruct(rec, parse_method(entry.method), opt);
            const double secs = std::chrono::duration<double>(clock::now() - t0).count();
            if (cfg.write_volumes) io::write_field((root / "recon" / (name + ".patarr")).string(), image);
            write_images(root / "images", name, image);

            const json ev = json::parse(evaluate(image, reference, protocol));
            if (!ev.at("diameter_sweep").empty() || !ev.at("count_sweep").empty())
                io::write_text((root / "sweeps" / (name + ".csv")).string(), evaluate_csv(ev.dump()));

            json row;
            row["mask"] = name;
            row["layout"] = entry.type;
            row["interval"] = interval;
            row["sensors"] = mask.size();
            row["method"] = entry.method;
            row["weight_ratio"] = weight_ratio(mask);
            row["evaluation"] = ev;
            results.push_back(row);

            const json& roi = ev.at("roi");
            csv << name << ',' << entry.type << ',' << interval << ',' << mask.size() << ',' << entry.method << ','
                << fmt(weight_ratio(mask)) << ',' << roi.at("pixels").get<std::size_t>() << ','
                << fmt(roi.at("rho").get<double>()) << ',' << fmt(roi.at("tenenbaum").get<double>()) << ','
                << fmt(roi.at("tenenbaum_normalized").get<double>()) << '\n';
            say(name + ": " + std::to_string(mask.size()) + " sensors, rho " + fmt(roi.at("rho").get<double>()) +
                ", tenenbaum " + fmt(roi.at("tenenbaum").get<double>()) + ", " + fmt(secs) + " s");
        }
    }

    json report;
    report["schema_version"] = detail::schema_version;
    report["name"] = cfg.name;
    report["reference"] = cfg.reference;
    report["protocol"] = cfg.protocol;
    report["results"] = results;
    io::write_text((root / "report.json").string(), report.dump(2) + "\n");
    io::write_text((root / "report.csv").string(), csv.str());
}

}  // namespace pat::experiment
