#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "config.hpp"
#include "pat/metrics.hpp"

namespace pat::experiment {

namespace {

using detail::json;

// 2D view of a field: volumes are projected along depth.
Field as_image(const Field& f) {
    if (f.ndim() == 2) return f;
    if (f.ndim() != 3) fail(ErrorKind::precondition, "evaluate: images must be 2D or 3D");
    Field out;
    out.values = metrics::mip(f.values, 2);
    out.spacing = {f.spacing[0], f.spacing[1]};
    out.origin = {f.origin[0], f.origin[1]};
    return out;
}

// Reconstructions from records longer than the model's depth cover a deeper
// region; only the part overlapping the model is compared.
Field crop_depth(const Field& f, std::size_t depth) {
    const std::size_t nz = f.dims().back();
    if (nz == depth) return f;
    Field out = f;
    out.values.dims.back() = depth;
    out.values.data.resize(product(out.values.dims));
    const std::size_t lines = f.values.size() / nz;
    for (std::size_t l = 0; l < lines; ++l)
        std::copy_n(f.values.data.begin() + l * nz, depth, out.values.data.begin() + l * depth);
    return out;
}

struct Geometry {
    double row = 0.0, col = 0.0;  // disc center in pixels
    double pixel = 1.0;           // physical size of a pixel along axis 0
};

Geometry geometry(const Field& img, const json& disc) {
    Geometry g;
    g.pixel = img.spacing[0];
    if (disc.contains("center")) {
        const auto c = disc.at("center").get<std::vector<double>>();
        if (c.size() != 2) fail(ErrorKind::parameter, "evaluate: disc center needs two coordinates");
        g.row = (c[0] - img.origin[0]) / img.spacing[0];
        g.col = (c[1] - img.origin[1]) / img.spacing[1];
    } else {
        g.row = static_cast<double>(img.dims()[0]) / 2.0;
        g.col = static_cast<double>(img.dims()[1]) / 2.0;
    }
    return g;
}

// Scale so the largest magnitude inside the ROI is 1; sharpness is compared
// across reconstructions with different absolute gains.
RealArray normalized(const RealArray& img, const metrics::Mask& roi) {
    double peak = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i)
        if (roi[i]) peak = std::max(peak, std::abs(img[i]));
    RealArray out = img;
    if (peak > 0.0)
        for (double& v : out.data) v /= peak;
    return out;
}

json score(const RealArray& img, const RealArray& model, const metrics::Mask& roi) {
    const auto box = metrics::bounding_box(roi, img.dims);
    const RealArray scaled = normalized(img, roi);
    json r;
    r["pixels"] = metrics::mask_count(roi);
    r["rho"] = metrics::correlation(img, model, roi);
    r["bbox"] = {box.row, box.col, box.rows, box.cols};
    r["tenenbaum"] = metrics::tenenbaum(scaled, box);
    r["tenenbaum_normalized"] = metrics::tenenbaum_normalized(scaled, box);
    return r;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string evaluate(const Field& image, const Field& model, const std::string& protocol_json) {
    const json p = protocol_json.empty() ? json::object() : detail::parse(protocol_json, "protocol");
    if (image.ndim() != model.ndim()) fail(ErrorKind::precondition, "evaluate: image and model rank differ");
    Field cropped = image;
    if (image.dims().back() > model.dims().back()) cropped = crop_depth(image, model.dims().back());
    const Field a = as_image(cropped), b = as_image(model);
    if (a.dims() != b.dims()) fail(ErrorKind::precondition, "evaluate: image and model dims differ");

    const json disc = p.value("disc", json::object());
    const Geometry g = geometry(b, disc);
    const double full_diameter =
        2.0 * std::hypot(static_cast<double>(a.dims()[0]), static_cast<double>(a.dims()[1]));
    const double diameter = disc.contains("diameter") ? disc.at("diameter").get<double>() / g.pixel : full_diameter;
    const double threshold = p.value("threshold", 0.0);
    if (threshold < 0.0 || threshold > 1.0) fail(ErrorKind::parameter, "evaluate: threshold must be in [0, 1]");

    json report;
    const metrics::Disc base{g.row, g.col, diameter};
    report["roi"] = score(a.values, b.values, metrics::roi_by_threshold(b.values, base, threshold));

    json dsweep = json::array();
    if (p.contains("diameters"))
        for (double dm : p.at("diameters").get<std::vector<double>>()) {
            const metrics::Disc d{g.row, g.col, dm / g.pixel};
            json r = score(a.values, b.values, metrics::roi_by_threshold(b.values, d, threshold));
            r["diameter"] = dm;
            dsweep.push_back(r);
        }
    report["diameter_sweep"] = dsweep;

    json csweep = json::array();
    if (p.contains("counts"))
        for (std::size_t n : p.at("counts").get<std::vector<std::size_t>>()) {
            json r = score(a.values, b.values, metrics::roi_by_count(b.values, base, n));
            r["count"] = n;
            csweep.push_back(r);
        }
    report["count_sweep"] = csweep;
    return report.dump(2);
}

std::string evaluate_csv(const std::string& report_json) {
    const json r = detail::parse(report_json, "report");
    std::ostringstream out;
    out << "sweep,parameter,pixels,rho,tenenbaum,tenenbaum_normalized\n";
    auto row = [&](const std::string& sweep, const std::string& param, const json& e) {
        out << sweep << ',' << param << ',' << e.at("pixels").get<std::size_t>() << ',' << fmt(e.at("rho").get<double>())
            << ',' << fmt(e.at("tenenbaum").get<double>()) << ',' << fmt(e.at("tenenbaum_normalized").get<double>())
            << '\n';
    };
    row("roi", "", r.at("roi"));
    for (const auto& e : r.at("diameter_sweep")) row("diameter", fmt(e.at("diameter").get<double>()), e);
    for (const auto& e : r.at("count_sweep")) row("count", std::to_string(e.at("count").get<std::size_t>()), e);
    return out.str();
}

}  // namespace pat::experiment
