#include "pat/pat.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "pat/experiment.hpp"
#include "pat/forward.hpp"
#include "pat/io.hpp"
#include "pat/metrics.hpp"

struct pat_array {
    pat::Field field;
};
struct pat_record {
    pat::recon::SensorRecord rec;
};
struct pat_mask {
    pat::masks::SensorMask mask;
};

namespace {

thread_local std::string last_error;

pat_status status_of(pat::ErrorKind k) {
    switch (k) {
        case pat::ErrorKind::io:
            return PAT_ERR_IO;
        case pat::ErrorKind::numerical:
            return PAT_ERR_NUMERICAL;
        default:
            return PAT_ERR_VALIDATION;
    }
}

template <class Fn>
pat_status guard(Fn&& fn) {
    try {
        fn();
        return PAT_OK;
    } catch (const pat::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const nlohmann::json::exception& e) {
        last_error = std::string("invalid JSON: ") + e.what();
        return PAT_ERR_VALIDATION;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return PAT_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return PAT_ERR_INTERNAL;
    }
}

pat_status null_argument(const char* what) {
    last_error = std::string("null argument: ") + what;
    return PAT_ERR_ARGUMENT;
}

#define PAT_REQUIRE(p)                           \
    do {                                         \
        if (!(p)) return null_argument(#p);      \
    } while (0)

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* pat_version(void) { return "1.0.0"; }
const char* pat_last_error(void) { return last_error.c_str(); }
void pat_string_free(char* s) { std::free(s); }

pat_status pat_array_create(size_t ndim, const size_t* dims, const double* data, const double* spacing,
                            const double* origin, pat_array** out) {
    PAT_REQUIRE(dims);
    PAT_REQUIRE(out);
    return guard([&] {
        if (ndim == 0) pat::fail(pat::ErrorKind::parameter, "array: ndim must be positive");
        if (std::find(dims, dims + ndim, std::size_t{0}) != dims + ndim)
            pat::fail(pat::ErrorKind::parameter, "array: every dimension must be positive");
        auto a = std::make_unique<pat_array>();
        a->field.values = pat::RealArray(std::vector<std::size_t>(dims, dims + ndim));
        if (data) std::copy_n(data, a->field.values.size(), a->field.values.data.begin());
        a->field.spacing = spacing ? std::vector<double>(spacing, spacing + ndim) : std::vector<double>(ndim, 1.0);
        a->field.origin = origin ? std::vector<double>(origin, origin + ndim) : std::vector<double>(ndim, 0.0);
        *out = a.release();
    });
}

void pat_array_free(pat_array* a) { delete a; }
size_t pat_array_ndim(const pat_array* a) { return a ? a->field.ndim() : 0; }

pat_status pat_array_dims(const pat_array* a, size_t* dims) {
    PAT_REQUIRE(a);
    PAT_REQUIRE(dims);
    std::copy(a->field.dims().begin(), a->field.dims().end(), dims);
    return PAT_OK;
}

pat_status pat_array_spacing(const pat_array* a, double* spacing) {
    PAT_REQUIRE(a);
    PAT_REQUIRE(spacing);
    std::copy(a->field.spacing.begin(), a->field.spacing.end(), spacing);
    return PAT_OK;
}

pat_status pat_array_origin(const pat_array* a, double* origin) {
    PAT_REQUIRE(a);
    PAT_REQUIRE(origin);
    std::copy(a->field.origin.begin(), a->field.origin.end(), origin);
    return PAT_OK;
}

const double* pat_array_data(const pat_array* a) { return a ? a->field.values.data.data() : nullptr; }

pat_status pat_array_read(const char* path, pat_array** out) {
    PAT_REQUIRE(path);
    PAT_REQUIRE(out);
    return guard([&] {
        auto a = std::make_unique<pat_array>();
        a->field = pat::io::read_field(path);
        *out = a.release();
    });
}

pat_status pat_array_write(const pat_array* a, const char* path) {
    PAT_REQUIRE(a);
    PAT_REQUIRE(path);
    return guard([&] { pat::io::write_field(path, a->field); });
}

pat_status pat_array_mip(const pat_array* a, size_t axis, pat_array** out) {
    PAT_REQUIRE(a);
    PAT_REQUIRE(out);
    return guard([&] {
        if (axis >= a->field.ndim()) pat::fail(pat::ErrorKind::parameter, "mip: axis out of range");
        auto r = std::make_unique<pat_array>();
        r->field.values = pat::metrics::mip(a->field.values, axis);
        for (std::size_t k = 0; k < a->field.ndim(); ++k)
            if (k != axis) {
                r->field.spacing.push_back(a->field.spacing[k]);
                r->field.origin.push_back(a->field.origin[k]);
            }
        *out = r.release();
    });
}

pat_status pat_array_write_image(const pat_array* a, const char* path, const char* format) {
    PAT_REQUIRE(a);
    PAT_REQUIRE(path);
    return guard([&] {
        const pat::RealArray img =
            a->field.ndim() == 3 ? pat::metrics::mip(a->field.values, 2) : a->field.values;
        if (img.ndim() != 2) pat::fail(pat::ErrorKind::precondition, "image: need a 2D or 3D array");
        const std::string fmt = format ? format : "pgm";
        if (fmt == "pgm")
            pat::io::write_pgm(path, img);
        else if (fmt == "png")
            pat::io::write_png(path, img);
        else
            pat::fail(pat::ErrorKind::parameter, "image: format must be pgm or png");
    });
}

int pat_png_supported(void) { return pat::io::png_supported() ? 1 : 0; }

pat_status pat_record_read(const char* path, pat_record** out) {
    PAT_REQUIRE(path);
    PAT_REQUIRE(out);
    return guard([&] {
        auto r = std::make_unique<pat_record>();
        r->rec = pat::io::read_record(path);
        *out = r.release();
    });
}

pat_status pat_record_write(const pat_record* r, const char* path) {
    PAT_REQUIRE(r);
    PAT_REQUIRE(path);
    return guard([&] { pat::io::write_record(path, r->rec); });
}

void pat_record_free(pat_record* r) { delete r; }
size_t pat_record_sensors(const pat_record* r) { return r ? r->rec.n_sensors : 0; }
size_t pat_record_samples_per_sensor(const pat_record* r) { return r ? r->rec.n_time : 0; }
size_t pat_record_lateral_dims(const pat_record* r) { return r ? r->rec.lateral_dims : 0; }
double pat_record_dt(const pat_record* r) { return r ? r->rec.dt : 0.0; }
double pat_record_sound_speed(const pat_record* r) { return r ? r->rec.sound_speed : 0.0; }
const double* pat_record_samples(const pat_record* r) { return r ? r->rec.samples.data() : nullptr; }
const double* pat_record_positions(const pat_record* r) { return r ? r->rec.positions.data() : nullptr; }
const double* pat_record_weights(const pat_record* r) { return r ? r->rec.weights.data() : nullptr; }

pat_status pat_record_subsample(const pat_record* full, const pat_mask* mask, pat_record** out) {
    PAT_REQUIRE(full);
    PAT_REQUIRE(mask);
    PAT_REQUIRE(out);
    return guard([&] {
        if (mask->mask.lateral_dims != full->rec.lateral_dims)
            pat::fail(pat::ErrorKind::precondition, "subsample: mask and record dimensions differ");
        auto r = std::make_unique<pat_record>();
        r->rec = pat::forward::subsample(full->rec, mask->mask.positions, mask->mask.weights);
        *out = r.release();
    });
}

pat_status pat_record_add_noise(const pat_record* r, double snr_db, unsigned long long seed, pat_record** out) {
    PAT_REQUIRE(r);
    PAT_REQUIRE(out);
    return guard([&] {
        auto n = std::make_unique<pat_record>();
        n->rec = pat::forward::add_noise(r->rec, snr_db, seed);
        *out = n.release();
    });
}

pat_status pat_mask_create(const char* config_json, const char* mask_json, pat_mask** out) {
    PAT_REQUIRE(config_json);
    PAT_REQUIRE(mask_json);
    PAT_REQUIRE(out);
    return guard([&] {
        auto m = std::make_unique<pat_mask>();
        m->mask = pat::experiment::make_mask(config_json, mask_json);
        *out = m.release();
    });
}

pat_status pat_mask_read_csv(const char* path, pat_mask** out) {
    PAT_REQUIRE(path);
    PAT_REQUIRE(out);
    return guard([&] {
        auto m = std::make_unique<pat_mask>();
        m->mask = pat::io::read_mask_csv(path);
        *out = m.release();
    });
}

pat_status pat_mask_write_csv(const pat_mask* m, const char* path) {
    PAT_REQUIRE(m);
    PAT_REQUIRE(path);
    return guard([&] { pat::io::write_mask_csv(path, m->mask); });
}

void pat_mask_free(pat_mask* m) { delete m; }
size_t pat_mask_size(const pat_mask* m) { return m ? m->mask.size() : 0; }
size_t pat_mask_lateral_dims(const pat_mask* m) { return m ? m->mask.lateral_dims : 0; }
const double* pat_mask_positions(const pat_mask* m) { return m ? m->mask.positions.data() : nullptr; }
const double* pat_mask_weights(const pat_mask* m) { return m ? m->mask.weights.data() : nullptr; }

pat_status pat_mask_describe(const pat_mask* m, char** json) {
    PAT_REQUIRE(m);
    PAT_REQUIRE(json);
    return guard([&] {
        const auto& k = m->mask;
        nlohmann::json j;
        j["layout"] = k.layout;
        j["sensors"] = k.size();
        j["lateral_dims"] = k.lateral_dims;
        double sum = 0.0;
        for (double w : k.weights) sum += w;
        j["weight_sum"] = sum;
        if (!k.weights.empty()) {
            const auto [lo, hi] = std::minmax_element(k.weights.begin(), k.weights.end());
            j["weight_ratio"] = *lo > 0 ? *hi / *lo : 0.0;
        }
        if (!k.slice_counts.empty()) {
            j["slice_counts"] = k.slice_counts;
            j["slice_angles"] = k.slice_angles;
            j["unit_steradian"] = k.unit_steradian;
        }
        *json = dup_string(j.dump(2));
    });
}

pat_status pat_mask_preview(const pat_mask* m, size_t grid, double pitch, pat_array** out) {
    PAT_REQUIRE(m);
    PAT_REQUIRE(out);
    return guard([&] {
        if (grid < 2 || !(pitch > 0.0)) pat::fail(pat::ErrorKind::parameter, "preview: bad grid or pitch");
        const auto& k = m->mask;
        // 2D masks become a strip so the preview is still an image.
        const std::size_t rows = k.lateral_dims == 1 ? 16 : grid;
        auto a = std::make_unique<pat_array>();
        a->field.values = pat::RealArray({grid, rows});
        a->field.spacing = {pitch, pitch};
        a->field.origin = {-static_cast<double>(grid / 2) * pitch, 0.0};
        auto node = [&](double x) {
            const long long i = std::llround(x / pitch) + static_cast<long long>(grid / 2);
            return std::clamp<long long>(i, 0, static_cast<long long>(grid) - 1);
        };
        for (std::size_t s = 0; s < k.size(); ++s) {
            const auto i = static_cast<std::size_t>(node(k.positions[s * k.lateral_dims]));
            if (k.lateral_dims == 1) {
                for (std::size_t r = 0; r < rows; ++r) a->field.values[i * rows + r] = k.weights[s];
            } else {
                const auto j = static_cast<std::size_t>(node(k.positions[s * 2 + 1]));
                a->field.values[i * rows + j] = k.weights[s];
            }
        }
        *out = a.release();
    });
}

pat_status pat_phantom(const char* config_json, pat_array** out) {
    PAT_REQUIRE(config_json);
    PAT_REQUIRE(out);
    return guard([&] {
        auto a = std::make_unique<pat_array>();
        a->field = pat::experiment::make_phantom(config_json);
        *out = a.release();
    });
}

pat_status pat_simulate(const char* config_json, const pat_mask* mask, pat_record** out) {
    PAT_REQUIRE(config_json);
    PAT_REQUIRE(out);
    return guard([&] {
        auto r = std::make_unique<pat_record>();
        r->rec = pat::experiment::simulate(config_json, mask ? &mask->mask : nullptr);
        *out = r.release();
    });
}

pat_status pat_reconstruct(const pat_record* r, const char* method, const char* options_json, pat_array** out,
                           double* seconds) {
    PAT_REQUIRE(r);
    PAT_REQUIRE(out);
    return guard([&] {
        pat::recon::Options opt;
        if (options_json && *options_json) {
            const auto j = nlohmann::json::parse(options_json);
            opt.upsample = j.value("upsample", 1);
            if (j.contains("window")) {
                const auto& w = j.at("window");
                opt.window.c = w.value("c", opt.window.c);
                opt.window.K = w.value("K", opt.window.K);
                opt.window.alpha = w.value("alpha", opt.window.alpha);
                opt.window.beta = w.value("beta", opt.window.beta);
            }
        }
        const auto m = pat::experiment::parse_method(method ? method : "nufft");
        auto a = std::make_unique<pat_array>();
        const auto t0 = std::chrono::steady_clock::now();
        a->field = pat::experiment::reconstruct(r->rec, m, opt);
        if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *out = a.release();
    });
}

pat_status pat_evaluate(const pat_array* image, const pat_array* model, const char* protocol_json,
                        char** report_json) {
    PAT_REQUIRE(image);
    PAT_REQUIRE(model);
    PAT_REQUIRE(report_json);
    return guard([&] {
        *report_json = dup_string(pat::experiment::evaluate(image->field, model->field, protocol_json ? protocol_json : ""));
    });
}

pat_status pat_evaluate_csv(const char* report_json, char** csv) {
    PAT_REQUIRE(report_json);
    PAT_REQUIRE(csv);
    return guard([&] { *csv = dup_string(pat::experiment::evaluate_csv(report_json)); });
}

pat_status pat_run_pipeline(const char* config_json, const char* out_dir, pat_log_fn log, void* user) {
    PAT_REQUIRE(config_json);
    PAT_REQUIRE(out_dir);
    return guard([&] {
        pat::experiment::Log fn;
        if (log) fn = [log, user](const std::string& s) { log(s.c_str(), user); };
        pat::experiment::run_pipeline(config_json, out_dir, fn);
    });
}

}  // extern "C"
